//! Textual interval and box literals.
//!
//! An interval literal is `[lo, hi]` where each endpoint is `n`, `n/d`, a
//! decimal such as `-1.25e-3` (converted exactly), or `-inf`/`inf`. `[]` is
//! the empty interval. A box literal is a bracketed, comma-separated list of
//! interval literals: `[[0, 1], [1/3, 2/3]]`.

use super::{Ext, Interval, IntervalError};
use crate::rational::Rational;

fn parse_endpoint(s: &str) -> Result<Ext, IntervalError> {
    match s.trim() {
        "-inf" | "-infinity" => Ok(Ext::NegInf),
        "inf" | "+inf" | "infinity" => Ok(Ext::PosInf),
        t => t.parse::<Rational>().map(Ext::Fin).map_err(|e| IntervalError::Parse(e.to_string())),
    }
}

/// Parses an interval literal such as `[1/3, 0.5]` or `[-inf, 2]`.
pub fn parse_interval(s: &str) -> Result<Interval, IntervalError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| IntervalError::Parse(format!("expected `[lo, hi]`, found `{t}`")))?;
    if inner.trim().is_empty() {
        return Ok(Interval::empty());
    }
    let (a, b) = inner.split_once(',').ok_or_else(|| IntervalError::Parse(format!("missing comma in `{t}`")))?;
    let lo = parse_endpoint(a)?;
    let hi = parse_endpoint(b)?;
    Interval::new(lo, hi).ok_or_else(|| IntervalError::Parse(format!("invalid bounds in `{t}`")))
}

/// Parses a box literal `[[a, b], [c, d], ...]`.
pub fn parse_box(s: &str) -> Result<Vec<Interval>, IntervalError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| IntervalError::Parse(format!("expected a bracketed box, found `{t}`")))?;
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let start = rest.find('[').ok_or_else(|| IntervalError::Parse(format!("expected `[` in `{rest}`")))?;
        if !rest[..start].trim().trim_matches(',').trim().is_empty() {
            return Err(IntervalError::Parse(format!("unexpected text `{}`", &rest[..start])));
        }
        let end = rest[start..].find(']').ok_or_else(|| IntervalError::Parse("unterminated interval".into()))? + start;
        out.push(parse_interval(&rest[start..=end])?);
        rest = rest[end + 1..].trim_start().trim_start_matches(',').trim();
    }
    Ok(out)
}

/// Formats a box as a literal accepted by [`parse_box`].
pub fn format_box(b: &[Interval]) -> String {
    let parts: Vec<String> = b.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let x = parse_interval("[1/3, 0.5]").unwrap();
        assert_eq!(x.to_string(), "[1/3, 1/2]");
        assert_eq!(parse_interval(&x.to_string()).unwrap(), x);
        let y = parse_interval("[-inf, 2]").unwrap();
        assert_eq!(y.to_string(), "[-inf, 2]");
        assert!(parse_interval("[]").unwrap().is_empty());
        assert!(parse_interval("[2, 1]").is_err());
        assert!(parse_interval("1, 2").is_err());
    }

    #[test]
    fn boxes() {
        let b = parse_box("[[0, 1], [1/3, 2/3], [-1.5, inf]]").unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(parse_box(&format_box(&b)).unwrap(), b);
        assert_eq!(parse_box("[]").unwrap().len(), 0);
        assert!(parse_box("[[0, 1] x [1, 2]]").is_err());
    }
}
