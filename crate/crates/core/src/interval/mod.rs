//! Exact-rational interval arithmetic with outward decimal rounding.
//!
//! An [`Interval`] is either empty or a closed interval whose endpoints are
//! exact rationals or infinities. Every operation computes its result
//! exactly (or as a certified enclosure, for transcendental functions) and
//! then rounds each endpoint outward to `D` significant decimal digits, as
//! described by a [`RoundingPolicy`]. Rounding never shrinks an interval, so
//! every result contains the true range of the operation over its inputs.

mod elementary;
pub mod fixed;
mod literal;

use std::cmp::Ordering;
use std::fmt;

use crate::rational::{Direction, Rational};

pub use elementary::{
    arccos, arccot, arcsin, arctan, cos, cot, exp, exp_base, ln, log_base, pow_rat, sin, tan, PiEnclosure,
};
pub use literal::{format_box, parse_box, parse_interval};

/// Errors raised by interval operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntervalError {
    /// An even root of a strictly negative interval with truncation off.
    #[error("negative radicand")]
    NegativeRadicand,
    /// The argument lies outside the function's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A coordinate index is out of range.
    #[error("invalid index {index} for {len} coordinates")]
    InvalidIndex { index: usize, len: usize },
    /// A literal could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

/// An extended rational: a finite value or ±∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ext {
    NegInf,
    Fin(Rational),
    PosInf,
}

impl Ext {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Ext::Fin(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    fn rank(&self) -> i8 {
        match self {
            Ext::NegInf => -1,
            Ext::Fin(_) => 0,
            Ext::PosInf => 1,
        }
    }

    /// Sign of the value (−1, 0, 1).
    pub fn signum(&self) -> i32 {
        match self {
            Ext::NegInf => -1,
            Ext::Fin(r) => r.signum(),
            Ext::PosInf => 1,
        }
    }

    fn neg(&self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::Fin(r) => Ext::Fin(-r),
            Ext::PosInf => Ext::NegInf,
        }
    }

    fn round(&self, digits: u32, dir: Direction) -> Ext {
        match self {
            Ext::Fin(r) => Ext::Fin(r.round_digits(digits, dir)),
            other => other.clone(),
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl From<Rational> for Ext {
    fn from(r: Rational) -> Self {
        Ext::Fin(r)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Fin(r) => write!(f, "{r}"),
            Ext::PosInf => write!(f, "inf"),
        }
    }
}

/// Decimal working precision and radicand handling for interval operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundingPolicy {
    /// Significant decimal digits kept by outward rounding.
    pub digits: u32,
    /// Clip negative parts of even-root bases to zero instead of failing.
    /// Only meaningful for radicands known to be nonnegative.
    pub truncate_negative_base: bool,
}

impl Default for RoundingPolicy {
    fn default() -> Self {
        RoundingPolicy { digits: 10, truncate_negative_base: false }
    }
}

impl RoundingPolicy {
    /// Policy with `digits` significant digits and truncation off.
    pub fn with_digits(digits: u32) -> Self {
        RoundingPolicy { digits, ..Self::default() }
    }

    /// The same policy with radicand truncation switched on.
    pub fn truncating(self) -> Self {
        RoundingPolicy { truncate_negative_base: true, ..self }
    }

    /// Bits of absolute precision used for transcendental kernels.
    pub(crate) fn kernel_bits(&self) -> u32 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }
}

/// A closed interval with exact rational (or infinite) endpoints, or the
/// empty set.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    bounds: Option<(Ext, Ext)>,
}

impl Interval {
    /// The empty interval.
    pub fn empty() -> Self {
        Interval { bounds: None }
    }

    /// `(−∞, +∞)`.
    pub fn entire() -> Self {
        Interval { bounds: Some((Ext::NegInf, Ext::PosInf)) }
    }

    /// `[lo, hi]` from extended endpoints; `None` if `lo > hi` or an endpoint
    /// is an infinity on the wrong side.
    pub fn new(lo: Ext, hi: Ext) -> Option<Self> {
        if lo > hi || lo == Ext::PosInf || hi == Ext::NegInf {
            return None;
        }
        Some(Interval { bounds: Some((lo, hi)) })
    }

    /// `[lo, hi]` for finite rationals. Panics if `lo > hi`.
    pub fn closed(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval lower bound {lo} exceeds upper bound {hi}");
        Interval { bounds: Some((Ext::Fin(lo), Ext::Fin(hi))) }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: Rational) -> Self {
        Interval { bounds: Some((Ext::Fin(x.clone()), Ext::Fin(x))) }
    }

    /// `[a, b]` from integers.
    pub fn ints(a: i64, b: i64) -> Self {
        Self::closed(Rational::from_int(a), Rational::from_int(b))
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn bounds(&self) -> Option<(&Ext, &Ext)> {
        self.bounds.as_ref().map(|(a, b)| (a, b))
    }

    /// Lower endpoint; `None` when empty.
    pub fn lo(&self) -> Option<&Ext> {
        self.bounds.as_ref().map(|b| &b.0)
    }

    /// Upper endpoint; `None` when empty.
    pub fn hi(&self) -> Option<&Ext> {
        self.bounds.as_ref().map(|b| &b.1)
    }

    /// Both endpoints when they are finite.
    pub fn finite_bounds(&self) -> Option<(&Rational, &Rational)> {
        match &self.bounds {
            Some((Ext::Fin(a), Ext::Fin(b))) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.finite_bounds().is_some()
    }

    /// True when `x` lies in the interval.
    pub fn contains_value(&self, x: &Rational) -> bool {
        match &self.bounds {
            None => false,
            Some((lo, hi)) => {
                let x = Ext::Fin(x.clone());
                *lo <= x && x <= *hi
            }
        }
    }

    /// True when `inner ⊆ self` (the empty set is contained in everything).
    pub fn contains(&self, inner: &Interval) -> bool {
        match (&self.bounds, &inner.bounds) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some((a, b)), Some((c, d))) => a <= c && d <= b,
        }
    }

    /// True when `0` is in the interval.
    pub fn contains_zero(&self) -> bool {
        self.contains_value(&Rational::zero())
    }

    /// Strictly positive lower bound.
    pub fn is_positive(&self) -> bool {
        matches!(self.lo(), Some(l) if l.signum() > 0)
    }

    /// Strictly negative upper bound.
    pub fn is_negative(&self) -> bool {
        matches!(self.hi(), Some(h) if h.signum() < 0)
    }

    /// Intersection (possibly empty).
    pub fn intersect(&self, other: &Interval) -> Interval {
        match (&self.bounds, &other.bounds) {
            (Some((a, b)), Some((c, d))) => {
                let lo = a.max(c).clone();
                let hi = b.min(d).clone();
                Interval::new(lo, hi).unwrap_or_else(Interval::empty)
            }
            _ => Interval::empty(),
        }
    }

    /// True when the intervals share no point.
    pub fn is_disjoint(&self, other: &Interval) -> bool {
        self.intersect(other).is_empty()
    }

    /// Exact negation.
    pub fn neg(&self) -> Interval {
        match &self.bounds {
            None => Interval::empty(),
            Some((a, b)) => Interval { bounds: Some((b.neg(), a.neg())) },
        }
    }

    /// Exact midpoint of a finite interval.
    pub fn midpoint(&self) -> Option<Rational> {
        self.finite_bounds().map(|(a, b)| Rational::midpoint(a, b))
    }

    /// Width `hi − lo` (`+∞` for unbounded intervals, `0` for empty).
    pub fn width(&self) -> Ext {
        match &self.bounds {
            None => Ext::Fin(Rational::zero()),
            Some((Ext::Fin(a), Ext::Fin(b))) => Ext::Fin(b - a),
            Some(_) => Ext::PosInf,
        }
    }

    /// Nearest-`f64` endpoints for display and oracles.
    pub fn to_f64_pair(&self) -> Option<(f64, f64)> {
        let cv = |e: &Ext| match e {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::Fin(r) => r.to_f64(),
            Ext::PosInf => f64::INFINITY,
        };
        self.bounds().map(|(a, b)| (cv(a), cv(b)))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.bounds {
            None => write!(f, "[]"),
            Some((a, b)) => write!(f, "[{a}, {b}]"),
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Rounds both endpoints outward to `policy.digits` significant digits.
pub fn round_out(x: &Interval, policy: &RoundingPolicy) -> Interval {
    match &x.bounds {
        None => Interval::empty(),
        Some((a, b)) => {
            Interval { bounds: Some((a.round(policy.digits, Direction::Down), b.round(policy.digits, Direction::Up))) }
        }
    }
}

fn add_ext(a: &Ext, b: &Ext) -> Ext {
    match (a, b) {
        (Ext::Fin(x), Ext::Fin(y)) => Ext::Fin(x + y),
        (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
        _ => Ext::PosInf,
    }
}

/// Exact sum of the terms (no rounding). Lower endpoints can never be +∞ and
/// upper endpoints never −∞, so the infinite cases are unambiguous.
pub(crate) fn add_exact(terms: &[&Interval]) -> Interval {
    let mut lo = Ext::Fin(Rational::zero());
    let mut hi = Ext::Fin(Rational::zero());
    for t in terms {
        match &t.bounds {
            None => return Interval::empty(),
            Some((a, b)) => {
                lo = add_ext(&lo, a);
                hi = add_ext(&hi, b);
            }
        }
    }
    Interval { bounds: Some((lo, hi)) }
}

/// Sum of intervals, computed exactly and rounded outward once.
pub fn add(terms: &[Interval], policy: &RoundingPolicy) -> Interval {
    let refs: Vec<&Interval> = terms.iter().collect();
    round_out(&add_exact(&refs), policy)
}

/// `a − b`, rounded outward.
pub fn sub(a: &Interval, b: &Interval, policy: &RoundingPolicy) -> Interval {
    round_out(&add_exact(&[a, &b.neg()]), policy)
}

/// Product of two extended endpoints; `None` for the undefined 0·∞.
fn mul_ext(a: &Ext, b: &Ext) -> Option<Ext> {
    match (a, b) {
        (Ext::Fin(x), Ext::Fin(y)) => Some(Ext::Fin(x * y)),
        _ => {
            let s = a.signum() * b.signum();
            match s.cmp(&0) {
                Ordering::Less => Some(Ext::NegInf),
                Ordering::Greater => Some(Ext::PosInf),
                Ordering::Equal => None,
            }
        }
    }
}

/// Exact product of two intervals by sign-case analysis. A 0·∞ endpoint
/// product resolves conservatively to the entire line.
pub(crate) fn mul2_exact(x: &Interval, y: &Interval) -> Interval {
    let ((a, b), (c, d)) = match (&x.bounds, &y.bounds) {
        (Some(p), Some(q)) => (p, q),
        _ => return Interval::empty(),
    };
    let m = |p: &Ext, q: &Ext| mul_ext(p, q);
    let sa = a.signum() >= 0; // x ≥ 0
    let sb = b.signum() <= 0; // x ≤ 0
    let sc = c.signum() >= 0;
    let sd = d.signum() <= 0;
    let r = if sa {
        if sc {
            (m(a, c), m(b, d))
        } else if sd {
            (m(b, c), m(a, d))
        } else {
            (m(b, c), m(b, d))
        }
    } else if sb {
        if sc {
            (m(a, d), m(b, c))
        } else if sd {
            (m(b, d), m(a, c))
        } else {
            (m(a, d), m(a, c))
        }
    } else if sc {
        (m(a, d), m(b, d))
    } else if sd {
        (m(b, c), m(a, c))
    } else {
        let lo = match (m(a, d), m(b, c)) {
            (Some(p), Some(q)) => Some(p.min(q)),
            _ => None,
        };
        let hi = match (m(a, c), m(b, d)) {
            (Some(p), Some(q)) => Some(p.max(q)),
            _ => None,
        };
        (lo, hi)
    };
    match r {
        (Some(lo), Some(hi)) => Interval { bounds: Some((lo, hi)) },
        _ => Interval::entire(),
    }
}

/// Product of intervals, rounded outward. Partial products of three or
/// more factors are rounded outward to eight guard digits beyond the policy,
/// which keeps them in the compact decimal representation.
pub fn mul(factors: &[Interval], policy: &RoundingPolicy) -> Interval {
    let guard = RoundingPolicy { digits: (policy.digits + 8).min(36), ..*policy };
    let mut acc = Interval::point(Rational::one());
    for (k, f) in factors.iter().enumerate() {
        acc = mul2_exact(&acc, f);
        if acc.is_empty() {
            return acc;
        }
        if k >= 1 && k + 1 < factors.len() {
            acc = round_out(&acc, &guard);
        }
    }
    round_out(&acc, policy)
}

/// Interval hull of a list (empty members are ignored).
pub fn hull(xs: &[Interval]) -> Interval {
    let mut out: Option<(Ext, Ext)> = None;
    for x in xs {
        if let Some((a, b)) = &x.bounds {
            out = Some(match out {
                None => (a.clone(), b.clone()),
                Some((lo, hi)) => (lo.min(a.clone()), hi.max(b.clone())),
            });
        }
    }
    Interval { bounds: out }
}

/// Width of an interval; see [`Interval::width`].
pub fn width(x: &Interval) -> Ext {
    x.width()
}

/// Index (0-based) of the widest coordinate. Ties go to the highest index,
/// the last element of a stable ascending sort by width. `None` for an empty
/// list.
pub fn widest_dim(xs: &[Interval]) -> Option<usize> {
    let mut best: Option<(usize, Ext)> = None;
    for (i, x) in xs.iter().enumerate() {
        let w = x.width();
        match &best {
            Some((_, bw)) if w < *bw => {}
            _ => best = Some((i, w)),
        }
    }
    best.map(|(i, _)| i)
}

/// True when every coordinate of `inner` lies in the matching coordinate of
/// `outer`.
pub fn contains_box(outer: &[Interval], inner: &[Interval]) -> bool {
    outer.len() == inner.len() && outer.iter().zip(inner).all(|(o, i)| o.contains(i))
}

/// True when every coordinate of `point` lies in `outer`.
pub fn contains_point(outer: &[Interval], point: &[Rational]) -> bool {
    outer.len() == point.len() && outer.iter().zip(point).all(|(o, p)| o.contains_value(p))
}

/// `a + i·(b − a)/parts`, exactly.
fn grid_point(a: &Rational, b: &Rational, i: usize, parts: usize) -> Rational {
    if i == 0 {
        return a.clone();
    }
    if i == parts {
        return b.clone();
    }
    let w = b - a;
    let frac = Rational::ratio(i as i64, parts as i64);
    a + &(&w * &frac)
}

/// Splits a box into equal-width pieces.
///
/// With `dim = Some(d)` (0-based) only coordinate `d` is split into `parts`
/// pieces, in increasing order. With `dim = None` the full grid of
/// `parts^n` boxes is produced; box number `m` (0-based) takes piece
/// `digit_k(m)` in coordinate `k`, where the digits are base-`parts` with the
/// least significant digit belonging to the first coordinate.
pub fn subdivide(xs: &[Interval], parts: usize, dim: Option<usize>) -> Result<Vec<Vec<Interval>>, IntervalError> {
    if parts == 0 {
        return Err(IntervalError::InvalidArgument("parts must be at least 1".into()));
    }
    let mut ends = Vec::with_capacity(xs.len());
    for x in xs {
        match x.finite_bounds() {
            Some((a, b)) => ends.push((a.clone(), b.clone())),
            None => return Err(IntervalError::InvalidArgument("cannot subdivide an unbounded box".into())),
        }
    }
    let piece = |k: usize, i: usize| {
        let (a, b) = &ends[k];
        Interval::closed(grid_point(a, b, i, parts), grid_point(a, b, i + 1, parts))
    };
    match dim {
        Some(d) => {
            if d >= xs.len() {
                return Err(IntervalError::InvalidIndex { index: d, len: xs.len() });
            }
            Ok((0..parts)
                .map(|i| {
                    let mut b = xs.to_vec();
                    b[d] = piece(d, i);
                    b
                })
                .collect())
        }
        None => {
            let n = xs.len();
            let pieces: Vec<Vec<Interval>> = (0..n).map(|k| (0..parts).map(|i| piece(k, i)).collect()).collect();
            let total =
                parts.checked_pow(n as u32).ok_or_else(|| IntervalError::InvalidArgument("too many pieces".into()))?;
            Ok((0..total)
                .map(|mut m| {
                    (0..n)
                        .map(|k| {
                            let digit = m % parts;
                            m /= parts;
                            pieces[k][digit].clone()
                        })
                        .collect()
                })
                .collect())
        }
    }
}
