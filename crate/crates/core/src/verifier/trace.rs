//! Proof traces: the event stream recorded by the certifier, its text file
//! format, and replay.
//!
//! A trace is a pre-order encoding of the subdivision tree of one leaf box.
//! A split on coordinate `d` is followed by the streams of its lower and
//! upper halves and closed by `OK` (both halves certified) or `FAIL`.
//! Terminal boxes record the method that certified them (`M<code>`), the
//! bipyramid (`B`) or pyramid (`P`) exclusion box, or `U` for a box that
//! became too small without being certified.

use std::fmt;
use std::str::FromStr;

use crate::interval::{format_box, parse_box, subdivide, Interval};
use crate::model::Method;
use crate::rational::Rational;

use super::{DomainPath, VerifyError};

/// Magic first line of a trace file.
pub const TRACE_HEADER: &str = "sphere-certify-trace v1";

/// One token of a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Event {
    /// Bisection of coordinate `d` (1-based).
    Split(u8),
    /// The box was certified by a method.
    Success(Method),
    /// The box lies in the bipyramid exclusion box.
    Bipyramid,
    /// The box lies in the pyramid exclusion box.
    Pyramid,
    /// Both halves of the innermost open split were certified.
    SubtreeOk,
    /// Some box below the innermost open split was not certified.
    SubtreeFail,
    /// The box was too small to split further and was not certified.
    TooSmall,
}

impl Event {
    /// The numeric code used by the reference encoding: the split dimension,
    /// the method code, or `−1` (bipyramid), `0` (pyramid), `−2` (subtree
    /// certified), `−3` (subtree failed), `−4` (too small).
    pub fn code(self) -> i32 {
        match self {
            Event::Split(d) => i32::from(d),
            Event::Success(m) => i32::from(m.code()),
            Event::Bipyramid => -1,
            Event::Pyramid => 0,
            Event::SubtreeOk => -2,
            Event::SubtreeFail => -3,
            Event::TooSmall => -4,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Split(d) => write!(f, "S{d}"),
            Event::Success(m) => write!(f, "M{}", m.code()),
            Event::Bipyramid => f.write_str("B"),
            Event::Pyramid => f.write_str("P"),
            Event::SubtreeOk => f.write_str("OK"),
            Event::SubtreeFail => f.write_str("FAIL"),
            Event::TooSmall => f.write_str("U"),
        }
    }
}

impl FromStr for Event {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Event, VerifyError> {
        let bad = || VerifyError::Trace(format!("bad trace token `{s}`"));
        match s {
            "B" => Ok(Event::Bipyramid),
            "P" => Ok(Event::Pyramid),
            "OK" => Ok(Event::SubtreeOk),
            "FAIL" => Ok(Event::SubtreeFail),
            "U" => Ok(Event::TooSmall),
            _ => {
                if let Some(d) = s.strip_prefix('S') {
                    let d: u8 = d.parse().map_err(|_| bad())?;
                    if (1..=7).contains(&d) {
                        return Ok(Event::Split(d));
                    }
                } else if let Some(k) = s.strip_prefix('M') {
                    let k: u8 = k.parse().map_err(|_| bad())?;
                    if let Some(m) = Method::from_code(k) {
                        return Ok(Event::Success(m));
                    }
                }
                Err(bad())
            }
        }
    }
}

/// How a terminal box of the subdivision tree was settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Method(Method),
    Bipyramid,
    Pyramid,
    TooSmall,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Method(m) => write!(f, "method {m}"),
            Outcome::Bipyramid => f.write_str("bipyramid exclusion box, radius η = π/377"),
            Outcome::Pyramid => f.write_str("pyramid exclusion box, radius ζ = π/791"),
            Outcome::TooSmall => f.write_str("too small to subdivide, not certified"),
        }
    }
}

/// The subdivision tree decoded from an event stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceTree {
    Terminal(Outcome),
    /// Bisection of coordinate `dim` (0-based) and whether both halves were
    /// certified.
    Split {
        dim: usize,
        ok: bool,
        lower: Box<TraceTree>,
        upper: Box<TraceTree>,
    },
}

impl TraceTree {
    /// Decodes a complete pre-order event stream.
    pub fn parse(events: &[Event]) -> Result<TraceTree, VerifyError> {
        let mut pos = 0;
        let tree = parse_node(events, &mut pos)?;
        if pos != events.len() {
            return Err(VerifyError::Trace(format!("{} trailing events", events.len() - pos)));
        }
        Ok(tree)
    }

    /// Whether the whole box was certified.
    pub fn is_certified(&self) -> bool {
        match self {
            TraceTree::Terminal(o) => *o != Outcome::TooSmall,
            TraceTree::Split { ok, .. } => *ok,
        }
    }

    /// Number of bisection levels.
    pub fn depth(&self) -> usize {
        match self {
            TraceTree::Terminal(_) => 0,
            TraceTree::Split { lower, upper, .. } => 1 + lower.depth().max(upper.depth()),
        }
    }

    /// The terminal boxes of the tree over `root`, in pre-order, with their
    /// outcomes.
    pub fn terminal_boxes(&self, root: &[Interval]) -> Result<Vec<(Vec<Interval>, Outcome)>, VerifyError> {
        let mut out = Vec::new();
        self.collect(root.to_vec(), &mut out)?;
        Ok(out)
    }

    fn collect(&self, bx: Vec<Interval>, out: &mut Vec<(Vec<Interval>, Outcome)>) -> Result<(), VerifyError> {
        match self {
            TraceTree::Terminal(o) => out.push((bx, *o)),
            TraceTree::Split { dim, lower, upper, .. } => {
                let [lo, hi] = halves(&bx, *dim)?;
                lower.collect(lo, out)?;
                upper.collect(hi, out)?;
            }
        }
        Ok(())
    }
}

fn parse_node(events: &[Event], pos: &mut usize) -> Result<TraceTree, VerifyError> {
    let Some(&e) = events.get(*pos) else {
        return Err(VerifyError::Trace("unexpected end of trace".into()));
    };
    *pos += 1;
    match e {
        Event::Success(m) => Ok(TraceTree::Terminal(Outcome::Method(m))),
        Event::Bipyramid => Ok(TraceTree::Terminal(Outcome::Bipyramid)),
        Event::Pyramid => Ok(TraceTree::Terminal(Outcome::Pyramid)),
        Event::TooSmall => Ok(TraceTree::Terminal(Outcome::TooSmall)),
        Event::SubtreeOk | Event::SubtreeFail => {
            Err(VerifyError::Trace(format!("unmatched `{e}` at position {}", *pos - 1)))
        }
        Event::Split(d) => {
            let lower = parse_node(events, pos)?;
            let upper = parse_node(events, pos)?;
            let close = events.get(*pos).copied();
            *pos += 1;
            let ok = match close {
                Some(Event::SubtreeOk) => true,
                Some(Event::SubtreeFail) => false,
                _ => return Err(VerifyError::Trace(format!("split at dimension {d} is not closed"))),
            };
            if ok != (lower.is_certified() && upper.is_certified()) {
                return Err(VerifyError::Trace(format!("inconsistent subtree result for split on dimension {d}")));
            }
            Ok(TraceTree::Split { dim: usize::from(d) - 1, ok, lower: Box::new(lower), upper: Box::new(upper) })
        }
    }
}

/// The two halves of `bx` along `dim`.
pub(super) fn halves(bx: &[Interval], dim: usize) -> Result<[Vec<Interval>; 2], VerifyError> {
    let mut parts = subdivide(bx, 2, Some(dim)).map_err(|e| VerifyError::Trace(e.to_string()))?;
    let upper = parts.pop().expect("two halves");
    let lower = parts.pop().expect("two halves");
    Ok([lower, upper])
}

/// The record of certifying one leaf box.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofTrace {
    /// The leaf.
    pub path: DomainPath,
    /// Width threshold below which boxes are not split.
    pub eps: Rational,
    /// Method order.
    pub methods: Vec<Method>,
    /// Top-level subdivision parts per coordinate.
    pub parts: usize,
    /// Wall-clock seconds spent (informational).
    pub time_s: f64,
    /// The pre-order event stream.
    pub events: Vec<Event>,
    /// Boxes that could not be certified.
    pub unchecked: Vec<Vec<Interval>>,
}

impl ProofTrace {
    /// Whether the leaf is certified: the stream is well formed, its root is
    /// certified, and no box was left unchecked.
    pub fn is_certified(&self) -> bool {
        self.unchecked.is_empty() && TraceTree::parse(&self.events).is_ok_and(|t| t.is_certified())
    }

    /// Same events and unchecked boxes (timing is ignored).
    pub fn same_proof(&self, other: &ProofTrace) -> bool {
        self.path == other.path
            && self.eps == other.eps
            && self.methods == other.methods
            && self.parts == other.parts
            && self.events == other.events
            && self.unchecked == other.unchecked
    }

    /// The trace file text.
    pub fn to_text(&self) -> String {
        let methods: Vec<String> = self.methods.iter().map(|m| m.code().to_string()).collect();
        let events: Vec<String> = self.events.iter().map(Event::to_string).collect();
        let mut s = format!(
            "{TRACE_HEADER}\ndomain: {}\nconfig: eps={} methods={} parts={}\ntime_s: {:.3}\ntrace: {}\nunchecked: {}\n",
            self.path,
            self.eps,
            methods.join(","),
            self.parts,
            self.time_s,
            events.join(" "),
            self.unchecked.len()
        );
        for b in &self.unchecked {
            s.push_str(&format_box(b));
            s.push('\n');
        }
        s
    }

    /// Parses a trace file.
    pub fn parse(text: &str) -> Result<ProofTrace, VerifyError> {
        let bad = |what: &str| VerifyError::Trace(format!("malformed trace: {what}"));
        let mut lines = text.lines();
        if lines.next() != Some(TRACE_HEADER) {
            return Err(bad("missing header"));
        }
        let field = |line: Option<&str>, key: &str| -> Result<String, VerifyError> {
            line.and_then(|l| l.strip_prefix(key))
                .map(|s| s.trim().to_string())
                .ok_or_else(|| bad(&format!("expected `{key}`")))
        };
        let path: DomainPath = field(lines.next(), "domain:")?.parse()?;
        let config = field(lines.next(), "config:")?;
        let mut eps = None;
        let mut methods = None;
        let mut parts = None;
        for kv in config.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("config entry"))?;
            match k {
                "eps" => eps = Some(v.parse::<Rational>().map_err(|_| bad("eps"))?),
                "methods" => {
                    methods = Some(
                        v.split(',')
                            .filter(|s| !s.is_empty())
                            .map(|c| c.parse::<u8>().ok().and_then(Method::from_code).ok_or_else(|| bad("method code")))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                "parts" => parts = Some(v.parse::<usize>().map_err(|_| bad("parts"))?),
                _ => return Err(bad("unknown config key")),
            }
        }
        let time_s: f64 = field(lines.next(), "time_s:")?.parse().map_err(|_| bad("time_s"))?;
        let events =
            field(lines.next(), "trace:")?.split_whitespace().map(str::parse).collect::<Result<Vec<Event>, _>>()?;
        let n: usize = field(lines.next(), "unchecked:")?.parse().map_err(|_| bad("unchecked count"))?;
        let mut unchecked = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.next().ok_or_else(|| bad("missing unchecked box"))?;
            unchecked.push(parse_box(line).map_err(|e| bad(&e.to_string()))?);
        }
        Ok(ProofTrace {
            path,
            eps: eps.ok_or_else(|| bad("eps missing"))?,
            methods: methods.ok_or_else(|| bad("methods missing"))?,
            parts: parts.ok_or_else(|| bad("parts missing"))?,
            time_s,
            events,
            unchecked,
        })
    }
}

/// Where a point ended up when replaying a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    /// The terminal box containing the point (the leaf box itself when the
    /// point lies in an exclusion box).
    pub terminal: Vec<Interval>,
    /// How that box was settled.
    pub outcome: Outcome,
    /// Number of bisections walked.
    pub depth: usize,
}

impl fmt::Display for Replay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "terminal box (depth {}): {}", self.depth, format_box(&self.terminal))?;
        write!(f, "certified by: {}", self.outcome)
    }
}

/// Walks `tree` over `root` towards `point`: at each split the lower half is
/// taken when the coordinate is at most the midpoint.
pub(super) fn walk(tree: &TraceTree, root: &[Interval], point: &[Rational]) -> Result<Replay, VerifyError> {
    let mut node = tree;
    let mut bx = root.to_vec();
    let mut depth = 0;
    loop {
        match node {
            TraceTree::Terminal(o) => return Ok(Replay { terminal: bx, outcome: *o, depth }),
            TraceTree::Split { dim, lower, upper, .. } => {
                let (a, b) = bx[*dim].finite_bounds().ok_or_else(|| VerifyError::Trace("unbounded box".into()))?;
                let mid = Rational::midpoint(a, b);
                let [lo, hi] = halves(&bx, *dim)?;
                if point[*dim] <= mid {
                    node = lower;
                    bx = lo;
                } else {
                    node = upper;
                    bx = hi;
                }
                depth += 1;
            }
        }
    }
}
