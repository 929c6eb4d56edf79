//! The branch-and-bound certifier.
//!
//! A search region is trisected in every coordinate into `3⁷ = 2187`
//! indexed subdomains; subdomains on the hard list are trisected again, and
//! so on. Every resulting leaf box is handed to [`check_domain`], which tries
//! the pruning predicates in order and bisects the widest coordinate when all
//! of them are inconclusive. Each leaf produces a [`ProofTrace`]; the region
//! is certified when every leaf trace is certified.

mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::certificates::{self, CheckResult};
use crate::interval::{contains_box, subdivide, widest_dim, Interval};
use crate::model::{BoxEval, Method, Model, RegionId};
use crate::rational::Rational;

pub use trace::{Event, Outcome, ProofTrace, Replay, TraceTree, TRACE_HEADER};

/// Number of subdomains of one trisection of the seven coordinates.
pub const SUBDOMAINS: u32 = 2187;

/// Errors of the verifier.
#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Trace(String),
    #[error("invalid domain path `{0}`")]
    Path(String),
    #[error("the point is not in the checked range")]
    OutOfRange,
}

/// A subdomain: a region and a sequence of trisection indices, each in
/// `1..=2187`. Written `1/1106/834/726`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomainPath {
    pub region: RegionId,
    pub indices: Vec<u32>,
}

impl DomainPath {
    pub fn new(region: RegionId, indices: Vec<u32>) -> DomainPath {
        DomainPath { region, indices }
    }

    /// The whole region.
    pub fn root(region: RegionId) -> DomainPath {
        DomainPath { region, indices: Vec::new() }
    }

    /// The path extended by one index.
    pub fn child(&self, index: u32) -> DomainPath {
        let mut indices = self.indices.clone();
        indices.push(index);
        DomainPath { region: self.region, indices }
    }

    /// Whether `self` equals `other` or lies below it.
    pub fn starts_with(&self, other: &DomainPath) -> bool {
        self.region == other.region && self.indices.starts_with(&other.indices)
    }

    /// The box of the subdomain.
    pub fn domain_box(&self, model: &Model) -> Result<Vec<Interval>, VerifyError> {
        let mut bx = model.domains.region(self.region).to_vec();
        for &k in &self.indices {
            if !(1..=SUBDOMAINS).contains(&k) {
                return Err(VerifyError::Path(self.to_string()));
            }
            bx = subdivide(&bx, 3, None).map_err(|e| VerifyError::Trace(e.to_string()))?.swap_remove(k as usize - 1);
        }
        Ok(bx)
    }

    /// Stem of the trace file name: `domain1_1106_834_726`.
    pub fn file_stem(&self) -> String {
        let mut s = format!("domain{}", self.region);
        for i in &self.indices {
            s.push_str(&format!("_{i}"));
        }
        s
    }

    /// Location of the trace file under `out`: one directory per proper
    /// prefix, `out/domain1/domain1_1106/domain1_1106_834/domain1_1106_834_726.txt`.
    pub fn trace_file(&self, out: &Path) -> PathBuf {
        let mut p = out.to_path_buf();
        for n in 0..self.indices.len() {
            let prefix = DomainPath { region: self.region, indices: self.indices[..n].to_vec() };
            p.push(prefix.file_stem());
        }
        p.push(format!("{}.txt", self.file_stem()));
        p
    }
}

impl fmt::Display for DomainPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.region)?;
        for i in &self.indices {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

impl FromStr for DomainPath {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<DomainPath, VerifyError> {
        let bad = || VerifyError::Path(s.to_string());
        let mut parts = s.trim().split(['/', '_', '-']);
        let region = parts
            .next()
            .map(|r| r.trim_start_matches("domain"))
            .and_then(|r| r.parse::<u8>().ok())
            .and_then(RegionId::from_number)
            .ok_or_else(bad)?;
        let indices = parts
            .map(|p| p.parse::<u32>().ok().filter(|k| (1..=SUBDOMAINS).contains(k)).ok_or_else(bad))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DomainPath { region, indices })
    }
}

/// Subdomains of region 1 that are trisected again, as index paths.
pub const REGION1_HARD: [&[u32]; 20] = [
    &[62],
    &[158],
    &[239],
    &[863],
    &[1102],
    &[1105],
    &[1106],
    &[2114],
    &[2132],
    &[1105, 1101],
    &[1106, 834],
    &[1106, 861],
    &[1106, 1099],
    &[1106, 1100],
    &[1105, 1101, 1100],
    &[1106, 834, 725],
    &[1106, 834, 726],
    &[1106, 834, 725, 1752],
    &[1106, 834, 726, 1507],
    &[1106, 834, 726, 1750],
];

/// Parameters of a certification run.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Predicates to try, in order.
    pub methods: Vec<Method>,
    /// Boxes whose widest coordinate is narrower than this are not split.
    pub eps: Rational,
    /// Parts per coordinate of the top-level subdivision (fixed at 3 by the
    /// path encoding).
    pub parts: usize,
    /// Index paths (below the region) that are trisected again.
    pub hard: BTreeSet<Vec<u32>>,
    /// Whether boxes inside the bipyramid exclusion box are accepted.
    pub check_bipyramid: bool,
    /// Whether boxes inside the pyramid exclusion box are accepted.
    pub check_pyramid: bool,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
}

impl VerifyConfig {
    /// The default configuration for a region: the generic method order,
    /// `eps = 1/10000`, and the hard list of region 1 (region 2 has none).
    pub fn for_region(region: RegionId) -> VerifyConfig {
        let hard = match region {
            RegionId::One => REGION1_HARD.iter().map(|p| p.to_vec()).collect(),
            RegionId::Two => BTreeSet::new(),
        };
        VerifyConfig {
            methods: Method::DEFAULT_ORDER.to_vec(),
            eps: Rational::ratio(1, 10000),
            parts: 3,
            hard,
            check_bipyramid: true,
            check_pyramid: true,
            jobs: 0,
        }
    }

    /// Whether the subdomain at `path` is trisected again.
    pub fn is_hard(&self, path: &DomainPath) -> bool {
        !path.indices.is_empty() && self.hard.contains(&path.indices)
    }

    /// Every leaf below `root`, in index order. A region root or a hard path
    /// expands into its 2187 children; anything else is a leaf.
    pub fn leaves(&self, root: &DomainPath) -> Vec<DomainPath> {
        let mut out = Vec::new();
        self.push_leaves(root, &mut out);
        out
    }

    fn push_leaves(&self, p: &DomainPath, out: &mut Vec<DomainPath>) {
        if p.indices.is_empty() || self.is_hard(p) {
            for k in 1..=SUBDOMAINS {
                self.push_leaves(&p.child(k), out);
            }
        } else {
            out.push(p.clone());
        }
    }
}

/// Result of [`check_domain`] on one box.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub certified: bool,
    pub events: Vec<Event>,
    pub unchecked: Vec<Vec<Interval>>,
}

/// Certifies `bx` or subdivides it, recording every step.
///
/// In order: a box inside the bipyramid (pyramid) exclusion box is accepted
/// with `B` (`P`) while that check is enabled, and the check is disabled for
/// the subtree once the box is disjoint from the exclusion box in some
/// coordinate; then each method is tried; then the widest coordinate is
/// bisected unless it is narrower than `eps`, in which case the box is
/// recorded as unchecked.
pub fn check_domain(model: &Model, bx: &[Interval], cfg: &VerifyConfig) -> CheckOutcome {
    let mut out = CheckOutcome { certified: false, events: Vec::new(), unchecked: Vec::new() };
    out.certified = check_rec(model, bx, cfg, cfg.check_bipyramid, cfg.check_pyramid, &mut out);
    out
}

fn check_rec(
    model: &Model,
    bx: &[Interval],
    cfg: &VerifyConfig,
    mut bpy: bool,
    mut py: bool,
    out: &mut CheckOutcome,
) -> bool {
    for (flag, ex, event) in
        [(&mut bpy, &model.domains.bipyramid, Event::Bipyramid), (&mut py, &model.domains.pyramid, Event::Pyramid)]
    {
        if *flag {
            if contains_box(ex, bx) {
                out.events.push(event);
                return true;
            }
            if bx.iter().zip(ex.iter()).any(|(x, e)| x.is_disjoint(e)) {
                *flag = false;
            }
        }
    }

    let mut eval = BoxEval::new(model, bx);
    for &m in &cfg.methods {
        if eval.prune(m) {
            out.events.push(Event::Success(m));
            return true;
        }
    }
    drop(eval);

    let dim = widest_dim(bx).expect("nonempty box");
    let narrow = match bx[dim].finite_bounds() {
        Some((a, b)) => (b - a) < cfg.eps,
        None => false,
    };
    if narrow {
        out.unchecked.push(bx.to_vec());
        out.events.push(Event::TooSmall);
        return false;
    }
    out.events.push(Event::Split(dim as u8 + 1));
    let [lower, upper] = trace::halves(bx, dim).expect("finite box");
    let a = check_rec(model, &lower, cfg, bpy, py, out);
    let b = check_rec(model, &upper, cfg, bpy, py, out);
    let ok = a && b;
    out.events.push(if ok { Event::SubtreeOk } else { Event::SubtreeFail });
    ok
}

/// Certifies one leaf and returns its trace.
pub fn run_leaf(model: &Model, path: &DomainPath, cfg: &VerifyConfig) -> Result<ProofTrace, VerifyError> {
    let bx = path.domain_box(model)?;
    let start = Instant::now();
    let outcome = check_domain(model, &bx, cfg);
    Ok(ProofTrace {
        path: path.clone(),
        eps: cfg.eps.clone(),
        methods: cfg.methods.clone(),
        parts: cfg.parts,
        time_s: start.elapsed().as_secs_f64(),
        events: outcome.events,
        unchecked: outcome.unchecked,
    })
}

/// Number of terminal boxes settled by each method, and by the `bipyramid`,
/// `pyramid` and `unchecked` outcomes.
pub fn histogram(events: &[Event]) -> BTreeMap<&'static str, usize> {
    let mut h = BTreeMap::new();
    for e in events {
        let key = match e {
            Event::Success(m) => m.name(),
            Event::Bipyramid => "bipyramid",
            Event::Pyramid => "pyramid",
            Event::TooSmall => "unchecked",
            _ => continue,
        };
        *h.entry(key).or_insert(0) += 1;
    }
    h
}

/// Summary of one leaf of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafSummary {
    pub path: DomainPath,
    pub certified: bool,
    pub unchecked: usize,
    pub events: usize,
    pub methods: BTreeMap<&'static str, usize>,
    pub time_s: f64,
}

impl LeafSummary {
    fn of(t: &ProofTrace) -> LeafSummary {
        LeafSummary {
            path: t.path.clone(),
            certified: t.is_certified(),
            unchecked: t.unchecked.len(),
            events: t.events.len(),
            methods: histogram(&t.events),
            time_s: t.time_s,
        }
    }
}

/// Result of certifying every leaf below a root path.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub root: DomainPath,
    pub leaves: Vec<LeafSummary>,
}

impl RunReport {
    /// Whether every leaf was certified.
    pub fn certified(&self) -> bool {
        self.leaves.iter().all(|l| l.certified)
    }

    /// Total number of unchecked boxes.
    pub fn unchecked(&self) -> usize {
        self.leaves.iter().map(|l| l.unchecked).sum()
    }

    /// Terminal boxes per method over all leaves.
    pub fn methods(&self) -> BTreeMap<&'static str, usize> {
        let mut h = BTreeMap::new();
        for l in &self.leaves {
            for (k, n) in &l.methods {
                *h.entry(*k).or_insert(0) += n;
            }
        }
        h
    }

    /// Leaves that were not certified.
    pub fn failed(&self) -> impl Iterator<Item = &LeafSummary> {
        self.leaves.iter().filter(|l| !l.certified)
    }
}

/// Writes a trace to its file under `out`, creating directories.
pub fn write_trace(t: &ProofTrace, out: &Path) -> Result<PathBuf, VerifyError> {
    let file = t.path.trace_file(out);
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| VerifyError::Io { path, source }
    };
    if let Some(dir) = file.parent() {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
    }
    std::fs::write(&file, t.to_text()).map_err(io(&file))?;
    Ok(file)
}

/// Reads the trace of `path` from under `out`.
pub fn read_trace(path: &DomainPath, out: &Path) -> Result<ProofTrace, VerifyError> {
    let file = path.trace_file(out);
    let text = std::fs::read_to_string(&file).map_err(|source| VerifyError::Io { path: file, source })?;
    ProofTrace::parse(&text)
}

/// Certifies every leaf below `root` on a worker pool of `cfg.jobs`
/// threads, writing each trace under `out` when given. `progress` is called
/// once per finished leaf.
pub fn run(
    model: &Model,
    root: &DomainPath,
    cfg: &VerifyConfig,
    out: Option<&Path>,
    progress: &(dyn Fn(&LeafSummary) + Sync),
) -> Result<RunReport, VerifyError> {
    let leaves = if root.indices.is_empty() || cfg.is_hard(root) { cfg.leaves(root) } else { vec![root.clone()] };
    let work = || {
        leaves
            .par_iter()
            .map(|p| {
                let t = run_leaf(model, p, cfg)?;
                if let Some(out) = out {
                    write_trace(&t, out)?;
                }
                let s = LeafSummary::of(&t);
                progress(&s);
                Ok(s)
            })
            .collect::<Result<Vec<_>, VerifyError>>()
    };
    let summaries = if cfg.jobs == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| VerifyError::Trace(e.to_string()))?
            .install(work)?
    };
    Ok(RunReport { root: root.clone(), leaves: summaries })
}

/// The leaf path containing `point` under the default subdivision plan of
/// its region.
///
/// Region 2 is preferred when the point lies in both regions. In each
/// trisection the coordinate index is `⌊3(x − lo)/w⌋`, with the upper face
/// clamped to the last piece.
pub fn locate(model: &Model, point: &[Rational]) -> Result<DomainPath, VerifyError> {
    let inside = |bx: &[Interval]| bx.iter().zip(point).all(|(x, p)| x.contains_value(p));
    let region = if point.len() != 7 {
        return Err(VerifyError::OutOfRange);
    } else if inside(&model.domains.region2) {
        RegionId::Two
    } else if inside(&model.domains.region1) {
        RegionId::One
    } else {
        return Err(VerifyError::OutOfRange);
    };
    let cfg = VerifyConfig::for_region(region);
    let mut path = DomainPath::root(region);
    let mut bx = model.domains.region(region).to_vec();
    loop {
        let mut index = 0u32;
        let mut place = 1u32;
        for (x, p) in bx.iter().zip(point) {
            let (lo, hi) = x.finite_bounds().ok_or(VerifyError::OutOfRange)?;
            let w = hi - lo;
            let v = match (&(p - lo) * &Rational::from_int(3)).checked_div(&w) {
                Some(t) => t.floor().try_into().unwrap_or(0u32).min(2),
                None => 0,
            };
            index += v * place;
            place *= 3;
        }
        path = path.child(index + 1);
        bx = subdivide(&bx, 3, None).map_err(|e| VerifyError::Trace(e.to_string()))?.swap_remove(index as usize);
        if !cfg.is_hard(&path) {
            return Ok(path);
        }
    }
}

/// Explains how `point` was certified by `trace`: points in an exclusion box
/// are reported directly; otherwise the event stream is walked down to the
/// terminal box containing the point.
pub fn replay(model: &Model, t: &ProofTrace, point: &[Rational]) -> Result<Replay, VerifyError> {
    let leaf = t.path.domain_box(model)?;
    if point.len() != leaf.len() || !leaf.iter().zip(point).all(|(x, p)| x.contains_value(p)) {
        return Err(VerifyError::OutOfRange);
    }
    let in_box = |bx: &[Interval]| bx.iter().zip(point).all(|(x, p)| x.contains_value(p));
    if in_box(&model.domains.bipyramid) {
        return Ok(Replay { terminal: leaf, outcome: Outcome::Bipyramid, depth: 0 });
    }
    if in_box(&model.domains.pyramid) {
        return Ok(Replay { terminal: leaf, outcome: Outcome::Pyramid, depth: 0 });
    }
    let tree = TraceTree::parse(&t.events)?;
    trace::walk(&tree, &leaf, point)
}

/// Result of [`audit`]: how many terminal boxes were re-checked and which
/// of them did not reproduce their recorded outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Audit {
    pub terminals: usize,
    pub mismatches: Vec<(Vec<Interval>, Outcome)>,
}

impl Audit {
    /// Whether every recorded outcome was reproduced.
    pub fn is_consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Independently re-checks a trace without searching: the event stream is
/// decoded into its terminal boxes, and each box is re-evaluated with only
/// the outcome it records. A method terminal must prune again, an exclusion
/// terminal must lie inside its exclusion box, and an unchecked terminal must
/// appear among the trace's unchecked boxes and fail every method of the
/// trace.
pub fn audit(model: &Model, t: &ProofTrace) -> Result<Audit, VerifyError> {
    let leaf = t.path.domain_box(model)?;
    let boxes = TraceTree::parse(&t.events)?.terminal_boxes(&leaf)?;
    let mismatches = boxes
        .par_iter()
        .filter(|(bx, outcome)| {
            let reproduced = match outcome {
                Outcome::Method(m) => BoxEval::new(model, bx).prune(*m),
                Outcome::Bipyramid => contains_box(&model.domains.bipyramid, bx),
                Outcome::Pyramid => contains_box(&model.domains.pyramid, bx),
                Outcome::TooSmall => {
                    let mut eval = BoxEval::new(model, bx);
                    t.unchecked.contains(bx) && !t.methods.iter().any(|&m| eval.prune(m))
                }
            };
            !reproduced
        })
        .cloned()
        .collect();
    Ok(Audit { terminals: boxes.len(), mismatches })
}

/// Status of the trace files of a region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionStatus {
    pub region: RegionId,
    /// Leaves of the default plan.
    pub expected: usize,
    /// Leaves with a certified trace.
    pub certified: usize,
    /// Leaves whose trace is present but not certified.
    pub failed: Vec<DomainPath>,
    /// Leaves without a trace file.
    pub missing: usize,
}

/// Aggregate of an output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub regions: Vec<RegionStatus>,
    /// How many terminal boxes each method certified, by method code order;
    /// then bipyramid and pyramid containments.
    pub methods: BTreeMap<&'static str, usize>,
    /// Deepest bisection level in any trace.
    pub max_depth: usize,
    /// Total unchecked boxes.
    pub unchecked: usize,
    /// Sum of the recorded leaf times.
    pub time_s: f64,
    /// The fixed checks, run inline.
    pub checks: Vec<CheckResult>,
}

impl Report {
    /// Whether both regions are complete and every fixed check passed.
    pub fn is_certified(&self) -> bool {
        self.regions.iter().all(|r| r.certified == r.expected) && self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.regions {
            writeln!(
                f,
                "region {}: {}/{} leaves certified, {} failed, {} missing",
                r.region,
                r.certified,
                r.expected,
                r.failed.len(),
                r.missing
            )?;
        }
        writeln!(f, "methods:")?;
        for (m, n) in &self.methods {
            writeln!(f, "  {m:<13} {n}")?;
        }
        writeln!(f, "max depth: {}", self.max_depth)?;
        writeln!(f, "unchecked={}", self.unchecked)?;
        writeln!(f, "time: {:.1} s", self.time_s)?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        if self.is_certified() {
            write!(f, "CERTIFIED")
        } else {
            let mut parts: Vec<String> = self
                .regions
                .iter()
                .filter(|r| r.certified < r.expected)
                .map(|r| format!("region {} missing {} leaves", r.region, r.expected - r.certified))
                .collect();
            parts.extend(self.checks.iter().filter(|c| !c.passed).map(|c| format!("check {} failed", c.name)));
            write!(f, "INCOMPLETE: {}", parts.join(", "))
        }
    }
}

/// Aggregates the trace files under `out` against the default plans of both
/// regions and runs the fixed checks. A missing trace counts as a missing
/// leaf; an unreadable or malformed one is an error naming the file.
pub fn report(model: &Model, out: &Path) -> Result<Report, VerifyError> {
    let mut methods = BTreeMap::new();
    let mut max_depth = 0;
    let mut unchecked = 0;
    let mut time_s = 0.0;
    let mut regions = Vec::new();
    for region in [RegionId::One, RegionId::Two] {
        let cfg = VerifyConfig::for_region(region);
        let leaves = cfg.leaves(&DomainPath::root(region));
        let mut status = RegionStatus { region, expected: leaves.len(), certified: 0, failed: Vec::new(), missing: 0 };
        for p in leaves {
            let file = p.trace_file(out);
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    status.missing += 1;
                    continue;
                }
                Err(source) => return Err(VerifyError::Io { path: file, source }),
            };
            let named = |e: VerifyError| VerifyError::Trace(format!("{}: {e}", file.display()));
            let t = ProofTrace::parse(&text).map_err(named)?;
            let tree = TraceTree::parse(&t.events).map_err(named)?;
            if t.path != p {
                return Err(named(VerifyError::Trace(format!("trace is for {}", t.path))));
            }
            for (k, n) in histogram(&t.events) {
                *methods.entry(k).or_insert(0) += n;
            }
            max_depth = max_depth.max(tree.depth());
            unchecked += t.unchecked.len();
            time_s += t.time_s;
            if t.is_certified() {
                status.certified += 1;
            } else {
                status.failed.push(p);
            }
        }
        regions.push(status);
    }
    Ok(Report { regions, methods, max_depth, unchecked, time_s, checks: certificates::all(model) })
}
