//! The pruning predicates: each certifies that a box contains no
//! configuration beating `fmax` (or none satisfying the normalising
//! conditions), or answers `false` when inconclusive.

use std::fmt;
use std::str::FromStr;

use crate::expr::Evaluation;
use crate::interval::{contains_box, Interval};
use crate::linalg::{DefKind, DefMethod, DefinitenessQuery, SymIntervalMatrix};
use crate::rational::Rational;

use super::{model_policy, roots, Model};

/// Identifier of a pruning predicate. The numeric codes are stable: proof
/// traces record them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Interval Hessian negative definite by the vertex method, on a box
    /// containing the bipyramid configuration.
    Defver = 1,
    /// Interval Hessian negative definite by the eigenvalue method, on a box
    /// containing the bipyramid configuration.
    Defeig = 2,
    /// Interval Hessian has a positive eigenvalue everywhere, so `f` has no
    /// interior maximum.
    Nondef = 3,
    /// A parallelism residual of the gradient condition excludes zero.
    Gradient = 4,
    /// Some distance is below `2/15`.
    Mindis = 5,
    /// `AB` cannot be the second largest distance.
    Secondlength = 6,
    /// The upper bound of `f` is below `fmax`.
    Totaldis = 7,
    /// A partial derivative excludes zero.
    Derivative = 8,
    /// A partial derivative excludes zero after monotonicity tightening.
    Secordder = 9,
    /// `C` is below `E`.
    Pointc = 10,
    /// All five points lie in an open half sphere.
    Halfsphere = 11,
}

impl Method {
    /// Every method, in code order.
    pub const ALL: [Method; 11] = [
        Method::Defver,
        Method::Defeig,
        Method::Nondef,
        Method::Gradient,
        Method::Mindis,
        Method::Secondlength,
        Method::Totaldis,
        Method::Derivative,
        Method::Secordder,
        Method::Pointc,
        Method::Halfsphere,
    ];

    /// The default order for generic boxes.
    pub const DEFAULT_ORDER: [Method; 7] = [
        Method::Pointc,
        Method::Halfsphere,
        Method::Mindis,
        Method::Secondlength,
        Method::Totaldis,
        Method::Gradient,
        Method::Derivative,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Method> {
        Method::ALL.get(usize::from(code).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Defver => "defver",
            Method::Defeig => "defeig",
            Method::Nondef => "nondef",
            Method::Gradient => "gradient",
            Method::Mindis => "mindis",
            Method::Secondlength => "secondlength",
            Method::Totaldis => "totaldis",
            Method::Derivative => "derivative",
            Method::Secordder => "secordder",
            Method::Pointc => "pointc",
            Method::Halfsphere => "halfsphere",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Method, String> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Lazy evaluation of the model over one box. Every root expression and the
/// interval Hessian are computed at most once, however many predicates are
/// tried.
pub struct BoxEval<'a> {
    model: &'a Model,
    ev: Evaluation<'a>,
    hessian: Option<Option<SymIntervalMatrix>>,
}

impl<'a> BoxEval<'a> {
    /// Starts evaluating `model` over `values` (one interval per variable).
    pub fn new(model: &'a Model, values: &'a [Interval]) -> BoxEval<'a> {
        BoxEval { model, ev: model.program.evaluate(values, model_policy()), hessian: None }
    }

    /// The box.
    pub fn values(&self) -> &[Interval] {
        self.ev.values()
    }

    /// Enclosure of root `k` (see [`roots`]); `None` when the evaluation is
    /// undefined on the box.
    pub fn root(&mut self, k: usize) -> Option<Interval> {
        self.ev.root(k).ok()
    }

    /// Enclosure of `f`.
    pub fn f(&mut self) -> Option<Interval> {
        self.root(roots::F)
    }

    /// Enclosure of distance `k` (pair order AB … DE).
    pub fn distance(&mut self, k: usize) -> Option<Interval> {
        self.root(roots::DIST + k)
    }

    /// Enclosure of `∂f/∂xᵢ`.
    pub fn df(&mut self, i: usize) -> Option<Interval> {
        self.root(roots::DF + i)
    }

    /// The interval Hessian; `None` when some entry is undefined.
    pub fn hessian(&mut self) -> Option<&SymIntervalMatrix> {
        if self.hessian.is_none() {
            let mut entries = Vec::with_capacity(28);
            let mut ok = true;
            for i in 0..7 {
                for j in i..7 {
                    match self.root(roots::hess(i, j)) {
                        Some(x) => entries.push(x),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            self.hessian = Some(ok.then(|| {
                SymIntervalMatrix::from_fn(7, |i, j| {
                    let (i, j) = if i <= j { (i, j) } else { (j, i) };
                    entries[roots::hess(i, j) - roots::HESS].clone()
                })
            }));
        }
        self.hessian.as_ref().and_then(|h| h.as_ref())
    }

    /// True when `method` certifies the box.
    pub fn prune(&mut self, method: Method) -> bool {
        match method {
            Method::Defver => self.concave_at_bipyramid(DefMethod::Vertex),
            Method::Defeig => self.concave_at_bipyramid(DefMethod::Eigenvalue),
            Method::Nondef => self.definite(DefKind::Nonnegsemidef, DefMethod::Eigenvalue),
            Method::Gradient => (0..10).any(|k| self.root(roots::GRCV + k).is_some_and(|x| excludes_zero(&x))),
            Method::Mindis => {
                let min = self.model.constants.min_dist.clone();
                (0..10).any(|k| self.distance(k).is_some_and(|d| upper_below(&d, &min)))
            }
            Method::Secondlength => self.secondlength(),
            Method::Totaldis => {
                let bound = self.model.constants.fmax_lo.clone();
                self.f().is_some_and(|f| upper_below(&f, &bound))
            }
            Method::Derivative => (0..7).any(|i| self.df(i).is_some_and(|d| excludes_zero(&d))),
            Method::Secordder => self.secordder(),
            Method::Pointc => {
                let v = self.values();
                match (v[1].finite_bounds(), v[5].finite_bounds()) {
                    (Some((_, phi2_hi)), Some((phi4_lo, _))) => phi2_hi < phi4_lo,
                    _ => false,
                }
            }
            Method::Halfsphere => (0..9).any(|p| {
                let mut sign = 0;
                for k in 0..3 {
                    let s = match self.root(roots::SIGNDIS + 3 * p + k) {
                        Some(x) if x.is_positive() => 1,
                        Some(x) if x.is_negative() => -1,
                        _ => return false,
                    };
                    if sign != 0 && s != sign {
                        return false;
                    }
                    sign = s;
                }
                true
            }),
        }
    }

    fn definite(&mut self, kind: DefKind, method: DefMethod) -> bool {
        let digits = model_policy().digits;
        self.hessian().is_some_and(|h| h.is_definite(DefinitenessQuery::new(kind, method), digits).unwrap_or(false))
    }

    /// A negative definite Hessian makes `f` strictly concave on the box; a
    /// box containing the stationary point `Θ_bp` then has its maximum there,
    /// so `f ≤ fmax` on the box. Without that point concavity alone proves
    /// nothing, so the predicate answers `false`.
    fn concave_at_bipyramid(&mut self, method: DefMethod) -> bool {
        if !contains_box(self.values(), self.model.constants.theta_bp_box()) {
            return false;
        }
        self.definite(DefKind::Negdef, method)
    }

    fn secondlength(&mut self) -> bool {
        let Some(ab) = self.distance(0) else { return false };
        let Some((ab_lo, ab_hi)) = ab.finite_bounds().map(|(a, b)| (a.clone(), b.clone())) else {
            return false;
        };
        let mut longer = 0;
        let mut all_shorter = true;
        for k in 1..10 {
            let Some(d) = self.distance(k) else { return false };
            let Some((lo, hi)) = d.finite_bounds() else { return false };
            if *lo > ab_hi {
                longer += 1;
                if longer == 2 {
                    return true;
                }
            }
            if *hi >= ab_lo {
                all_shorter = false;
            }
        }
        all_shorter
    }

    /// For each partial `∂f/∂xᵢ`, fixes every `xⱼ` with `∂²f/∂xᵢ∂xⱼ` of strict
    /// sign at the endpoint minimising (resp. maximising) the partial, which
    /// bounds the partial from below (resp. above) more tightly than plain
    /// evaluation.
    fn secordder(&mut self) -> bool {
        let Some(h) = self.hessian().cloned() else { return false };
        let values = self.values().to_vec();
        let program = &self.model.program;
        for i in 0..7 {
            let mut low_corner = values.clone();
            let mut high_corner = values.clone();
            for (j, x) in values.iter().enumerate() {
                let Some((lo, hi)) = x.finite_bounds() else { continue };
                let hij = h.get(i, j);
                if hij.is_positive() {
                    low_corner[j] = Interval::point(lo.clone());
                    high_corner[j] = Interval::point(hi.clone());
                } else if hij.is_negative() {
                    low_corner[j] = Interval::point(hi.clone());
                    high_corner[j] = Interval::point(lo.clone());
                }
            }
            let lower = program.evaluate(&low_corner, model_policy()).root(roots::DF + i);
            let upper = program.evaluate(&high_corner, model_policy()).root(roots::DF + i);
            if let (Ok(lower), Ok(upper)) = (lower, upper) {
                if lower.is_positive() || upper.is_negative() {
                    return true;
                }
            }
        }
        false
    }
}

fn excludes_zero(x: &Interval) -> bool {
    x.is_positive() || x.is_negative()
}

fn upper_below(x: &Interval, bound: &Rational) -> bool {
    x.finite_bounds().is_some_and(|(_, hi)| hi < bound)
}
