//! The fixed checks that complete the region certificates into a proof of the
//! inequality: the value at the bipyramid, its stationarity and strict local
//! maximality, the two exclusion boxes, and the ordering facts that bound
//! the other candidate configurations.

use std::fmt;
use std::time::Instant;

use crate::expr::parse;
use crate::interval::Interval;
use crate::linalg::{DefKind, DefMethod, DefinitenessQuery, SymIntervalMatrix};
use crate::model::{constants, model_policy, BoxEval, Model};
use crate::RoundingPolicy;

/// The closed-form Hessian of `f` at the bipyramid configuration, row-major.
pub const BIPYRAMID_HESSIAN: [[&str; 7]; 7] = [
    ["-sqrt(3)/2", "sqrt(3)/4", "0", "-sqrt(2)/4", "sqrt(6)/4", "-sqrt(2)/4", "-sqrt(6)/4"],
    ["sqrt(3)/4", "-sqrt(3)/2", "0", "-sqrt(2)/4", "-sqrt(6)/4", "-sqrt(2)/4", "sqrt(6)/4"],
    ["0", "0", "(-2*sqrt(3)-3*sqrt(2))/24", "-sqrt(6)/16", "sqrt(2)/16", "sqrt(6)/16", "sqrt(2)/16"],
    ["-sqrt(2)/4", "-sqrt(2)/4", "-sqrt(6)/16", "(-3*sqrt(2)-4)/8", "0", "-1/2", "0"],
    ["sqrt(6)/4", "-sqrt(6)/4", "sqrt(2)/16", "0", "(-3*sqrt(2)-4)/8", "0", "1/2"],
    ["-sqrt(2)/4", "-sqrt(2)/4", "sqrt(6)/16", "-1/2", "0", "(-3*sqrt(2)-4)/8", "0"],
    ["-sqrt(6)/4", "sqrt(6)/4", "sqrt(2)/16", "0", "1/2", "0", "(-3*sqrt(2)-4)/8"],
];

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    /// Short identifier.
    pub name: &'static str,
    pub passed: bool,
    /// Human-readable evidence.
    pub detail: String,
    /// Wall-clock seconds.
    pub time_s: f64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} ({:.2}s): {}",
            if self.passed { "pass" } else { "FAIL" },
            self.name,
            self.time_s,
            self.detail
        )
    }
}

fn timed(name: &'static str, run: impl FnOnce() -> (bool, String)) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = run();
    CheckResult { name, passed, detail, time_s: start.elapsed().as_secs_f64() }
}

fn digits() -> u32 {
    model_policy().digits
}

/// The interval Hessian of `f` over a box.
pub fn hessian_over(model: &Model, bx: &[Interval]) -> Option<SymIntervalMatrix> {
    BoxEval::new(model, bx).hessian().cloned()
}

/// `f(Θ_bp)` encloses `3√3 + 6√2 + 2` (known to 30 digits).
pub fn fmax_enclosure(model: &Model) -> CheckResult {
    timed("fmax-enclosure", || {
        let c = &model.constants;
        let f = BoxEval::new(model, c.theta_bp_box()).f();
        let exact = constants::enclose_with(&c.fmax_expr, &RoundingPolicy::with_digits(30));
        match f {
            Some(f) => (f.contains(&exact), format!("f(Θ_bp) ∈ {f}")),
            None => (false, "f(Θ_bp) did not evaluate".into()),
        }
    })
}

/// Every partial derivative of `f` at `Θ_bp` encloses zero.
pub fn bipyramid_stationary(model: &Model) -> CheckResult {
    timed("bipyramid-stationary", || {
        let mut b = BoxEval::new(model, model.constants.theta_bp_box());
        let ok = (0..7).all(|i| b.df(i).is_some_and(|d| d.contains_zero()));
        (ok, "every ∂f/∂xᵢ(Θ_bp) encloses 0".into())
    })
}

/// `f(Θ_p) < fmax`: the upper bound of the pyramid value is below `fmax_lo`.
pub fn pyfmax_below_fmax(model: &Model) -> CheckResult {
    timed("pyfmax-below-fmax", || {
        let c = &model.constants;
        let hi = c.pyfmax.finite_bounds().map(|(_, hi)| hi.clone());
        let ok = hi.as_ref().is_some_and(|hi| hi < &c.fmax_lo);
        (ok, format!("f(Θ_p) ∈ {} < {}", c.pyfmax, c.fmax_lo))
    })
}

/// The Hessian at `Θ_bp` is negative definite (vertex method) and matches
/// the closed-form matrix entrywise to `10⁻⁸`.
pub fn bipyramid_hessian(model: &Model) -> CheckResult {
    timed("bipyramid-hessian", || {
        let Some(h) = hessian_over(model, model.constants.theta_bp_box()) else {
            return (false, "Hessian did not evaluate".into());
        };
        let mut worst = 0.0f64;
        for (i, row) in BIPYRAMID_HESSIAN.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                let exact = constants::enclose(&parse(s).expect("closed form parses"));
                let mid = |x: &Interval| x.midpoint().map_or(f64::INFINITY, |m| m.to_f64());
                worst = worst.max((mid(h.get(i, j)) - mid(&exact)).abs());
            }
        }
        let negdef =
            h.is_definite(DefinitenessQuery::new(DefKind::Negdef, DefMethod::Vertex), digits()).unwrap_or(false);
        (negdef && worst <= 1e-8, format!("negative definite: {negdef}; max entry deviation {worst:.1e}"))
    })
}

/// The interval Hessian over the bipyramid exclusion box is negative definite
/// by the vertex method.
pub fn bipyramid_box_negdef(model: &Model) -> CheckResult {
    timed("bipyramid-box-negdef", || match hessian_over(model, &model.domains.bipyramid) {
        Some(h) => {
            let ok =
                h.is_definite(DefinitenessQuery::new(DefKind::Negdef, DefMethod::Vertex), digits()).unwrap_or(false);
            (ok, format!("all {} vertex matrices negative definite: {ok}", h.vertex_count()))
        }
        None => (false, "Hessian did not evaluate".into()),
    })
}

/// The interval Hessian over the pyramid exclusion box is nonnegative
/// semidefinite (has a positive eigenvalue throughout) by the eigenvalue
/// method.
pub fn pyramid_box_nonnegsemidef(model: &Model) -> CheckResult {
    timed("pyramid-box-nonnegsemidef", || match hessian_over(model, &model.domains.pyramid) {
        Some(h) => {
            let ok = h
                .is_definite(DefinitenessQuery::new(DefKind::Nonnegsemidef, DefMethod::Eigenvalue), digits())
                .unwrap_or(false);
            let top = h.eig_interval_bounds(6, digits()).map(|x| x.to_string()).unwrap_or_default();
            (ok, format!("largest eigenvalue ∈ {top}"))
        }
        None => (false, "Hessian did not evaluate".into()),
    })
}

/// The coplanar bound `5·cot(π/10)` is below `fmax_lo`.
pub fn pentagon_below_fmax(model: &Model) -> CheckResult {
    timed("pentagon-below-fmax", || {
        let c = &model.constants;
        let p = constants::enclose(&c.pentagon_bound);
        let ok = p.finite_bounds().is_some_and(|(_, hi)| hi < &c.fmax_lo);
        (ok, format!("5·cot(π/10) ∈ {p}"))
    })
}

/// Every fixed check, in order.
pub fn all(model: &Model) -> Vec<CheckResult> {
    vec![
        fmax_enclosure(model),
        bipyramid_stationary(model),
        pyfmax_below_fmax(model),
        bipyramid_hessian(model),
        bipyramid_box_negdef(model),
        pyramid_box_nonnegsemidef(model),
        pentagon_below_fmax(model),
    ]
}
