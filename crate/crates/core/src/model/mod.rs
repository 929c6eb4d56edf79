//! The five-point problem instance.
//!
//! Point `A = (1, 0, 0)` is fixed, `B` lies on the meridian `θ = π` at
//! latitude `φ₁`, and `C, D, E` are free, giving the seven variables
//! [`VARS`]. The [`Model`] holds the ten distances, the objective `f` (their
//! sum), its gradient and Hessian, the parallelism residuals used by the
//! `gradient` predicate and the signed volumes used by the `halfsphere`
//! predicate — all as symbolic expressions compiled into one shared
//! [`Program`], so a box is evaluated lazily and every shared subexpression
//! at most once.

pub mod constants;
mod predicates;

use std::sync::OnceLock;

use num_rational::BigRational;

use crate::expr::{differentiate, expand, normalize, Expr, Program};
use crate::interval::RoundingPolicy;

pub use constants::{Constants, Domains, RegionId};
pub use predicates::{BoxEval, Method};

/// The seven coordinates, in order.
pub const VARS: [&str; 7] = ["phi1", "phi2", "theta2", "phi3", "theta3", "phi4", "theta4"];

/// Display names of the coordinates.
pub const VAR_SYMBOLS: [&str; 7] = ["φ₁", "φ₂", "θ₂", "φ₃", "θ₃", "φ₄", "θ₄"];

/// Point labels.
pub const POINTS: [&str; 5] = ["A", "B", "C", "D", "E"];

/// The ten point pairs `(i, j)`, `i < j`, in the order AB, AC, …, DE.
pub const PAIRS: [(usize, usize); 10] =
    [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

/// The point pairs whose plane through the centre is tested by the
/// `halfsphere` predicate (every pair except `A, B`).
pub const HALFSPHERE_PAIRS: [(usize, usize); 9] =
    [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

/// Label of pair `k`, e.g. `"AB"`.
pub fn pair_label(k: usize) -> String {
    let (i, j) = PAIRS[k];
    format!("{}{}", POINTS[i], POINTS[j])
}

/// Rounding policy of every model evaluation: `D = 10` digits, with the
/// negative parts of bases under fractional powers truncated. The only
/// fractional powers in the model are powers of the ten (nonnegative)
/// distance radicands.
pub fn model_policy() -> RoundingPolicy {
    RoundingPolicy::default().truncating()
}

fn v(i: usize) -> Expr {
    Expr::var(VARS[i])
}

fn phi(p: usize) -> Expr {
    // latitude of point p (1 = B, 2 = C, …)
    v(if p == 1 { 0 } else { 2 * p - 3 })
}

fn theta(p: usize) -> Expr {
    v(2 * p - 2)
}

fn int(n: i64) -> Expr {
    Expr::int(n)
}

fn mul(xs: Vec<Expr>) -> Expr {
    Expr::mul(xs)
}

/// Cartesian coordinates of the spherical point `(r, φ, θ)`:
/// `(r cos φ cos θ, r cos φ sin θ, r sin φ)`.
pub fn spherical_to_cartesian(r: Expr, phi: Expr, theta: Expr) -> [Expr; 3] {
    [
        mul(vec![r.clone(), Expr::cos(phi.clone()), Expr::cos(theta.clone())]),
        mul(vec![r.clone(), Expr::cos(phi.clone()), Expr::sin(theta)]),
        mul(vec![r, Expr::sin(phi)]),
    ]
}

/// Inverse of [`spherical_to_cartesian`] on numbers: returns `(r, φ, θ)`
/// with `r ≥ 0`, `−π/2 ≤ φ ≤ π/2` and `−π < θ ≤ π` (θ = 0 at the poles and
/// at the origin).
pub fn cartesian_to_spherical(p: [f64; 3]) -> (f64, f64, f64) {
    use std::f64::consts::{FRAC_PI_2, PI};
    let [x, y, z] = p;
    let r = (x * x + y * y + z * z).sqrt();
    let rho = (x * x + y * y).sqrt();
    if rho == 0.0 {
        return match z.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => (r, FRAC_PI_2, 0.0),
            Some(std::cmp::Ordering::Less) => (r, -FRAC_PI_2, 0.0),
            _ => (0.0, 0.0, 0.0),
        };
    }
    let phi = (z / rho).atan();
    let theta = if x > 0.0 {
        (y / x).atan()
    } else if x < 0.0 && y >= 0.0 {
        (y / x).atan() + PI
    } else if x < 0.0 {
        (y / x).atan() - PI
    } else if y > 0.0 {
        FRAC_PI_2
    } else {
        -FRAC_PI_2
    };
    (r, phi, theta)
}

/// Cartesian coordinates of the five points as expressions.
pub fn points() -> [[Expr; 3]; 5] {
    let a = [int(1), int(0), int(0)];
    // B = s2d(1, φ₁, π) = (−cos φ₁, 0, sin φ₁)
    let b = [Expr::neg(Expr::cos(phi(1))), int(0), Expr::sin(phi(1))];
    let p = |k: usize| spherical_to_cartesian(int(1), phi(k), theta(k));
    [a, b, p(2), p(3), p(4)]
}

/// The radicand of the distance between points `i < j`, in the displayed
/// form of the objective.
pub fn radicand(i: usize, j: usize) -> Expr {
    let two = || int(2);
    match (i, j) {
        (0, 1) => Expr::add(vec![two(), mul(vec![two(), Expr::cos(phi(1))])]),
        (0, k) => Expr::sub(two(), mul(vec![two(), Expr::cos(phi(k)), Expr::cos(theta(k))])),
        (1, k) => Expr::add(vec![
            mul(vec![two(), Expr::cos(phi(1)), Expr::cos(phi(k)), Expr::cos(theta(k))]),
            two(),
            mul(vec![int(-2), Expr::sin(phi(1)), Expr::sin(phi(k))]),
        ]),
        (a, b) => Expr::add(vec![
            mul(vec![int(-2), Expr::cos(phi(a)), Expr::cos(phi(b)), Expr::cos(Expr::sub(theta(a), theta(b)))]),
            two(),
            mul(vec![int(-2), Expr::sin(phi(a)), Expr::sin(phi(b))]),
        ]),
    }
}

/// Root layout of the compiled model program.
pub mod roots {
    /// The objective.
    pub const F: usize = 0;
    /// First of the ten distances.
    pub const DIST: usize = 1;
    /// First of the seven partial derivatives.
    pub const DF: usize = 11;
    /// First of the 28 upper-triangle Hessian entries (row-major).
    pub const HESS: usize = 18;
    /// First of the ten parallelism residuals.
    pub const GRCV: usize = 46;
    /// First of the 27 signed volumes (9 pairs × 3 points).
    pub const SIGNDIS: usize = 56;
    /// Total number of roots.
    pub const COUNT: usize = 83;

    /// Index of Hessian entry `(i, j)` among the roots.
    pub fn hess(i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        HESS + i * 7 - i * (i + 1) / 2 + j
    }
}

/// The symbolic model, built once.
pub struct Model {
    /// The ten distances `√radicand`, pair order AB … DE.
    pub distances: Vec<Expr>,
    /// `f = Σ distances`.
    pub f: Expr,
    /// `∂f/∂xᵢ`, normalized.
    pub df: Vec<Expr>,
    /// `∂²f/∂xᵢ∂xⱼ` for `i ≤ j`, row-major, normalized.
    pub hess: Vec<Expr>,
    /// The ten parallelism residuals of the gradient condition.
    pub grcv: Vec<Expr>,
    /// For each of [`HALFSPHERE_PAIRS`], the signed volumes of the three
    /// remaining points against the pair's plane.
    pub signdis: Vec<[Expr; 3]>,
    /// Everything above compiled into one DAG (see [`roots`]).
    pub program: Program,
    /// Named constants.
    pub constants: Constants,
    /// Search domains and exclusion boxes.
    pub domains: Domains,
}

static MODEL: OnceLock<Model> = OnceLock::new();

impl Model {
    /// The shared model instance.
    pub fn get() -> &'static Model {
        MODEL.get_or_init(Model::build)
    }

    fn build() -> Model {
        // Normalized once so that every derivative shares the same radicands.
        let distances: Vec<Expr> = PAIRS.iter().map(|&(i, j)| dist_expr(i, j)).collect();
        let f = Expr::add(distances.clone());
        let df: Vec<Expr> = VARS.iter().map(|x| normalize(&differentiate(&f, x))).collect();
        let mut hess = Vec::with_capacity(28);
        for i in 0..7 {
            for j in i..7 {
                hess.push(normalize(&differentiate(&df[i], VARS[j])));
            }
        }
        let grcv = build_grcv();
        let signdis = build_signdis();

        let mut all = vec![f.clone()];
        all.extend(distances.iter().cloned());
        all.extend(df.iter().cloned());
        all.extend(hess.iter().cloned());
        all.extend(grcv.iter().cloned());
        for s in &signdis {
            all.extend(s.iter().cloned());
        }
        debug_assert_eq!(all.len(), roots::COUNT);
        let program = Program::compile(&all, &VARS).expect("model expressions use only the seven variables");
        let constants = Constants::build(&f);
        let domains = Domains::build(&constants);
        Model { distances, f, df, hess, grcv, signdis, program, constants, domains }
    }

    /// Hessian entry `(i, j)`.
    pub fn hess_entry(&self, i: usize, j: usize) -> &Expr {
        &self.hess[roots::hess(i, j) - roots::HESS]
    }
}

fn dist_expr(i: usize, j: usize) -> Expr {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    normalize(&Expr::sqrt(radicand(a, b)))
}

/// `gr[n] = Σ_{i≠n} (Pₙ − Pᵢ)/|Pₙ − Pᵢ|` for each point, then the residuals
/// expressing that the gradient is parallel to the point itself, expanded and
/// normalized.
fn build_grcv() -> Vec<Expr> {
    let pts = points();
    let gr: Vec<[Expr; 3]> = (0..5)
        .map(|n| {
            let comp = |c: usize| {
                Expr::add(
                    (0..5)
                        .filter(|&i| i != n)
                        .map(|i| {
                            let diff = Expr::sub(pts[n][c].clone(), pts[i][c].clone());
                            Expr::div(diff, dist_expr(n, i))
                        })
                        .collect(),
                )
            };
            [comp(0), comp(1), comp(2)]
        })
        .collect();
    let cross = |i: usize, a: usize, b: usize| {
        Expr::sub(mul(vec![gr[i][a].clone(), pts[i][b].clone()]), mul(vec![gr[i][b].clone(), pts[i][a].clone()]))
    };
    let mut out = vec![Expr::neg(gr[0][1].clone()), Expr::neg(gr[0][2].clone()), Expr::neg(gr[1][1].clone())];
    out.push(cross(1, 0, 2));
    for i in 2..5 {
        out.push(cross(i, 0, 1));
    }
    for i in 2..5 {
        out.push(cross(i, 0, 2));
    }
    out.iter().map(expand).collect()
}

fn build_signdis() -> Vec<[Expr; 3]> {
    let pts = points();
    HALFSPHERE_PAIRS
        .iter()
        .map(|&(i, j)| {
            let (p, q) = (&pts[i], &pts[j]);
            let nv = [
                Expr::sub(mul(vec![p[1].clone(), q[2].clone()]), mul(vec![q[1].clone(), p[2].clone()])),
                Expr::sub(mul(vec![p[2].clone(), q[0].clone()]), mul(vec![q[2].clone(), p[0].clone()])),
                Expr::sub(mul(vec![p[0].clone(), q[1].clone()]), mul(vec![p[1].clone(), q[0].clone()])),
            ];
            let vols: Vec<Expr> = (0..5)
                .filter(|&k| k != i && k != j)
                .map(|k| normalize(&Expr::add((0..3).map(|m| mul(vec![nv[m].clone(), pts[k][m].clone()])).collect())))
                .collect();
            [vols[0].clone(), vols[1].clone(), vols[2].clone()]
        })
        .collect()
}

/// Substitutes numeric coordinates (exact rationals) into `e`.
pub fn substitute_point(e: &Expr, x: &[BigRational; 7]) -> Expr {
    e.substitute(&|name| VARS.iter().position(|v| *v == name).map(|i| Expr::num(x[i].clone())))
}
