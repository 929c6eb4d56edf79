//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here goes through the symbolic layer: the oracles use
//! `f64` formulas, exact rational arithmetic and random sampling.

#![allow(dead_code, clippy::needless_range_loop, clippy::type_complexity)]

use std::path::PathBuf;

use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::Rng;
use sphere_certify::interval::{self, subdivide, Ext};
use sphere_certify::linalg::{DefKind, DefMethod, DefinitenessQuery, RatMatrix, SymIntervalMatrix};
use sphere_certify::{Interval, Rational, RoundingPolicy};

/// Path of a file under `tests/fixtures`.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Reads a fixture file to a string.
pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{}: {e}", fixture(name).display()))
}

// ---------------------------------------------------------------------------
// Distance sum in plain floating point

/// Unit vector with latitude `phi` and longitude `theta`.
pub fn unit(phi: f64, theta: f64) -> [f64; 3] {
    [phi.cos() * theta.cos(), phi.cos() * theta.sin(), phi.sin()]
}

/// The five points of the configuration `x = (φ₁, φ₂, θ₂, φ₃, θ₃, φ₄, θ₄)`:
/// `A = (1, 0, 0)`, `B` at latitude `φ₁` on the meridian `θ = π`, and three
/// free points.
pub fn config_points(x: &[f64; 7]) -> [[f64; 3]; 5] {
    [[1.0, 0.0, 0.0], unit(x[0], PI), unit(x[1], x[2]), unit(x[3], x[4]), unit(x[5], x[6])]
}

/// Sum of the ten pairwise distances.
pub fn distance_sum(x: &[f64; 7]) -> f64 {
    let p = config_points(x);
    let mut s = 0.0;
    for i in 0..5 {
        for j in i + 1..5 {
            s += (0..3).map(|c| (p[i][c] - p[j][c]).powi(2)).sum::<f64>().sqrt();
        }
    }
    s
}

/// Central-difference gradient of [`distance_sum`].
pub fn fd_gradient(x: &[f64; 7], h: f64) -> [f64; 7] {
    let mut g = [0.0; 7];
    for (i, gi) in g.iter_mut().enumerate() {
        let (mut a, mut b) = (*x, *x);
        a[i] += h;
        b[i] -= h;
        *gi = (distance_sum(&a) - distance_sum(&b)) / (2.0 * h);
    }
    g
}

/// Second central differences of [`distance_sum`].
pub fn fd_hessian(x: &[f64; 7], h: f64) -> [[f64; 7]; 7] {
    let mut m = [[0.0; 7]; 7];
    for i in 0..7 {
        for j in 0..7 {
            let at = |si: f64, sj: f64| {
                let mut y = *x;
                y[i] += si * h;
                y[j] += sj * h;
                distance_sum(&y)
            };
            m[i][j] = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h);
        }
    }
    m
}

/// `|a − b| ≤ tol · max(1, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// Random generation

/// A random decimal in `[lo, hi]` with at most six fractional digits.
pub fn decimal(rng: &mut StdRng, lo: f64, hi: f64) -> Rational {
    let a = (lo * 1e6).ceil() as i128;
    let b = (hi * 1e6).floor() as i128;
    Rational::from_decimal(rng.gen_range(a..=b), -6)
}

/// A random closed interval `[a, a + w]` with `a ∈ [lo, hi]` and
/// `w ∈ [0, max_width]`; one in eight is a point.
pub fn interval_in(rng: &mut StdRng, lo: f64, hi: f64, max_width: f64) -> Interval {
    let a = decimal(rng, lo, hi);
    if rng.gen_ratio(1, 8) {
        return Interval::point(a);
    }
    let w = decimal(rng, 0.0, max_width);
    Interval::closed(a.clone(), &a + &w)
}

/// A random point of a finite interval: an endpoint one time in five,
/// otherwise a random convex combination.
pub fn point_in(rng: &mut StdRng, x: &Interval) -> Rational {
    let (a, b) = x.finite_bounds().expect("finite interval");
    match rng.gen_range(0..10) {
        0 => a.clone(),
        1 => b.clone(),
        _ => {
            let t = Rational::ratio(rng.gen_range(0..=1_000_000), 1_000_000);
            &(&(b - a) * &t) + a
        }
    }
}

// ---------------------------------------------------------------------------
// Interval containment fuzzing

/// Whether the enclosure `y` contains the floating-point value `v` up to a
/// relative slack of `1e-13`, which covers the error of the `f64` oracle.
pub fn contains_f64(y: &Interval, v: f64) -> bool {
    if !v.is_finite() {
        return false;
    }
    let slack = 1e-13 * v.abs().max(1.0);
    let below = match y.lo() {
        Some(Ext::NegInf) => true,
        Some(Ext::Fin(lo)) => lo.to_f64() <= v + slack,
        _ => false,
    };
    let above = match y.hi() {
        Some(Ext::PosInf) => true,
        Some(Ext::Fin(hi)) => hi.to_f64() >= v - slack,
        _ => false,
    };
    below && above
}

/// One unary operation under test: its name, input generator, interval
/// implementation and scalar oracle.
pub struct UnaryCase {
    pub name: &'static str,
    pub input: fn(&mut StdRng) -> Interval,
    pub eval: fn(&Interval, &RoundingPolicy) -> Option<Interval>,
    pub oracle: fn(f64) -> f64,
}

const PI: f64 = std::f64::consts::PI;

fn branch(rng: &mut StdRng, offset: f64) -> Interval {
    let k = rng.gen_range(-3..=3) as f64;
    let c = k * PI + offset;
    interval_in(rng, c - 1.4, c + 1.3, 0.1)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// The unary operations exercised by the fuzzer.
pub fn unary_cases() -> Vec<UnaryCase> {
    vec![
        UnaryCase {
            name: "sqrt",
            input: |r| interval_in(r, 0.0, 100.0, 10.0),
            eval: |x, p| interval::pow_rat(x, &q(1, 2), p).ok(),
            oracle: f64::sqrt,
        },
        UnaryCase {
            name: "pow(-3/2)",
            input: |r| interval_in(r, 0.01, 50.0, 5.0),
            eval: |x, p| interval::pow_rat(x, &q(-3, 2), p).ok(),
            oracle: |x| x.powf(-1.5),
        },
        UnaryCase {
            name: "pow(3)",
            input: |r| interval_in(r, -20.0, 20.0, 10.0),
            eval: |x, p| interval::pow_rat(x, &q(3, 1), p).ok(),
            oracle: |x| x * x * x,
        },
        UnaryCase {
            name: "pow(2)",
            input: |r| interval_in(r, -20.0, 20.0, 10.0),
            eval: |x, p| interval::pow_rat(x, &q(2, 1), p).ok(),
            oracle: |x| x * x,
        },
        UnaryCase {
            name: "recip",
            input: |r| {
                let x = interval_in(r, 0.001, 100.0, 10.0);
                if r.gen_bool(0.5) {
                    x.neg()
                } else {
                    x
                }
            },
            eval: |x, p| interval::pow_rat(x, &q(-1, 1), p).ok(),
            oracle: |x| 1.0 / x,
        },
        UnaryCase {
            name: "sin",
            input: |r| interval_in(r, -50.0, 50.0, 7.0),
            eval: |x, p| Some(interval::sin(x, p)),
            oracle: f64::sin,
        },
        UnaryCase {
            name: "cos",
            input: |r| interval_in(r, -50.0, 50.0, 7.0),
            eval: |x, p| Some(interval::cos(x, p)),
            oracle: f64::cos,
        },
        UnaryCase { name: "tan", input: |r| branch(r, 0.0), eval: |x, p| Some(interval::tan(x, p)), oracle: f64::tan },
        UnaryCase {
            name: "cot",
            input: |r| branch(r, PI / 2.0),
            eval: |x, p| Some(interval::cot(x, p)),
            oracle: |x| 1.0 / x.tan(),
        },
        UnaryCase {
            name: "arcsin",
            input: |r| interval_in(r, -1.0, 0.9, 0.1),
            eval: |x, p| interval::arcsin(x, p).ok(),
            oracle: f64::asin,
        },
        UnaryCase {
            name: "arccos",
            input: |r| interval_in(r, -1.0, 0.9, 0.1),
            eval: |x, p| interval::arccos(x, p).ok(),
            oracle: f64::acos,
        },
        UnaryCase {
            name: "arctan",
            input: |r| interval_in(r, -100.0, 100.0, 10.0),
            eval: |x, p| Some(interval::arctan(x, p)),
            oracle: f64::atan,
        },
        UnaryCase {
            name: "arccot",
            input: |r| interval_in(r, -100.0, 100.0, 10.0),
            eval: |x, p| Some(interval::arccot(x, p)),
            // Range (0, π): arccot(x) = π/2 − arctan(x).
            oracle: |x| PI / 2.0 - x.atan(),
        },
        UnaryCase {
            name: "exp",
            input: |r| interval_in(r, -30.0, 30.0, 3.0),
            eval: |x, p| Some(interval::exp(x, p)),
            oracle: f64::exp,
        },
        UnaryCase {
            name: "ln",
            input: |r| interval_in(r, 1e-5, 1000.0, 10.0),
            eval: |x, p| interval::ln(x, p).ok(),
            oracle: f64::ln,
        },
    ]
}

/// Outcome of fuzzing one operation.
#[derive(Debug)]
pub struct FuzzStats {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

/// Fuzzes a unary operation: the enclosure of a random interval must contain
/// the oracle value at a random point of it.
pub fn fuzz_unary(case: &UnaryCase, rng: &mut StdRng, n: usize, policy: &RoundingPolicy) -> FuzzStats {
    let mut failures = Vec::new();
    for _ in 0..n {
        let x = (case.input)(rng);
        let t = point_in(rng, &x);
        let ok = match (case.eval)(&x, policy) {
            Some(y) => contains_f64(&y, (case.oracle)(t.to_f64())),
            None => false,
        };
        if !ok && failures.len() < 5 {
            failures.push(format!("{}({x}) at {t}", case.name));
        }
    }
    FuzzStats { name: case.name, cases: n, failures }
}

/// Fuzzes the exact binary operations `+`, `−`, `×` with exact rational
/// oracles.
pub fn fuzz_binary(rng: &mut StdRng, n: usize, policy: &RoundingPolicy) -> Vec<FuzzStats> {
    let ops: [(
        &'static str,
        fn(&Interval, &Interval, &RoundingPolicy) -> Interval,
        fn(&Rational, &Rational) -> Rational,
    ); 3] = [
        ("add", |a, b, p| interval::add(&[a.clone(), b.clone()], p), |a, b| a + b),
        ("sub", |a, b, p| interval::sub(a, b, p), |a, b| a - b),
        ("mul", |a, b, p| interval::mul(&[a.clone(), b.clone()], p), |a, b| a * b),
    ];
    ops.iter()
        .map(|(name, op, exact)| {
            let mut failures = Vec::new();
            for _ in 0..n {
                let a = interval_in(rng, -1000.0, 1000.0, 100.0);
                let b = interval_in(rng, -1000.0, 1000.0, 100.0);
                let (s, t) = (point_in(rng, &a), point_in(rng, &b));
                if !op(&a, &b, policy).contains_value(&exact(&s, &t)) && failures.len() < 5 {
                    failures.push(format!("{name}({a}, {b}) at ({s}, {t})"));
                }
            }
            FuzzStats { name, cases: n, failures }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Definiteness against sampling

fn sym_random(rng: &mut StdRng, n: usize) -> SymIntervalMatrix {
    // A diagonally shifted random symmetric matrix, so that roughly half of
    // the cases are definite.
    let shift = rng.gen_range(-6..=6);
    let mut entries = vec![vec![Interval::ints(0, 0); n]; n];
    for i in 0..n {
        for j in i..n {
            let c = rng.gen_range(-3..=3) + if i == j { shift } else { 0 };
            let w = Rational::ratio(rng.gen_range(0..=4), 4);
            let lo = Rational::from_int(c);
            let x = Interval::closed(lo.clone(), &lo + &w);
            entries[i][j] = x.clone();
            entries[j][i] = x;
        }
    }
    SymIntervalMatrix::from_rows(entries).expect("symmetric")
}

/// A random member of `m`: each upper-triangle entry is an endpoint or a
/// random interior point, mirrored to keep the matrix symmetric.
fn sample_member(rng: &mut StdRng, m: &SymIntervalMatrix) -> RatMatrix {
    let n = m.order();
    let mut picks = vec![vec![BigRational::from_integer(0.into()); n]; n];
    for i in 0..n {
        for j in i..n {
            let x = m.get(i, j);
            let (a, b) = x.finite_bounds().expect("finite");
            let v = match rng.gen_range(0..3) {
                0 => a.clone(),
                1 => b.clone(),
                _ => point_in(rng, x),
            };
            picks[i][j] = v.to_big();
            picks[j][i] = v.to_big();
        }
    }
    RatMatrix::from_rows(picks).expect("square")
}

/// Number of contradictions between the vertex method and a sampling oracle
/// over `n` random symmetric interval matrices of order 1..=4.
///
/// A contradiction is a matrix the vertex method calls positive (negative)
/// definite with a sampled member that is not, or a sampled member that is
/// not definite while the vertex method says the whole set is. Also returns
/// how many matrices were found definite, to show both answers occur.
pub fn vertex_vs_sampling(rng: &mut StdRng, n: usize, samples: usize, digits: u32) -> (usize, usize) {
    let mut contradictions = 0;
    let mut definite = 0;
    for _ in 0..n {
        let order = rng.gen_range(1..=4);
        let m = sym_random(rng, order);
        for (kind, flip) in [(DefKind::Posdef, false), (DefKind::Negdef, true)] {
            let claim = m.is_definite(DefinitenessQuery::new(kind, DefMethod::Vertex), digits).expect("finite");
            definite += claim as usize;
            let all_members = (0..samples).all(|_| {
                let a = sample_member(rng, &m);
                if flip {
                    a.neg().is_posdef()
                } else {
                    a.is_posdef()
                }
            });
            if claim && !all_members {
                contradictions += 1;
            }
        }
    }
    (contradictions, definite)
}

// ---------------------------------------------------------------------------
// Subdivision tiling

/// Product of the widths of a finite box.
pub fn volume(bx: &[Interval]) -> Rational {
    bx.iter().fold(Rational::one(), |acc, x| {
        let (a, b) = x.finite_bounds().expect("finite");
        &acc * &(b - a)
    })
}

fn interiors_overlap(a: &[Interval], b: &[Interval]) -> bool {
    a.iter().zip(b).all(|(x, y)| {
        let ((xa, xb), (ya, yb)) = (x.finite_bounds().unwrap(), y.finite_bounds().unwrap());
        xa.max(ya) < xb.min(yb)
    })
}

/// Checks that `subdivide` tiles a random nondegenerate box: every piece lies
/// inside it, pieces have pairwise disjoint interiors and their volumes add
/// up exactly. Returns a description of the first violation.
pub fn check_tiling(rng: &mut StdRng) -> Result<(), String> {
    let dims = rng.gen_range(1..=4);
    let bx: Vec<Interval> = (0..dims)
        .map(|_| {
            let a = decimal(rng, -10.0, 10.0);
            let w = decimal(rng, 0.001, 5.0);
            Interval::closed(a.clone(), &a + &w)
        })
        .collect();
    let parts = rng.gen_range(1..=4);
    let dim = if rng.gen_bool(0.5) { Some(rng.gen_range(0..dims)) } else { None };
    let pieces = subdivide(&bx, parts, dim).map_err(|e| e.to_string())?;
    let expected = match dim {
        Some(_) => parts,
        None => parts.pow(dims as u32),
    };
    if pieces.len() != expected {
        return Err(format!("{} pieces, expected {expected}", pieces.len()));
    }
    if let Some(p) = pieces.iter().find(|p| !interval::contains_box(&bx, p)) {
        return Err(format!("piece {p:?} leaves the box"));
    }
    for (i, p) in pieces.iter().enumerate() {
        if let Some(q) = pieces[i + 1..].iter().find(|q| interiors_overlap(p, q)) {
            return Err(format!("pieces {p:?} and {q:?} overlap"));
        }
    }
    let total = pieces.iter().fold(Rational::zero(), |acc, p| &acc + &volume(p));
    if total != volume(&bx) {
        return Err(format!("volumes add up to {total}, box has {}", volume(&bx)));
    }
    Ok(())
}
