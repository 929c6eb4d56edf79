//! Symmetric interval matrices and their definiteness.
//!
//! A [`SymIntervalMatrix`] `[A̲, Ā]` stands for every real symmetric matrix
//! lying entrywise between its bounds. Two families of tests decide
//! properties of the whole set:
//!
//! * the **vertex method** — the set is positive (semi)definite exactly when
//!   its `2^(n−1)` vertex matrices are, each of which is decided by an exact
//!   rational `LDLᵀ` factorization;
//! * the **eigenvalue method** — with midpoint `A_c` and radius `A_δ`, every
//!   member's eigenvalues lie within `ϱ(A_δ)` of those of `A_c`, so certified
//!   bounds on the spectrum of `A_c` and on the spectral radius `ϱ(A_δ)` give
//!   sufficient tests for all nine [`DefKind`]s.
//!
//! Every eigenvalue bound comes from the exact characteristic polynomial and
//! Sturm-sequence root isolation; no floating-point eigen-solver is involved.

mod poly;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::interval::{parse_interval, Interval, IntervalError};
use crate::rational::Rational;

pub use poly::Poly;

/// Errors from matrix construction, parsing and definiteness queries.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    /// The vertex method only decides the four (semi)definite kinds.
    #[error("the method specified cannot be applied: vertex method with query {0}")]
    MethodNotApplicable(DefKind),
    /// An operation needs finite entries.
    #[error("matrix has an infinite or empty entry")]
    NonFinite,
    /// The entries are not symmetric.
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    /// Rows of unequal length or an empty matrix.
    #[error("invalid matrix shape: {0}")]
    Shape(String),
    /// A fixture could not be read.
    #[error("invalid matrix fixture: {0}")]
    Parse(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// A dense symmetric matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    /// Builds the matrix with entries `f(i, j)`; `f` is only called for
    /// `i ≤ j` and mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> RatMatrix {
        let mut data = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[j * n + i] = v.clone();
                data[i * n + j] = v;
            }
        }
        RatMatrix { n, data }
    }

    /// A matrix from rows; fails unless square and symmetric.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<RatMatrix, LinalgError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::Shape(format!("expected a nonempty square matrix, got {n} rows")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(LinalgError::NotSymmetric(i, j));
                }
            }
        }
        Ok(RatMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    /// A matrix from small integers (row-major), for tests and examples.
    pub fn from_ints(rows: &[&[i64]]) -> Result<RatMatrix, LinalgError> {
        RatMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect(),
        )
    }

    /// `diag(d)`.
    pub fn diag(d: &[BigRational]) -> RatMatrix {
        RatMatrix::from_fn(d.len(), |i, j| if i == j { d[i].clone() } else { BigRational::zero() })
    }

    /// The `n × n` identity.
    pub fn identity(n: usize) -> RatMatrix {
        RatMatrix::diag(&vec![BigRational::from_integer(1.into()); n])
    }

    /// Order `n`.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)` (zero-based).
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.n + j]
    }

    /// `−A`.
    pub fn neg(&self) -> RatMatrix {
        RatMatrix { n: self.n, data: self.data.iter().map(|v| -v).collect() }
    }

    /// Approximate entries, row-major (test oracles only).
    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)).collect()
    }

    /// Exact positive-definiteness: every pivot of `LDLᵀ` is positive.
    pub fn is_posdef(&self) -> bool {
        self.ldl_test(true)
    }

    /// Exact positive-semidefiniteness: pivots are nonnegative and a zero
    /// pivot has an all-zero remaining column.
    pub fn is_possemidef(&self) -> bool {
        self.ldl_test(false)
    }

    fn ldl_test(&self, strict: bool) -> bool {
        let n = self.n;
        let mut a = self.data.clone();
        for k in 0..n {
            let p = a[k * n + k].clone();
            if p.is_negative() || (strict && p.is_zero()) {
                return false;
            }
            if p.is_zero() {
                if (k + 1..n).any(|i| !a[i * n + k].is_zero()) {
                    return false;
                }
                continue;
            }
            for i in k + 1..n {
                let l = &a[i * n + k] / &p;
                if l.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = &l * &a[k * n + j];
                    a[i * n + j] -= v;
                }
            }
        }
        true
    }

    /// The characteristic polynomial `det(xI − A)` (Faddeev–LeVerrier, exact).
    pub fn charpoly(&self) -> Poly {
        let n = self.n;
        let mut c = vec![BigRational::zero(); n + 1];
        c[n] = BigRational::from_integer(1.into());
        let mut m = vec![BigRational::zero(); n * n];
        for k in 1..=n {
            // M_k = A·M_{k−1} + c_{n−k+1}·I
            let mut next = vec![BigRational::zero(); n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = BigRational::zero();
                    for l in 0..n {
                        if !m[l * n + j].is_zero() {
                            s += self.get(i, l) * &m[l * n + j];
                        }
                    }
                    next[i * n + j] = s;
                }
                next[i * n + i] += &c[n - k + 1];
            }
            m = next;
            // c_{n−k} = −tr(A·M_k)/k
            let mut tr = BigRational::zero();
            for i in 0..n {
                for l in 0..n {
                    tr += self.get(i, l) * &m[l * n + i];
                }
            }
            c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
        }
        Poly::new(c)
    }

    /// Enclosures `[lo, hi]` of all eigenvalues with multiplicity, each of
    /// width at most `10^(−digits)`, sorted by lower endpoint.
    pub fn eigenvalue_enclosures(&self, digits: u32) -> Vec<(BigRational, BigRational)> {
        self.charpoly().real_roots_with_multiplicity(&tolerance(digits))
    }
}

fn tolerance(digits: u32) -> BigRational {
    BigRational::new(1.into(), BigInt::from(10).pow(digits))
}

/// Certified lower bound on the smallest eigenvalue of `a`.
pub fn min_eig_lower(a: &RatMatrix, digits: u32) -> BigRational {
    SpectrumBounds::of(a, digits).min_lo
}

/// Certified upper bound on the largest eigenvalue of `a`.
pub fn max_eig_upper(a: &RatMatrix, digits: u32) -> BigRational {
    SpectrumBounds::of(a, digits).max_hi
}

/// Certified upper bound on the spectral radius: the largest modulus of
/// any root-isolation endpoint.
pub fn spectral_radius_upper(a: &RatMatrix, digits: u32) -> BigRational {
    a.eigenvalue_enclosures(digits)
        .into_iter()
        .flat_map(|(lo, hi)| [lo.abs(), hi.abs()])
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// Certified two-sided bounds on the extreme eigenvalues of a rational
/// symmetric matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumBounds {
    /// `min_lo ≤ λ_min ≤ min_hi`.
    pub min_lo: BigRational,
    pub min_hi: BigRational,
    /// `max_lo ≤ λ_max ≤ max_hi`.
    pub max_lo: BigRational,
    pub max_hi: BigRational,
}

impl SpectrumBounds {
    pub fn of(a: &RatMatrix, digits: u32) -> SpectrumBounds {
        let e = a.eigenvalue_enclosures(digits);
        let min_lo = e.iter().map(|r| r.0.clone()).min().expect("n ≥ 1");
        let min_hi = e.iter().map(|r| r.1.clone()).min().unwrap();
        let max_lo = e.iter().map(|r| r.0.clone()).max().unwrap();
        let max_hi = e.iter().map(|r| r.1.clone()).max().unwrap();
        SpectrumBounds { min_lo, min_hi, max_lo, max_hi }
    }
}

/// The definiteness properties that can be queried of an interval matrix.
/// "Nonpositive definite" means *no member is positive definite*, and so on
/// for the other `non…` kinds; `Nondef` asserts that every member is
/// indefinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DefKind {
    Posdef,
    Negdef,
    Possemidef,
    Negsemidef,
    Nonposdef,
    Nonnegdef,
    Nonpossemidef,
    Nonnegsemidef,
    Nondef,
}

impl DefKind {
    pub const ALL: [DefKind; 9] = [
        DefKind::Posdef,
        DefKind::Negdef,
        DefKind::Possemidef,
        DefKind::Negsemidef,
        DefKind::Nonposdef,
        DefKind::Nonnegdef,
        DefKind::Nonpossemidef,
        DefKind::Nonnegsemidef,
        DefKind::Nondef,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DefKind::Posdef => "posdef",
            DefKind::Negdef => "negdef",
            DefKind::Possemidef => "possemidef",
            DefKind::Negsemidef => "negsemidef",
            DefKind::Nonposdef => "nonposdef",
            DefKind::Nonnegdef => "nonnegdef",
            DefKind::Nonpossemidef => "nonpossemidef",
            DefKind::Nonnegsemidef => "nonnegsemidef",
            DefKind::Nondef => "nondef",
        }
    }

    /// Whether the vertex method can decide this kind.
    pub fn is_definite_kind(self) -> bool {
        matches!(self, DefKind::Posdef | DefKind::Negdef | DefKind::Possemidef | DefKind::Negsemidef)
    }
}

impl fmt::Display for DefKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DefKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DefKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown query `{s}`"))
    }
}

/// How a definiteness query is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DefMethod {
    /// Exact, via all vertex matrices.
    Vertex,
    /// Sufficient test via eigenvalue bounds of `A_c` and `ϱ(A_δ)`.
    Eigenvalue,
}

impl DefMethod {
    pub fn name(self) -> &'static str {
        match self {
            DefMethod::Vertex => "vertex",
            DefMethod::Eigenvalue => "eigenvalue",
        }
    }
}

impl fmt::Display for DefMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DefMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vertex" => Ok(DefMethod::Vertex),
            "eigenvalue" => Ok(DefMethod::Eigenvalue),
            _ => Err(format!("unknown method `{s}`")),
        }
    }
}

/// A definiteness query: a property and the method deciding it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DefinitenessQuery {
    pub kind: DefKind,
    pub method: DefMethod,
}

impl DefinitenessQuery {
    pub fn new(kind: DefKind, method: DefMethod) -> Self {
        DefinitenessQuery { kind, method }
    }
}

/// Midpoint–radius form of a finite symmetric interval matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MidRad {
    /// `A_c = (A̲ + Ā)/2`.
    pub center: RatMatrix,
    /// `A_δ = (Ā − A̲)/2 ≥ 0`.
    pub radius: RatMatrix,
}

/// A symmetric matrix of intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymIntervalMatrix {
    n: usize,
    /// Upper triangle, row by row.
    upper: Vec<Interval>,
}

fn tri(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymIntervalMatrix {
    /// Builds the matrix with entries `f(i, j)` for `i ≤ j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Interval) -> SymIntervalMatrix {
        assert!(n >= 1, "order must be positive");
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        SymIntervalMatrix { n, upper }
    }

    /// A matrix from full rows; fails unless square and symmetric.
    pub fn from_rows(rows: Vec<Vec<Interval>>) -> Result<SymIntervalMatrix, LinalgError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::Shape(format!("expected a nonempty square matrix, got {n} rows")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(LinalgError::NotSymmetric(i, j));
                }
            }
        }
        Ok(SymIntervalMatrix::from_fn(n, |i, j| rows[i][j].clone()))
    }

    /// The degenerate interval matrix `[A, A]`.
    pub fn point(a: &RatMatrix) -> SymIntervalMatrix {
        SymIntervalMatrix::from_fn(a.order(), |i, j| Interval::point(Rational::from_big(a.get(i, j).clone())))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)` (zero-based; symmetric).
    pub fn get(&self, i: usize, j: usize) -> &Interval {
        &self.upper[tri(self.n, i, j)]
    }

    /// `−M = [−Ā, −A̲]`.
    pub fn neg(&self) -> SymIntervalMatrix {
        SymIntervalMatrix { n: self.n, upper: self.upper.iter().map(Interval::neg).collect() }
    }

    /// Whether every entry is a nonempty bounded interval.
    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(Interval::is_finite)
    }

    fn bounds(&self, i: usize, j: usize) -> Result<(BigRational, BigRational), LinalgError> {
        let (lo, hi) = self.get(i, j).finite_bounds().ok_or(LinalgError::NonFinite)?;
        Ok((lo.to_big(), hi.to_big()))
    }

    /// Midpoint and radius matrices; exact.
    pub fn mid_rad(&self) -> Result<MidRad, LinalgError> {
        if !self.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let two = BigRational::from_integer(2.into());
        let center = RatMatrix::from_fn(self.n, |i, j| {
            let (lo, hi) = self.bounds(i, j).unwrap();
            (lo + hi) / &two
        });
        let radius = RatMatrix::from_fn(self.n, |i, j| {
            let (lo, hi) = self.bounds(i, j).unwrap();
            (hi - lo) / &two
        });
        Ok(MidRad { center, radius })
    }

    /// Vertex matrix number `k` (`0 ≤ k < 2^(n−1)`): with `kᵢ` the `i`-th
    /// binary digit of `k` (least significant first, `kₙ = 0`), entry
    /// `(i, j)` is the lower bound when `kᵢ + kⱼ` is even and the upper bound
    /// otherwise.
    pub fn vertex_matrix(&self, k: u64) -> Result<RatMatrix, LinalgError> {
        if !self.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let bit = |i: usize| if i < 64 { (k >> i) & 1 } else { 0 };
        Ok(RatMatrix::from_fn(self.n, |i, j| {
            let (lo, hi) = self.bounds(i, j).unwrap();
            if (bit(i) + bit(j)) % 2 == 0 {
                lo
            } else {
                hi
            }
        }))
    }

    /// All `2^(n−1)` vertex matrices.
    pub fn vertex_matrices(&self) -> Result<Vec<RatMatrix>, LinalgError> {
        (0..self.vertex_count()).map(|k| self.vertex_matrix(k)).collect()
    }

    /// `2^(n−1)`.
    pub fn vertex_count(&self) -> u64 {
        1u64 << (self.n - 1)
    }

    /// Decides (or, for the eigenvalue method, tries to certify) the query
    /// for every member of the set. The vertex method is exact; the
    /// eigenvalue method returns `true` only with a certificate. A matrix
    /// with an infinite entry answers `false`.
    pub fn is_definite(&self, q: DefinitenessQuery, digits: u32) -> Result<bool, LinalgError> {
        if q.method == DefMethod::Vertex && !q.kind.is_definite_kind() {
            return Err(LinalgError::MethodNotApplicable(q.kind));
        }
        if !self.is_finite() {
            return Ok(false);
        }
        match q.method {
            DefMethod::Vertex => Ok(self.vertex_test(q.kind)),
            DefMethod::Eigenvalue => Ok(self.eigenvalue_test(q.kind, digits)),
        }
    }

    fn vertex_test(&self, kind: DefKind) -> bool {
        let m = match kind {
            DefKind::Negdef | DefKind::Negsemidef => self.neg(),
            _ => self.clone(),
        };
        let strict = matches!(kind, DefKind::Posdef | DefKind::Negdef);
        (0..m.vertex_count()).into_par_iter().all(|k| {
            let v = m.vertex_matrix(k).expect("finite");
            if strict {
                v.is_posdef()
            } else {
                v.is_possemidef()
            }
        })
    }

    fn eigenvalue_test(&self, kind: DefKind, digits: u32) -> bool {
        let mr = self.mid_rad().expect("finite");
        let c = SpectrumBounds::of(&mr.center, digits);
        let r = spectral_radius_upper(&mr.radius, digits);
        let zero = BigRational::zero();
        match kind {
            DefKind::Posdef => &c.min_lo - &r > zero,
            DefKind::Negdef => &c.max_hi + &r < zero,
            DefKind::Possemidef => &c.min_lo - &r >= zero,
            DefKind::Negsemidef => &c.max_hi + &r <= zero,
            DefKind::Nonposdef => &c.min_hi + &r <= zero,
            DefKind::Nonnegdef => &c.max_lo - &r >= zero,
            DefKind::Nonpossemidef => &c.min_hi + &r < zero,
            DefKind::Nonnegsemidef => &c.max_lo - &r > zero,
            DefKind::Nondef => &c.min_hi + &r < zero && &c.max_lo - &r > zero,
        }
    }

    /// Certified enclosure of the range of the `i`-th smallest eigenvalue
    /// (zero-based) over all members: `[λᵢ(A_c) − ϱ(A_δ), λᵢ(A_c) + ϱ(A_δ)]`
    /// with outward bounds.
    pub fn eig_interval_bounds(&self, i: usize, digits: u32) -> Result<Interval, LinalgError> {
        if i >= self.n {
            return Err(LinalgError::Interval(IntervalError::InvalidIndex { index: i, len: self.n }));
        }
        let mr = self.mid_rad()?;
        let e = mr.center.eigenvalue_enclosures(digits);
        // The i-th smallest lower endpoint is ≤ λᵢ and the i-th smallest
        // upper endpoint is ≥ λᵢ, even if isolation intervals overlap.
        let mut los: Vec<BigRational> = e.iter().map(|r| r.0.clone()).collect();
        let mut his: Vec<BigRational> = e.iter().map(|r| r.1.clone()).collect();
        los.sort();
        his.sort();
        let r = spectral_radius_upper(&mr.radius, digits);
        Ok(Interval::closed(Rational::from_big(&los[i] - &r), Rational::from_big(&his[i] + &r)))
    }

    /// Renders in the fixture format: the order on one line, then one line
    /// of interval literals per row.
    pub fn to_fixture(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the fixture format: `n`, then `n` rows of `n` interval
    /// literals separated by whitespace.
    pub fn from_fixture(text: &str) -> Result<SymIntervalMatrix, LinalgError> {
        let text = text.trim_start();
        let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
        let n: usize =
            first.trim().parse().map_err(|_| LinalgError::Parse(format!("bad order line `{}`", first.trim())))?;
        let mut rows = Vec::with_capacity(n);
        for line in rest.lines().filter(|l| !l.trim().is_empty()) {
            let mut row = Vec::with_capacity(n);
            let mut s = line.trim();
            while !s.is_empty() {
                let end =
                    s.find(']').ok_or_else(|| LinalgError::Parse(format!("unterminated interval in `{line}`")))?;
                row.push(parse_interval(&s[..=end])?);
                s = s[end + 1..].trim_start();
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(LinalgError::Parse(format!("expected {n} rows, found {}", rows.len())));
        }
        SymIntervalMatrix::from_rows(rows)
    }
}

impl fmt::Display for SymIntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
