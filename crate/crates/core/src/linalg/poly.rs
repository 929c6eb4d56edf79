//! Exact univariate polynomials over ℚ and certified real-root isolation.
//!
//! Roots are isolated with Sturm sequences on the square-free factors of a
//! Yun decomposition, so repeated eigenvalues are reported with their
//! multiplicity. Bisection points are dyadic and every reported enclosure is
//! exact: the root lies in the closed interval `[lo, hi]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A polynomial with rational coefficients, lowest degree first, without
/// trailing zero coefficients (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    /// Builds a polynomial from coefficients, lowest degree first.
    pub fn new(mut coeffs: Vec<BigRational>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    /// Coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial has degree `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    /// Value at `x` (Horner).
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect(),
        )
    }

    fn monic(&self) -> Poly {
        let l = self.lead().clone();
        Poly(self.0.iter().map(|c| c / &l).collect())
    }

    /// Euclidean division `self = q·d + r`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::new(Vec::new()), Poly::new(r));
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        let lead = d.lead();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / lead;
            if !c.is_zero() {
                for (i, di) in d.0.iter().enumerate() {
                    r[k + i] -= &c * di;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Yun square-free decomposition: `self = c · ∏ aᵢ^i`. Returns the
    /// non-constant factors with their multiplicities.
    pub fn squarefree_factors(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let p = self.monic();
        let dp = p.derivative();
        let a0 = p.gcd(&dp);
        let mut b = p.div_rem(&a0).0;
        let c = dp.div_rem(&a0).0;
        let mut d = sub(&c, &b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            let nb = b.div_rem(&a).0;
            let nc = d.div_rem(&a).0;
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            d = sub(&nc, &nb.derivative());
            b = nb;
            i += 1;
        }
        out
    }

    /// Sturm sequence `p, p', −rem(p, p'), …`.
    fn sturm(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(Poly(r.0.iter().map(|c| -c).collect()));
        }
        seq
    }

    /// Upper bound on the modulus of every root (Cauchy).
    fn root_bound(&self) -> BigRational {
        let lead = self.lead().abs();
        let m = self.0[..self.0.len() - 1].iter().map(|c| c.abs() / &lead).max().unwrap_or_else(BigRational::zero);
        m + BigRational::one()
    }

    /// Isolates every real root of a square-free polynomial into disjoint
    /// closed intervals of width at most `tol`, in increasing order.
    pub fn isolate_real_roots(&self, tol: &BigRational) -> Vec<(BigRational, BigRational)> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let sturm = self.sturm();
        let var = |x: &BigRational| sign_variations(&sturm, x);
        let b = self.root_bound();
        let mut out = Vec::new();
        // (a, b, root at b already reported, sign variations at a and b)
        let mut stack = vec![(-b.clone(), b.clone(), false, var(&-b.clone()), var(&b))];
        while let Some((a, b, excl, va, vb)) = stack.pop() {
            let count = va - vb - usize::from(excl);
            if count == 0 {
                continue;
            }
            if count == 1 && &b - &a <= *tol {
                out.push((a, b));
                continue;
            }
            let m = (&a + &b) / BigRational::from_integer(BigInt::from(2));
            let vm = var(&m);
            let is_root = self.eval(&m).is_zero();
            if is_root {
                out.push((m.clone(), m.clone()));
            }
            // Push right half first so that roots come out in order.
            stack.push((m.clone(), b, excl, vm, vb));
            stack.push((a, m, is_root, va, vm));
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }

    /// Enclosures of all real roots counted with multiplicity, each of width
    /// at most `tol`, sorted by lower endpoint.
    pub fn real_roots_with_multiplicity(&self, tol: &BigRational) -> Vec<(BigRational, BigRational)> {
        let mut out = Vec::new();
        for (factor, mult) in self.squarefree_factors() {
            for r in factor.isolate_real_roots(tol) {
                for _ in 0..mult {
                    out.push(r.clone());
                }
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.0.len().max(b.0.len());
    let z = BigRational::zero();
    Poly::new((0..n).map(|i| a.0.get(i).unwrap_or(&z) - b.0.get(i).unwrap_or(&z)).collect())
}

fn sign_variations(seq: &[Poly], x: &BigRational) -> usize {
    let mut last = 0;
    let mut n = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}
