//! Certified fixed-point kernels for the elementary functions.
//!
//! Each kernel evaluates a function at an exact rational argument and
//! returns a value `v` and an error bound `err` such that the true result
//! lies in `[(v − err)/2^w, (v + err)/2^w]`. Arithmetic is done on big
//! integers scaled by `2^w`; every truncating step contributes at most one
//! unit in the last place (ulp), and the bounds below over-count those steps.
//! Series are stopped when the computed term vanishes; the remaining tails
//! are alternating or geometric with ratio well below 1/2 and are covered by
//! the constant slack in each bound.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{big_pow10, Rational};

/// A fixed-point value with scale `2^w` and an error bound in ulps.
#[derive(Clone, Debug)]
pub struct Fix {
    pub v: BigInt,
    pub err: BigInt,
    pub w: u32,
}

impl Fix {
    /// The certified enclosure `[(v − err)/2^w, (v + err)/2^w]`.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        let den = BigInt::one() << self.w;
        (BigRational::new(&self.v - &self.err, den.clone()), BigRational::new(&self.v + &self.err, den))
    }

    /// The same enclosure with decimal endpoints of about `sig` significant
    /// digits, rounded outward. Cheaper to work with than [`Fix::bounds`],
    /// whose power-of-two denominators need big-integer normalization.
    pub fn decimal_bounds(&self, sig: u32) -> (Rational, Rational) {
        let lo = decimal_floor(&(&self.v - &self.err), self.w, sig);
        let hi = -decimal_floor(&-(&self.v + &self.err), self.w, sig);
        (lo, hi)
    }

    fn exact(v: BigInt, w: u32) -> Fix {
        Fix { v, err: BigInt::zero(), w }
    }
}

/// `⌊n / 2^w⌋` on a decimal grid fine enough for about `sig` significant
/// digits: the largest `m · 10^(−s)` not above `n / 2^w`.
fn decimal_floor(n: &BigInt, w: u32, sig: u32) -> Rational {
    if n.is_zero() {
        return Rational::zero();
    }
    let bits = n.bits() as i64 - i64::from(w);
    let e10 = (bits as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let s = i64::from(sig) - e10;
    let den = BigInt::one() << w;
    let m =
        if s >= 0 { (n * big_pow10(s as u32)).div_floor(&den) } else { n.div_floor(&(den * big_pow10((-s) as u32))) };
    match (m.to_i128(), i32::try_from(-s)) {
        (Some(m), Ok(e)) => Rational::from_decimal(m, e),
        _ => {
            let v = BigRational::from_integer(m);
            let scale = BigRational::from_integer(big_pow10(s.unsigned_abs() as u32));
            Rational::from_big(if s >= 0 { v / scale } else { v * scale })
        }
    }
}

/// `floor(x · 2^w)`; error ≤ 1 ulp.
pub fn to_fix(x: &BigRational, w: u32) -> BigInt {
    (x.numer() << w).div_floor(x.denom())
}

fn bits_of_int_part(x: &BigRational) -> u32 {
    let i = x.abs().to_integer();
    i.bits() as u32
}

const PI_BITS: u32 = 4096;

/// `atan(1/k) · 2^w` by the alternating series; error ≤ 2·terms ulps.
fn atan_inv(k: u64, w: u32) -> BigInt {
    let mut power = (BigInt::one() << w) / k;
    let k2 = BigInt::from(k) * k;
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    while !power.is_zero() {
        let term = &power / (2 * n + 1);
        if n.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        n += 1;
    }
    sum
}

fn pi_table() -> &'static BigInt {
    static PI: OnceLock<BigInt> = OnceLock::new();
    PI.get_or_init(|| {
        // Machin: π = 16 atan(1/5) − 4 atan(1/239), with 64 guard bits; the
        // accumulated error (< 2^13 ulps at the guarded scale) vanishes after
        // the shift, leaving at most 1 ulp.
        let g = PI_BITS + 64;
        let v = atan_inv(5, g) * 16u32 - atan_inv(239, g) * 4u32;
        v >> 64usize
    })
}

/// π at scale `2^w`, error ≤ 2 ulps.
pub fn pi_fix(w: u32) -> Fix {
    let v = if w <= PI_BITS {
        pi_table() >> ((PI_BITS - w) as usize)
    } else {
        let g = w + 64;
        (atan_inv(5, g) * 16u32 - atan_inv(239, g) * 4u32) >> 64usize
    };
    Fix { v, err: BigInt::from(2), w }
}

/// Rational lower and upper bounds of π with absolute error ≤ 2^(2−w).
pub fn pi_bounds(w: u32) -> (BigRational, BigRational) {
    pi_fix(w).bounds()
}

/// sin and cos of an exact rational, at scale `2^w` plus guard bits.
pub fn sin_cos(x: &BigRational, w: u32) -> (Fix, Fix) {
    let ib = bits_of_int_part(x);
    let w = w + 32 + ib;
    let xf = to_fix(x, w);
    let pi = pi_fix(w + 2);
    let half_pi = &pi.v >> 3usize; // scale w: π/2 · 2^w, error ≤ 1
                                   // k = round(x / (π/2))
    let two = BigInt::from(2);
    let k: BigInt = (&xf * &two + &half_pi).div_floor(&(&half_pi * &two));
    let r = &xf - &k * &half_pi;
    let kabs = k.abs();
    let (s, c, n) = sin_cos_reduced(&r, w);
    let q = k.mod_floor(&BigInt::from(4)).to_u8().unwrap_or(0);
    let (sv, cv) = match q {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    // Reduction error ≤ 1 + 2|k|; series error ≤ 4n + 16; Lipschitz 1.
    let err: BigInt = kabs * 4u32 + BigInt::from(8 * n + 64);
    (Fix { v: sv, err: err.clone(), w }, Fix { v: cv, err, w })
}

/// Taylor series of sin and cos for |r| ≤ π/4 + tiny; returns term count.
fn sin_cos_reduced(r: &BigInt, w: u32) -> (BigInt, BigInt, u64) {
    let one = BigInt::one() << w;
    let r2 = (r * r) >> w;
    let mut s = r.clone();
    let mut term = r.clone();
    let mut n = 0u64;
    let mut i: u64 = 1;
    loop {
        term = ((&term * &r2) >> w) / ((2 * i) * (2 * i + 1));
        if term.is_zero() {
            break;
        }
        if i % 2 == 1 {
            s -= &term;
        } else {
            s += &term;
        }
        i += 1;
        n += 1;
    }
    let mut c = one.clone();
    let mut term = one;
    let mut i: u64 = 1;
    loop {
        term = ((&term * &r2) >> w) / ((2 * i - 1) * (2 * i));
        if term.is_zero() {
            break;
        }
        if i % 2 == 1 {
            c -= &term;
        } else {
            c += &term;
        }
        i += 1;
        n += 1;
    }
    (s, c, n)
}

/// atan of a fixed-point argument `t` (scale `2^w`, error `e` ulps).
fn atan_fixed(t: BigInt, e: BigInt, w: u32) -> Fix {
    let one = BigInt::one() << w;
    let one_sq = BigInt::one() << (2 * w);
    let mut t = t;
    let mut e = e;
    // Three halvings atan(t) = 2 atan(t / (1 + sqrt(1 + t²))); the map has
    // derivative ≤ 1/2, each step adds ≤ 2 ulps of rounding.
    for _ in 0..3 {
        let s = (&one_sq + &t * &t).sqrt();
        t = (&t << w) / (&one + s);
        e += 2;
    }
    let t2 = (&t * &t) >> w;
    let mut p = t.clone();
    let mut sum = t;
    let mut i: u64 = 1;
    loop {
        p = (&p * &t2) >> w;
        let term = &p / (2 * i + 1);
        if term.is_zero() {
            break;
        }
        if i % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        i += 1;
    }
    let err = (e + BigInt::from(4 * i + 16)) * 8;
    Fix { v: sum * 8, err, w }
}

/// atan of an exact rational.
pub fn atan(x: &BigRational, w: u32) -> Fix {
    let w = w + 32;
    if x.abs() > BigRational::one() {
        // atan(x) = sign(x)·π/2 − atan(1/x)
        let inner = atan_fixed(to_fix(&x.recip(), w), BigInt::one(), w);
        let half_pi = pi_fix(w + 1);
        let hp = &half_pi.v >> 2usize;
        let v = if x.is_positive() { hp - inner.v } else { -hp - inner.v };
        return Fix { v, err: inner.err + 4, w };
    }
    atan_fixed(to_fix(x, w), BigInt::one(), w)
}

/// arcsin of an exact rational in [−1, 1], via
/// asin(x) = 2 atan(x / (1 + sqrt(1 − x²))).
pub fn asin(x: &BigRational, w: u32) -> Fix {
    let w = w + 32;
    if x.abs().is_one() {
        let hp = pi_fix(w + 1);
        let v = &hp.v >> 2usize;
        let v = if x.is_positive() { v } else { -v };
        return Fix { v, err: BigInt::from(2), w };
    }
    let n = x.numer();
    let d = x.denom();
    let rad = ((d * d - n * n) << (2 * w)) / (d * d);
    let s = rad.sqrt(); // error < 1 ulp
    let xf = to_fix(x, w);
    let one = BigInt::one() << w;
    let t = (xf << w) / (one + s);
    let a = atan_fixed(t, BigInt::from(3), w);
    Fix { v: a.v * 2, err: a.err * 2, w }
}

/// exp of an exact rational (nonnegative arguments; negative ones are
/// handled by the caller via reciprocals).
pub fn exp_nonneg(x: &BigRational, w: u32) -> Fix {
    debug_assert!(!x.is_negative());
    let s = bits_of_int_part(x) + 4;
    let wk = w + s + 32;
    let y = x / BigRational::from_integer(BigInt::one() << s);
    let yf = to_fix(&y, wk);
    let one = BigInt::one() << wk;
    let mut sum = one.clone();
    let mut term = one;
    let mut i: u64 = 1;
    loop {
        term = ((&term * &yf) >> wk) / i;
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
    }
    for _ in 0..s {
        sum = (&sum * &sum) >> wk;
    }
    // Relative error before squaring ≤ (2i + 8) ulps (value ≥ 1); each
    // squaring at most doubles it and adds one ulp.
    let mag = (&sum >> wk) + 2;
    let err = (mag * BigInt::from(2 * i + 16)) << s;
    Fix { v: sum, err, w: wk }
}

/// 2·atanh(z) for a fixed-point 0 ≤ z < 1/2 (argument error ≤ 1 ulp).
fn two_atanh(z: BigInt, w: u32) -> Fix {
    let z2 = (&z * &z) >> w;
    let mut p = z.clone();
    let mut sum = z;
    let mut i: u64 = 1;
    loop {
        p = (&p * &z2) >> w;
        let term = &p / (2 * i + 1);
        if term.is_zero() {
            break;
        }
        sum += term;
        i += 1;
    }
    Fix { v: sum * 2, err: BigInt::from(4 * i + 16), w }
}

/// Natural logarithm of a positive exact rational.
pub fn ln(x: &BigRational, w: u32) -> Fix {
    assert!(x.is_positive());
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = BigRational::from_integer(BigInt::from(2));
    let scale = |k: i64| -> BigRational {
        if k >= 0 {
            x / BigRational::from_integer(BigInt::one() << (k as usize))
        } else {
            x * BigRational::from_integer(BigInt::one() << ((-k) as usize))
        }
    };
    let mut m = scale(k);
    while m >= two {
        k += 1;
        m = scale(k);
    }
    while m < BigRational::one() {
        k -= 1;
        m = scale(k);
    }
    let kb = BigInt::from(k);
    let w = w + 32 + kb.bits() as u32;
    let one = BigRational::one();
    let z = (&m - &one) / (&m + &one);
    let lm = two_atanh(to_fix(&z, w), w);
    if k == 0 {
        return lm;
    }
    let ln2 = two_atanh(to_fix(&BigRational::new(1.into(), 3.into()), w), w);
    let v = &kb * &ln2.v + lm.v;
    let err = kb.abs() * ln2.err + lm.err;
    Fix { v, err, w }
}

/// Floor and ceiling bounds of the `q`-th root of a nonnegative rational at
/// scale `2^w`: the root lies in `[lo/2^w, (lo+1)/2^w]`.
pub fn nth_root(x: &BigRational, q: u32, w: u32) -> Fix {
    assert!(!x.is_negative());
    // x^(1/q) = (n · d^(q−1))^(1/q) / d
    let n = x.numer();
    let d = x.denom();
    let radicand = (n * num_traits::pow(d.clone(), (q - 1) as usize)) << ((q * w) as usize);
    let r = radicand.nth_root(q); // floor
                                  // r/(d·2^w) ≤ root < (r+1)/(d·2^w): express at scale 2^w by flooring.
    let lo = r.div_floor(d);
    let exact_int = r.clone().pow(q) == radicand && (&r % d).is_zero();
    if exact_int {
        return Fix::exact(lo, w);
    }
    // root ∈ [lo, lo + 2] ulps → centre lo+1, error 1.
    Fix { v: lo + 1, err: BigInt::one(), w }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn check(f: &Fix, expect: f64, tol: f64) {
        let (lo, hi) = f.bounds();
        let lo = num_traits::ToPrimitive::to_f64(&lo).unwrap();
        let hi = num_traits::ToPrimitive::to_f64(&hi).unwrap();
        assert!(lo <= expect + tol && expect - tol <= hi, "{lo} {hi} vs {expect}");
        assert!(hi - lo < 1e-20);
    }

    #[test]
    fn pi_digits() {
        let (lo, hi) = pi_bounds(200);
        let s = "3.14159265358979323846264338327950288419716939937510";
        let p: crate::rational::Rational = s.parse().unwrap();
        let p = p.to_big();
        // The 50-digit truncation is within 10^-50 of π.
        let eps = q(1, 1) / BigRational::from_integer(num_traits::pow(BigInt::from(10), 49));
        assert!(lo <= &p + &eps && &p - &eps <= hi);
    }

    #[test]
    fn kernels_match_std() {
        for &(n, d) in &[(1, 1), (-7, 3), (22, 7), (1, 1000), (-355, 113), (100, 1)] {
            let x = q(n, d);
            let xf = n as f64 / d as f64;
            let (s, c) = sin_cos(&x, 100);
            check(&s, xf.sin(), 1e-13);
            check(&c, xf.cos(), 1e-13);
            check(&atan(&x, 100), xf.atan(), 1e-13);
        }
        for &(n, d) in &[(0, 1), (1, 2), (-1, 3), (999, 1000), (-1, 1)] {
            check(&asin(&q(n, d), 100), (n as f64 / d as f64).asin(), 1e-12);
        }
        for &(n, d) in &[(0, 1), (1, 1), (5, 2), (40, 1)] {
            let v = (n as f64 / d as f64).exp();
            check(&exp_nonneg(&q(n, d), 100), v, v * 1e-13);
        }
        for &(n, d) in &[(1, 1), (2, 1), (1, 7), (1000, 3)] {
            check(&ln(&q(n, d), 100), (n as f64 / d as f64).ln(), 1e-13);
        }
    }

    #[test]
    fn roots() {
        let r = nth_root(&q(9, 4), 2, 64);
        assert_eq!(r.bounds().0, q(3, 2));
        assert_eq!(r.bounds().1, q(3, 2));
        let r = nth_root(&q(2, 1), 2, 64);
        let (lo, hi) = r.bounds();
        assert!(&lo * &lo < q(2, 1) && &hi * &hi > q(2, 1));
    }
}
