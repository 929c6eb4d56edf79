//! Interval extensions of powers and the elementary functions.
//!
//! Point values come from the certified kernels in [`super::fixed`]; the
//! interval extensions combine them using monotonicity and the locations of
//! extrema and poles, which are tested against rigorous rational bounds of π.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::fixed::{self, Fix};
use super::{hull, mul2_exact, round_out, Ext, Interval, IntervalError, RoundingPolicy};
use crate::rational::{Direction, Rational};

/// Rational bounds `p1 < π < p2` at the policy's decimal precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiEnclosure {
    pub p1: Rational,
    pub p2: Rational,
}

impl PiEnclosure {
    /// The enclosure with `digits` significant digits (`p2 − p1 ≤ 10^(1−D)`).
    pub fn new(digits: u32) -> Self {
        let bits = RoundingPolicy::with_digits(digits).kernel_bits() + 32;
        let (lo, hi) = fixed::pi_bounds(bits);
        PiEnclosure {
            p1: Rational::from_big(lo).round_digits(digits, Direction::Down),
            p2: Rational::from_big(hi).round_digits(digits, Direction::Up),
        }
    }

    /// `[p1, p2]` as an interval.
    pub fn interval(&self) -> Interval {
        Interval::closed(self.p1.clone(), self.p2.clone())
    }
}

/// Extra kernel bits so that small results keep their relative precision.
fn magnitude_bits(xs: &[&Rational]) -> u32 {
    xs.iter().filter_map(|x| x.log2_estimate()).map(|l| (-l).clamp(0, 2000) as u32).max().unwrap_or(0)
}

fn rat(x: BigRational) -> Rational {
    Rational::from_big(x)
}

fn closed_ext(lo: Ext, hi: Ext) -> Interval {
    Interval::new(lo, hi).expect("enclosure endpoints are ordered")
}

/// Final step shared by all extensions: outward rounding.
fn finish(lo: Ext, hi: Ext, p: &RoundingPolicy) -> Interval {
    round_out(&closed_ext(lo, hi), p)
}

// ---------------------------------------------------------------------------
// Powers

/// Significant digits kept by intermediate point enclosures: enough that the
/// final outward rounding to `policy.digits` gives the same interval as
/// exact intermediate bounds would.
fn guard_digits(p: &RoundingPolicy) -> u32 {
    (p.digits + 8).min(36)
}

/// `r^(num/den)` for a finite `r > 0` as rational bounds.
fn pos_pow_point(r: &Rational, num: &BigInt, den: u32, p: &RoundingPolicy) -> (Ext, Ext) {
    let e = num.to_i32().expect("exponent numerator fits in i32");
    let sig = guard_digits(p);
    let pow = |v: &Rational, dir| Ext::Fin(v.pow_rounded(e, sig, dir).expect("positive base"));
    if den == 1 {
        return (pow(r, Direction::Down), pow(r, Direction::Up));
    }
    let (n, d) = r.raw_parts();
    let rb = BigRational::new_raw(n, d);
    let w = p.kernel_bits() + 32 + magnitude_bits(&[r]) + (rb.to_integer().bits() as u32);
    let root = fixed::nth_root(&rb, den, w);
    let (rl, rh) = root.decimal_bounds(sig);
    let rl = if rl.is_positive() { Some(rl) } else { None };
    if e > 0 {
        let lo = match &rl {
            Some(v) => pow(v, Direction::Down),
            None => Ext::Fin(Rational::zero()),
        };
        (lo, pow(&rh, Direction::Up))
    } else {
        let lo = pow(&rh, Direction::Down);
        let hi = match &rl {
            Some(v) => pow(v, Direction::Up),
            None => Ext::PosInf,
        };
        (lo, hi)
    }
}

/// Value bounds of `x^n` at a nonnegative extended endpoint.
fn pos_pow_ext(x: &Ext, num: &BigInt, den: u32, p: &RoundingPolicy) -> (Ext, Ext) {
    let positive = num.is_positive();
    match x {
        Ext::PosInf => {
            let v = if positive { Ext::PosInf } else { Ext::Fin(Rational::zero()) };
            (v.clone(), v)
        }
        Ext::Fin(r) if r.is_zero() => {
            let v = if positive { Ext::Fin(Rational::zero()) } else { Ext::PosInf };
            (v.clone(), v)
        }
        Ext::Fin(r) => pos_pow_point(r, num, den, p),
        Ext::NegInf => unreachable!("nonnegative piece"),
    }
}

/// Range of `x^n` over a nonnegative piece `[l, h]`.
fn pos_pow_piece(l: &Ext, h: &Ext, num: &BigInt, den: u32, p: &RoundingPolicy) -> Interval {
    let (ll, lh) = pos_pow_ext(l, num, den, p);
    let (hl, hh) = pos_pow_ext(h, num, den, p);
    if num.is_positive() {
        closed_ext(ll, hh)
    } else {
        closed_ext(hl, lh)
    }
}

/// `x^n` for a rational exponent `n`, rounded outward.
///
/// Even-denominator exponents need a nonnegative base: negative parts are
/// clipped to zero when `truncate_negative_base` is set, otherwise the call
/// fails with [`IntervalError::NegativeRadicand`]. A wholly negative base is
/// always an error for even roots. `n = 0` gives `[1, 1]`; negative
/// exponents over bases touching zero give infinite endpoints.
pub fn pow_rat(x: &Interval, n: &BigRational, p: &RoundingPolicy) -> Result<Interval, IntervalError> {
    if n.is_zero() {
        return Ok(Interval::point(Rational::one()));
    }
    let Some((lo, hi)) = x.bounds() else {
        return Ok(Interval::empty());
    };
    let num = n.numer().clone();
    let den =
        n.denom().to_u32().ok_or_else(|| IntervalError::InvalidArgument("exponent denominator too large".into()))?;
    let zero = Ext::Fin(Rational::zero());
    let mut lo = lo.clone();
    if den % 2 == 0 && lo < zero {
        if *hi < zero || !p.truncate_negative_base {
            return Err(IntervalError::NegativeRadicand);
        }
        lo = zero.clone();
    }
    let mut pieces = Vec::with_capacity(2);
    if *hi >= zero {
        let l = if lo > zero { lo.clone() } else { zero.clone() };
        pieces.push(pos_pow_piece(&l, hi, &num, den, p));
    }
    if lo < zero {
        // Odd denominator: x^n = ±|x|^n.
        let h = if *hi < zero { hi.clone() } else { zero.clone() };
        let mirrored = pos_pow_piece(&h.neg(), &lo.neg(), &num, den, p);
        pieces.push(if num.is_odd() { mirrored.neg() } else { mirrored });
    }
    Ok(round_out(&hull(&pieces), p))
}

// ---------------------------------------------------------------------------
// Trigonometric functions

fn fix_bounds(f: &Fix) -> (Rational, Rational) {
    let (a, b) = f.bounds();
    (rat(a), rat(b))
}

thread_local! {
    static PI_DECIMALS: RefCell<HashMap<u32, (Rational, Rational)>> = RefCell::new(HashMap::new());
}

/// Bounds of π from the kernel at `w` bits as 30-digit decimals (cached).
fn pi_decimals(w: u32) -> (Rational, Rational) {
    PI_DECIMALS.with(|c| c.borrow_mut().entry(w).or_insert_with(|| fixed::pi_fix(w).decimal_bounds(30)).clone())
}

/// Rational bounds of π from the kernel at `w` bits.
fn pi_rationals(w: u32) -> (Rational, Rational) {
    let (pl, ph) = fixed::pi_bounds(w);
    (rat(pl), rat(ph))
}

/// Floating-point prefilter for [`hits`]: true when every `π·(offset +
/// period·k)` is at least `10⁻⁶` away from `[a, b]`. The `f64` errors are
/// below `10⁻⁹` for arguments up to `10³`, so a true answer is certain;
/// anything closer, or larger, goes to the exact test.
fn far_from_all(a: &Rational, b: &Rational, offset: &Rational, period: i64) -> bool {
    const MARGIN: f64 = 1e-6;
    let (af, bf, off) = (a.to_f64(), b.to_f64(), offset.to_f64());
    if !(af.abs() < 1e3 && bf.abs() < 1e3) {
        return false;
    }
    let pi = std::f64::consts::PI;
    let per = period as f64;
    // Nearest candidate at or above a − margin.
    let k = (((af - MARGIN) / pi - off) / per).ceil();
    let t = pi * (off + per * k);
    t > bf + MARGIN && pi * (off + per * (k - 1.0)) < af - MARGIN
}

/// Floating-point shortcut for [`hits`] in the other direction: true when
/// some `π·(offset + period·k)` lies at least `10⁻⁶` inside `[a, b]`.
fn surely_hits(a: &Rational, b: &Rational, offset: &Rational, period: i64) -> bool {
    const MARGIN: f64 = 1e-6;
    let (af, bf, off) = (a.to_f64(), b.to_f64(), offset.to_f64());
    if !(af.abs() < 1e3 && bf.abs() < 1e3) {
        return false;
    }
    let pi = std::f64::consts::PI;
    let per = period as f64;
    let k = (((af + MARGIN) / pi - off) / per).ceil();
    let t = pi * (off + per * k);
    t >= af + MARGIN && t <= bf - MARGIN
}

/// True if some `π·(offset + period·k)`, k ∈ ℤ, may lie in `[a, b]`
/// (tested against rational bounds of π, so "may" errs on the safe side).
fn hits(a: &Rational, b: &Rational, offset: &Rational, period: i64, w: u32) -> bool {
    if far_from_all(a, b, offset, period) {
        return false;
    }
    if surely_hits(a, b, offset, period) {
        return true;
    }
    let (pl, ph) = pi_decimals(w);
    let (pl, ph) = (&pl, &ph);
    let per = Rational::from_int(period);
    // Candidate k with π(offset + period·k) near [a, b]; every k outside
    // the range is far from [a, b], so a rough estimate widened by 2 will do.
    let (af, bf, off, perf) = (a.to_f64(), b.to_f64(), offset.to_f64(), period as f64);
    let (kmin, kmax): (BigInt, BigInt) = if af.abs() < 1e12 && bf.abs() < 1e12 {
        let pi = std::f64::consts::PI;
        let lo = ((af / pi - off) / perf).min((bf / pi - off) / perf);
        let hi = ((af / pi - off) / perf).max((bf / pi - off) / perf);
        (BigInt::from(lo.floor() as i64 - 2), BigInt::from(hi.ceil() as i64 + 2))
    } else {
        let approx = |v: &Rational| v.checked_div(pl).unwrap();
        (
            (&approx(a).min(a.checked_div(ph).unwrap()) - offset).checked_div(&per).unwrap().floor() - 2,
            (&approx(b).max(b.checked_div(ph).unwrap()) - offset).checked_div(&per).unwrap().ceil() + 2,
        )
    };
    let mut k = kmin;
    while k <= kmax {
        let t = offset + &(&per * &Rational::from_big(BigRational::from_integer(k.clone())));
        let (u, v) = (&t * pl, &t * ph);
        let (tl, th) = if u <= v { (u, v) } else { (v, u) };
        if tl <= *b && *a <= th {
            return true;
        }
        k += 1;
    }
    false
}

type PointBounds = [(Rational, Rational); 2];

thread_local! {
    /// Recent sin/cos point enclosures. The model evaluates `sin` and `cos`
    /// of the same box endpoints, and sibling boxes share endpoints.
    static SIN_COS_CACHE: RefCell<HashMap<(BigInt, BigInt, u32, u32), PointBounds>> = RefCell::new(HashMap::new());
}

const SIN_COS_CACHE_LIMIT: usize = 4096;

/// Decimal enclosures of `sin v` and `cos v` from the kernel at `w` bits,
/// with enough digits that rounding to `digits` afterwards is unaffected.
fn sin_cos_point(v: &Rational, w: u32, digits: u32) -> PointBounds {
    let (n, d) = v.raw_parts();
    let key = (n, d, w, digits);
    if let Some(hit) = SIN_COS_CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let (s, c) = fixed::sin_cos(&BigRational::new_raw(key.0.clone(), key.1.clone()), w);
    let bounds = [s.decimal_bounds(digits + 8), c.decimal_bounds(digits + 8)];
    SIN_COS_CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= SIN_COS_CACHE_LIMIT {
            c.clear();
        }
        c.insert(key, bounds.clone());
    });
    bounds
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Trig {
    Sin,
    Cos,
}

fn sin_cos_interval(x: &Interval, p: &RoundingPolicy, which: Trig) -> Interval {
    let Some((a, b)) = x.bounds() else {
        return Interval::empty();
    };
    let unit = || Interval::ints(-1, 1);
    let (Ext::Fin(a), Ext::Fin(b)) = (a, b) else {
        return unit();
    };
    let w = p.kernel_bits() + magnitude_bits(&[a, b]);
    // Boxes clearly narrower than 2π (with slack for the f64 conversion)
    // skip the exact test.
    if (b.to_f64() - a.to_f64()).abs() >= std::f64::consts::TAU - 1e-3
        && (b - a) >= &pi_rationals(w).0 * &Rational::from_int(2)
    {
        return unit();
    }
    let point = |v: &Rational| {
        let [s, c] = sin_cos_point(v, w, p.digits);
        if which == Trig::Sin {
            s
        } else {
            c
        }
    };
    let (al, ah) = point(a);
    let (mut lo, mut hi) = if a == b {
        (al, ah)
    } else {
        let (bl, bh) = point(b);
        (al.min(bl), ah.max(bh))
    };
    let half = Rational::ratio(1, 2);
    let (max_off, min_off) = match which {
        Trig::Sin => (half.clone(), -&half),
        Trig::Cos => (Rational::zero(), Rational::one()),
    };
    if a != b {
        if hits(a, b, &max_off, 2, w) {
            hi = Rational::one();
        }
        if hits(a, b, &min_off, 2, w) {
            lo = -Rational::one();
        }
    }
    let one = Rational::one();
    let lo = lo.max(-&one);
    let hi = hi.min(one);
    finish(Ext::Fin(lo), Ext::Fin(hi), p)
}

/// Interval sine, clipped to `[−1, 1]`.
pub fn sin(x: &Interval, p: &RoundingPolicy) -> Interval {
    sin_cos_interval(x, p, Trig::Sin)
}

/// Interval cosine, clipped to `[−1, 1]`.
pub fn cos(x: &Interval, p: &RoundingPolicy) -> Interval {
    sin_cos_interval(x, p, Trig::Cos)
}

/// Quotient enclosure `num / den` of two point enclosures; `None` if the
/// denominator enclosure contains zero.
fn ratio_bounds(n: (Rational, Rational), d: (Rational, Rational)) -> Option<(Rational, Rational)> {
    if d.0.signum() <= 0 && d.1.signum() >= 0 {
        return None;
    }
    let inv = Interval::closed(d.1.recip()?, d.0.recip()?);
    let q = mul2_exact(&Interval::closed(n.0, n.1), &inv);
    q.finite_bounds().map(|(a, b)| (a.clone(), b.clone()))
}

fn tan_cot_interval(x: &Interval, p: &RoundingPolicy, cot: bool) -> Interval {
    let Some((a, b)) = x.bounds() else {
        return Interval::empty();
    };
    let (Ext::Fin(a), Ext::Fin(b)) = (a, b) else {
        return Interval::entire();
    };
    let w = p.kernel_bits() + magnitude_bits(&[a, b]);
    let pole_off = if cot { Rational::zero() } else { Rational::ratio(1, 2) };
    if hits(a, b, &pole_off, 1, w) {
        return Interval::entire();
    }
    let point = |v: &Rational| {
        let (s, c) = fixed::sin_cos(&v.to_big(), w);
        let (s, c) = (fix_bounds(&s), fix_bounds(&c));
        if cot {
            ratio_bounds(c, s)
        } else {
            ratio_bounds(s, c)
        }
    };
    // tan increases and cot decreases between poles.
    let (first, second) = if cot { (b, a) } else { (a, b) };
    let lo = point(first).map(|r| Ext::Fin(r.0)).unwrap_or(Ext::NegInf);
    let hi = point(second).map(|r| Ext::Fin(r.1)).unwrap_or(Ext::PosInf);
    if lo > hi {
        return Interval::entire();
    }
    finish(lo, hi, p)
}

/// Interval tangent; unbounded when a pole may lie in `x`.
pub fn tan(x: &Interval, p: &RoundingPolicy) -> Interval {
    tan_cot_interval(x, p, false)
}

/// Interval cotangent; unbounded when a pole may lie in `x`.
pub fn cot(x: &Interval, p: &RoundingPolicy) -> Interval {
    tan_cot_interval(x, p, true)
}

// ---------------------------------------------------------------------------
// Inverse trigonometric functions

fn clip_unit(x: &Interval) -> Result<(Rational, Rational), IntervalError> {
    let c = x.intersect(&Interval::ints(-1, 1));
    match c.finite_bounds() {
        Some((a, b)) => Ok((a.clone(), b.clone())),
        None => Err(IntervalError::InvalidArgument("argument outside [-1, 1]".into())),
    }
}

fn asin_point(v: &Rational, w: u32) -> (Rational, Rational) {
    fix_bounds(&fixed::asin(&v.to_big(), w))
}

/// Interval arcsine. Parts of `x` outside `[−1, 1]` are clipped.
pub fn arcsin(x: &Interval, p: &RoundingPolicy) -> Result<Interval, IntervalError> {
    if x.is_empty() {
        return Ok(Interval::empty());
    }
    let (a, b) = clip_unit(x)?;
    let w = p.kernel_bits() + magnitude_bits(&[&a, &b]);
    let lo = asin_point(&a, w).0;
    let hi = asin_point(&b, w).1;
    Ok(finish(Ext::Fin(lo), Ext::Fin(hi), p))
}

/// Interval arccosine (`π/2 − arcsin`). Parts outside `[−1, 1]` are clipped.
pub fn arccos(x: &Interval, p: &RoundingPolicy) -> Result<Interval, IntervalError> {
    if x.is_empty() {
        return Ok(Interval::empty());
    }
    let (a, b) = clip_unit(x)?;
    let w = p.kernel_bits() + 8;
    let (plb, phb) = fixed::pi_bounds(w + 32);
    let half = Rational::ratio(1, 2);
    let (hl, hh) = (&rat(plb) * &half, &rat(phb) * &half);
    let lo = (&hl - &asin_point(&b, w).1).max(Rational::zero());
    let hi = &hh - &asin_point(&a, w).0;
    Ok(finish(Ext::Fin(lo), Ext::Fin(hi), p))
}

fn atan_ext(v: &Ext, w: u32, half_pi: &(Rational, Rational)) -> (Rational, Rational) {
    match v {
        Ext::NegInf => (-&half_pi.1, -&half_pi.0),
        Ext::PosInf => half_pi.clone(),
        Ext::Fin(r) => fix_bounds(&fixed::atan(&r.to_big(), w)),
    }
}

fn half_pi_bounds(w: u32) -> (Rational, Rational) {
    let (plb, phb) = fixed::pi_bounds(w + 32);
    let half = Rational::ratio(1, 2);
    (&rat(plb) * &half, &rat(phb) * &half)
}

/// Interval arctangent.
pub fn arctan(x: &Interval, p: &RoundingPolicy) -> Interval {
    let Some((a, b)) = x.bounds() else {
        return Interval::empty();
    };
    let fins: Vec<&Rational> = [a, b].into_iter().filter_map(Ext::finite).collect();
    let w = p.kernel_bits() + magnitude_bits(&fins);
    let hp = half_pi_bounds(w);
    let lo = atan_ext(a, w, &hp).0;
    let hi = atan_ext(b, w, &hp).1;
    finish(Ext::Fin(lo), Ext::Fin(hi), p)
}

/// Interval arccotangent with range `(0, π)`: `arccot x = π/2 − arctan x`.
pub fn arccot(x: &Interval, p: &RoundingPolicy) -> Interval {
    let Some((a, b)) = x.bounds() else {
        return Interval::empty();
    };
    let w = p.kernel_bits() + 8;
    let hp = half_pi_bounds(w);
    let lo = (&hp.0 - &atan_ext(b, w, &hp).1).max(Rational::zero());
    let hi = &hp.1 - &atan_ext(a, w, &hp).0;
    finish(Ext::Fin(lo), Ext::Fin(hi), p)
}

// ---------------------------------------------------------------------------
// Exponential and logarithm

fn exp_point(v: &Rational, w: u32) -> (Rational, Rational) {
    if v.is_zero() {
        return (Rational::one(), Rational::one());
    }
    let b = v.to_big();
    if b.is_negative() {
        let (lo, hi) = fixed::exp_nonneg(&-b, w).bounds();
        (rat(hi.recip()), rat(lo.recip()))
    } else {
        fix_bounds(&fixed::exp_nonneg(&b, w))
    }
}

/// Exact (unrounded) enclosure of exp over an interval.
fn exp_raw(x: &Interval, w: u32) -> Interval {
    let Some((a, b)) = x.bounds() else {
        return Interval::empty();
    };
    let lo = match a {
        Ext::NegInf => Ext::Fin(Rational::zero()),
        Ext::Fin(r) => Ext::Fin(exp_point(r, w).0.max(Rational::zero())),
        Ext::PosInf => unreachable!(),
    };
    let hi = match b {
        Ext::PosInf => Ext::PosInf,
        Ext::Fin(r) => Ext::Fin(exp_point(r, w).1),
        Ext::NegInf => unreachable!(),
    };
    closed_ext(lo, hi)
}

/// Interval exponential.
pub fn exp(x: &Interval, p: &RoundingPolicy) -> Interval {
    round_out(&exp_raw(x, p.kernel_bits()), p)
}

fn ln_point(v: &Rational, w: u32) -> (Rational, Rational) {
    if *v == Rational::one() {
        return (Rational::zero(), Rational::zero());
    }
    fix_bounds(&fixed::ln(&v.to_big(), w))
}

/// Exact (unrounded) enclosure of ln over a nonnegative interval.
fn ln_raw(x: &Interval, w: u32) -> Result<Interval, IntervalError> {
    let Some((a, b)) = x.bounds() else {
        return Ok(Interval::empty());
    };
    if a.signum() < 0 {
        return Err(IntervalError::InvalidArgument("logarithm of a negative number".into()));
    }
    let lo = match a {
        Ext::Fin(r) if r.is_zero() => Ext::NegInf,
        Ext::Fin(r) => Ext::Fin(ln_point(r, w).0),
        _ => unreachable!(),
    };
    let hi = match b {
        Ext::PosInf => Ext::PosInf,
        Ext::Fin(r) if r.is_zero() => Ext::NegInf,
        Ext::Fin(r) => Ext::Fin(ln_point(r, w).1),
        Ext::NegInf => unreachable!(),
    };
    Ok(closed_ext(lo, hi))
}

/// Interval natural logarithm; a zero lower endpoint maps to −∞.
pub fn ln(x: &Interval, p: &RoundingPolicy) -> Result<Interval, IntervalError> {
    Ok(round_out(&ln_raw(x, p.kernel_bits())?, p))
}

fn check_base(a: &Rational) -> Result<(), IntervalError> {
    if !a.is_positive() || *a == Rational::one() {
        return Err(IntervalError::InvalidArgument("base must be positive and different from 1".into()));
    }
    Ok(())
}

/// `a^x` for a positive rational base `a ≠ 1`, as `exp(x · ln a)`.
pub fn exp_base(a: &Rational, x: &Interval, p: &RoundingPolicy) -> Result<Interval, IntervalError> {
    check_base(a)?;
    let w = p.kernel_bits() + 32;
    let la = ln_raw(&Interval::point(a.clone()), w)?;
    let t = mul2_exact(x, &la);
    Ok(round_out(&exp_raw(&t, w), p))
}

/// `log_a x = ln x / ln a` for a positive rational base `a ≠ 1`.
pub fn log_base(a: &Rational, x: &Interval, p: &RoundingPolicy) -> Result<Interval, IntervalError> {
    check_base(a)?;
    let w = p.kernel_bits() + 32;
    let la = ln_raw(&Interval::point(a.clone()), w)?;
    let (l, h) = la.finite_bounds().expect("finite logarithm");
    if l.signum() <= 0 && h.signum() >= 0 {
        return Err(IntervalError::InvalidArgument("base too close to 1".into()));
    }
    let inv = Interval::closed(h.recip().unwrap(), l.recip().unwrap());
    let lx = ln_raw(x, w)?;
    Ok(round_out(&mul2_exact(&lx, &inv), p))
}
