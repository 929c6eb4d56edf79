//! Exact rational numbers with a compact decimal fast path.
//!
//! Every finite interval endpoint is a [`Rational`]. Values produced by outward
//! rounding are short decimals `m · 10^e`, so the common case is stored as an
//! `i128` mantissa and an exponent; arithmetic on such values is exact and
//! allocation-free. Anything that does not fit (non-decimal denominators such
//! as thirds from box subdivision, or mantissa overflow) falls back to
//! [`BigRational`] transparently. The two representations are never mixed up:
//! equality and ordering compare values, not representations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for [`Rational::round_digits`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Toward −∞.
    Down,
    /// Toward +∞.
    Up,
}

impl Direction {
    fn opposite(self) -> Direction {
        match self {
            Direction::Down => Direction::Up,
            Direction::Up => Direction::Down,
        }
    }
}

/// An exact rational number.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    /// The value `m · 10^e`.
    Dec {
        m: i128,
        e: i32,
    },
    Big(Box<BigRational>),
}

const POW10: [i128; 39] = {
    let mut t = [1i128; 39];
    let mut i = 1;
    while i < 39 {
        t[i] = t[i - 1] * 10;
        i += 1;
    }
    t
};

fn pow10_i128(k: i64) -> Option<i128> {
    if (0..39).contains(&k) {
        Some(POW10[k as usize])
    } else {
        None
    }
}

pub(crate) fn big_pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u8), k as usize)
}

/// Number of decimal digits of a nonzero magnitude.
fn digits_u128(a: u128) -> u32 {
    a.ilog10() + 1
}

fn dec_to_big(m: i128, e: i32) -> BigRational {
    let m = BigInt::from(m);
    if e >= 0 {
        BigRational::from_integer(m * big_pow10(e as u32))
    } else {
        BigRational::new(m, big_pow10(e.unsigned_abs()))
    }
}

impl Rational {
    /// Zero.
    pub fn zero() -> Self {
        Rational(Repr::Dec { m: 0, e: 0 })
    }

    /// One.
    pub fn one() -> Self {
        Rational(Repr::Dec { m: 1, e: 0 })
    }

    /// The integer `n`.
    pub fn from_int(n: i64) -> Self {
        Rational(Repr::Dec { m: n as i128, e: 0 })
    }

    /// The decimal `m · 10^e`.
    pub fn from_decimal(m: i128, e: i32) -> Self {
        if m == 0 {
            Self::zero()
        } else {
            Rational(Repr::Dec { m, e })
        }
    }

    /// `num / den`; panics if `den` is zero.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Converts from a big rational, using the decimal form when the
    /// denominator is of the form `2^a 5^b` and the mantissa fits.
    pub fn from_big(r: BigRational) -> Self {
        if let Some((m, e)) = big_as_decimal(&r) {
            return Rational::from_decimal(m, e);
        }
        Rational(Repr::Big(Box::new(r)))
    }

    /// The value as a big rational.
    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Dec { m, e } => dec_to_big(*m, *e),
            Repr::Big(b) => (**b).clone(),
        }
    }

    /// Numerator and denominator, not necessarily in lowest terms (cheap for
    /// the decimal representation).
    pub(crate) fn raw_parts(&self) -> (BigInt, BigInt) {
        match &self.0 {
            Repr::Dec { m, e } if *e >= 0 => (BigInt::from(*m) * big_pow10(*e as u32), BigInt::one()),
            Repr::Dec { m, e } => (BigInt::from(*m), big_pow10(e.unsigned_abs())),
            Repr::Big(b) => (b.numer().clone(), b.denom().clone()),
        }
    }

    /// Nearest `f64` (for display and test oracles only; never used in
    /// certified arithmetic).
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Dec { m, e } => {
                let s = format!("{m}e{e}");
                s.parse().unwrap_or(f64::NAN)
            }
            Repr::Big(b) => big_to_f64(b),
        }
    }

    /// Exact conversion of a finite `f64` (test helper for oracles).
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::from_big)
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Dec { m, .. } => *m == 0,
            Repr::Big(b) => b.is_zero(),
        }
    }

    /// −1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Dec { m, .. } => m.signum() as i32,
            Repr::Big(b) => match b.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::from_big(self.to_big().recip()))
    }

    /// `1/self` rounded to `digits` significant digits in direction `dir`;
    /// `None` for zero. Decimal values avoid big-integer arithmetic.
    pub fn recip_rounded(&self, digits: u32, dir: Direction) -> Option<Self> {
        if let Repr::Dec { m, e } = &self.0 {
            let a = m.unsigned_abs();
            if a == 0 {
                return None;
            }
            // 1/(m·10^e) = (10^k/m)·10^(−k−e), with about `digits` digits in
            // the integer quotient.
            let k = digits + digits_u128(a) - 1;
            if k <= 38 {
                let num = POW10[k as usize] as u128;
                let mut q = (num / a) as i128;
                let neg = *m < 0;
                if !num.is_multiple_of(a) && (dir == Direction::Up) != neg {
                    q += 1;
                }
                let q = if neg { -q } else { q };
                return Some(Rational::from_decimal(q, -(k as i32) - e).round_digits(digits, dir));
            }
        }
        Some(self.recip()?.round_digits(digits, dir))
    }

    /// `selfⁿ` rounded in direction `dir` to `digits` significant digits,
    /// with every partial product rounded the same way; `None` for `0ⁿ`
    /// with `n < 0`. The directed bound is valid for positive bases (other
    /// bases are computed exactly, then rounded).
    pub fn pow_rounded(&self, n: i32, digits: u32, dir: Direction) -> Option<Self> {
        if !self.is_positive() {
            return self.powi(n).map(|v| v.round_digits(digits, dir));
        }
        if n < 0 {
            return self.pow_rounded(-n, digits, dir.opposite())?.recip_rounded(digits, dir);
        }
        let mut acc = Rational::one();
        for _ in 0..n {
            acc = (&acc * self).round_digits(digits, dir);
        }
        Some(acc)
    }

    /// Exact quotient, `None` when dividing by zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self * &r)
    }

    /// Midpoint `(a + b) / 2`.
    pub fn midpoint(a: &Self, b: &Self) -> Self {
        let s = a + b;
        match &s.0 {
            Repr::Dec { m, e } if m % 2 == 0 => Rational::from_decimal(m / 2, *e),
            // m / 2 = 5m / 10, exact in decimal form when 5m fits.
            Repr::Dec { m, e } => match m.checked_mul(5) {
                Some(m5) => Rational::from_decimal(m5, e - 1),
                None => Self::from_big(s.to_big() / BigInt::from(2)),
            },
            Repr::Big(b) => Self::from_big((**b).clone() / BigInt::from(2)),
        }
    }

    /// Integer power (negative exponents allowed for nonzero values).
    pub fn powi(&self, n: i32) -> Option<Self> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut acc = Rational::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        Some(acc)
    }

    /// Floor as a big integer.
    pub fn floor(&self) -> BigInt {
        let b = self.to_big();
        b.numer().div_floor(b.denom())
    }

    /// Ceiling as a big integer.
    pub fn ceil(&self) -> BigInt {
        let b = self.to_big();
        let (q, r) = b.numer().div_mod_floor(b.denom());
        if r.is_zero() {
            q
        } else {
            q + 1
        }
    }

    /// Rounds to at most `digits` significant decimal digits in direction
    /// `dir`. The result is always a decimal (`m · 10^e`, `|m| < 10^digits`).
    pub fn round_digits(&self, digits: u32, dir: Direction) -> Self {
        assert!((1..=36).contains(&digits), "digits must be in 1..=36");
        match &self.0 {
            Repr::Dec { m, e } => {
                let a = m.unsigned_abs();
                if a == 0 {
                    return Self::zero();
                }
                let d = digits_u128(a);
                if d <= digits {
                    return self.clone();
                }
                let k = d - digits;
                let p = POW10[k as usize];
                let mut q = m / p;
                let inexact = m % p != 0;
                if inexact {
                    match dir {
                        Direction::Down if *m < 0 => q -= 1,
                        Direction::Up if *m > 0 => q += 1,
                        _ => {}
                    }
                }
                normalize_mantissa(q, e + k as i32, digits)
            }
            Repr::Big(b) => round_big(b, digits, dir),
        }
    }

    /// Decimal rendering with `sig` significant digits, truncated toward
    /// zero (display only).
    pub fn to_sci_string(&self, sig: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let r = self.abs();
        let lo = r.round_digits(sig, Direction::Down);
        let (m, e) = lo.as_decimal().expect("rounded value is decimal");
        let mut s = m.to_string();
        let mut e = e as i64;
        // Strip trailing zeros of the mantissa.
        while s.len() > 1 && s.ends_with('0') {
            s.pop();
            e += 1;
        }
        let point = s.len() as i64 + e; // position of the decimal point
        let body = if (-6..=21).contains(&point) {
            if e >= 0 {
                format!("{}{}", s, "0".repeat(e as usize))
            } else if point > 0 {
                format!("{}.{}", &s[..point as usize], &s[point as usize..])
            } else {
                format!("0.{}{}", "0".repeat((-point) as usize), s)
            }
        } else {
            let mant = if s.len() > 1 { format!("{}.{}", &s[..1], &s[1..]) } else { s.clone() };
            format!("{}e{}", mant, point - 1)
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// The decimal form `(m, e)` if stored as one.
    pub fn as_decimal(&self) -> Option<(i128, i32)> {
        match &self.0 {
            Repr::Dec { m, e } => Some((*m, *e)),
            Repr::Big(_) => None,
        }
    }

    /// `floor(log2 |x|)` approximately (within one); `None` for zero.
    pub fn log2_estimate(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let (n, d) = self.raw_parts();
        Some(n.bits() as i64 - d.bits() as i64)
    }
}

fn normalize_mantissa(q: i128, e: i32, digits: u32) -> Rational {
    // A carry can produce 10^digits; renormalize to keep the mantissa short.
    if q.unsigned_abs() == POW10[digits as usize] as u128 {
        Rational::from_decimal(q / 10, e + 1)
    } else {
        Rational::from_decimal(q, e)
    }
}

fn big_to_f64(b: &BigRational) -> f64 {
    let n = b.numer();
    let d = b.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    // Scale to keep both parts within f64 range.
    let (nn, dd) = if shift > 0 {
        (n.clone(), d.clone() << (shift as usize))
    } else {
        (n.clone() << ((-shift) as usize), d.clone())
    };
    let q = BigRational::new(nn << 64usize, dd);
    let v = q.to_integer().to_f64().unwrap_or(f64::NAN) / 18446744073709551616.0;
    v * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

fn big_as_decimal(r: &BigRational) -> Option<(i128, i32)> {
    let d = r.denom();
    if d.is_one() {
        // Strip trailing zeros so large integers such as 10^40 still fit.
        let mut n = r.numer().clone();
        let mut e = 0i32;
        if n.is_zero() {
            return Some((0, 0));
        }
        let ten = BigInt::from(10u8);
        while n.bits() > 126 {
            let (q, rem) = n.div_rem(&ten);
            if !rem.is_zero() {
                return None;
            }
            n = q;
            e += 1;
        }
        return n.to_i128().map(|m| (m, e));
    }
    let twos = d.trailing_zeros().unwrap_or(0);
    let mut rest = d.clone() >> (twos as usize);
    let five = BigInt::from(5u8);
    let mut fives = 0u64;
    loop {
        let (q, rem) = rest.div_rem(&five);
        if !rem.is_zero() {
            break;
        }
        rest = q;
        fives += 1;
    }
    if !rest.is_one() {
        return None;
    }
    let k = twos.max(fives);
    if k > 200 {
        return None;
    }
    let mult = num_traits::pow(BigInt::from(2u8), (k - twos) as usize)
        * num_traits::pow(BigInt::from(5u8), (k - fives) as usize);
    let m = (r.numer() * mult).to_i128()?;
    Some((m, -(k as i32)))
}

const LOG10_2: f64 = std::f64::consts::LOG10_2;

fn round_big(b: &BigRational, digits: u32, dir: Direction) -> Rational {
    if b.is_zero() {
        return Rational::zero();
    }
    let neg = b.is_negative();
    let n = b.numer().abs();
    let d = b.denom().clone();
    let est = ((n.bits() as f64 - d.bits() as f64) * LOG10_2).floor() as i64;
    let lower = BigInt::from(POW10[(digits - 1) as usize]);
    let upper = BigInt::from(POW10[digits as usize]);
    let mut t = est - (digits as i64 - 1);
    let (q, exact) = loop {
        let (num, den) =
            if t < 0 { (&n * big_pow10((-t) as u32), d.clone()) } else { (n.clone(), &d * big_pow10(t as u32)) };
        let (q, r) = num.div_rem(&den);
        if q >= upper {
            t += 1;
        } else if q < lower {
            t -= 1;
        } else {
            break (q, r.is_zero());
        }
    };
    let q = q.to_i128().expect("mantissa below 10^digits");
    // q = floor(|b| / 10^t); choose the directed neighbour.
    let away = !exact && ((dir == Direction::Up) != neg);
    let mag = if away { q + 1 } else { q };
    let m = if neg { -mag } else { mag };
    normalize_mantissa(m, t as i32, digits)
}

fn dec_add(m1: i128, e1: i32, m2: i128, e2: i32) -> Option<(i128, i32)> {
    if m1 == 0 {
        return Some((m2, e2));
    }
    if m2 == 0 {
        return Some((m1, e1));
    }
    if e1 == e2 {
        return m1.checked_add(m2).map(|m| (m, e1));
    }
    let (ms, es, ml, el) = if e1 < e2 { (m1, e1, m2, e2) } else { (m2, e2, m1, e1) };
    let p = pow10_i128(el as i64 - es as i64)?;
    let scaled = ml.checked_mul(p)?;
    scaled.checked_add(ms).map(|m| (m, es))
}

fn dec_cmp(m1: i128, e1: i32, m2: i128, e2: i32) -> Option<Ordering> {
    let s1 = m1.signum();
    let s2 = m2.signum();
    if s1 != s2 {
        return Some(s1.cmp(&s2));
    }
    if s1 == 0 {
        return Some(Ordering::Equal);
    }
    let mag1 = digits_u128(m1.unsigned_abs()) as i64 + e1 as i64;
    let mag2 = digits_u128(m2.unsigned_abs()) as i64 + e2 as i64;
    let ord = if mag1 != mag2 {
        mag1.cmp(&mag2)
    } else {
        let (a, b) = if e1 >= e2 {
            (m1.unsigned_abs().checked_mul(pow10_i128(e1 as i64 - e2 as i64)? as u128)?, m2.unsigned_abs())
        } else {
            (m1.unsigned_abs(), m2.unsigned_abs().checked_mul(pow10_i128(e2 as i64 - e1 as i64)? as u128)?)
        };
        a.cmp(&b)
    };
    Some(if s1 < 0 { ord.reverse() } else { ord })
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Repr::Dec { m: m1, e: e1 }, Repr::Dec { m: m2, e: e2 }) = (&self.0, &other.0) {
            if let Some(o) = dec_cmp(*m1, *e1, *m2, *e2) {
                return o;
            }
        }
        let (s1, s2) = (self.signum(), other.signum());
        if s1 != s2 {
            return s1.cmp(&s2);
        }
        self.to_big().cmp(&other.to_big())
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        if let (Repr::Dec { m: m1, e: e1 }, Repr::Dec { m: m2, e: e2 }) = (&self.0, &rhs.0) {
            if let Some((m, e)) = dec_add(*m1, *e1, *m2, *e2) {
                return Rational::from_decimal(m, e);
            }
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        Rational::from_big(self.to_big() + rhs.to_big())
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        if let (Repr::Dec { m: m1, e: e1 }, Repr::Dec { m: m2, e: e2 }) = (&self.0, &rhs.0) {
            if let (Some(m), Some(e)) = (m1.checked_mul(*m2), e1.checked_add(*e2)) {
                return Rational::from_decimal(m, e);
            }
        }
        if self.is_zero() || rhs.is_zero() {
            return Rational::zero();
        }
        Rational::from_big(self.to_big() * rhs.to_big())
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Dec { m, e } => match m.checked_neg() {
                Some(n) => Rational::from_decimal(n, *e),
                None => Rational::from_big(-dec_to_big(*m, *e)),
            },
            Repr::Big(b) => Rational(Repr::Big(Box::new(-(**b).clone()))),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $f(self, rhs: &'a Rational) -> Rational {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational::from_big(r)
    }
}

impl From<&Rational> for BigRational {
    fn from(r: &Rational) -> Self {
        r.to_big()
    }
}

/// Displays as `n` or `n/d` in lowest terms.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.to_big();
        if b.denom().is_one() {
            write!(f, "{}", b.numer())
        } else {
            write!(f, "{}/{}", b.numer(), b.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Error from parsing a rational literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `n`, `n/d`, or a decimal literal such as `-1.25e-3`; all exact.
impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n = parse_decimal(n.trim()).ok_or_else(err)?;
            let d = parse_decimal(d.trim()).ok_or_else(err)?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Rational::from_big(n / d));
        }
        parse_decimal(t).map(Rational::from_big).ok_or_else(err)
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let m: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let m = if neg { -m } else { m };
    let e = exp as i64 - frac.len() as i64;
    if e.unsigned_abs() > 100_000 {
        return None;
    }
    Some(if e >= 0 {
        BigRational::from_integer(m * big_pow10(e as u32))
    } else {
        BigRational::new(m, big_pow10((-e) as u32))
    })
}
