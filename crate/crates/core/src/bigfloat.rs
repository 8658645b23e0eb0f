//! Binary floating point with an explicit mantissa precision.
//!
//! A value is `mant · 2^exp` with `|mant| < 2^prec`, rounded half-to-even
//! after every operation. The mantissa is kept odd (or zero) so that equal
//! values have identical representations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision shared by every big-float operation of one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    pub const MIN_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN_BITS
            )));
        }
        Ok(PrecisionContext { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `2^(-bits/2)`, the tolerance used for constraint and identity checks.
    pub fn check_scale(&self) -> BigFloat {
        BigFloat::pow2(-(self.bits as i64 / 2), self.bits)
    }

    pub fn doubled(&self) -> Self {
        PrecisionContext {
            bits: self.bits * 2,
        }
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::zero(self.bits)
    }

    pub fn from_i64(&self, n: i64) -> BigFloat {
        BigFloat::from_bigint(&BigInt::from(n), self.bits)
    }

    pub fn from_ratio(&self, r: &BigRational) -> BigFloat {
        BigFloat::from_ratio(r, self.bits)
    }
}

#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn pow2(e: i64, prec: u32) -> Self {
        BigFloat {
            mant: BigInt::one(),
            exp: e,
            prec,
        }
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        Self::round(n.clone(), 0, prec)
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        let n = Self::exact(r.numer().clone(), 0, prec);
        let d = Self::exact(r.denom().clone(), 0, prec);
        n.div_round(&d)
    }

    /// Nearest representable value to `x`.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite(), "non-finite f64");
        if x == 0.0 {
            return Self::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::round(BigInt::from(m) * sign, e, prec)
    }

    /// Mantissa/exponent pair without rounding; `prec` only tags the value.
    fn exact(mant: BigInt, exp: i64, prec: u32) -> Self {
        let mut v = BigFloat { mant, exp, prec };
        v.normalize();
        v
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    /// Rounds `mant · 2^exp` to `prec` bits, half to even.
    fn round(mant: BigInt, exp: i64, prec: u32) -> Self {
        let (sign, mag) = mant.into_parts();
        let bl = mag.bits();
        if bl <= prec as u64 {
            return Self::exact(BigInt::from_biguint(sign, mag), exp, prec);
        }
        let shift = bl - prec as u64;
        let mut q: BigUint = &mag >> shift;
        let rem: BigUint = &mag - (&q << shift);
        let half = BigUint::one() << (shift - 1);
        match rem.cmp(&half) {
            Ordering::Greater => q += 1u32,
            Ordering::Equal if q.is_odd() => q += 1u32,
            _ => {}
        }
        Self::exact(BigInt::from_biguint(sign, q), exp + shift as i64, prec)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Same value, tagged with (and rounded to) a new precision.
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::round(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// Smallest `k` with `|self| < 2^k` (`i64::MIN` for zero).
    pub fn magnitude_bits(&self) -> i64 {
        if self.mant.is_zero() {
            return i64::MIN;
        }
        self.mant.bits() as i64 + self.exp
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Exponent of the leading bit plus one: `2^(top-1) <= |x| < 2^top`.
    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    fn add_impl(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return other.with_precision(prec);
        }
        if other.is_zero() {
            return self.with_precision(prec);
        }
        // an addend below a quarter ulp of the other cannot change more than the last bit
        let gap = prec as i64 + 4;
        if self.top() - other.top() > gap {
            let nudged = Self::sticky(self, other);
            return Self::round(nudged.0, nudged.1, prec);
        }
        if other.top() - self.top() > gap {
            let nudged = Self::sticky(other, self);
            return Self::round(nudged.0, nudged.1, prec);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Self::round(a + b, e, prec)
    }

    /// `big + tiny` where `tiny` only acts as a sticky bit below `big`'s precision.
    fn sticky(big: &Self, tiny: &Self) -> (BigInt, i64) {
        let extra = (big.prec as u64 + 8).saturating_sub(big.mant.bits()) + 2;
        let m = &big.mant << extra as usize;
        let e = big.exp - extra as i64;
        let m = if tiny.is_negative() { m - 1 } else { m + 1 };
        (m, e)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        Self::round(&self.mant * &other.mant, self.exp + other.exp, prec)
    }

    fn div_round(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        assert!(!other.is_zero(), "BigFloat division by zero");
        if self.is_zero() {
            return Self::zero(prec);
        }
        let want = prec as i64 + 3;
        let shift = (want + other.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let num = self.mant.abs() << shift as usize;
        let (q, r) = num.div_rem(&other.mant.abs());
        let q: BigInt = q * 2 + if r.is_zero() { 0 } else { 1 };
        let negative = self.is_negative() != other.is_negative();
        let q = if negative { -q } else { q };
        Self::round(q, self.exp - other.exp - shift - 1, prec)
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        (!other.is_zero()).then(|| self.div_round(other))
    }

    /// `x / 2`, exact.
    pub fn half(&self) -> Self {
        let mut v = self.clone();
        if !v.is_zero() {
            v.exp -= 1;
        }
        v
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            // arithmetic shift rounds toward negative infinity
            &self.mant >> (-self.exp) as usize
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bl = self.mant.bits() as i64;
        let (m, e) = if bl > 64 {
            (&self.mant >> (bl - 64) as usize, self.exp + bl - 64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let m = m.to_f64().unwrap_or(f64::NAN);
        if e > 2100 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        let e1 = (e / 2) as i32;
        let e2 = (e - e / 2) as i32;
        m * 2f64.powi(e1) * 2f64.powi(e2)
    }

    /// Exact rational value.
    pub fn to_ratio(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        let s1 = self.mant.sign();
        let s2 = other.mant.sign();
        let rank = |s: Sign| match s {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        match rank(s1).cmp(&rank(s2)) {
            Ordering::Equal => {}
            o => return o,
        }
        if s1 == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag = match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                let a = self.mant.abs() << (self.exp - e) as usize;
                let b = other.mant.abs() << (other.exp - e) as usize;
                a.cmp(&b)
            }
            o => o,
        };
        if s1 == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }

    /// Decimal rendering with enough significant digits to read back the same value.
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let digits = (self.prec as f64 * std::f64::consts::LOG10_2).ceil() as i64 + 2;
        let r = self.to_ratio();
        let neg = r.is_negative();
        let r = r.abs();
        // scale so the integer part carries `digits` significant digits
        let mag10 = (self.top() as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let frac_digits = (digits - mag10 - 1).max(0);
        let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10), frac_digits as usize));
        let n = scaled.round().to_integer();
        let s = n.to_string();
        let s = if frac_digits == 0 {
            s
        } else {
            let fd = frac_digits as usize;
            let padded = if s.len() <= fd {
                format!("{}{}", "0".repeat(fd - s.len() + 1), s)
            } else {
                s
            };
            let (int, frac) = padded.split_at(padded.len() - fd);
            let frac = frac.trim_end_matches('0');
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        };
        if neg {
            format!("-{s}")
        } else {
            s
        }
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.mant == other.mant && self.exp == other.exp
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl Add for BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: BigFloat) -> BigFloat {
        self.add_impl(&rhs)
    }
}

impl Sub for BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: BigFloat) -> BigFloat {
        self.add_impl(&-rhs)
    }
}

impl Mul for BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: BigFloat) -> BigFloat {
        self.mul_impl(&rhs)
    }
}

impl Div for BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: BigFloat) -> BigFloat {
        self.div_round(&rhs)
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat {
            mant: -self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}
