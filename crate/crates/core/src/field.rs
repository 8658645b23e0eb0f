//! Numeric backends.
//!
//! Points are generic over a [`ComplexField`]. Three backends are provided:
//! exact Gaussian rationals ([`GaussRat`]), certified big-float complex
//! numbers ([`BigComplex`]) and plain `f64` complex numbers ([`FastComplex`])
//! for large Monte Carlo runs where certification is not needed.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::bigfloat::BigFloat;
use crate::gaussian::{GaussInt, GaussRat};

/// Real scalars of a backend. Constants are created from a prototype so that
/// they inherit its precision.
pub trait RealField:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_bigint_like(&self, n: &BigInt) -> Self;
    fn from_ratio_like(&self, r: &BigRational) -> Self;
    fn checked_div(&self, other: &Self) -> Option<Self>;
    fn floor(&self) -> BigInt;
    fn as_f64(&self) -> f64;
    fn vanishes(&self) -> bool;
    fn half(&self) -> Self;
    /// Absolute tolerance of one unit of scale: `0` for exact arithmetic,
    /// `2^(-bits/2)` otherwise.
    fn tolerance(&self) -> Self;
    /// Mantissa bits, `None` for exact arithmetic.
    fn precision(&self) -> Option<u32>;
    /// Same value at a higher precision; `None` when the backend cannot escalate.
    fn escalate(&self, bits: u32) -> Option<Self>;

    /// An upper bound `k` with `|self| < 2^k`, for sizing working precision.
    fn magnitude_bits(&self) -> i64 {
        let x = self.as_f64().abs();
        if x == 0.0 {
            i64::MIN
        } else {
            x.log2().floor() as i64 + 1
        }
    }

    fn zero_like(&self) -> Self {
        self.from_bigint_like(&BigInt::zero())
    }
    fn one_like(&self) -> Self {
        self.from_bigint_like(&BigInt::one())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        self.from_bigint_like(&BigInt::from(n))
    }
    fn abs(&self) -> Self {
        if *self < self.zero_like() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl RealField for BigRational {
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn from_ratio_like(&self, r: &BigRational) -> Self {
        r.clone()
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        (!Zero::is_zero(other)).then(|| self / other)
    }
    fn floor(&self) -> BigInt {
        self.floor().to_integer()
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn half(&self) -> Self {
        self / BigInt::from(2)
    }
    fn tolerance(&self) -> Self {
        BigRational::zero()
    }
    fn precision(&self) -> Option<u32> {
        None
    }
    fn escalate(&self, _bits: u32) -> Option<Self> {
        None
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

impl RealField for BigFloat {
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        BigFloat::from_bigint(n, self.precision())
    }
    fn from_ratio_like(&self, r: &BigRational) -> Self {
        BigFloat::from_ratio(r, self.precision())
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        BigFloat::checked_div(self, other)
    }
    fn floor(&self) -> BigInt {
        BigFloat::floor(self)
    }
    fn as_f64(&self) -> f64 {
        BigFloat::to_f64(self)
    }
    fn vanishes(&self) -> bool {
        BigFloat::is_zero(self)
    }
    fn half(&self) -> Self {
        BigFloat::half(self)
    }
    fn tolerance(&self) -> Self {
        let bits = self.precision();
        BigFloat::pow2(-(bits as i64 / 2), bits)
    }
    fn precision(&self) -> Option<u32> {
        Some(BigFloat::precision(self))
    }
    fn escalate(&self, bits: u32) -> Option<Self> {
        Some(self.with_precision(bits))
    }
    fn magnitude_bits(&self) -> i64 {
        BigFloat::magnitude_bits(self)
    }
    fn abs(&self) -> Self {
        BigFloat::abs(self)
    }
}

impl RealField for f64 {
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        ToPrimitive::to_f64(n).unwrap_or(f64::NAN)
    }
    fn from_ratio_like(&self, r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        (*other != 0.0).then(|| self / other)
    }
    fn floor(&self) -> BigInt {
        BigInt::from_f64(f64::floor(*self)).expect("finite f64")
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn vanishes(&self) -> bool {
        *self == 0.0
    }
    fn half(&self) -> Self {
        self * 0.5
    }
    fn tolerance(&self) -> Self {
        2f64.powi(-26)
    }
    fn precision(&self) -> Option<u32> {
        Some(53)
    }
    fn escalate(&self, _bits: u32) -> Option<Self> {
        None
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// Complex scalars of a backend.
pub trait ComplexField: Clone + Debug + PartialEq {
    type Real: RealField;

    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn checked_div(&self, other: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// Label used in reports and fixture files.
    fn backend_name() -> &'static str;
    /// Text form `a+bi` (rational or decimal).
    fn to_text(&self) -> String;

    fn norm_sqr(&self) -> Self::Real {
        let (a, b) = (self.re(), self.im());
        a.clone() * a + b.clone() * b
    }
    fn zero_like(&self) -> Self {
        let z = self.re().zero_like();
        Self::from_parts(z.clone(), z)
    }
    fn from_gauss_like(&self, g: &GaussInt) -> Self {
        let p = self.re();
        Self::from_parts(p.from_bigint_like(&g.re), p.from_bigint_like(&g.im))
    }
    fn from_ratio_parts_like(&self, re: &BigRational, im: &BigRational) -> Self {
        let p = self.re();
        Self::from_parts(p.from_ratio_like(re), p.from_ratio_like(im))
    }
    fn precision(&self) -> Option<u32> {
        self.re().precision()
    }
    /// Operands share a backend configuration (same precision).
    fn compatible(&self, other: &Self) -> bool {
        self.precision() == other.precision()
    }
    fn escalate(&self, bits: u32) -> Option<Self> {
        Some(Self::from_parts(self.re().escalate(bits)?, self.im().escalate(bits)?))
    }
}

impl ComplexField for GaussRat {
    type Real = BigRational;

    fn re(&self) -> BigRational {
        GaussRat::re(self)
    }
    fn im(&self) -> BigRational {
        GaussRat::im(self)
    }
    fn from_parts(re: BigRational, im: BigRational) -> Self {
        GaussRat::from_parts(&re, &im)
    }
    fn add(&self, other: &Self) -> Self {
        GaussRat::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        GaussRat::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        GaussRat::mul(self, other)
    }
    fn neg(&self) -> Self {
        GaussRat::neg(self)
    }
    fn conj(&self) -> Self {
        GaussRat::conj(self)
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        GaussRat::checked_div(self, other)
    }
    fn is_zero(&self) -> bool {
        GaussRat::is_zero(self)
    }
    fn backend_name() -> &'static str {
        "exact"
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn norm_sqr(&self) -> BigRational {
        self.norm()
    }
    fn from_gauss_like(&self, g: &GaussInt) -> Self {
        GaussRat::from_int(g.clone())
    }
}

/// Cartesian complex number over a floating real type.
#[derive(Clone, Debug, PartialEq)]
pub struct Cx<R> {
    pub re: R,
    pub im: R,
}

pub type BigComplex = Cx<BigFloat>;
pub type FastComplex = Cx<f64>;

impl<R: RealField> Cx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cx { re, im }
    }
}

pub trait FloatName: std::fmt::Display {
    fn name() -> &'static str;
}

impl FloatName for BigFloat {
    fn name() -> &'static str {
        "bigfloat"
    }
}

impl FloatName for f64 {
    fn name() -> &'static str {
        "f64"
    }
}

impl<R: RealField + FloatName> ComplexField for Cx<R> {
    type Real = R;

    fn re(&self) -> R {
        self.re.clone()
    }
    fn im(&self) -> R {
        self.im.clone()
    }
    fn from_parts(re: R, im: R) -> Self {
        Cx { re, im }
    }
    fn add(&self, o: &Self) -> Self {
        Cx::new(self.re.clone() + o.re.clone(), self.im.clone() + o.im.clone())
    }
    fn sub(&self, o: &Self) -> Self {
        Cx::new(self.re.clone() - o.re.clone(), self.im.clone() - o.im.clone())
    }
    fn mul(&self, o: &Self) -> Self {
        let (a, b, c, d) = (&self.re, &self.im, &o.re, &o.im);
        Cx::new(
            a.clone() * c.clone() - b.clone() * d.clone(),
            a.clone() * d.clone() + b.clone() * c.clone(),
        )
    }
    fn neg(&self) -> Self {
        Cx::new(-self.re.clone(), -self.im.clone())
    }
    fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -self.im.clone())
    }
    fn checked_div(&self, o: &Self) -> Option<Self> {
        let n = o.norm_sqr();
        if n.vanishes() {
            return None;
        }
        let num = self.mul(&o.conj());
        Some(Cx::new(num.re.checked_div(&n)?, num.im.checked_div(&n)?))
    }
    fn is_zero(&self) -> bool {
        self.re.vanishes() && self.im.vanishes()
    }
    fn backend_name() -> &'static str {
        R::name()
    }
    fn to_text(&self) -> String {
        format_float_complex(self)
    }
}

/// Decimal rendering `a+bi` of a floating complex number.
pub fn format_float_complex<R: RealField + std::fmt::Display>(c: &Cx<R>) -> String {
    let re = c.re.to_string();
    let im = c.im.to_string();
    if c.im.vanishes() {
        return re;
    }
    let (sign, mag) = match im.strip_prefix('-') {
        Some(m) => ('-', m.to_string()),
        None => ('+', im),
    };
    if c.re.vanishes() {
        if sign == '-' {
            format!("-{mag}i")
        } else {
            format!("{mag}i")
        }
    } else {
        format!("{re}{sign}{mag}i")
    }
}
