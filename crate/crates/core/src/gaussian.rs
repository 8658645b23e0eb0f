//! Exact arithmetic over the Gaussian integers `Z[i]` and the Gaussian
//! rationals `Q(i)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A Gaussian integer `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussInt {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        GaussInt::default()
    }

    pub fn one() -> Self {
        GaussInt::new(1, 0)
    }

    pub fn i() -> Self {
        GaussInt::new(0, 1)
    }

    pub fn from_real(re: impl Into<BigInt>) -> Self {
        GaussInt::new(re, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// `re² + im²`.
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        GaussInt {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    /// The unit multiple lying in the quadrant `re > 0, im ≥ 0` (zero maps to zero).
    pub fn canonical_associate(&self) -> Self {
        self.canonical_with_unit().0
    }

    /// Canonical associate together with the unit `u` such that `u·self` is canonical.
    pub fn canonical_with_unit(&self) -> (Self, GaussInt) {
        if self.is_zero() {
            return (GaussInt::zero(), GaussInt::one());
        }
        let mut g = self.clone();
        let mut unit = GaussInt::one();
        for _ in 0..4 {
            if g.re.is_positive() && !g.im.is_negative() {
                return (g, unit);
            }
            g = g.mul_i();
            unit = unit.mul_i();
        }
        unreachable!("some rotation of a nonzero Gaussian integer is canonical")
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical_associate() == *self
    }

    /// Euclidean quotient: coordinate-wise nearest integer of `self / other`.
    /// Halves round up.
    pub fn rounded_div(&self, other: &GaussInt) -> GaussInt {
        let n = other.norm();
        assert!(!n.is_zero(), "division by zero Gaussian integer");
        let num = self * &other.conj();
        let two_n = &n * 2;
        let round = |x: &BigInt| -> BigInt { (x * BigInt::from(2) + &n).div_floor(&two_n) };
        GaussInt {
            re: round(&num.re),
            im: round(&num.im),
        }
    }

    /// `self / other` when the division is exact.
    pub fn div_exact(&self, other: &GaussInt) -> Option<GaussInt> {
        let n = other.norm();
        if n.is_zero() {
            return None;
        }
        let num = self * &other.conj();
        let (qr, rr) = num.re.div_rem(&n);
        let (qi, ri) = num.im.div_rem(&n);
        if rr.is_zero() && ri.is_zero() {
            Some(GaussInt { re: qr, im: qi })
        } else {
            None
        }
    }

    pub fn divides(&self, other: &GaussInt) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_exact(self).is_some()
    }

    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.re.to_i64()?, self.im.to_i64()?))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn abs_f64(&self) -> f64 {
        self.norm().to_f64().unwrap_or(f64::INFINITY).sqrt()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a GaussInt> for &'a GaussInt {
            type Output = GaussInt;
            fn $method(self, rhs: &'a GaussInt) -> GaussInt {
                let f: fn(&GaussInt, &GaussInt) -> GaussInt = $body;
                f(self, rhs)
            }
        }
        impl $tr<GaussInt> for GaussInt {
            type Output = GaussInt;
            fn $method(self, rhs: GaussInt) -> GaussInt {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussInt> for GaussInt {
            type Output = GaussInt;
            fn $method(self, rhs: &'a GaussInt) -> GaussInt {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| GaussInt {
    re: &a.re + &b.re,
    im: &a.im + &b.im
});
forward_binop!(Sub, sub, |a, b| GaussInt {
    re: &a.re - &b.re,
    im: &a.im - &b.im
});
forward_binop!(Mul, mul, |a, b| GaussInt {
    re: &a.re * &b.re - &a.im * &b.im,
    im: &a.re * &b.im + &a.im * &b.re
});

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl From<i64> for GaussInt {
    fn from(n: i64) -> Self {
        GaussInt::from_real(n)
    }
}

impl From<(i64, i64)> for GaussInt {
    fn from((re, im): (i64, i64)) -> Self {
        GaussInt::new(re, im)
    }
}

/// Greatest common divisor, normalized to the canonical associate.
pub fn gi_gcd(a: &GaussInt, b: &GaussInt) -> Result<GaussInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdUndefined);
    }
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let q = x.rounded_div(&y);
        let r = &x - &(&q * &y);
        x = y;
        y = r;
    }
    Ok(x.canonical_associate())
}

/// Divides out the common factor of a projective triple and rotates it so
/// that `q` is the canonical associate.
pub fn reduce_triple(
    q: &GaussInt,
    r: &GaussInt,
    p: &GaussInt,
) -> Result<(GaussInt, GaussInt, GaussInt)> {
    if q.is_zero() {
        return Err(Error::PointAtInfinity);
    }
    let g = gi_gcd(&gi_gcd(q, r)?, p)?;
    let div = |x: &GaussInt| x.div_exact(&g).expect("gcd divides");
    let (q1, r1, p1) = (div(q), div(r), div(p));
    let (qc, unit) = q1.canonical_with_unit();
    Ok((qc, &unit * &r1, &unit * &p1))
}

/// Number of `(a, b) ∈ Z²` with `a² + b² = n`, counting signs and order.
pub fn r2_count(n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let mut m = n;
    while m % 2 == 0 {
        m /= 2;
    }
    let mut result = 4u64;
    let mut p = 3u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u64;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if p % 4 == 1 {
                result *= e + 1;
            } else if e % 2 == 1 {
                return 0;
            }
        }
        p += 2;
    }
    if m > 1 {
        if m % 4 == 1 {
            result *= 2;
        } else {
            return 0;
        }
    }
    result
}

/// An element of `Q(i)` stored as `num / den` with `gcd(num, den)` a unit and
/// `den` canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    num: GaussInt,
    den: GaussInt,
}

impl GaussRat {
    pub fn new(num: GaussInt, den: GaussInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: GaussInt, den: GaussInt) -> Self {
        if num.is_zero() {
            return GaussRat::zero();
        }
        let g = gi_gcd(&num, &den).expect("den nonzero");
        let mut num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        let (den, unit) = den.canonical_with_unit();
        num = &num * &unit;
        GaussRat { num, den }
    }

    pub fn zero() -> Self {
        GaussRat {
            num: GaussInt::zero(),
            den: GaussInt::one(),
        }
    }

    pub fn one() -> Self {
        GaussRat::from_int(GaussInt::one())
    }

    pub fn from_int(g: GaussInt) -> Self {
        GaussRat {
            num: g,
            den: GaussInt::one(),
        }
    }

    pub fn from_parts(re: &BigRational, im: &BigRational) -> Self {
        let den = re.denom() * im.denom();
        let num = GaussInt::new(
            re.numer() * im.denom(),
            im.numer() * re.denom(),
        );
        Self::reduced(num, GaussInt::from_real(den))
    }

    pub fn num(&self) -> &GaussInt {
        &self.num
    }

    pub fn den(&self) -> &GaussInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one_gauss()
    }

    pub fn to_gauss_int(&self) -> Option<GaussInt> {
        self.is_integral().then(|| self.num.clone())
    }

    pub fn re(&self) -> BigRational {
        let n = self.den.norm();
        let x = &self.num * &self.den.conj();
        BigRational::new(x.re, n)
    }

    pub fn im(&self) -> BigRational {
        let n = self.den.norm();
        let x = &self.num * &self.den.conj();
        BigRational::new(x.im, n)
    }

    pub fn norm(&self) -> BigRational {
        BigRational::new(self.num.norm(), self.den.norm())
    }

    pub fn conj(&self) -> Self {
        Self::reduced(self.num.conj(), self.den.conj())
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::reduced(&self.num + &o.num, self.den.clone());
        }
        Self::reduced(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::reduced(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn neg(&self) -> Self {
        GaussRat {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn checked_div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        Some(Self::reduced(&self.num * &o.den, &self.den * &o.num))
    }
}

impl GaussInt {
    fn is_one_gauss(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
}

fn fmt_complex(f: &mut fmt::Formatter<'_>, re: &BigRational, im: &BigRational) -> fmt::Result {
    let fmt_mag = |x: &BigRational| -> String {
        if x.is_integer() {
            x.numer().abs().to_string()
        } else {
            format!("{}/{}", x.numer().abs(), x.denom())
        }
    };
    if im.is_zero() {
        return write!(f, "{}", if re.is_negative() { format!("-{}", fmt_mag(re)) } else { fmt_mag(re) });
    }
    let mut out = String::new();
    if !re.is_zero() {
        if re.is_negative() {
            out.push('-');
        }
        out.push_str(&fmt_mag(re));
        out.push(if im.is_negative() { '-' } else { '+' });
    } else if im.is_negative() {
        out.push('-');
    }
    if !im.abs().is_one() {
        out.push_str(&fmt_mag(im));
    }
    out.push('i');
    f.write_str(&out)
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(
            f,
            &BigRational::from_integer(self.re.clone()),
            &BigRational::from_integer(self.im.clone()),
        )
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(f, &self.re(), &self.im())
    }
}

/// Parses a real literal: integer, `p/q`, or decimal `1.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("bad number `{s}`"));
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(n / d);
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() && int.is_empty() {
            return Err(err());
        }
        let digits = format!("{int}{frac}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let n = BigInt::from_str(&digits).map_err(|_| err())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(n, d));
    }
    if !s.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| err())?))
}

/// Parses `a+bi` style complex literals whose parts may be integers,
/// fractions `p/q` or decimals. Returns `(re, im)`.
pub fn parse_complex(s: &str) -> Result<(BigRational, BigRational)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for (idx, &b) in bytes.iter().enumerate() {
        if (b == b'+' || b == b'-') && idx > start {
            terms.push(&s[start..idx]);
            start = idx;
        }
    }
    terms.push(&s[start..]);
    let mut re = BigRational::zero();
    let mut im = BigRational::zero();
    let (mut seen_re, mut seen_im) = (false, false);
    for term in terms {
        let (neg, body) = match term.as_bytes().first() {
            Some(b'-') => (true, &term[1..]),
            Some(b'+') => (false, &term[1..]),
            _ => (false, term),
        };
        let (imag, body) = match body.strip_suffix('i') {
            Some(b) => (true, b),
            None => (false, body),
        };
        let mut val = if imag && body.is_empty() {
            BigRational::one()
        } else {
            parse_rational(body)?
        };
        if neg {
            val = -val;
        }
        if imag {
            if seen_im {
                return Err(Error::Parse(format!("duplicate imaginary part in `{s}`")));
            }
            seen_im = true;
            im = val;
        } else {
            if seen_re {
                return Err(Error::Parse(format!("duplicate real part in `{s}`")));
            }
            seen_re = true;
            re = val;
        }
    }
    Ok((re, im))
}

impl FromStr for GaussInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (re, im) = parse_complex(s)?;
        if !re.is_integer() || !im.is_integer() {
            return Err(Error::Parse(format!("`{s}` is not a Gaussian integer")));
        }
        Ok(GaussInt::new(re.to_integer(), im.to_integer()))
    }
}

impl FromStr for GaussRat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (re, im) = parse_complex(s)?;
        Ok(GaussRat::from_parts(&re, &im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    fn r2_naive(n: u64) -> u64 {
        let n = n as i64;
        let b = (n as f64).sqrt() as i64 + 1;
        let mut c = 0;
        for x in -b..=b {
            for y in -b..=b {
                if x * x + y * y == n {
                    c += 1;
                }
            }
        }
        c
    }

    /// All divisors of `x` up to units, by scanning every Gaussian integer of norm ≤ N(x).
    fn brute_divisors(x: &GaussInt) -> Vec<GaussInt> {
        let n = x.norm().to_i64().unwrap();
        let b = (n as f64).sqrt() as i64 + 1;
        let mut out = Vec::new();
        for a in -b..=b {
            for c in -b..=b {
                let d = g(a, c);
                if !d.is_zero() && d.is_canonical() && d.divides(x) {
                    out.push(d);
                }
            }
        }
        out
    }

    #[test]
    fn norms() {
        assert_eq!(g(0, 0).norm(), 0.into());
        assert_eq!(g(1, 1).norm(), 2.into());
        assert_eq!(g(3, 4).norm(), 25.into());
    }

    #[test]
    fn gcd_examples_against_divisor_search() {
        let d = gi_gcd(&g(2, 0), &g(1, 1)).unwrap();
        let common: Vec<_> = brute_divisors(&g(2, 0))
            .into_iter()
            .filter(|x| x.divides(&g(1, 1)))
            .collect();
        let best = common.iter().max_by_key(|x| x.norm()).unwrap();
        assert_eq!(d.norm(), best.norm());
        assert_eq!(d, g(1, 1));

        let d = gi_gcd(&g(5, 0), &g(3, 4)).unwrap();
        assert_eq!(d.norm(), 5.into());
        assert!(d.divides(&g(5, 0)) && d.divides(&g(3, 4)));
        let common: Vec<_> = brute_divisors(&g(5, 0))
            .into_iter()
            .filter(|x| x.divides(&g(3, 4)))
            .collect();
        assert!(common.iter().all(|x| x.norm() <= 5.into()));
        assert_eq!(d, g(2, 1));
    }

    #[test]
    fn gcd_with_zero_and_both_zero() {
        assert_eq!(gi_gcd(&g(-3, 2), &g(0, 0)).unwrap(), g(-3, 2).canonical_associate());
        assert_eq!(gi_gcd(&g(0, 0), &g(0, 0)), Err(Error::GcdUndefined));
    }

    #[test]
    fn canonical_associates() {
        assert_eq!(g(0, -5).canonical_associate(), g(5, 0));
        assert_eq!(g(1, -2).canonical_associate(), g(2, 1));
        assert_eq!(g(-1, -1).canonical_associate(), g(1, 1));
        assert_eq!(g(-2, 3).canonical_associate(), g(3, 2));
        assert_eq!(g(0, 0).canonical_associate(), g(0, 0));
    }

    #[test]
    fn reduce_triple_examples() {
        let (q, r, p) = reduce_triple(&g(2, 2), &g(0, 0), &g(2, 0)).unwrap();
        assert_eq!((q.clone(), r, p.clone()), (g(1, 1), g(0, 0), g(1, 0)));
        // projectively equal to the input: (2+2i)·p' = 2·q'
        assert_eq!(&g(2, 2) * &p, &g(2, 0) * &q);

        let (q, r, p) = reduce_triple(&g(0, -5), &g(0, 0), &g(-1, 0)).unwrap();
        assert_eq!((q, r, p), (g(5, 0), g(0, 0), g(0, -1)));

        assert_eq!(
            reduce_triple(&g(0, 0), &g(1, 0), &g(1, 0)),
            Err(Error::PointAtInfinity)
        );
    }

    #[test]
    fn r2_examples() {
        assert_eq!(r2_count(1), 4);
        assert_eq!(r2_count(3), 0);
        assert_eq!(r2_count(5), 8);
        assert_eq!(r2_count(25), 12);
    }

    #[test]
    fn r2_matches_enumeration_up_to_10k() {
        for n in 1..=10_000u64 {
            assert_eq!(r2_count(n), r2_naive(n), "n = {n}");
        }
    }

    #[test]
    fn text_round_trip_examples() {
        assert_eq!(g(0, -5).to_string(), "-5i");
        assert_eq!(g(3, 0).to_string(), "3");
        assert_eq!("1+1i".parse::<GaussInt>().unwrap().to_string(), "1+i");
        assert_eq!(g(2, -3).to_string(), "2-3i");
        assert_eq!("-i".parse::<GaussInt>().unwrap(), g(0, -1));
        assert!("1/2".parse::<GaussInt>().is_err());
        let x: GaussRat = "1+4/5i".parse().unwrap();
        assert_eq!(x.to_string(), "1+4/5i");
        let y: GaussRat = "-1/5i".parse().unwrap();
        assert_eq!(y.im(), BigRational::new((-1).into(), 5.into()));
        assert_eq!("0.25".parse::<GaussRat>().unwrap().to_string(), "1/4");
    }

    #[test]
    fn gauss_rat_field_ops() {
        let a: GaussRat = "1+2i".parse().unwrap();
        let b: GaussRat = "3-i".parse().unwrap();
        let q = a.checked_div(&b).unwrap();
        assert_eq!(q.mul(&b), a);
        assert_eq!(a.sub(&a), GaussRat::zero());
        assert!(GaussRat::one().checked_div(&GaussRat::zero()).is_none());
        assert!(q.den().is_canonical());
    }

    fn small() -> impl Strategy<Value = GaussInt> {
        (-1000i64..=1000, -1000i64..=1000).prop_map(|(a, b)| g(a, b))
    }

    proptest! {
        #[test]
        fn gcd_divides_and_cofactors_coprime(a in small(), b in small()) {
            prop_assume!(!(a.is_zero() && b.is_zero()));
            let d = gi_gcd(&a, &b).unwrap();
            prop_assert!(d.divides(&a) && d.divides(&b));
            let a1 = a.div_exact(&d).unwrap();
            let b1 = b.div_exact(&d).unwrap();
            prop_assert!(gi_gcd(&a1, &b1).unwrap().is_unit());
        }

        #[test]
        fn reduce_triple_idempotent(q in small(), r in small(), p in small(), k in small()) {
            prop_assume!(!q.is_zero() && !k.is_zero());
            let (q1, r1, p1) = reduce_triple(&(&q * &k), &(&r * &k), &(&p * &k)).unwrap();
            let again = reduce_triple(&q1, &r1, &p1).unwrap();
            prop_assert_eq!(&again, &(q1.clone(), r1.clone(), p1.clone()));
            prop_assert_eq!(&q1 * &r, &q * &r1);
            prop_assert_eq!(&q1 * &p, &q * &p1);
        }
    }
}
