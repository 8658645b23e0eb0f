//! The Heisenberg group in the planar Siegel model `{(u, v) : |u|² = 2 Re v}`,
//! its `C × R` coordinates, and integer points of the projective model.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bigfloat::PrecisionContext;
use crate::error::{Error, Result};
use crate::field::{format_float_complex, BigComplex, ComplexField, RealField};
use crate::gaussian::{parse_complex, reduce_triple, GaussInt, GaussRat};

/// A point of the Siegel model.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint<C> {
    pub u: C,
    pub v: C,
}

/// A point `(z, t)` of `C × R`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisPoint<C: ComplexField> {
    pub z: C,
    pub t: C::Real,
}

pub type ExactPoint = SiegelPoint<GaussRat>;
pub type FloatPoint = SiegelPoint<BigComplex>;

impl<C: ComplexField> SiegelPoint<C> {
    /// Builds a point and checks the Siegel constraint (exactly, or within
    /// `8·2^(-bits/2)·max(1, |v|)` on floating backends).
    pub fn new(u: C, v: C) -> Result<Self> {
        let h = SiegelPoint { u, v };
        if !h.satisfies_constraint() {
            return Err(Error::ConstraintViolation(format!("({}; {})", h.u.to_text(), h.v.to_text())));
        }
        Ok(h)
    }

    pub fn new_unchecked(u: C, v: C) -> Self {
        SiegelPoint { u, v }
    }

    pub fn origin_like(&self) -> Self {
        SiegelPoint {
            u: self.u.zero_like(),
            v: self.v.zero_like(),
        }
    }

    pub fn is_origin(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// `|u|² − 2 Re v`.
    pub fn constraint_defect(&self) -> C::Real {
        let re_v = self.v.re();
        self.u.norm_sqr() - (re_v.clone() + re_v)
    }

    pub fn satisfies_constraint(&self) -> bool {
        self.satisfies_constraint_within(8)
    }

    /// Constraint holds within `factor · tolerance · max(1, |v|)`.
    pub fn satisfies_constraint_within(&self, factor: i64) -> bool {
        let d = self.constraint_defect();
        let tol = d.tolerance();
        if tol.vanishes() {
            return d.vanishes();
        }
        let one = d.one_like();
        let scale2 = self.v.norm_sqr().max_of(one);
        let bound = tol.clone() * tol * d.from_i64_like(factor * factor) * scale2;
        d.clone() * d <= bound
    }

    /// Re-projects `Re v := |u|²/2` on floating backends.
    pub fn repaired(self) -> Self {
        if self.u.precision().is_none() {
            return self;
        }
        let re_v = self.u.norm_sqr().half();
        let v = C::from_parts(re_v, self.v.im());
        SiegelPoint { u: self.u, v }
    }

    fn check_backend(&self, other: &Self) -> Result<()> {
        if self.u.compatible(&other.u) {
            Ok(())
        } else {
            Err(Error::BackendMismatch(format!(
                "{:?} vs {:?} bits",
                self.u.precision(),
                other.u.precision()
            )))
        }
    }

    /// Group law `(u₁ + u₂, v₁ + ū₁u₂ + v₂)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_backend(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        SiegelPoint {
            u: self.u.add(&other.u),
            v: self.v.add(&self.u.conj().mul(&other.u)).add(&other.v),
        }
    }

    /// `(−u, v̄)`.
    pub fn inv(&self) -> Self {
        SiegelPoint {
            u: self.u.neg(),
            v: self.v.conj(),
        }
    }

    /// The Koranyi inversion `(−u/v, 1/v)`.
    pub fn koranyi_inversion(&self) -> Result<Self> {
        if self.v.is_zero() {
            return Err(Error::InversionAtOrigin);
        }
        let one = C::from_parts(self.v.re().one_like(), self.v.re().zero_like());
        let inv_v = one.checked_div(&self.v).ok_or(Error::InversionAtOrigin)?;
        let u = self.u.neg().mul(&inv_v);
        Ok(SiegelPoint { u, v: inv_v }.repaired())
    }

    /// `‖h‖⁴ = |v|²`, computed in the backend.
    pub fn gauge_norm4(&self) -> C::Real {
        self.v.norm_sqr()
    }

    /// `‖h‖ = |v|^(1/2)`.
    pub fn gauge_norm(&self) -> f64 {
        self.gauge_norm4().as_f64().sqrt().sqrt()
    }

    /// `v`-coordinate of `self⁻¹ * other`: `v̄₁ − ū₁u₂ + v₂`.
    pub fn difference_v(&self, other: &Self) -> Result<C> {
        self.check_backend(other)?;
        Ok(self
            .v
            .conj()
            .sub(&self.u.conj().mul(&other.u))
            .add(&other.v))
    }

    /// `d(h₁, h₂)⁴`, computed in the backend.
    pub fn distance4(&self, other: &Self) -> Result<C::Real> {
        Ok(self.difference_v(other)?.norm_sqr())
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.distance4(other)?.as_f64().sqrt().sqrt())
    }

    /// Embeds an integer pair using this point's backend.
    pub fn lift_like(&self, u: &GaussInt, v: &GaussInt) -> Self {
        SiegelPoint {
            u: self.u.from_gauss_like(u),
            v: self.u.from_gauss_like(v),
        }
    }

    /// Same point at a higher working precision (floating backends only).
    pub fn escalate(&self, bits: u32) -> Option<Self> {
        Some(SiegelPoint {
            u: self.u.escalate(bits)?,
            v: self.v.escalate(bits)?,
        })
    }

    pub fn precision(&self) -> Option<u32> {
        self.u.precision()
    }

    pub fn to_heis(&self) -> HeisPoint<C> {
        // z = u / (1 + i) = ((a + b) + (b − a) i) / 2
        let (a, b) = (self.u.re(), self.u.im());
        let z = C::from_parts((a.clone() + b.clone()).half(), (b - a).half());
        HeisPoint { z, t: self.v.im() }
    }

    pub fn from_heis(h: &HeisPoint<C>) -> Self {
        // u = z(1 + i), v = |z|² + t i
        let (x, y) = (h.z.re(), h.z.im());
        let u = C::from_parts(x.clone() - y.clone(), x + y);
        let v = C::from_parts(h.z.norm_sqr(), h.t.clone());
        SiegelPoint { u, v }
    }
}

impl ExactPoint {
    pub fn from_gauss(u: GaussInt, v: GaussInt) -> Result<Self> {
        SiegelPoint::new(GaussRat::from_int(u), GaussRat::from_int(v))
    }

    pub fn origin() -> Self {
        SiegelPoint {
            u: GaussRat::zero(),
            v: GaussRat::zero(),
        }
    }

    /// Lifts an exact point into a floating backend.
    pub fn to_backend<C: ComplexField>(&self, proto: &C) -> SiegelPoint<C> {
        SiegelPoint {
            u: proto.from_ratio_parts_like(&self.u.re(), &self.u.im()),
            v: proto.from_ratio_parts_like(&self.v.re(), &self.v.im()),
        }
    }
}

impl FloatPoint {
    pub fn origin(ctx: PrecisionContext) -> Self {
        let z = BigComplex::new(ctx.zero(), ctx.zero());
        SiegelPoint { u: z.clone(), v: z }
    }
}

/// An integer point `(q : r : p)` of the projective model, in lowest terms
/// with `q` the canonical associate. Represents `(r/q, p/q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjIntPoint {
    q: GaussInt,
    r: GaussInt,
    p: GaussInt,
}

/// `|r|² − 2 Re(q̄ p)`.
pub fn projective_defect(q: &GaussInt, r: &GaussInt, p: &GaussInt) -> BigInt {
    let qp = &q.conj() * p;
    r.norm() - qp.re * 2
}

impl ProjIntPoint {
    pub fn new(q: GaussInt, r: GaussInt, p: GaussInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::PointAtInfinity);
        }
        if !projective_defect(&q, &r, &p).is_zero() {
            return Err(Error::ConstraintViolation(format!("[{q} : {r} : {p}]")));
        }
        let (q, r, p) = reduce_triple(&q, &r, &p)?;
        Ok(ProjIntPoint { q, r, p })
    }

    pub fn q(&self) -> &GaussInt {
        &self.q
    }
    pub fn r(&self) -> &GaussInt {
        &self.r
    }
    pub fn p(&self) -> &GaussInt {
        &self.p
    }

    pub fn triple(&self) -> (GaussInt, GaussInt, GaussInt) {
        (self.q.clone(), self.r.clone(), self.p.clone())
    }

    /// `(r/q, p/q)`.
    pub fn to_planar(&self) -> ExactPoint {
        let q = GaussRat::from_int(self.q.clone());
        SiegelPoint::new_unchecked(
            GaussRat::from_int(self.r.clone()).checked_div(&q).expect("q != 0"),
            GaussRat::from_int(self.p.clone()).checked_div(&q).expect("q != 0"),
        )
    }

    /// `(r/q, p/q)` evaluated in the backend of `proto`.
    pub fn to_planar_like<C: ComplexField>(&self, proto: &C) -> SiegelPoint<C> {
        let q = proto.from_gauss_like(&self.q);
        SiegelPoint::new_unchecked(
            proto.from_gauss_like(&self.r).checked_div(&q).expect("q != 0"),
            proto.from_gauss_like(&self.p).checked_div(&q).expect("q != 0"),
        )
    }

    /// `(u, v) ↦ (1 : u : v)`, cleared of denominators.
    pub fn from_planar(h: &ExactPoint) -> Result<Self> {
        let (nu, du) = (h.u.num(), h.u.den());
        let (nv, dv) = (h.v.num(), h.v.den());
        let q = du * dv;
        let r = nu * dv;
        let p = nv * du;
        ProjIntPoint::new(q, r, p)
    }

    /// `|P̄ − R̄u + Q̄v|`-type pairing `p̄ − r̄u + q̄v` with a planar point.
    pub fn pairing<C: ComplexField>(&self, h: &SiegelPoint<C>) -> C {
        pairing(&self.q, &self.r, &self.p, h)
    }
}

/// `p̄ − r̄u + q̄v` for a (not necessarily reduced) integer triple.
pub fn pairing<C: ComplexField>(
    q: &GaussInt,
    r: &GaussInt,
    p: &GaussInt,
    h: &SiegelPoint<C>,
) -> C {
    let lift = |g: &GaussInt| h.u.from_gauss_like(&g.conj());
    lift(p).sub(&lift(r).mul(&h.u)).add(&lift(q).mul(&h.v))
}

impl fmt::Display for ProjIntPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {} : {}]", self.q, self.r, self.p)
    }
}

impl FromStr for ProjIntPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected `[q : r : p]`, got `{s}`")))?;
        let parts: Vec<&str> = inner.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected three components in `{s}`")));
        }
        ProjIntPoint::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?)
    }
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.u, self.v)
    }
}

impl fmt::Display for FloatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}; {})",
            format_float_complex(&self.u),
            format_float_complex(&self.v)
        )
    }
}

fn split_pair(s: &str, prefix: Option<&str>) -> Result<(String, String)> {
    let mut body = s.trim();
    if let Some(p) = prefix {
        body = body.strip_prefix(p).unwrap_or(body).trim();
    }
    let body = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .unwrap_or(body);
    let sep = if body.contains(';') { ';' } else { ',' };
    let (a, b) = body
        .split_once(sep)
        .ok_or_else(|| Error::Parse(format!("expected two components in `{s}`")))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

/// Parses `(u; v)` into exact rational coordinates.
pub fn parse_planar_parts(
    s: &str,
) -> Result<((BigRational, BigRational), (BigRational, BigRational))> {
    let (a, b) = split_pair(s, None)?;
    Ok((parse_complex(&a)?, parse_complex(&b)?))
}

/// Parses `heis(z; t)` (or `z, t`) into exact rational coordinates.
pub fn parse_heis_parts(s: &str) -> Result<((BigRational, BigRational), BigRational)> {
    let (a, b) = split_pair(s, Some("heis"))?;
    let z = parse_complex(&a)?;
    let (t, t_im) = parse_complex(&b)?;
    if !t_im.is_zero() {
        return Err(Error::Parse(format!("t must be real in `{s}`")));
    }
    Ok((z, t))
}

impl FromStr for ExactPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let ((ur, ui), (vr, vi)) = parse_planar_parts(s)?;
        SiegelPoint::new(GaussRat::from_parts(&ur, &ui), GaussRat::from_parts(&vr, &vi))
    }
}

/// A planar point given in decimal, rounded into a big-float context.
pub fn parse_float_point(s: &str, ctx: PrecisionContext) -> Result<FloatPoint> {
    let ((ur, ui), (vr, vi)) = parse_planar_parts(s)?;
    let c = |x: &BigRational| ctx.from_ratio(x);
    SiegelPoint::new(
        BigComplex::new(c(&ur), c(&ui)),
        BigComplex::new(c(&vr), c(&vi)),
    )
}

pub fn parse_heis_exact(s: &str) -> Result<ExactPoint> {
    let ((zr, zi), t) = parse_heis_parts(s)?;
    Ok(SiegelPoint::from_heis(&HeisPoint {
        z: GaussRat::from_parts(&zr, &zi),
        t,
    }))
}

pub fn parse_heis_float(s: &str, ctx: PrecisionContext) -> Result<FloatPoint> {
    let ((zr, zi), t) = parse_heis_parts(s)?;
    Ok(SiegelPoint::from_heis(&HeisPoint {
        z: BigComplex::new(ctx.from_ratio(&zr), ctx.from_ratio(&zi)),
        t: ctx.from_ratio(&t),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FastComplex;
    use proptest::prelude::*;

    fn ep(s: &str) -> ExactPoint {
        s.parse().unwrap()
    }

    fn gr(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    fn heis(z: &str, t: &str) -> HeisPoint<GaussRat> {
        HeisPoint {
            z: gr(z),
            t: crate::gaussian::parse_rational(t).unwrap_or_else(|_| {
                -crate::gaussian::parse_rational(t.trim_start_matches('-')).unwrap()
            }),
        }
    }

    #[test]
    fn heis_conversions() {
        assert_eq!(SiegelPoint::from_heis(&heis("0", "0")), ExactPoint::origin());
        assert_eq!(SiegelPoint::from_heis(&heis("1", "0")), ep("(1+i; 1)"));
        let h = SiegelPoint::from_heis(&heis("i", "2"));
        assert_eq!(h, ep("(-1+i; 1+2i)"));
        assert!(h.satisfies_constraint());

        assert_eq!(ep("(1+i; 1)").to_heis(), heis("1", "0"));
        assert_eq!(ep("(0; 5i)").to_heis(), heis("0", "5"));
        assert_eq!(ExactPoint::origin().to_heis(), heis("0", "0"));
    }

    #[test]
    fn group_law_examples() {
        let h = ep("(1+i; 1+i)");
        assert_eq!(ExactPoint::origin().mul(&h).unwrap(), h);
        assert_eq!(ep("(1+i; 1)").mul(&ep("(1-i; 1)")).unwrap(), ep("(2; 2-2i)"));
        assert_eq!(h.mul(&h.inv()).unwrap(), ExactPoint::origin());
        assert_eq!(h.inv(), ep("(-1-i; 1-i)"));
        assert_eq!(h.inv().inv(), h);
        assert_eq!(ExactPoint::origin().inv(), ExactPoint::origin());
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(ep("(0; 5i)").koranyi_inversion().unwrap(), ep("(0; -1/5i)"));
        assert_eq!(ep("(1+i; 1)").koranyi_inversion().unwrap(), ep("(-1-i; 1)"));
        assert_eq!(
            ExactPoint::origin().koranyi_inversion(),
            Err(Error::InversionAtOrigin)
        );
    }

    #[test]
    fn norms_and_distances() {
        assert_eq!(ExactPoint::origin().gauge_norm(), 0.0);
        assert!((ep("(0; 5i)").gauge_norm() - 5f64.sqrt()).abs() < 1e-12);
        assert!((ep("(1+i; 1+i)").gauge_norm() - 2f64.powf(0.25)).abs() < 1e-12);

        let h = ep("(1+i; 1+i)");
        assert_eq!(h.distance4(&h).unwrap(), BigRational::zero());
        assert!((ExactPoint::origin().distance(&h).unwrap() - 2f64.powf(0.25)).abs() < 1e-12);
        let a = ep("(1+i; 1+4/5i)");
        assert_eq!(
            a.distance4(&h).unwrap(),
            BigRational::new(1.into(), 25.into())
        );
        assert!((a.distance(&h).unwrap() - 0.2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn backend_mismatch() {
        let a = ExactPoint::origin().to_backend(&BigComplex::new(
            PrecisionContext::new(64).unwrap().zero(),
            PrecisionContext::new(64).unwrap().zero(),
        ));
        let b = FloatPoint::origin(PrecisionContext::new(128).unwrap());
        assert!(matches!(a.mul(&b), Err(Error::BackendMismatch(_))));
        assert!(matches!(a.distance4(&b), Err(Error::BackendMismatch(_))));
    }

    #[test]
    fn projective_round_trips() {
        let o = ProjIntPoint::new(1.into(), 0.into(), 0.into()).unwrap();
        assert_eq!(o.to_planar(), ExactPoint::origin());
        let x = ProjIntPoint::new(GaussInt::new(0, -5), 0.into(), (-1).into()).unwrap();
        assert_eq!(x.to_planar(), ep("(0; -1/5i)"));
        assert_eq!(
            ProjIntPoint::new(0.into(), 0.into(), 1.into()),
            Err(Error::PointAtInfinity)
        );
        assert_eq!(x.to_string(), "[5 : 0 : -i]");
        assert_eq!(x.to_string().parse::<ProjIntPoint>().unwrap(), x);
    }

    #[test]
    fn float_parsing_and_display() {
        let ctx = PrecisionContext::new(128).unwrap();
        let h = parse_heis_float("0.3+0.1i, 0.2", ctx).unwrap();
        assert!(h.satisfies_constraint());
        let back = parse_float_point(&h.to_string(), ctx).unwrap();
        assert_eq!(back, h);
        assert!(parse_heis_exact("heis(1; 2i)").is_err());
    }

    fn small_exact() -> impl Strategy<Value = ExactPoint> {
        (-20i64..20, -20i64..20, -20i64..20, 1i64..9, 1i64..9).prop_map(|(a, b, t, d1, d2)| {
            let z = GaussRat::from_parts(
                &BigRational::new(a.into(), d1.into()),
                &BigRational::new(b.into(), d2.into()),
            );
            SiegelPoint::from_heis(&HeisPoint {
                z,
                t: BigRational::new(t.into(), (d1 * d2).into()),
            })
        })
    }

    fn integer_point() -> impl Strategy<Value = ExactPoint> {
        (-5i64..5, -5i64..5, -9i64..9).prop_map(|(x, y, t)| {
            SiegelPoint::from_heis(&HeisPoint {
                z: GaussRat::from_int(GaussInt::new(x, y)),
                t: BigRational::from_integer(t.into()),
            })
        })
    }

    proptest! {
        #[test]
        fn closure_and_heis_round_trip(a in small_exact(), b in small_exact()) {
            prop_assert!(a.satisfies_constraint());
            prop_assert!(a.mul(&b).unwrap().satisfies_constraint());
            prop_assert!(a.inv().satisfies_constraint());
            if !a.is_origin() {
                let ia = a.koranyi_inversion().unwrap();
                prop_assert!(ia.satisfies_constraint());
                prop_assert_eq!(ia.koranyi_inversion().unwrap(), a.clone());
            }
            prop_assert_eq!(SiegelPoint::from_heis(&a.to_heis()), a.clone());
            prop_assert_eq!(a.distance4(&b).unwrap(), b.distance4(&a).unwrap());
            prop_assert_eq!(
                a.distance4(&b).unwrap(),
                a.inv().mul(&b).unwrap().gauge_norm4()
            );
        }

        #[test]
        fn left_invariance(a in small_exact(), b in small_exact(), g in integer_point()) {
            prop_assert_eq!(
                a.distance4(&b).unwrap(),
                g.mul(&a).unwrap().distance4(&g.mul(&b).unwrap()).unwrap()
            );
        }

        #[test]
        fn inversion_rule(a in small_exact(), b in small_exact()) {
            prop_assume!(!a.is_origin() && !b.is_origin());
            // d⁴(h,h') = ‖h‖⁴‖h'‖⁴ d⁴(ιh, ιh')
            let lhs = a.distance4(&b).unwrap();
            let rhs = a.gauge_norm4() * b.gauge_norm4()
                * a.koranyi_inversion().unwrap().distance4(&b.koranyi_inversion().unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn float_closure(x in -3.0f64..3.0, y in -3.0f64..3.0, t in -3.0f64..3.0,
                         x2 in -3.0f64..3.0, y2 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
            let ctx = PrecisionContext::new(128).unwrap();
            let mk = |x: f64, y: f64, t: f64| SiegelPoint::from_heis(&HeisPoint {
                z: BigComplex::new(crate::bigfloat::BigFloat::from_f64(x, 128), crate::bigfloat::BigFloat::from_f64(y, 128)),
                t: crate::bigfloat::BigFloat::from_f64(t, 128),
            });
            let (a, b) = (mk(x, y, t), mk(x2, y2, t2));
            let _ = ctx;
            prop_assert!(a.mul(&b).unwrap().satisfies_constraint_within(16));
            prop_assert!(a.koranyi_inversion().unwrap().satisfies_constraint_within(16));
            let f = SiegelPoint::<FastComplex>::from_heis(&HeisPoint { z: FastComplex::new(x, y), t });
            prop_assert!(f.koranyi_inversion().unwrap().satisfies_constraint_within(16));
        }
    }
}
