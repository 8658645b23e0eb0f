//! The continuant identities, checked at `h₀ = (u₀, v₀)` with unreduced
//! columns of `Q_n`.

use serde::Serialize;

use crate::cf::CfExpansion;
use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::gaussian::GaussInt;
use crate::siegel::{pairing, SiegelPoint};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: &'static str,
    pub n: usize,
    pub lhs: String,
    pub rhs: String,
    pub residual: f64,
    pub scale: f64,
    pub pass: bool,
}

/// Compares `lhs` and `rhs`: exact equality, or `|lhs − rhs| ≤ 2^(-bits/2)·scale`
/// with `scale = max(1, |terms|)`. Everything stays squared until reporting.
fn judge<C: ComplexField>(id: &'static str, n: usize, lhs: C, rhs: C, terms: &[C]) -> IdentityReport {
    let diff2 = lhs.sub(&rhs).norm_sqr();
    let one = diff2.one_like();
    let scale2 = terms
        .iter()
        .chain([&lhs, &rhs])
        .map(|t| t.norm_sqr())
        .fold(one, |a, b| a.max_of(b));
    let tol = diff2.tolerance();
    let pass = diff2 <= tol.clone() * tol * scale2.clone();
    IdentityReport {
        id,
        n,
        lhs: lhs.to_text(),
        rhs: rhs.to_text(),
        residual: diff2.as_f64().sqrt(),
        scale: scale2.as_f64().sqrt(),
        pass,
    }
}

fn sign<C: ComplexField>(proto: &C, k: isize) -> C {
    let one = proto.from_gauss_like(&GaussInt::one());
    if k.rem_euclid(2) == 0 {
        one
    } else {
        one.neg()
    }
}

/// `∏_{i=0}^{n} v_i` (empty product for `n < 0`).
pub fn v_product<C: ComplexField>(e: &CfExpansion<C>, n: isize) -> C {
    let proto = &e.iterates[0].v;
    let mut acc = proto.from_gauss_like(&GaussInt::one());
    for i in 0..=n {
        acc = acc.mul(&e.iterates[i as usize].v);
    }
    acc
}

fn pairing_terms<C: ComplexField>(t: &[GaussInt; 3], h: &SiegelPoint<C>) -> Vec<C> {
    let lift = |g: &GaussInt| h.u.from_gauss_like(&g.conj());
    vec![lift(&t[2]), lift(&t[1]).mul(&h.u), lift(&t[0]).mul(&h.v)]
}

/// `p̄_n − r̄_n u + q̄_n v = (−1)ⁿ ∏_{i=0}^{n} v_i`.
pub fn verify_prq<C: ComplexField>(e: &CfExpansion<C>, n: usize) -> Result<IdentityReport> {
    let t = e.raw_convergent(n)?;
    let h0 = &e.iterates[0];
    let lhs = pairing(&t[0], &t[1], &t[2], h0);
    let rhs = sign(&h0.v, n as isize).mul(&v_product(e, n as isize));
    Ok(judge("prq", n, lhs, rhs, &pairing_terms(&t, h0)))
}

/// The same pairing with the middle column: `(−1)^(n−1) u_n ∏_{i=0}^{n−1} v_i`.
pub fn verify_tildeprq<C: ComplexField>(e: &CfExpansion<C>, n: usize) -> Result<IdentityReport> {
    let t = e.second_column(n)?;
    let h0 = &e.iterates[0];
    let lhs = pairing(&t[0], &t[1], &t[2], h0);
    let rhs = sign(&h0.v, n as isize - 1)
        .mul(&e.iterates[n].u)
        .mul(&v_product(e, n as isize - 1));
    Ok(judge("tildeprq", n, lhs, rhs, &pairing_terms(&t, h0)))
}

/// `(q_n + 𝔮_n u_n − q_{n−1} v_n) · v₀v₁⋯v_{n−1} = (−1)ⁿ`.
pub fn verify_fracq<C: ComplexField>(e: &CfExpansion<C>, n: usize) -> Result<IdentityReport> {
    if n == 0 {
        return Err(Error::IndexOutOfRange("fracq needs n ≥ 1".into()));
    }
    e.continuant(n)?;
    if e.iterates[..n].iter().any(|h| h.v.is_zero()) {
        return Err(Error::IdentityUndefined);
    }
    let (x, terms) = continuant_combination(e, n);
    let prod = v_product(e, n as isize - 1);
    let lhs = x.mul(&prod);
    let rhs = sign(&prod, n as isize);
    let scaled: Vec<C> = terms.iter().map(|t| t.mul(&prod)).collect();
    Ok(judge("fracq", n, lhs, rhs, &scaled))
}

/// `q_n + 𝔮_n u_n − q_{n−1} v_n` and its three terms.
pub fn continuant_combination<C: ComplexField>(e: &CfExpansion<C>, n: usize) -> (C, Vec<C>) {
    let h = &e.iterates[n];
    let lift = |g: &GaussInt| h.u.from_gauss_like(g);
    let q = e.q(n as isize).expect("index checked");
    let qm = e.q(n as isize - 1).expect("index checked");
    let fq = e.second_column(n).expect("index checked")[0].clone();
    let terms = vec![lift(&q), lift(&fq).mul(&h.u), lift(&qm).mul(&h.v)];
    let x = terms[0].add(&terms[1]).sub(&terms[2]);
    (x, terms)
}

/// `d_n⁴` from the convergent in the frame of `h₀`.
pub fn direct_dist4<C: ComplexField>(e: &CfExpansion<C>, n: usize) -> Result<C::Real> {
    let t = e.raw_convergent(n)?;
    let h0 = &e.iterates[0];
    let q = h0.u.from_gauss_like(&t[0]);
    let c = SiegelPoint::new_unchecked(
        h0.u.from_gauss_like(&t[1]).checked_div(&q).ok_or(Error::PointAtInfinity)?,
        h0.u.from_gauss_like(&t[2]).checked_div(&q).ok_or(Error::PointAtInfinity)?,
    );
    c.distance4(h0)
}

fn real_as_complex<C: ComplexField>(proto: &C, r: C::Real) -> C {
    C::from_parts(r, proto.re().zero_like())
}

/// `d_n⁴ = |∏_{i≤n} v_i|² / |q_n|²` and, when `n + 1 ≤ depth`,
/// `d_n⁴ = 1 / (|q_n|² |q_{n+1} + 𝔮_{n+1}u_{n+1} − q_n v_{n+1}|²)`.
pub fn verify_distance_formula<C: ComplexField>(
    e: &CfExpansion<C>,
    n: usize,
) -> Result<Vec<IdentityReport>> {
    let direct = direct_dist4(e, n)?;
    let proto = e.iterates[0].v.clone();
    let q2 = proto.from_gauss_like(&e.q(n as isize)?).norm_sqr();
    let num = v_product(e, n as isize).norm_sqr();
    let form1 = num.checked_div(&q2).ok_or(Error::PointAtInfinity)?;
    let mut out = vec![judge(
        "distance",
        n,
        real_as_complex(&proto, direct.clone()),
        real_as_complex(&proto, form1),
        &[],
    )];
    if n < e.depth() {
        let (x, _) = continuant_combination(e, n + 1);
        let den = q2 * x.norm_sqr();
        let form2 = den.one_like().checked_div(&den).ok_or(Error::IdentityUndefined)?;
        out.push(judge(
            "distance_next",
            n,
            real_as_complex(&proto, direct),
            real_as_complex(&proto, form2),
            &[],
        ));
    }
    Ok(out)
}

/// All identity checks valid at index `n`.
pub fn verify_all<C: ComplexField>(e: &CfExpansion<C>, n: usize) -> Result<Vec<IdentityReport>> {
    let mut out = vec![verify_prq(e, n)?, verify_tildeprq(e, n)?];
    if n >= 1 {
        match verify_fracq(e, n) {
            Ok(r) => out.push(r),
            Err(Error::IdentityUndefined) => {}
            Err(err) => return Err(err),
        }
    }
    out.extend(verify_distance_formula(e, n)?);
    Ok(out)
}

/// Every identity at every index of the expansion.
pub fn verify_expansion<C: ComplexField>(e: &CfExpansion<C>) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    for n in 0..=e.depth() {
        out.extend(verify_all(e, n)?);
    }
    Ok(out)
}
