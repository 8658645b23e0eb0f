//! Best approximations among rationals with bounded denominator, and the
//! comparison of arbitrary rationals against a convergent.

use std::cmp::Ordering;

use serde::Serialize;

use crate::cf::CfExpansion;
use crate::domain::{Domain, DirichletDomain};
use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::gaussian::{gi_gcd, GaussInt};
use crate::lab::identities::continuant_combination;
use crate::moebius::{Triple, UMatrix};
use crate::siegel::{pairing, ProjIntPoint, SiegelPoint};

/// Integer triples `(Q, R, P)` as `i64` pairs, used during enumeration.
pub type SmallTriple = [(i64, i64); 3];

fn to_gauss(t: &SmallTriple) -> Triple {
    [
        GaussInt::new(t[0].0, t[0].1),
        GaussInt::new(t[1].0, t[1].1),
        GaussInt::new(t[2].0, t[2].1),
    ]
}

/// Planar point coordinates rounded to `f64`, used only to bound loops.
#[derive(Clone, Copy, Debug)]
pub struct Approx {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl Approx {
    pub fn of<C: ComplexField>(h: &SiegelPoint<C>) -> Approx {
        Approx {
            u: (h.u.re().as_f64(), h.u.im().as_f64()),
            v: (h.v.re().as_f64(), h.v.im().as_f64()),
        }
    }
}

/// Calls `f` with every triple `(Q, R, P)` satisfying the projective
/// constraint whose planar point `(R/Q, P/Q)` may lie within distance
/// `radius` of `h`. The loops carry a small safety margin, so callers must
/// re-check distances exactly.
pub fn near_triples(h: Approx, q: (i64, i64), radius: f64, mut f: impl FnMut(SmallTriple)) {
    let (qa, qb) = q;
    let m = qa * qa + qb * qb;
    let mf = m as f64;
    let (ur, ui) = h.u;
    let (cx, cy) = (qa as f64 * ur - qb as f64 * ui, qa as f64 * ui + qb as f64 * ur);
    let slack = 1e-7 * (1.0 + cx.abs() + cy.abs());
    // d ≥ |u − R/Q|/√2
    let rr = std::f64::consts::SQRT_2 * radius * mf.sqrt() + slack;
    let r2 = rr * rr;
    let x_lo = (cx - rr).ceil() as i64;
    let x_hi = (cx + rr).floor() as i64;
    for ra in x_lo..=x_hi {
        let dx = ra as f64 - cx;
        let rem = r2 - dx * dx;
        if rem < 0.0 {
            continue;
        }
        let w = rem.sqrt();
        for rb in ((cy - w).ceil() as i64)..=((cy + w).floor() as i64) {
            let n = ra * ra + rb * rb;
            if n % 2 != 0 {
                continue;
            }
            // |Im v_c − (Im v − Im(ū_c u))| ≤ d² with Im v_c = s/m
            // and Im(ū_c u) = Im(R̄·Qu)/m
            let im_rbar_qu = ra as f64 * cy - rb as f64 * cx;
            let center = mf * h.v.1 - im_rbar_qu;
            let hw = radius * radius * mf + 1e-7 * (1.0 + center.abs());
            let half_n = n / 2;
            for s in ((center - hw).ceil() as i64)..=((center + hw).floor() as i64) {
                // P = (N/2 + i s)·Q / m
                let pr = half_n * qa - s * qb;
                let pi = half_n * qb + s * qa;
                if pr % m != 0 || pi % m != 0 {
                    continue;
                }
                f([(qa, qb), (ra, rb), (pr / m, pi / m)]);
            }
        }
    }
}

/// Canonical Gaussian integers `Q` (`re > 0, im ≥ 0`) with `|Q|² ≤ max_norm`,
/// in order of increasing norm.
pub fn canonical_qs(max_norm: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let top = (max_norm as f64).sqrt() as i64 + 1;
    for a in 1..=top {
        for b in 0..=top {
            if a * a + b * b <= max_norm {
                out.push((a, b));
            }
        }
    }
    out.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
    out
}

fn is_lowest_terms(t: &Triple) -> bool {
    let g = gi_gcd(&t[0], &t[1]).and_then(|g| gi_gcd(&g, &t[2]));
    matches!(g, Ok(g) if g.is_unit())
}

/// `d((R/Q, P/Q), h)⁴ = |P̄ − R̄u + Q̄v|² / |Q|²`, in the backend of `h`.
pub fn triple_dist4<C: ComplexField>(t: &Triple, h: &SiegelPoint<C>) -> C::Real {
    let num = pairing(&t[0], &t[1], &t[2], h).norm_sqr();
    let q2 = h.u.from_gauss_like(&t[0]).norm_sqr();
    num.checked_div(&q2).expect("Q != 0")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestApprox {
    pub point: String,
    pub q_abs: f64,
    pub distance: f64,
    pub candidates_examined: usize,
}

fn better<R: RealField>(a: (&R, &Triple), b: (&R, &Triple)) -> bool {
    match a.0.partial_cmp(b.0).unwrap_or(Ordering::Equal) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => {
            let key = |t: &Triple| (t[0].norm(), t.clone());
            key(a.1) < key(b.1)
        }
    }
}

/// The lowest-terms rational point closest to `h` among those with `|Q| ≤ bound`.
/// Ties go to smaller `|Q|²`, then to the smaller triple.
pub fn best_approx_search<C: ComplexField>(
    h: &SiegelPoint<C>,
    bound: f64,
) -> Result<(ProjIntPoint, BestApprox)> {
    if !(bound >= 1.0) {
        return Err(Error::InvalidArgument(format!("bound {bound} < 1")));
    }
    let ha = Approx::of(h);
    let start = DirichletDomain.nearest(h).map(|n| n.gamma).unwrap_or_else(|_| {
        DirichletDomain.nearest_uncertified(h).gamma
    });
    let mut best_t: Triple = [GaussInt::one(), start.u.clone(), start.v.clone()];
    let mut best_d4 = triple_dist4(&best_t, h);
    let mut examined = 0usize;
    let max_norm = (bound * bound + 1e-9).floor() as i64;
    for q in canonical_qs(max_norm) {
        let radius = best_d4.as_f64().sqrt().sqrt().min(2.0) * (1.0 + 1e-9);
        near_triples(ha, q, radius, |t| {
            examined += 1;
            let t = to_gauss(&t);
            if !is_lowest_terms(&t) {
                return;
            }
            let d4 = triple_dist4(&t, h);
            if better((&d4, &t), (&best_d4, &best_t)) {
                best_d4 = d4;
                best_t = t;
            }
        });
    }
    let [q, r, p] = best_t;
    let point = ProjIntPoint::new(q, r, p)?;
    let info = BestApprox {
        point: point.to_string(),
        q_abs: point.q().abs_f64(),
        distance: best_d4.as_f64().sqrt().sqrt(),
        candidates_examined: examined,
    };
    Ok((point, info))
}

/// Plain enumeration of every lowest-terms point with `|Q| ≤ bound` and
/// distance at most 2 from `h`, returned with its `d⁴`.
pub fn naive_candidates<C: ComplexField>(h: &SiegelPoint<C>, bound: f64) -> Vec<(Triple, C::Real)> {
    let ha = Approx::of(h);
    let max_norm = (bound * bound + 1e-9).floor() as i64;
    let mut out = Vec::new();
    for q in canonical_qs(max_norm) {
        near_triples(ha, q, 2.0, |t| {
            let t = to_gauss(&t);
            if is_lowest_terms(&t) {
                let d4 = triple_dist4(&t, h);
                if d4.as_f64() <= 16.0 {
                    out.push((t, d4));
                }
            }
        });
    }
    out
}

/// `(a, b, c) = Q_{n+1}⁻¹ · T_{γ₀}⁻¹ · target`, so that the target equals
/// `a·x_{n+1} + b·𝔵_{n+1} − c·x_n` in the frame of `h₀`.
pub fn decompose_triple<C: ComplexField>(e: &CfExpansion<C>, n: usize, target: &Triple) -> Result<Triple> {
    let qn1 = e.continuant(n + 1)?;
    let t0 = UMatrix::translation(&e.gamma0.inv());
    Ok(qn1.u21_inverse()?.apply_triple(&t0.apply_triple(target)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop71Candidate {
    pub triple: String,
    pub x1: f64,
    pub x2: f64,
    pub sum_sqrt: f64,
    pub a_abs: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop71Report {
    pub n: usize,
    pub q_n: f64,
    pub d_n: f64,
    pub v_n: f64,
    /// `|v_n|⁻¹ R⁻¹`.
    pub stated_bound: f64,
    /// `|(q_{n+1} + 𝔮_{n+1}u_{n+1} − q_n v_{n+1}) / q_n|^(1/2)`.
    pub proof_quantity: f64,
    pub candidates: usize,
    /// Minimum of `√x₁ + √x₂` over the candidates.
    pub min_sum_sqrt: f64,
    /// Minimum of `(√x₁ + √x₂) / |a|^(1/2)`; never below `proof_quantity`.
    pub min_normalized: f64,
    /// Candidates violating `√x₁ + √x₂ ≥ |v_n|⁻¹R⁻¹`, verbatim.
    pub stated_violations: Vec<String>,
    /// Candidates violating `√x₁ + √x₂ ≥ |a|^(1/2) · proof_quantity` (must be empty).
    pub proof_violations: Vec<String>,
    /// `|q_n| / (2 rad² R²)`.
    pub thm16_threshold: f64,
    /// Candidates with `|Q|` below the threshold that are strictly closer than the convergent.
    pub thm16_violations: Vec<String>,
    /// Smallest `|Q|/|q_n|` among enumerated lowest-terms points strictly closer than `d_n`.
    pub min_closer_q_ratio: Option<f64>,
    pub self_check: (f64, f64),
    pub next_check: Option<(f64, f64, f64, f64)>,
}

/// Compares every lowest-terms rational with `|Q| ≤ a_bound·|q_n|` near `h`
/// against the `n`th convergent.
///
/// Points further than `max(κ d_n, B d_n (|q_n|/|Q|)^(1/2))` from `h` (κ = 2,
/// `B` the stated bound) satisfy the stated inequality automatically, since
/// `√x₁ = (|Q|/|q_n|)^(1/2) · d/d_n`; they are skipped.
pub fn prop71_check<C: ComplexField>(
    e: &CfExpansion<C>,
    n: usize,
    a_bound: f64,
    rk: f64,
    rad: f64,
) -> Result<Prop71Report> {
    if n + 1 > e.depth() {
        return Err(Error::IndexOutOfRange(format!("n + 1 = {} > depth", n + 1)));
    }
    let h0 = &e.iterates[0];
    let xn = e.raw_convergent(n)?;
    let prq_n = pairing(&xn[0], &xn[1], &xn[2], h0);
    let prq_abs2 = prq_n.norm_sqr();
    let q_n = xn[0].abs_f64();
    let d_n4 = triple_dist4(&xn, h0);
    let d_n = d_n4.as_f64().sqrt().sqrt();
    let v_n = e.iterates[n].v.norm_sqr().as_f64().sqrt();
    let stated_bound = 1.0 / (v_n * rk);
    let (comb, _) = continuant_combination(e, n + 1);
    let proof_quantity = (comb.norm_sqr().as_f64().sqrt() / q_n).sqrt();

    let x1_of = |t: &Triple| {
        let p = pairing(&t[0], &t[1], &t[2], h0).norm_sqr();
        p.checked_div(&prq_abs2).expect("prq_n != 0").as_f64().sqrt()
    };
    let x2_of = |t: &Triple| t[0].abs_f64() / q_n;

    let self_check = (x1_of(&xn), x2_of(&xn));
    let next_check = e.raw_convergent(n + 1).ok().map(|x| {
        let vnext = e.iterates[n + 1].v.norm_sqr().as_f64().sqrt();
        (x1_of(&x), vnext, x2_of(&x), x[0].abs_f64() / q_n)
    });

    let ha = Approx::of(h0);
    let max_norm = ((a_bound * q_n).powi(2) + 1e-9).floor() as i64;
    let thm16_threshold = q_n / (2.0 * rad * rad * rk * rk);
    let mut rep = Prop71Report {
        n,
        q_n,
        d_n,
        v_n,
        stated_bound,
        proof_quantity,
        candidates: 0,
        min_sum_sqrt: f64::INFINITY,
        min_normalized: f64::INFINITY,
        stated_violations: Vec::new(),
        proof_violations: Vec::new(),
        thm16_threshold,
        thm16_violations: Vec::new(),
        min_closer_q_ratio: None,
        self_check,
        next_check,
    };
    let xn_point = ProjIntPoint::new(xn[0].clone(), xn[1].clone(), xn[2].clone())?;
    for q in canonical_qs(max_norm) {
        let qa = ((q.0 * q.0 + q.1 * q.1) as f64).sqrt();
        let radius = (2.0 * d_n).max(stated_bound * d_n * (q_n / qa).sqrt()) * (1.0 + 1e-9);
        near_triples(ha, q, radius, |t| {
            let t = to_gauss(&t);
            if !is_lowest_terms(&t) {
                return;
            }
            let Ok(p) = ProjIntPoint::new(t[0].clone(), t[1].clone(), t[2].clone()) else {
                return;
            };
            if p == xn_point {
                return;
            }
            rep.candidates += 1;
            let d4 = triple_dist4(&t, h0);
            let (x1, x2) = (x1_of(&t), x2_of(&t));
            let sum = x1.sqrt() + x2.sqrt();
            let abc = decompose_triple_frame(e, n, &t);
            let a_abs = abc[0].abs_f64();
            rep.min_sum_sqrt = rep.min_sum_sqrt.min(sum);
            if a_abs > 0.0 {
                rep.min_normalized = rep.min_normalized.min(sum / a_abs.sqrt());
            }
            let line = || {
                format!(
                    "n={n} {p}: sqrt(x1)+sqrt(x2) = {sum:e}, x1 = {x1:e}, x2 = {x2:e}, |a| = {a_abs}"
                )
            };
            if sum < stated_bound {
                rep.stated_violations.push(format!("{} < stated bound {stated_bound:e}", line()));
            }
            // triangle inequality, with room for rounding in f64
            if sum < a_abs.sqrt() * proof_quantity * (1.0 - 1e-9) {
                rep.proof_violations.push(format!(
                    "{} < |a|^(1/2)·{proof_quantity:e}",
                    line()
                ));
            }
            let closer = d4 < d_n4;
            if closer {
                let ratio = t[0].abs_f64() / q_n;
                rep.min_closer_q_ratio = Some(rep.min_closer_q_ratio.map_or(ratio, |r: f64| r.min(ratio)));
                if t[0].abs_f64() < thm16_threshold {
                    rep.thm16_violations.push(line());
                }
            }
        });
    }
    Ok(rep)
}

/// `Q_{n+1}⁻¹ · t` for a triple already in the frame of `h₀`.
fn decompose_triple_frame<C: ComplexField>(e: &CfExpansion<C>, n: usize, t: &Triple) -> Triple {
    let qn1 = &e.continuants[n + 1];
    let j = UMatrix::j();
    j.mul(&qn1.dagger()).mul(&j).apply_triple(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::PrecisionContext;
    use crate::cf::expand;
    use crate::siegel::{parse_heis_float, ExactPoint};

    #[test]
    fn spec_example_integer_bound() {
        let h: ExactPoint = "(1+i; 1+4/5i)".parse().unwrap();
        let (p, info) = best_approx_search(&h, 1.0).unwrap();
        assert_eq!(p.to_string(), "[1 : 1+i : 1+i]");
        assert!((info.distance - 0.2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rational_point_finds_itself() {
        let h: ExactPoint = "(2/5+4/5i; 2/5+3/5i)".parse().unwrap();
        let me = ProjIntPoint::from_planar(&h).unwrap();
        let (p, info) = best_approx_search(&h, me.q().abs_f64() + 0.5).unwrap();
        assert_eq!(p, me);
        assert_eq!(info.distance, 0.0);
    }

    #[test]
    fn branch_and_bound_matches_naive() {
        let ctx = PrecisionContext::new(128).unwrap();
        for s in ["0.123+0.456i, 0.0789", "-0.31+0.05i, -0.22", "0.7-0.2i, 0.4"] {
            let h = parse_heis_float(s, ctx).unwrap();
            for bound in [1.0, 3.0, 6.5] {
                let (p, info) = best_approx_search(&h, bound).unwrap();
                let all = naive_candidates(&h, bound);
                let best = all
                    .iter()
                    .min_by(|a, b| {
                        a.1.partial_cmp(&b.1)
                            .unwrap()
                            .then_with(|| (a.0[0].norm(), a.0.clone()).cmp(&(b.0[0].norm(), b.0.clone())))
                    })
                    .unwrap();
                let bp = ProjIntPoint::new(best.0[0].clone(), best.0[1].clone(), best.0[2].clone()).unwrap();
                assert_eq!(p, bp, "{s} B={bound}");
                assert!(p.q().abs_f64() <= bound);
                for (_, d4) in &all {
                    assert!(info.distance <= d4.as_f64().sqrt().sqrt() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn convergents_are_best_when_bound_just_exceeds() {
        let ctx = PrecisionContext::new(256).unwrap();
        let h = parse_heis_float("0.3141592653589793+0.2718281828459045i, 0.1414213562373095", ctx).unwrap();
        let e = expand(&h, &DirichletDomain, 8).unwrap();
        for n in 0..=e.depth() {
            let c = e.convergent(n).unwrap();
            let qn = c.q().abs_f64();
            if qn > 60.0 {
                break;
            }
            let d_n = triple_dist4(&[c.q().clone(), c.r().clone(), c.p().clone()], &h).as_f64();
            let (p, info) = best_approx_search(&h, qn * (1.0 + 1e-9)).unwrap();
            assert!(info.distance.powi(4) <= d_n * (1.0 + 1e-12));
            if p != c {
                // something at least as close with no larger denominator exists
                assert!(p.q().norm() <= c.q().norm());
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let ctx = PrecisionContext::new(256).unwrap();
        let h = parse_heis_float("0.3141592653589793+0.2718281828459045i, 0.1414213562373095", ctx).unwrap();
        let e = expand(&h, &DirichletDomain, 6).unwrap();
        let t0 = UMatrix::translation(&e.gamma0);
        for n in 0..5 {
            let x1 = t0.apply_triple(&e.raw_convergent(n + 1).unwrap());
            let one = GaussInt::one();
            let z = GaussInt::zero();
            assert_eq!(decompose_triple(&e, n, &x1).unwrap(), [one.clone(), z.clone(), z.clone()]);
            let x0 = t0.apply_triple(&e.raw_convergent(n).unwrap());
            assert_eq!(decompose_triple(&e, n, &x0).unwrap(), [z.clone(), z, -one]);
            let abc = [GaussInt::new(2, -1), GaussInt::new(3, 4), GaussInt::new(-7, 1)];
            let pushed = t0.mul(&e.continuants[n + 1]).apply_triple(&abc);
            assert_eq!(decompose_triple(&e, n, &pushed).unwrap(), abc);
        }
    }

    #[test]
    fn prop71_on_a_generic_point() {
        let ctx = PrecisionContext::new(256).unwrap();
        let h = parse_heis_float("0.3141592653589793+0.2718281828459045i, 0.1414213562373095", ctx).unwrap();
        let e = expand(&h, &DirichletDomain, 6).unwrap();
        let rk = crate::domain::rk_constant(DirichletDomain.radius(), 1e-9).unwrap();
        let mut total = 0;
        for n in 1..4 {
            let r = prop71_check(&e, n, 2.0, rk, DirichletDomain.radius()).unwrap();
            assert!((r.self_check.0 - 1.0).abs() < 1e-12 && (r.self_check.1 - 1.0).abs() < 1e-12);
            let (x1, vnext, x2, qratio) = r.next_check.unwrap();
            assert!((x1 - vnext).abs() < 1e-9 * vnext.max(1.0));
            assert!((x2 - qratio).abs() < 1e-12);
            assert!(r.proof_violations.is_empty(), "{:?}", r.proof_violations);
            assert!(r.min_normalized >= r.proof_quantity * (1.0 - 1e-9));
            assert!(r.thm16_violations.is_empty());
            total += r.candidates;
        }
        assert!(total > 0);
    }
}
