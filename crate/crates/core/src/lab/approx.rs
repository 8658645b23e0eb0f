//! Approximation quality of convergents against the constant `R_K`.

use serde::Serialize;

use crate::cf::CfExpansion;
use crate::domain::{rk_constant, Domain};
use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::lab::identities::{direct_dist4, v_product};
use crate::lab::Stats;

/// Empirical reference lines reported next to measured values.
pub const REF_MAX_CN: f64 = 1.26;
pub const REF_RELSIZE: (f64, f64) = (0.35, 3.38);
/// Band outside of which the empirical constants count as a failure.
pub const HARD_BAND: (f64, f64) = (0.25, 4.0);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxRecord {
    pub n: usize,
    pub q_abs: f64,
    pub d_n: f64,
    pub v_next: (f64, f64),
    /// `d_n / |v_{n+1}/q_n²|^(1/2)`.
    pub ratio_thm14: f64,
    /// `d_n / |v_n/q_n²|^(1/2)`.
    pub ratio_vn: f64,
    pub c_n: f64,
    pub relsize_n: f64,
    pub succ_n: f64,
    pub violations: Vec<String>,
}

/// The constants the hard bounds are checked against.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Bounds {
    pub rad: f64,
    pub rk: f64,
}

impl Bounds {
    pub fn for_domain<D: Domain>(dom: &D) -> Result<Bounds> {
        let rad = dom.radius();
        Ok(Bounds { rad, rk: rk_constant(rad, 1e-9)? })
    }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x.is_finite() && x >= lo && x <= hi
}

/// Measures index `n` (`1 ≤ n`, `n + 1 ≤ depth`).
pub fn approx_quality<C: ComplexField>(e: &CfExpansion<C>, n: usize, b: &Bounds) -> Result<ApproxRecord> {
    if n == 0 || n + 1 > e.depth() {
        return Err(Error::IndexOutOfRange(format!(
            "approx_quality needs 1 ≤ n < depth = {}",
            e.depth()
        )));
    }
    let f = |z: &C| z.norm_sqr().as_f64().sqrt();
    let proto = &e.iterates[0].v;
    let q = f(&proto.from_gauss_like(&e.q(n as isize)?));
    let qm = f(&proto.from_gauss_like(&e.q(n as isize - 1)?));
    let d_n = direct_dist4(e, n)?.as_f64().sqrt().sqrt();
    let vn = f(&e.iterates[n].v);
    let vnext = &e.iterates[n + 1].v;
    let vnext_abs = f(vnext);
    let ratio_thm14 = d_n * q / vnext_abs.sqrt();
    let ratio_vn = d_n * q / vn.sqrt();
    let c_n = d_n * q;
    let relsize_n = q * f(&v_product(e, n as isize - 1));
    let succ_n = qm / (vn * q);

    let (r, r2) = (b.rk, b.rk * b.rk);
    let mut violations = Vec::new();
    let mut check = |name: &str, x: f64, lo: f64, hi: f64| {
        if !within(x, lo, hi) {
            violations.push(format!("n={n}: {name} = {x:e} outside [{lo:e}, {hi:e}]"));
        }
    };
    check("ratio_thm14", ratio_thm14, 1.0 / r, r);
    check("ratio_vn", ratio_vn, 1.0 / r, r);
    check("c_n", c_n, 0.0, b.rad * r);
    check("relsize", relsize_n, 1.0 / r, r);
    check("succ", succ_n, 1.0 / r2, r2);
    Ok(ApproxRecord {
        n,
        q_abs: q,
        d_n,
        v_next: (vnext.re().as_f64(), vnext.im().as_f64()),
        ratio_thm14,
        ratio_vn,
        c_n,
        relsize_n,
        succ_n,
        violations,
    })
}

/// Records for every measurable index.
pub fn approx_records<C: ComplexField>(e: &CfExpansion<C>, b: &Bounds) -> Result<Vec<ApproxRecord>> {
    (1..e.depth()).map(|n| approx_quality(e, n, b)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxSummary {
    pub records: usize,
    pub ratio_thm14: Stats,
    pub ratio_vn: Stats,
    pub c_n: Stats,
    pub relsize: Stats,
    pub succ: Stats,
    pub reference_max_c_n: f64,
    pub reference_relsize: (f64, f64),
    pub hard_band: (f64, f64),
    /// Hard-bound violations, verbatim.
    pub violations: Vec<String>,
    /// Empirical constants left the hard band.
    pub band_failures: Vec<String>,
}

pub fn summarize(recs: &[ApproxRecord]) -> ApproxSummary {
    let col = |f: fn(&ApproxRecord) -> f64| Stats::of(recs.iter().map(f));
    let c_n = col(|r| r.c_n);
    let relsize = col(|r| r.relsize_n);
    let mut band_failures = Vec::new();
    if recs.is_empty() {
        band_failures.push("no records".to_string());
    } else {
        if c_n.max > HARD_BAND.1 {
            band_failures.push(format!("max c_n = {} > {}", c_n.max, HARD_BAND.1));
        }
        if relsize.min < HARD_BAND.0 || relsize.max > HARD_BAND.1 {
            band_failures.push(format!(
                "relsize range [{}, {}] leaves [{}, {}]",
                relsize.min, relsize.max, HARD_BAND.0, HARD_BAND.1
            ));
        }
    }
    ApproxSummary {
        records: recs.len(),
        ratio_thm14: col(|r| r.ratio_thm14),
        ratio_vn: col(|r| r.ratio_vn),
        c_n,
        relsize,
        succ: col(|r| r.succ_n),
        reference_max_c_n: REF_MAX_CN,
        reference_relsize: REF_RELSIZE,
        hard_band: HARD_BAND,
        violations: recs.iter().flat_map(|r| r.violations.iter().cloned()).collect(),
        band_failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::PrecisionContext;
    use crate::cf::expand;
    use crate::domain::DirichletDomain;
    use crate::siegel::parse_heis_float;

    #[test]
    fn records_on_a_generic_point() {
        let ctx = PrecisionContext::new(256).unwrap();
        let h = parse_heis_float("0.3141592653589793+0.2718281828459045i, 0.1414213562373095", ctx).unwrap();
        let e = expand(&h, &DirichletDomain, 12).unwrap();
        let b = Bounds::for_domain(&DirichletDomain).unwrap();
        let recs = approx_records(&e, &b).unwrap();
        assert_eq!(recs.len(), 11);
        for r in &recs {
            assert!(r.violations.is_empty(), "{:?}", r.violations);
            assert!(r.c_n < 4.0);
        }
        let s = summarize(&recs);
        assert!(s.band_failures.is_empty());
        assert!(approx_quality(&e, 12, &b).is_err());
        assert!(approx_quality(&e, 0, &b).is_err());
    }
}
