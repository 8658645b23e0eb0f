//! Seeded batch runs over random fixtures. Each point gets its own stream, so
//! results do not depend on thread scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bigfloat::PrecisionContext;
use crate::cf::{expand, expand_exact, reconstruct};
use crate::domain::DirichletDomain;
use crate::error::{Error, Result};
use crate::lab::approx::{approx_records, summarize, ApproxRecord, ApproxSummary, Bounds};
use crate::lab::best::{prop71_check, Prop71Report};
use crate::lab::fixtures::{admissible_digit_string, bigfloat_fixture, exact_fixture};
use crate::lab::identities::{verify_expansion, IdentityReport};
use crate::lab::task_rng;

/// At most this many failing entries are kept verbatim in a report.
const KEEP: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct IdentitySuite {
    pub backend: String,
    pub seed: u64,
    pub samples: usize,
    pub depth: Option<usize>,
    pub bits: Option<u32>,
    pub checks: usize,
    pub checks_by_id: BTreeMap<&'static str, usize>,
    pub failures: usize,
    pub max_residual: f64,
    /// Largest `residual / scale`.
    pub max_relative: f64,
    pub failed: Vec<IdentityReport>,
    pub certification_failures: Vec<String>,
    pub approx: Option<ApproxSummary>,
}

impl IdentitySuite {
    pub fn hard_violations(&self) -> usize {
        self.failures + self.approx.as_ref().map_or(0, |a| a.violations.len())
    }
}

fn collect_identities(reports: impl IntoIterator<Item = IdentityReport>, s: &mut IdentitySuite) {
    for r in reports {
        s.checks += 1;
        *s.checks_by_id.entry(r.id).or_default() += 1;
        s.max_residual = s.max_residual.max(r.residual);
        s.max_relative = s.max_relative.max(r.residual / r.scale);
        if !r.pass {
            s.failures += 1;
            if s.failed.len() < KEEP {
                s.failed.push(r);
            }
        }
    }
}

fn empty_suite(backend: &str, seed: u64, samples: usize, depth: Option<usize>, bits: Option<u32>) -> IdentitySuite {
    IdentitySuite {
        backend: backend.to_string(),
        seed,
        samples,
        depth,
        bits,
        checks: 0,
        checks_by_id: BTreeMap::new(),
        failures: 0,
        max_residual: 0.0,
        max_relative: 0.0,
        failed: Vec::new(),
        certification_failures: Vec::new(),
        approx: None,
    }
}

/// Identities on rational points reconstructed from digit strings of length
/// at most 10 with `|q| ≤ 10⁶`; every residual must vanish.
pub fn exact_identity_suite(samples: usize, seed: u64) -> Result<IdentitySuite> {
    let per_point: Vec<Vec<IdentityReport>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            let (_, e) = exact_fixture(&mut rng, 10, 1e6);
            verify_expansion(&e)
        })
        .collect::<Result<_>>()?;
    let mut s = empty_suite("exact", seed, samples, None, None);
    collect_identities(per_point.into_iter().flatten(), &mut s);
    Ok(s)
}

/// Fractional bits of the random coordinates: a little under half the
/// working precision, so that depth-20 orbits stay far from termination.
pub fn coord_bits(bits: u32) -> u32 {
    (bits / 2).saturating_sub(6).max(16)
}

/// Identities and hard approximation bounds on `bits`-bit points expanded to
/// `depth` digits.
pub fn bigfloat_identity_suite(samples: usize, depth: usize, bits: u32, seed: u64) -> Result<IdentitySuite> {
    let ctx = PrecisionContext::new(bits)?;
    let bounds = Bounds::for_domain(&DirichletDomain)?;
    let per_point: Vec<Result<(Vec<IdentityReport>, Vec<ApproxRecord>)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            let h = bigfloat_fixture(&mut rng, coord_bits(bits), ctx);
            let e = expand(&h, &DirichletDomain, depth)?;
            Ok((verify_expansion(&e)?, approx_records(&e, &bounds)?))
        })
        .collect();
    let mut s = empty_suite(&format!("bigfloat-{bits}"), seed, samples, Some(depth), Some(bits));
    let mut recs = Vec::new();
    for (i, p) in per_point.into_iter().enumerate() {
        match p {
            Ok((ids, r)) => {
                collect_identities(ids, &mut s);
                recs.extend(r);
            }
            Err(err @ Error::Ambiguous { .. }) => s.certification_failures.push(format!("sample {i}: {err}")),
            Err(err) => return Err(err),
        }
    }
    s.approx = Some(summarize(&recs));
    Ok(s)
}

/// Empirical constants over `samples` points expanded to `depth` digits.
pub fn measure_suite(samples: usize, depth: usize, bits: u32, seed: u64) -> Result<(ApproxSummary, Vec<String>)> {
    let ctx = PrecisionContext::new(bits)?;
    let bounds = Bounds::for_domain(&DirichletDomain)?;
    let per_point: Vec<Result<Vec<ApproxRecord>>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            let h = bigfloat_fixture(&mut rng, coord_bits(bits), ctx);
            approx_records(&expand(&h, &DirichletDomain, depth)?, &bounds)
        })
        .collect();
    let mut recs = Vec::new();
    let mut cert = Vec::new();
    for (i, p) in per_point.into_iter().enumerate() {
        match p {
            Ok(r) => recs.extend(r),
            Err(err @ Error::Ambiguous { .. }) => cert.push(format!("sample {i}: {err}")),
            Err(err) => return Err(err),
        }
    }
    Ok((summarize(&recs), cert))
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTripSuite {
    pub seed: u64,
    pub samples: usize,
    pub matched: usize,
    /// Strings whose expansion differs, as `γ₀ digits -> γ₀' digits'`.
    pub mismatches: Vec<String>,
}

/// `expand ∘ reconstruct` on digit strings of gauge norm above 2.5.
pub fn round_trip_suite(samples: usize, seed: u64) -> Result<RoundTripSuite> {
    let per: Vec<Result<Option<String>>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            let (g0, ds) = admissible_digit_string(&mut rng, 10);
            let h = reconstruct(&g0, &ds)?;
            let e = expand_exact(&h, &DirichletDomain)?;
            Ok((e.gamma0 != g0 || e.digits != ds).then(|| {
                let show = |v: &[crate::domain::IntegerPoint]| {
                    v.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")
                };
                format!("{g0} [{}] -> {} [{}]", show(&ds), e.gamma0, show(&e.digits))
            }))
        })
        .collect();
    let mut out = RoundTripSuite { seed, samples, matched: 0, mismatches: Vec::new() };
    for r in per {
        match r? {
            None => out.matched += 1,
            Some(m) => out.mismatches.push(m),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct BestApproxSuite {
    pub seed: u64,
    pub fixtures: usize,
    pub q_max: f64,
    pub a_bound: f64,
    pub checked_indices: usize,
    pub candidates: usize,
    /// The stated inequality, failures kept verbatim.
    pub stated_violations: Vec<String>,
    /// The triangle-inequality form, which must always hold.
    pub proof_violations: Vec<String>,
    /// Points closer than the convergent with `|Q|` below the threshold.
    pub thm16_violations: Vec<String>,
    pub max_threshold: f64,
    pub min_closer_q_ratio: Option<f64>,
    pub reports: Vec<Prop71Report>,
}

impl BestApproxSuite {
    pub fn hard_violations(&self) -> usize {
        self.proof_violations.len() + self.thm16_violations.len()
    }
}

/// Compares every nearby rational with `|Q| ≤ a_bound·|q_n|` against the
/// convergents `1 ≤ n` with `|q_n| ≤ q_max` of `fixtures` random points.
pub fn best_approx_suite(fixtures: usize, q_max: f64, a_bound: f64, bits: u32, seed: u64) -> Result<BestApproxSuite> {
    let ctx = PrecisionContext::new(bits)?;
    let bounds = Bounds::for_domain(&DirichletDomain)?;
    let per: Vec<Result<Vec<Prop71Report>>> = (0..fixtures)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            let h = bigfloat_fixture(&mut rng, coord_bits(bits), ctx);
            let e = expand(&h, &DirichletDomain, 12)?;
            let mut out = Vec::new();
            for n in 1..e.depth() {
                if e.q(n as isize)?.abs_f64() > q_max {
                    break;
                }
                out.push(prop71_check(&e, n, a_bound, bounds.rk, bounds.rad)?);
            }
            Ok(out)
        })
        .collect();
    let mut s = BestApproxSuite {
        seed,
        fixtures,
        q_max,
        a_bound,
        checked_indices: 0,
        candidates: 0,
        stated_violations: Vec::new(),
        proof_violations: Vec::new(),
        thm16_violations: Vec::new(),
        max_threshold: 0.0,
        min_closer_q_ratio: None,
        reports: Vec::new(),
    };
    for r in per {
        for rep in r? {
            s.checked_indices += 1;
            s.candidates += rep.candidates;
            s.stated_violations.extend(rep.stated_violations.iter().cloned());
            s.proof_violations.extend(rep.proof_violations.iter().cloned());
            s.thm16_violations.extend(rep.thm16_violations.iter().cloned());
            s.max_threshold = s.max_threshold.max(rep.thm16_threshold);
            if let Some(x) = rep.min_closer_q_ratio {
                s.min_closer_q_ratio = Some(s.min_closer_q_ratio.map_or(x, |y: f64| y.min(x)));
            }
            s.reports.push(rep);
        }
    }
    Ok(s)
}
