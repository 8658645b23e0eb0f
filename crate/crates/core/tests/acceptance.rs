//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::time::{Duration, Instant};

use heisenberg_cf::domain::{rad_times_rk, rk_constant, Domain, DirichletDomain};
use heisenberg_cf::lab::approx::{HARD_BAND, REF_MAX_CN, REF_RELSIZE};
use heisenberg_cf::lab::enumerate::{count_sweep, growth_fit, SQUARE_MS};
use heisenberg_cf::lab::khinchin::{khinchin_experiment, khinchin_sums};
use heisenberg_cf::lab::suites::{
    best_approx_suite, bigfloat_identity_suite, exact_identity_suite, measure_suite, round_trip_suite,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let took = t.elapsed();
    let in_time = took <= budget;
    let pass = out.pass && in_time;
    println!(
        "{} criterion {id} ({name}): {} [{:.2}s of {}s]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() {
    let mut all = true;

    all &= run(1, "constants", secs(1), || {
        let rad = DirichletDomain.radius();
        let rk = rk_constant(rad, 1e-12).unwrap();
        let prod = rad_times_rk(1e-12).unwrap();
        let pass = rad == 2f64.powf(-0.25) && (rk - 6726.7).abs() <= 0.5 && (prod - 5656.5).abs() <= 0.5;
        Outcome { pass, detail: format!("rad = 2^(-1/4) = {rad:.9}, R = {rk:.4}, rad*R = {prod:.4}") }
    });

    all &= run(2, "exact identities", secs(60), || {
        let s = exact_identity_suite(1000, 2).unwrap();
        let ids = ["prq", "tildeprq", "fracq", "distance", "distance_next"];
        let covered = ids.iter().all(|id| s.checks_by_id.get(id).copied().unwrap_or(0) > 0);
        Outcome {
            pass: s.failures == 0 && s.max_residual == 0.0 && covered,
            detail: format!("{} points, {} checks {:?}, max residual {}", s.samples, s.checks, s.checks_by_id, s.max_residual),
        }
    });

    all &= run(3, "certified-depth identities", secs(600), || {
        let s = bigfloat_identity_suite(200, 20, 512, 3).unwrap();
        let a = s.approx.as_ref().unwrap();
        let tol = 2f64.powi(-256);
        let pass = s.failures == 0
            && s.max_relative <= tol
            && a.violations.is_empty()
            && s.certification_failures.is_empty()
            && a.records > 0;
        Outcome {
            pass,
            detail: format!(
                "{} checks, max residual/scale {:e} (limit {tol:e}); ratio_thm14 [{:.4}, {:.4}], relsize [{:.4}, {:.4}], succ [{:.4}, {:.4}] over {} records; {} bound violations, {} certification failures",
                s.checks, s.max_relative, a.ratio_thm14.min, a.ratio_thm14.max, a.relsize.min, a.relsize.max,
                a.succ.min, a.succ.max, a.records, a.violations.len(), s.certification_failures.len()
            ),
        }
    });

    all &= run(4, "empirical constants", secs(600), || {
        let (s, cert) = measure_suite(1000, 15, 512, 4).unwrap();
        let soft_cn = s.c_n.max <= 1.3;
        let soft_rel = s.relsize.min >= 0.3 && s.relsize.max <= 3.5;
        Outcome {
            pass: s.band_failures.is_empty() && s.violations.is_empty() && cert.is_empty(),
            detail: format!(
                "max c_n {:.4} ({} 1.3; reference {REF_MAX_CN}), relsize [{:.4}, {:.4}] ({} [0.3, 3.5]; reference {:?}); hard band {:?}",
                s.c_n.max,
                if soft_cn { "within" } else { "REPORT: above" },
                s.relsize.min,
                s.relsize.max,
                if soft_rel { "within" } else { "REPORT: outside" },
                REF_RELSIZE,
                HARD_BAND
            ),
        }
    });

    all &= run(5, "round trip", secs(60), || {
        let s = round_trip_suite(1000, 5).unwrap();
        Outcome {
            pass: s.mismatches.is_empty() && s.matched == 1000,
            detail: format!("{} of {} strings reproduced, boundary-tie exceptions {}", s.matched, s.samples, s.mismatches.len()),
        }
    });

    all &= run(6, "enumeration oracle", secs(300), || {
        let rows = count_sweep(200, 0.25);
        let agree = rows.iter().filter(|r| r.agree).count();
        let fit = growth_fit(&SQUARE_MS, 0.25);
        Outcome {
            pass: agree == 200 && fit.cv < 0.5,
            detail: format!(
                "structured = naive for {agree}/200 m; square m fitted C {:?}, cv {:.3} (raw count/m^1.5 cv {:.3})",
                fit.fitted.iter().map(|x| (x * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
                fit.cv,
                fit.raw_cv
            ),
        }
    });

    all &= run(7, "series convergence", secs(60), || {
        let s = khinchin_sums(1.0, 1.0, 10_000);
        Outcome {
            pass: s.monotone && s.tail_bound < 1e-3 * s.partial_sum,
            detail: format!(
                "S(10^4) = {:.10}, tail bound {:e} = {:.2e} of the sum, monotone {}",
                s.partial_sum,
                s.tail_bound,
                s.tail_bound / s.partial_sum,
                s.monotone
            ),
        }
    });

    all &= run(8, "best approximation", secs(600), || {
        let s = best_approx_suite(50, 200.0, 2.0, 512, 8).unwrap();
        for v in &s.stated_violations {
            println!("  stated-form violation: {v}");
        }
        Outcome {
            pass: s.fixtures == 50 && s.checked_indices > 0 && s.hard_violations() == 0,
            detail: format!(
                "{} fixtures, {} convergents with |q_n| <= 200, {} candidates; stated-form violations {}, triangle-form violations {}, closer points below threshold {} (largest threshold {:.2e}, vacuous below 1); min |Q|/|q_n| among closer points {}",
                s.fixtures,
                s.checked_indices,
                s.candidates,
                s.stated_violations.len(),
                s.proof_violations.len(),
                s.thm16_violations.len(),
                s.max_threshold,
                s.min_closer_q_ratio.map_or("none".into(), |x| format!("{x:.4}"))
            ),
        }
    });

    all &= run(9, "direction of the measure-zero statement", secs(600), || {
        let r = khinchin_experiment(1.0, 1.0, &[4, 5, 6, 7, 8], 200_000, 9, 3);
        let per_seed: Vec<String> = r
            .runs
            .iter()
            .map(|x| format!("seed {}: {:?} (all triples {:?})", x.seed, x.hits_lowest, x.hits_any))
            .collect();
        Outcome {
            pass: r.majority_decreasing,
            detail: format!(
                "hits per k = 4..8 out of 200000: {}; majority strictly decreasing {}",
                per_seed.join("; "),
                r.majority_decreasing
            ),
        }
    });

    if !all {
        std::process::exit(1);
    }
}
