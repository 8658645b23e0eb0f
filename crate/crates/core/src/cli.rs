//! The `heiscf` command line.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bigfloat::PrecisionContext;
use crate::cf::{expand, expand_exact, CfExpansion};
use crate::domain::{rad_times_rk, rk_constant, Domain, DirichletDomain};
use crate::error::Error;
use crate::field::ComplexField;
use crate::lab::best::best_approx_search;
use crate::lab::enumerate::{count_sweep, growth_fit, SQUARE_MS};
use crate::lab::khinchin::{khinchin_experiment, khinchin_sums};
use crate::lab::suites::{
    best_approx_suite, bigfloat_identity_suite, exact_identity_suite, measure_suite,
};
use crate::siegel::{parse_float_point, parse_heis_exact, parse_heis_float, ExactPoint, FloatPoint, SiegelPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "heiscf", version, about = "Continued fractions on the Heisenberg group")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PointArgs {
    /// Planar point `(u; v)`, e.g. `(1+i; 1+4/5i)`.
    #[arg(long, conflicts_with = "heis")]
    pub point: Option<String>,
    /// Heisenberg coordinates `z, t`, e.g. `0.3+0.1i, 0.2`.
    #[arg(long)]
    pub heis: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continued fraction digits and convergents of a point.
    Expand {
        #[command(flatten)]
        point: PointArgs,
        /// Maximum number of digits after γ₀ (default: complete for exact input, 20 otherwise).
        #[arg(long)]
        depth: Option<usize>,
        /// Use big floats with this many bits instead of exact arithmetic.
        #[arg(long)]
        bits: Option<u32>,
    },
    /// Continuant identities on random points (or one given point).
    Verify {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 15)]
        depth: usize,
        #[arg(long, default_value_t = 512)]
        bits: u32,
        /// Rational points from random digit strings, checked exactly.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Approximation constants of convergents on random points.
    Measure {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 15)]
        depth: usize,
        #[arg(long, default_value_t = 512)]
        bits: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Best approximation with bounded denominator, or the comparison of all
    /// nearby rationals against convergents on random points.
    Bestapprox {
        #[command(flatten)]
        point: PointArgs,
        /// Denominator bound `|Q| ≤ B` (with a point).
        #[arg(long, default_value_t = 10.0)]
        bound: f64,
        #[arg(long, default_value_t = 256)]
        bits: u32,
        /// Number of random points (without a point).
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Largest convergent denominator examined.
        #[arg(long, default_value_t = 200.0)]
        q_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rational points with `|q|² = m`: structured against naive enumeration.
    Count {
        #[arg(long, default_value_t = 200)]
        m_max: i64,
        /// Width of the neighbourhood of the domain.
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
    },
    /// Partial sums and tail bound of the measure series, plus the Monte Carlo
    /// fraction of points with good approximations per dyadic range.
    Khinchin {
        #[arg(long, default_value_t = 1.0)]
        bigc: f64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Partial sums run to this `m`.
        #[arg(long, default_value_t = 10_000)]
        m_max: usize,
        /// Points per seed; 0 skips the experiment.
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value_t = 4)]
        k_min: u32,
        #[arg(long, default_value_t = 8)]
        k_max: u32,
    },
    /// The domain radius, the constant R and their product.
    Constants,
}

/// A finished report: JSON body, CSV table, text lines and exit code.
pub struct Report {
    pub json: Value,
    pub csv: Vec<Vec<String>>,
    pub text: String,
    pub code: i32,
}

fn envelope(command: &str, params: Value, seed: Option<u64>, result: Value, violations: Vec<String>) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "params": params,
        "seed": seed,
        "result": result,
        "violations": violations,
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

fn exit_for(err: &Error) -> i32 {
    match err {
        Error::Ambiguous { .. } => EXIT_CERTIFICATION,
        Error::Parse(_)
        | Error::InvalidArgument(_)
        | Error::ConstraintViolation(_)
        | Error::NotIntegerPoint(_)
        | Error::InvalidDigitString(_) => EXIT_USAGE,
        _ => EXIT_VIOLATION,
    }
}

enum Input {
    Exact(String, ExactPoint),
    Float(String, FloatPoint),
}

fn read_point(p: &PointArgs, bits: Option<u32>) -> crate::Result<Input> {
    let ctx = bits.map(PrecisionContext::new).transpose()?;
    match (&p.point, &p.heis, ctx) {
        (Some(s), None, None) => Ok(Input::Exact(s.clone(), s.parse()?)),
        (Some(s), None, Some(c)) => Ok(Input::Float(s.clone(), parse_float_point(s, c)?)),
        (None, Some(s), None) => Ok(Input::Exact(s.clone(), parse_heis_exact(s)?)),
        (None, Some(s), Some(c)) => Ok(Input::Float(s.clone(), parse_heis_float(s, c)?)),
        _ => Err(Error::InvalidArgument("give exactly one of --point, --heis".into())),
    }
}

fn kv(rows: &[(&str, String)]) -> Vec<Vec<String>> {
    let mut out = vec![vec!["key".to_string(), "value".to_string()]];
    out.extend(rows.iter().map(|(k, v)| vec![k.to_string(), v.clone()]));
    out
}

fn expansion_report<C: ComplexField>(e: &CfExpansion<C>, text: &str, params: Value) -> Report {
    let rec = e.fixture_record(text);
    let mut csv = vec![vec!["n".into(), "digit".into(), "convergent".into(), "cert_bits".into()]];
    let convs = rec["convergents"].as_array().cloned().unwrap_or_default();
    for n in 0..=e.depth() {
        let digit = if n == 0 { e.gamma0.to_string() } else { e.digits[n - 1].to_string() };
        csv.push(vec![
            n.to_string(),
            digit,
            convs.get(n).and_then(|c| c.as_str()).unwrap_or("").to_string(),
            e.cert_bits[n].map_or(String::new(), |b| b.to_string()),
        ]);
    }
    let mut t = String::new();
    let _ = writeln!(t, "point       {text}");
    match e.input.precision() {
        Some(b) => writeln!(t, "backend     {} ({b} bits)", C::backend_name()),
        None => writeln!(t, "backend     {}", C::backend_name()),
    }
    .expect("string write");
    let _ = writeln!(t, "gamma0      {}", e.gamma0);
    let _ = writeln!(t, "digits      [{}]", e.digits.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "));
    for (n, c) in convs.iter().enumerate() {
        let _ = writeln!(t, "convergent {n:>2} {}", c.as_str().unwrap_or(""));
    }
    let _ = writeln!(t, "terminated  {}", e.terminated);
    Report { json: envelope("expand", params, None, rec, vec![]), csv, text: t, code: EXIT_OK }
}

fn cmd_expand(point: &PointArgs, depth: Option<usize>, bits: Option<u32>) -> crate::Result<Report> {
    let params = json!({"point": point.point, "heis": point.heis, "depth": depth, "bits": bits});
    match read_point(point, bits)? {
        Input::Exact(s, h) => {
            let e = match depth {
                Some(d) => expand(&h, &DirichletDomain, d)?,
                None => expand_exact(&h, &DirichletDomain)?,
            };
            Ok(expansion_report(&e, &s, params))
        }
        Input::Float(s, h) => {
            let e = expand(&h, &DirichletDomain, depth.unwrap_or(20))?;
            Ok(expansion_report(&e, &s, params))
        }
    }
}

fn identity_rows<C: ComplexField>(e: &CfExpansion<C>) -> crate::Result<(Vec<crate::lab::identities::IdentityReport>, Vec<Vec<String>>)> {
    let reps = crate::lab::identities::verify_expansion(e)?;
    let mut csv = vec![["id", "n", "residual", "scale", "pass"].map(String::from).to_vec()];
    for r in &reps {
        csv.push(vec![r.id.to_string(), r.n.to_string(), format!("{:e}", r.residual), format!("{:e}", r.scale), r.pass.to_string()]);
    }
    Ok((reps, csv))
}

fn cmd_verify(point: &PointArgs, samples: usize, depth: usize, bits: u32, exact: bool, seed: u64) -> crate::Result<Report> {
    if point.point.is_some() || point.heis.is_some() {
        let params = json!({"point": point.point, "heis": point.heis, "depth": depth, "bits": (!exact).then_some(bits)});
        let (reps, csv) = match read_point(point, (!exact).then_some(bits))? {
            Input::Exact(_, h) => identity_rows(&expand(&h, &DirichletDomain, depth)?)?,
            Input::Float(_, h) => identity_rows(&expand(&h, &DirichletDomain, depth)?)?,
        };
        let failed: Vec<String> = reps.iter().filter(|r| !r.pass).map(|r| format!("{} n={}: {} vs {}", r.id, r.n, r.lhs, r.rhs)).collect();
        let mut t = String::new();
        for r in &reps {
            let _ = writeln!(t, "{:<14} n={:<3} residual {:e} scale {:e} {}", r.id, r.n, r.residual, r.scale, if r.pass { "ok" } else { "FAIL" });
        }
        let code = if failed.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
        return Ok(Report { json: envelope("verify", params, None, to_value(&reps), failed), csv, text: t, code });
    }
    let suite = if exact {
        exact_identity_suite(samples, seed)?
    } else {
        bigfloat_identity_suite(samples, depth, bits, seed)?
    };
    let params = json!({"samples": samples, "depth": (!exact).then_some(depth), "bits": (!exact).then_some(bits), "exact": exact});
    let mut violations: Vec<String> = suite.failed.iter().map(|r| format!("{} n={}: residual {:e} scale {:e}", r.id, r.n, r.residual, r.scale)).collect();
    if let Some(a) = &suite.approx {
        violations.extend(a.violations.iter().cloned());
    }
    let code = if suite.hard_violations() > 0 {
        EXIT_VIOLATION
    } else if !suite.certification_failures.is_empty() {
        EXIT_CERTIFICATION
    } else {
        EXIT_OK
    };
    let rows = [
        ("backend", suite.backend.clone()),
        ("samples", suite.samples.to_string()),
        ("checks", suite.checks.to_string()),
        ("failures", suite.failures.to_string()),
        ("max_residual", format!("{:e}", suite.max_residual)),
        ("max_relative", format!("{:e}", suite.max_relative)),
        ("certification_failures", suite.certification_failures.len().to_string()),
        ("bound_violations", suite.approx.as_ref().map_or(0, |a| a.violations.len()).to_string()),
    ];
    let mut t = String::new();
    for (k, v) in &rows {
        let _ = writeln!(t, "{k:<24} {v}");
    }
    for v in &violations {
        let _ = writeln!(t, "violation: {v}");
    }
    Ok(Report { json: envelope("verify", params, Some(seed), to_value(&suite), violations), csv: kv(&rows), text: t, code })
}

fn stats_rows(named: &[(&str, &crate::lab::Stats)]) -> Vec<Vec<String>> {
    let mut out = vec![["field", "count", "min", "max", "mean"].map(String::from).to_vec()];
    for (n, s) in named {
        out.push(vec![n.to_string(), s.count.to_string(), s.min.to_string(), s.max.to_string(), s.mean.to_string()]);
    }
    out
}

fn cmd_measure(samples: usize, depth: usize, bits: u32, seed: u64) -> crate::Result<Report> {
    let (s, cert) = measure_suite(samples, depth, bits, seed)?;
    let params = json!({"samples": samples, "depth": depth, "bits": bits});
    let named = [
        ("ratio_thm14", &s.ratio_thm14),
        ("ratio_vn", &s.ratio_vn),
        ("c_n", &s.c_n),
        ("relsize", &s.relsize),
        ("succ", &s.succ),
    ];
    let mut t = String::new();
    let _ = writeln!(t, "{:<12} {:>8} {:>12} {:>12} {:>12}", "field", "count", "min", "max", "mean");
    for (n, st) in &named {
        let _ = writeln!(t, "{n:<12} {:>8} {:>12.6} {:>12.6} {:>12.6}", st.count, st.min, st.max, st.mean);
    }
    let _ = writeln!(t, "max c_n {:.4} (reference {})", s.c_n.max, s.reference_max_c_n);
    let _ = writeln!(
        t,
        "relsize [{:.4}, {:.4}] (reference [{}, {}])",
        s.relsize.min, s.relsize.max, s.reference_relsize.0, s.reference_relsize.1
    );
    let mut violations = s.violations.clone();
    violations.extend(s.band_failures.iter().cloned());
    for v in &violations {
        let _ = writeln!(t, "violation: {v}");
    }
    let code = if !violations.is_empty() {
        EXIT_VIOLATION
    } else if !cert.is_empty() {
        EXIT_CERTIFICATION
    } else {
        EXIT_OK
    };
    let result = json!({"summary": s, "certification_failures": cert});
    Ok(Report { json: envelope("measure", params, Some(seed), result, violations), csv: stats_rows(&named), text: t, code })
}

fn best_for<C: ComplexField>(h: &SiegelPoint<C>, bound: f64) -> crate::Result<crate::lab::best::BestApprox> {
    Ok(best_approx_search(h, bound)?.1)
}

fn cmd_bestapprox(point: &PointArgs, bound: f64, bits: u32, samples: usize, q_max: f64, seed: u64) -> crate::Result<Report> {
    if point.point.is_some() || point.heis.is_some() {
        let params = json!({"point": point.point, "heis": point.heis, "bound": bound});
        let b = match read_point(point, None) {
            Ok(Input::Exact(_, h)) => best_for(&h, bound)?,
            _ => match read_point(point, Some(bits))? {
                Input::Float(_, h) => best_for(&h, bound)?,
                Input::Exact(_, h) => best_for(&h, bound)?,
            },
        };
        let rows = [
            ("point", b.point.clone()),
            ("q_abs", b.q_abs.to_string()),
            ("distance", b.distance.to_string()),
            ("candidates_examined", b.candidates_examined.to_string()),
        ];
        let t = rows.iter().map(|(k, v)| format!("{k:<20} {v}\n")).collect();
        return Ok(Report { json: envelope("bestapprox", params, None, to_value(&b), vec![]), csv: kv(&rows), text: t, code: EXIT_OK });
    }
    let s = best_approx_suite(samples, q_max, 2.0, bits, seed)?;
    let params = json!({"samples": samples, "q_max": q_max, "a_bound": 2.0, "bits": bits});
    let mut csv = vec![[
        "n", "q_n", "d_n", "v_n", "candidates", "min_sum_sqrt", "stated_bound", "proof_quantity", "min_normalized",
        "thm16_threshold", "min_closer_q_ratio",
    ]
    .map(String::from)
    .to_vec()];
    for r in &s.reports {
        csv.push(vec![
            r.n.to_string(),
            r.q_n.to_string(),
            r.d_n.to_string(),
            r.v_n.to_string(),
            r.candidates.to_string(),
            r.min_sum_sqrt.to_string(),
            r.stated_bound.to_string(),
            r.proof_quantity.to_string(),
            r.min_normalized.to_string(),
            r.thm16_threshold.to_string(),
            r.min_closer_q_ratio.map_or(String::new(), |x| x.to_string()),
        ]);
    }
    let mut t = String::new();
    let _ = writeln!(t, "indices checked        {}", s.checked_indices);
    let _ = writeln!(t, "candidates             {}", s.candidates);
    let _ = writeln!(t, "stated-form violations {}", s.stated_violations.len());
    let _ = writeln!(t, "triangle violations    {}", s.proof_violations.len());
    let _ = writeln!(t, "closer below threshold {}", s.thm16_violations.len());
    let _ = writeln!(t, "largest threshold      {:e}", s.max_threshold);
    let _ = writeln!(t, "min |Q|/|q_n| closer   {}", s.min_closer_q_ratio.map_or("none".into(), |x| format!("{x:.4}")));
    for v in s.stated_violations.iter().chain(&s.proof_violations).chain(&s.thm16_violations) {
        let _ = writeln!(t, "violation: {v}");
    }
    let mut violations = s.proof_violations.clone();
    violations.extend(s.thm16_violations.iter().cloned());
    let code = if s.hard_violations() > 0 { EXIT_VIOLATION } else { EXIT_OK };
    let mut result = to_value(&s);
    result["stated_violations_logged"] = json!(s.stated_violations.len());
    Ok(Report { json: envelope("bestapprox", params, Some(seed), result, violations), csv, text: t, code })
}

fn cmd_count(m_max: i64, delta: f64) -> crate::Result<Report> {
    if m_max < 1 || !(delta >= 0.0) {
        return Err(Error::InvalidArgument("need --m-max ≥ 1 and --delta ≥ 0".into()));
    }
    let rows = count_sweep(m_max, delta);
    let squares: Vec<i64> = SQUARE_MS.iter().copied().filter(|&m| m <= m_max).collect();
    let fit = (!squares.is_empty()).then(|| growth_fit(&squares, delta));
    let violations: Vec<String> = rows.iter().filter(|r| !r.agree).map(|r| format!("m={}: structured {} naive {}", r.m, r.structured, r.naive)).collect();
    let mut csv = vec![["m", "r2", "structured", "naive", "structured_lowest", "naive_lowest", "agree"].map(String::from).to_vec()];
    for r in &rows {
        csv.push(vec![
            r.m.to_string(),
            r.r2.to_string(),
            r.structured.to_string(),
            r.naive.to_string(),
            r.structured_lowest.to_string(),
            r.naive_lowest.to_string(),
            r.agree.to_string(),
        ]);
    }
    let mut t = String::new();
    let agree = rows.iter().filter(|r| r.agree).count();
    let _ = writeln!(t, "m = 1..{m_max}: structured = naive for {agree} of {}", rows.len());
    let _ = writeln!(t, "points {} (lowest terms {})", rows.iter().map(|r| r.structured).sum::<usize>(), rows.iter().map(|r| r.structured_lowest).sum::<usize>());
    if let Some(f) = &fit {
        let _ = writeln!(t, "square m {:?}: fitted C {:?}, cv {:.3} (raw m^1.5 cv {:.3})", f.ms, f.fitted.iter().map(|x| (x * 1e3).round() / 1e3).collect::<Vec<_>>(), f.cv, f.raw_cv);
    }
    for v in &violations {
        let _ = writeln!(t, "violation: {v}");
    }
    let code = if violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    let result = json!({"rows": rows, "square_fit": fit});
    Ok(Report { json: envelope("count", json!({"m_max": m_max, "delta": delta}), None, result, violations), csv, text: t, code })
}

#[allow(clippy::too_many_arguments)]
fn cmd_khinchin(c: f64, eps: f64, m_max: usize, samples: u64, seed: u64, seeds: u64, k_min: u32, k_max: u32) -> crate::Result<Report> {
    if !(c > 0.0) || !(eps >= 0.0) || m_max < 1 || k_min > k_max || k_max > 24 || seeds == 0 {
        return Err(Error::InvalidArgument("need --bigc > 0, --epsilon ≥ 0, --m-max ≥ 1, 1 ≤ seeds, k-min ≤ k-max ≤ 24".into()));
    }
    let sums = khinchin_sums(c, eps, m_max);
    let ks: Vec<u32> = (k_min..=k_max).collect();
    let exp = (samples > 0).then(|| khinchin_experiment(c, eps, &ks, samples, seed, seeds));
    let params = json!({"bigc": c, "epsilon": eps, "m_max": m_max, "samples": samples, "seeds": seeds, "ks": ks});
    let mut violations = Vec::new();
    if !sums.monotone {
        violations.push("partial sums not monotone".to_string());
    }
    let mut t = String::new();
    for (m, s) in &sums.checkpoints {
        let _ = writeln!(t, "S({m}) = {s:.12}");
    }
    let _ = writeln!(t, "S({m_max}) = {:.12}, tail bound {:e}", sums.partial_sum, sums.tail_bound);
    let mut csv = vec![["seed", "k", "samples", "hits_lowest", "hits_any", "fraction_lowest", "fraction_any"].map(String::from).to_vec()];
    if let Some(e) = &exp {
        for run in &e.runs {
            let _ = writeln!(
                t,
                "seed {}: acceptance {:.4}, lowest-terms fractions {:?}, all {:?}, decreasing {}",
                run.seed, run.acceptance, run.fraction_lowest, run.fraction_any, run.decreasing_lowest
            );
            for (i, k) in e.ks.iter().enumerate() {
                csv.push(vec![
                    run.seed.to_string(),
                    k.to_string(),
                    run.samples.to_string(),
                    run.hits_lowest[i].to_string(),
                    run.hits_any[i].to_string(),
                    run.fraction_lowest[i].to_string(),
                    run.fraction_any[i].to_string(),
                ]);
            }
        }
        let _ = writeln!(t, "majority decreasing: lowest terms {}, all {}", e.majority_decreasing, e.majority_decreasing_any);
    } else {
        csv = vec![vec!["m".into(), "partial_sum".into()]];
        csv.extend(sums.checkpoints.iter().map(|(m, s)| vec![m.to_string(), s.to_string()]));
    }
    let code = if violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    let result = json!({"sums": sums, "experiment": exp});
    Ok(Report { json: envelope("khinchin", params, Some(seed), result, violations), csv, text: t, code })
}

fn cmd_constants() -> crate::Result<Report> {
    let rad = DirichletDomain.radius();
    let rk = rk_constant(rad, 1e-12)?;
    let prod = rad_times_rk(1e-12)?;
    let rows = [
        ("rad", format!("{rad}")),
        ("rad_exact", "2^(-1/4)".to_string()),
        ("R", format!("{rk}")),
        ("rad_times_R", format!("{prod}")),
    ];
    let t = format!("rad      2^(-1/4) = {rad:.9}\nR        {rk:.6}\nrad * R  {prod:.6}\n");
    let result = json!({"rad": rad, "rad_exact": "2^(-1/4)", "R": rk, "rad_times_R": prod});
    Ok(Report { json: envelope("constants", json!({}), None, result, vec![]), csv: kv(&rows), text: t, code: EXIT_OK })
}

pub fn execute(cli: &Cli) -> crate::Result<Report> {
    match &cli.command {
        Command::Expand { point, depth, bits } => cmd_expand(point, *depth, *bits),
        Command::Verify { point, samples, depth, bits, exact, seed } => cmd_verify(point, *samples, *depth, *bits, *exact, *seed),
        Command::Measure { samples, depth, bits, seed } => cmd_measure(*samples, *depth, *bits, *seed),
        Command::Bestapprox { point, bound, bits, samples, q_max, seed } => {
            cmd_bestapprox(point, *bound, *bits, *samples, *q_max, *seed)
        }
        Command::Count { m_max, delta } => cmd_count(*m_max, *delta),
        Command::Khinchin { bigc, epsilon, m_max, samples, seed, seeds, k_min, k_max } => {
            cmd_khinchin(*bigc, *epsilon, *m_max, *samples, *seed, *seeds, *k_min, *k_max)
        }
        Command::Constants => cmd_constants(),
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("json");
            s.push('\n');
            s
        }
        Format::Text => report.text.clone(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.csv {
                w.write_record(row).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
        }
    }
}

/// Parses arguments, runs the command and writes the report; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return exit_for(&err);
        }
    };
    let body = render(&report, cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, body.as_bytes()).map_err(|e| e.to_string()),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    report.code
}
