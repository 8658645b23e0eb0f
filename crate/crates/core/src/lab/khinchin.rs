//! The series controlling the measure of well-approximable points, and a
//! Monte Carlo check on the Dirichlet domain.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Domain, DirichletDomain};
use crate::field::{Cx, FastComplex};
use crate::gaussian::{gi_gcd, GaussInt};
use crate::lab::best::{canonical_qs, near_triples, Approx, SmallTriple};
use crate::lab::task_rng;
use crate::siegel::{HeisPoint, SiegelPoint};

/// `r₂(n)` for `0 ≤ n ≤ max`, by sweeping the lattice.
pub fn r2_table(max: usize) -> Vec<u64> {
    let mut t = vec![0u64; max + 1];
    let top = (max as f64).sqrt() as i64 + 1;
    for x in -top..=top {
        for y in -top..=top {
            let n = (x * x + y * y) as usize;
            if n <= max {
                t[n] += 1;
            }
        }
    }
    t
}

/// `Σ_{g² | m} g·r₂(m/g²)`.
pub fn divisor_sum(m: usize, r2: &[u64]) -> u64 {
    let mut s = 0;
    let mut g = 1usize;
    while g * g <= m {
        if m % (g * g) == 0 {
            s += g as u64 * r2[m / (g * g)];
        }
        g += 1;
    }
    s
}

fn square_root(m: usize) -> Option<usize> {
    let l = (m as f64).sqrt().round() as usize;
    (l * l == m).then_some(l)
}

/// Summand `m` of the series with `φ(m) = C·m^(−(1+ε)/2)`:
/// `φ⁴·r₂(m)·m^(3/2)` when `m` is a square, plus `φ⁴·m·Σ_{g²|m} g·r₂(m/g²)`.
pub fn khinchin_term(m: usize, c: f64, eps: f64, r2: &[u64]) -> f64 {
    let mf = m as f64;
    let c4 = c.powi(4);
    let square = match square_root(m) {
        Some(_) => r2[m] as f64 * mf.powf(-0.5 - 2.0 * eps),
        None => 0.0,
    };
    c4 * (square + mf.powf(-1.0 - 2.0 * eps) * divisor_sum(m, r2) as f64)
}

/// Partial sums `S(1), …, S(M)`.
pub fn khinchin_partial_sums(c: f64, eps: f64, max_m: usize) -> Vec<f64> {
    let r2 = r2_table(max_m);
    let mut acc = 0.0;
    (1..=max_m)
        .map(|m| {
            acc += khinchin_term(m, c, eps, &r2);
            acc
        })
        .collect()
}

pub fn khinchin_partial_sum(c: f64, eps: f64, max_m: usize) -> f64 {
    *khinchin_partial_sums(c, eps, max_m).last().unwrap_or(&0.0)
}

/// `Σ_{z ∈ Z², |z| > L} |z|^(−s)` is at most this, from `#{|z| ≤ R} ≤ π(R+1)²`
/// and partial summation. Needs `s > 2`.
fn lattice_tail(l: f64, s: f64) -> f64 {
    PI * s * (l.powf(2.0 - s) / (s - 2.0) + 2.0 * l.powf(1.0 - s) / (s - 1.0) + l.powf(-s) / s)
}

/// Upper bound for `Σ_{d > D} r₂(d) d^(−s)`, `D > 0`, `s > 1`.
fn r2_tail(d: f64, s: f64) -> f64 {
    lattice_tail(d.sqrt(), 2.0 * s)
}

/// Rigorous upper bound for `Σ_{m > M} term(m)`, using the rearranged form
/// `Σ_g g^(1−2s) Σ_{d > M/g²} r₂(d) d^(−s)` (`s = 1 + 2ε`) for the
/// non-square part. Requires `ε > 1/4`.
pub fn khinchin_tail_bound(c: f64, eps: f64, max_m: usize) -> f64 {
    assert!(eps > 0.25, "tail bound needs ε > 1/4");
    let m = max_m as f64;
    // squares m = ℓ²: r₂(ℓ²) ℓ^(−1−4ε) summed over lattice points of norm ℓ > √M
    let square = lattice_tail(m.sqrt(), 1.0 + 4.0 * eps);
    let s = 1.0 + 2.0 * eps;
    let big_g = m.sqrt().floor();
    let mut rest = 0.0;
    let mut g = 1.0;
    while g <= big_g {
        rest += g.powf(1.0 - 2.0 * s) * r2_tail(m / (g * g), s);
        g += 1.0;
    }
    // g > √M: the whole inner series, 4 + Σ_{d>1}
    let z = 4.0 + r2_tail(1.0, s);
    rest += z * big_g.powf(-4.0 * eps) / (4.0 * eps);
    c.powi(4) * (square + rest)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhinchinSums {
    pub c: f64,
    pub epsilon: f64,
    pub max_m: usize,
    pub checkpoints: Vec<(usize, f64)>,
    pub partial_sum: f64,
    pub tail_bound: f64,
    pub monotone: bool,
}

pub fn khinchin_sums(c: f64, eps: f64, max_m: usize) -> KhinchinSums {
    let sums = khinchin_partial_sums(c, eps, max_m);
    let monotone = sums.windows(2).all(|w| w[1] >= w[0]);
    let mut checkpoints = Vec::new();
    let mut k = 1;
    while k <= max_m {
        checkpoints.push((k, sums[k - 1]));
        k *= 10;
    }
    KhinchinSums {
        c,
        epsilon: eps,
        max_m,
        checkpoints,
        partial_sum: *sums.last().unwrap_or(&0.0),
        tail_bound: if eps > 0.25 { khinchin_tail_bound(c, eps, max_m) } else { f64::INFINITY },
        monotone,
    }
}

/// A uniform point of the Dirichlet domain (f64 backend), by rejection from
/// `|x|, |y| ≤ 2^(−1/4)`, `|t| ≤ 2^(−1/2)`. Returns the point and the number
/// of draws used.
pub fn sample_k<R: Rng>(rng: &mut R) -> (SiegelPoint<FastComplex>, u64) {
    let zr = 2f64.powf(-0.25);
    let tr = 2f64.powf(-0.5);
    let mut draws = 0;
    loop {
        draws += 1;
        let (x, y) = (rng.gen_range(-zr..=zr), rng.gen_range(-zr..=zr));
        let t = rng.gen_range(-tr..=tr);
        if x * x + y * y > zr * zr {
            continue;
        }
        let h = SiegelPoint::from_heis(&HeisPoint { z: Cx::new(x, y), t });
        match DirichletDomain.nearest(&h) {
            Ok(n) if n.gamma.is_zero() => return (h, draws),
            _ => continue,
        }
    }
}

fn dist4_f64(t: &SmallTriple, h: &Approx) -> f64 {
    let [(qa, qb), (ra, rb), (pa, pb)] = t.map(|(a, b)| (a as f64, b as f64));
    let (ur, ui) = h.u;
    let (vr, vi) = h.v;
    // P̄ − R̄u + Q̄v
    let re = pa - (ra * ur + rb * ui) + (qa * vr + qb * vi);
    let im = -pb - (ra * ui - rb * ur) + (qa * vi - qb * vr);
    (re * re + im * im) / (qa * qa + qb * qb)
}

fn lowest_terms(t: &SmallTriple) -> bool {
    let g = |i: usize| GaussInt::new(t[i].0, t[i].1);
    matches!(gi_gcd(&g(0), &g(1)).and_then(|x| gi_gcd(&x, &g(2))), Ok(x) if x.is_unit())
}

/// Whether some rational point with `|Q|²` in `[2^k, 2^(k+1))` lies within
/// `C·|Q|^(−1−ε)` of `h`: `(in lowest terms, any triple)`.
pub fn has_solution(h: &Approx, qs: &[(i64, i64)], c: f64, eps: f64) -> (bool, bool) {
    let (mut lowest, mut any) = (false, false);
    for &q in qs {
        let m = (q.0 * q.0 + q.1 * q.1) as f64;
        let r = c * m.powf(-(1.0 + eps) / 2.0);
        let r4 = r.powi(4);
        near_triples(*h, q, r, |t| {
            if lowest || dist4_f64(&t, h) > r4 {
                return;
            }
            any = true;
            if lowest_terms(&t) {
                lowest = true;
            }
        });
        if lowest {
            break;
        }
    }
    (lowest, any)
}

/// Canonical `Q` grouped by dyadic range `2^k ≤ |Q|² < 2^(k+1)`.
pub fn dyadic_qs(ks: &[u32]) -> Vec<Vec<(i64, i64)>> {
    let top = ks.iter().max().map_or(1, |&k| 1i64 << (k + 1));
    let all = canonical_qs(top - 1);
    ks.iter()
        .map(|&k| {
            let (lo, hi) = (1i64 << k, 1i64 << (k + 1));
            all.iter().copied().filter(|&(a, b)| (lo..hi).contains(&(a * a + b * b))).collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhinchinRun {
    pub seed: u64,
    pub samples: u64,
    pub draws: u64,
    pub acceptance: f64,
    pub hits_lowest: Vec<u64>,
    pub hits_any: Vec<u64>,
    pub fraction_lowest: Vec<f64>,
    pub fraction_any: Vec<f64>,
    pub decreasing_lowest: bool,
    pub decreasing_any: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhinchinReport {
    pub c: f64,
    pub epsilon: f64,
    pub ks: Vec<u32>,
    pub runs: Vec<KhinchinRun>,
    /// Majority over seeds of strictly decreasing lowest-terms fractions.
    pub majority_decreasing: bool,
    pub majority_decreasing_any: bool,
}

const CHUNK: u64 = 1024;

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// One seed: `samples` uniform points of the domain, checked against every
/// dyadic range in `ks`.
pub fn khinchin_run(c: f64, eps: f64, ks: &[u32], samples: u64, seed: u64) -> KhinchinRun {
    let groups = dyadic_qs(ks);
    let chunks = samples.div_ceil(CHUNK);
    let zero = || (0u64, vec![0u64; ks.len()], vec![0u64; ks.len()]);
    let (draws, hits_lowest, hits_any) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = task_rng(seed, chunk);
            let n = CHUNK.min(samples - chunk * CHUNK);
            let (mut draws, mut lo, mut an) = zero();
            for _ in 0..n {
                let (h, d) = sample_k(&mut rng);
                draws += d;
                let ha = Approx::of(&h);
                for (i, qs) in groups.iter().enumerate() {
                    let (l, a) = has_solution(&ha, qs, c, eps);
                    lo[i] += l as u64;
                    an[i] += a as u64;
                }
            }
            (draws, lo, an)
        })
        .reduce(zero, |a, b| {
            let add = |x: Vec<u64>, y: Vec<u64>| x.iter().zip(&y).map(|(p, q)| p + q).collect();
            (a.0 + b.0, add(a.1, b.1), add(a.2, b.2))
        });
    let frac = |v: &[u64]| v.iter().map(|&h| h as f64 / samples as f64).collect::<Vec<_>>();
    let (fraction_lowest, fraction_any) = (frac(&hits_lowest), frac(&hits_any));
    KhinchinRun {
        seed,
        samples,
        draws,
        acceptance: samples as f64 / draws as f64,
        decreasing_lowest: strictly_decreasing(&fraction_lowest),
        decreasing_any: strictly_decreasing(&fraction_any),
        hits_lowest,
        hits_any,
        fraction_lowest,
        fraction_any,
    }
}

/// Runs seeds `seed, seed+1, …` and takes the majority vote.
pub fn khinchin_experiment(c: f64, eps: f64, ks: &[u32], samples: u64, seed: u64, seeds: u64) -> KhinchinReport {
    let runs: Vec<KhinchinRun> = (0..seeds).map(|i| khinchin_run(c, eps, ks, samples, seed + i)).collect();
    let votes = |f: fn(&KhinchinRun) -> bool| 2 * runs.iter().filter(|r| f(r)).count() as u64 > seeds;
    KhinchinReport {
        c,
        epsilon: eps,
        ks: ks.to_vec(),
        majority_decreasing: votes(|r| r.decreasing_lowest),
        majority_decreasing_any: votes(|r| r.decreasing_any),
        runs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::enumerate::{enumerate_rationals_qnorm, Region};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn r2_table_matches_counting() {
        let t = r2_table(100);
        assert_eq!(t[0], 1);
        for n in 1..=100 {
            assert_eq!(t[n], crate::gaussian::r2_count(n as u64), "n={n}");
        }
        assert_eq!(divisor_sum(4, &t), t[4] + 2 * t[1]);
        assert_eq!(divisor_sum(36, &t), t[36] + 2 * t[9] + 3 * t[4] + 6 * t[1]);
    }

    #[test]
    fn terms_positive_sums_monotone() {
        let s = khinchin_sums(1.0, 1.0, 2000);
        assert!(s.monotone);
        let t = r2_table(50);
        assert!((1..=50).all(|m| khinchin_term(m, 1.0, 1.0, &t) >= 0.0));
        assert_eq!(khinchin_term(3, 1.0, 1.0, &t), 0.0);
        // m = 1: r₂(1) + 1·r₂(1)
        assert_eq!(khinchin_term(1, 1.0, 1.0, &t), 8.0);
    }

    #[test]
    fn tail_bound_dominates_observed_tail() {
        for eps in [0.5, 1.0, 2.0] {
            let full = khinchin_partial_sum(1.0, eps, 200_000);
            for m in [100, 1000, 10_000] {
                let observed = full - khinchin_partial_sum(1.0, eps, m);
                let bound = khinchin_tail_bound(1.0, eps, m);
                assert!(observed <= bound, "eps={eps} M={m}: {observed} > {bound}");
            }
        }
    }

    #[test]
    fn rearrangement_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let big_m = 3000usize;
        let r2 = r2_table(big_m);
        for _ in 0..5 {
            let f: Vec<i128> = (0..=big_m).map(|_| rng.gen_range(-1000..1000)).collect();
            let lhs: i128 = (1..=big_m).map(|m| divisor_sum(m, &r2) as i128 * f[m]).sum();
            let mut rhs = 0i128;
            let mut g = 1usize;
            while g * g <= big_m {
                let inner: i128 = (1..=big_m / (g * g)).map(|d| r2[d] as i128 * f[g * g * d]).sum();
                rhs += g as i128 * inner;
                g += 1;
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn samples_lie_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut draws = 0;
        let mut max_norm = 0f64;
        let n = 20_000;
        for _ in 0..n {
            let (h, d) = sample_k(&mut rng);
            draws += d;
            assert!(DirichletDomain.nearest(&h).unwrap().gamma.is_zero());
            max_norm = max_norm.max(h.gauge_norm());
        }
        assert!(max_norm <= DirichletDomain.radius() + 1e-9);
        assert!(max_norm > DirichletDomain.radius() - 0.05);
        let rate = n as f64 / draws as f64;
        assert!(rate > 0.05 && rate < 1.0);
    }

    #[test]
    fn local_search_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ks = [2u32, 3, 4];
        let groups = dyadic_qs(&ks);
        let (c, eps) = (2.0, 0.5);
        let mut hits = 0;
        for _ in 0..300 {
            let (h, _) = sample_k(&mut rng);
            let ha = Approx::of(&h);
            for (i, &k) in ks.iter().enumerate() {
                let got = has_solution(&ha, &groups[i], c, eps);
                let (mut lowest, mut any) = (false, false);
                for m in (1i64 << k)..(1i64 << (k + 1)) {
                    let r = c * (m as f64).powf(-(1.0 + eps) / 2.0);
                    let reg = Region::new(DirichletDomain.radius() + r, m);
                    for t in enumerate_rationals_qnorm(m, &reg, false).points {
                        if dist4_f64(&t, &ha) <= r.powi(4) {
                            any = true;
                            lowest |= lowest_terms(&t);
                        }
                    }
                }
                assert_eq!(got.0, lowest);
                // the local search stops early once a reduced solution is found
                assert!(!lowest || got.1);
                if !lowest {
                    assert_eq!(got.1, any);
                }
                hits += lowest as u32;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn fractions_respond_to_parameters() {
        let ks = [3u32, 4];
        let tight = khinchin_run(1.0, 3.0, &ks, 400, 1);
        let loose = khinchin_run(1.0, 1.0, &ks, 400, 1);
        let huge = khinchin_run(6.0, 0.0, &ks, 400, 1);
        for i in 0..ks.len() {
            assert!(tight.hits_lowest[i] <= loose.hits_lowest[i]);
            assert!(loose.hits_lowest[i] <= huge.hits_lowest[i]);
            assert!(tight.hits_lowest[i] <= tight.hits_any[i]);
        }
        assert!(huge.fraction_lowest.iter().all(|&f| f > 0.9));
        assert_eq!(khinchin_run(1.0, 1.0, &ks, 400, 1), loose);
    }
}
