//! Rational points `(q : r : p)` with `|q|² = m` over a bounded region.
//!
//! With `q = a+bi`, `p = c+di` the constraint reads `|r|² = 2(ac+bd)`, and the
//! planar point has `|u|² = |r|²/m`, `Im v = (ad−bc)/m`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Domain, DirichletDomain};
use crate::gaussian::{gi_gcd, r2_count, GaussInt};
use crate::lab::best::SmallTriple;
use crate::lab::Stats;
use crate::siegel::ProjIntPoint;

/// The box `|u|² ≤ 2ρ²`, `|Im v| ≤ ρ²`, which contains every point at gauge
/// norm at most `ρ`. In integer form: `|r|² ≤ nmax`, `|ad−bc| ≤ ymax`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Region {
    pub rho: f64,
    pub m: i64,
    pub nmax: i64,
    pub ymax: i64,
}

impl Region {
    pub fn new(rho: f64, m: i64) -> Region {
        let r2 = rho * rho;
        Region {
            rho,
            m,
            nmax: (2.0 * r2 * m as f64).floor() as i64,
            ymax: (r2 * m as f64).floor() as i64,
        }
    }

    /// The neighbourhood of width `delta` around the Dirichlet domain.
    pub fn around_domain(delta: f64, m: i64) -> Region {
        Region::new(DirichletDomain.radius() + delta, m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalEnumeration {
    pub m: i64,
    pub region: Region,
    pub lowest_terms: bool,
    pub points: Vec<SmallTriple>,
}

impl RationalEnumeration {
    pub fn to_points(&self) -> Vec<ProjIntPoint> {
        self.points
            .iter()
            .map(|t| {
                let g = |i: usize| GaussInt::new(t[i].0, t[i].1);
                ProjIntPoint::new(g(0), g(1), g(2)).expect("enumerated triples satisfy the constraint")
            })
            .collect()
    }
}

/// Canonical `q = a+bi` (`a > 0, b ≥ 0`) with `a² + b² = m`.
pub fn canonical_q_of_norm(m: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut a = 1i64;
    while a * a <= m {
        let rest = m - a * a;
        let b = (rest as f64).sqrt().round() as i64;
        for b in [b - 1, b, b + 1] {
            if b >= 0 && b * b == rest && !out.contains(&(a, b)) {
                out.push((a, b));
            }
        }
        a += 1;
    }
    out
}

fn even_r_in_disk(nmax: i64, mut f: impl FnMut(i64, i64, i64)) {
    let top = (nmax as f64).sqrt() as i64 + 1;
    for ra in -top..=top {
        for rb in -top..=top {
            let n = ra * ra + rb * rb;
            if n <= nmax && n % 2 == 0 {
                f(ra, rb, n);
            }
        }
    }
}

fn keep(t: &SmallTriple, lowest_terms: bool) -> bool {
    if !lowest_terms {
        return true;
    }
    let g = |i: usize| GaussInt::new(t[i].0, t[i].1);
    matches!(gi_gcd(&g(0), &g(1)).and_then(|x| gi_gcd(&x, &g(2))), Ok(x) if x.is_unit())
}

/// Plain loop over `r` and `y = Im(p q̄)`, solving `p q̄ = N/2 + iy` by division.
pub fn enumerate_naive(m: i64, region: &Region, lowest_terms: bool) -> RationalEnumeration {
    let mut points = Vec::new();
    for (a, b) in canonical_q_of_norm(m) {
        even_r_in_disk(region.nmax, |ra, rb, n| {
            for y in -region.ymax..=region.ymax {
                let (x, y) = (n / 2, y);
                // p = (x + iy)(a + bi)/m
                let (pr, pi) = (x * a - y * b, x * b + y * a);
                if pr % m == 0 && pi % m == 0 {
                    let t = [(a, b), (ra, rb), (pr / m, pi / m)];
                    if keep(&t, lowest_terms) {
                        points.push(t);
                    }
                }
            }
        });
    }
    points.sort();
    RationalEnumeration { m, region: *region, lowest_terms, points }
}

fn mod_inverse(x: i64, modulus: i64) -> Option<i64> {
    let e = x.rem_euclid(modulus).extended_gcd(&modulus);
    (e.gcd == 1).then(|| e.x.rem_euclid(modulus))
}

/// Solutions `(c, d)` of `ac + bd = half` with `|ad − bc| ≤ ymax`.
fn solve_line(a: i64, b: i64, half: i64, ymax: i64, mut f: impl FnMut(i64, i64)) {
    let m = a * a + b * b;
    if b == 0 || a == 0 {
        // q real or purely imaginary: one of c, d is forced, the other free
        let s = a + b;
        if half % s != 0 {
            return;
        }
        let forced = half / s;
        let free_max = ymax / s.abs();
        for free in -free_max..=free_max {
            if b == 0 {
                f(forced, free);
            } else {
                f(-free, forced);
            }
        }
        return;
    }
    let g = a.gcd(&b);
    if half % g != 0 {
        return;
    }
    let modulus = a.abs() / g;
    let d0 = if modulus == 1 {
        0
    } else {
        let inv = mod_inverse(b / g, modulus).expect("a/g and b/g are coprime");
        ((half / g).rem_euclid(modulus) * inv).rem_euclid(modulus)
    };
    // ad − bc = (m d − b·half)/a, bounded by ymax
    let lo = Integer::div_ceil(&(b * half - ymax * a.abs()), &m);
    let hi = Integer::div_floor(&(b * half + ymax * a.abs()), &m);
    let mut d = lo + (d0 - lo).rem_euclid(modulus);
    while d <= hi {
        let c = (half - b * d) / a;
        debug_assert_eq!(a * c + b * d, half);
        f(c, d);
        d += modulus;
    }
}

/// Structured enumeration: for each `r`, `d` runs through one residue class
/// modulo `|a|/gcd(a, b)` and `c` is determined.
pub fn enumerate_rationals_qnorm(m: i64, region: &Region, lowest_terms: bool) -> RationalEnumeration {
    let mut points = Vec::new();
    for (a, b) in canonical_q_of_norm(m) {
        even_r_in_disk(region.nmax, |ra, rb, n| {
            solve_line(a, b, n / 2, region.ymax, |c, d| {
                let t = [(a, b), (ra, rb), (c, d)];
                if keep(&t, lowest_terms) {
                    points.push(t);
                }
            });
        });
    }
    points.sort();
    RationalEnumeration { m, region: *region, lowest_terms, points }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRow {
    pub m: i64,
    pub r2: u64,
    pub structured: usize,
    pub naive: usize,
    pub structured_lowest: usize,
    pub naive_lowest: usize,
    pub agree: bool,
}

/// Counts for `1 ≤ m ≤ m_max`, structured against naive, with and without
/// the lowest-terms restriction.
pub fn count_sweep(m_max: i64, delta: f64) -> Vec<CountRow> {
    (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let reg = Region::around_domain(delta, m);
            let s = enumerate_rationals_qnorm(m, &reg, false);
            let n = enumerate_naive(m, &reg, false);
            let sl = enumerate_rationals_qnorm(m, &reg, true);
            let nl = enumerate_naive(m, &reg, true);
            CountRow {
                m,
                r2: r2_count(m as u64),
                structured: s.points.len(),
                naive: n.points.len(),
                structured_lowest: sl.points.len(),
                naive_lowest: nl.points.len(),
                agree: s == n && sl == nl,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub delta: f64,
    pub ms: Vec<i64>,
    pub counts: Vec<usize>,
    /// `count / m^(3/2)`.
    pub raw: Vec<f64>,
    pub raw_cv: f64,
    /// `count / (2πUT·m·weight(m))`, see [`arithmetic_weight`].
    pub fitted: Vec<f64>,
    pub stats: Stats,
    /// Standard deviation over mean of `fitted`.
    pub cv: f64,
}

fn cv(xs: &[f64]) -> f64 {
    let s = Stats::of(xs.iter().copied());
    let var = xs.iter().map(|x| (x - s.mean).powi(2)).sum::<f64>() / xs.len() as f64;
    var.sqrt() / s.mean
}

/// Counts (not restricted to lowest terms) over the given `m`, normalised
/// both by `m^(3/2)` and by the congruence-corrected prediction.
pub fn growth_fit(ms: &[i64], delta: f64) -> GrowthFit {
    let counts: Vec<usize> = ms
        .par_iter()
        .map(|&m| enumerate_rationals_qnorm(m, &Region::around_domain(delta, m), false).points.len())
        .collect();
    let raw: Vec<f64> = ms.iter().zip(&counts).map(|(&m, &c)| c as f64 / (m as f64).powf(1.5)).collect();
    let fitted: Vec<f64> = ms
        .iter()
        .zip(&counts)
        .map(|(&m, &c)| {
            let r = Region::around_domain(delta, m);
            let (u, t) = (2.0 * r.rho * r.rho, r.rho * r.rho);
            c as f64 / (2.0 * std::f64::consts::PI * u * t * m as f64 * arithmetic_weight(m))
        })
        .collect();
    GrowthFit {
        delta,
        ms: ms.to_vec(),
        counts,
        raw_cv: cv(&raw),
        raw,
        stats: Stats::of(fitted.iter().copied()),
        cv: cv(&fitted),
        fitted,
    }
}

/// Density of `r ∈ Z²` with `n | |r|²`.
pub fn square_norm_density(n: i64) -> f64 {
    let mut hits = 0i64;
    for x in 0..n {
        for y in 0..n {
            if (x * x + y * y) % n == 0 {
                hits += 1;
            }
        }
    }
    hits as f64 / (n * n) as f64
}

/// `Σ_q g(q)·ρ(2g(q))` over canonical `q` of norm `m`, `g(q) = gcd(Re q, Im q)`
/// and `ρ` as in [`square_norm_density`]. Heuristically
/// `count(m) ≈ 2πUT·m·weight(m)` for the box `|u|² ≤ U`, `|Im v| ≤ T`; for
/// real `q = √m` the summand is `m^(1/2)·ρ(2√m)`.
pub fn arithmetic_weight(m: i64) -> f64 {
    canonical_q_of_norm(m)
        .into_iter()
        .map(|(a, b)| {
            let g = a.gcd(&b);
            g as f64 * square_norm_density(2 * g)
        })
        .sum()
}

pub const SQUARE_MS: [i64; 7] = [4, 16, 36, 64, 100, 144, 196];
