//! Random test inputs shared by the verifiers, the CLI and the acceptance runs.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use rand::Rng;

use crate::bigfloat::PrecisionContext;
use crate::cf::{expand_exact, reconstruct, CfExpansion};
use crate::domain::{DirichletDomain, IntegerPoint};
use crate::error::Result;
use crate::field::BigComplex;
use crate::gaussian::{GaussInt, GaussRat};
use crate::siegel::{ExactPoint, FloatPoint, HeisPoint, SiegelPoint};

/// Integer point with `u = a+bi`, `a ≡ b (mod 2)`, `|a|, |b| ≤ 3` and
/// `|Im v| ≤ t_max`.
pub fn random_integer_point<R: Rng>(rng: &mut R, t_max: i64) -> IntegerPoint {
    loop {
        let (a, b) = (rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3));
        if (a - b) % 2 != 0 {
            continue;
        }
        let t = rng.gen_range(-t_max..=t_max);
        return IntegerPoint::new(GaussInt::new(a, b), GaussInt::new((a * a + b * b) / 2, t))
            .expect("parity lattice");
    }
}

/// Nonzero digits of length `1..=max_len` with `|Im v| ≤ 6`, and an arbitrary `γ₀`.
pub fn random_digit_string<R: Rng>(rng: &mut R, max_len: usize) -> (IntegerPoint, Vec<IntegerPoint>) {
    let g0 = random_integer_point(rng, 6);
    let len = rng.gen_range(1..=max_len);
    let digits = (0..len)
        .map(|_| loop {
            let g = random_integer_point(rng, 6);
            if !g.is_zero() {
                break g;
            }
        })
        .collect();
    (g0, digits)
}

/// Digits with `|v|² ≥ 40`, i.e. gauge norm above 2.5. Such strings are
/// reproduced by expanding their reconstruction.
pub fn admissible_digit_string<R: Rng>(rng: &mut R, max_len: usize) -> (IntegerPoint, Vec<IntegerPoint>) {
    let g0 = random_integer_point(rng, 6);
    let len = rng.gen_range(1..=max_len);
    let digits = (0..len)
        .map(|_| loop {
            let g = random_integer_point(rng, 12);
            if g.norm4() >= BigInt::from(40) {
                break g;
            }
        })
        .collect();
    (g0, digits)
}

/// A rational point built from a random digit string, with its full expansion.
/// Strings giving `|q| > q_max` or invalid products are redrawn.
pub fn exact_fixture<R: Rng>(rng: &mut R, max_len: usize, q_max: f64) -> (ExactPoint, CfExpansion<GaussRat>) {
    loop {
        let (g0, digits) = random_digit_string(rng, max_len);
        let Ok(h) = reconstruct(&g0, &digits) else { continue };
        let Ok(e) = expand_exact(&h, &DirichletDomain) else { continue };
        let Ok(last) = e.convergent(e.depth()) else { continue };
        if last.q().abs_f64() <= q_max {
            return (h, e);
        }
    }
}

/// Uniform dyadic `n / 2^bits` in `[−2, 2]`.
pub fn random_dyadic<R: Rng>(rng: &mut R, bits: u32) -> BigRational {
    let bytes = (bits as usize + 2).div_ceil(8) + 1;
    let raw: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
    let span = BigInt::from(1) << (bits + 2);
    let n = BigInt::from_bytes_le(Sign::Plus, &raw) % (&span + 1) - (&span >> 1);
    BigRational::new(n, BigInt::from(1) << bits)
}

/// A point with Heisenberg coordinates `x, y, t` drawn by [`random_dyadic`]
/// (`coord_bits` fractional bits), held at precision `ctx`.
pub fn bigfloat_fixture<R: Rng>(rng: &mut R, coord_bits: u32, ctx: PrecisionContext) -> FloatPoint {
    let mut draw = || ctx.from_ratio(&random_dyadic(rng, coord_bits));
    let (x, y, t) = (draw(), draw(), draw());
    SiegelPoint::from_heis(&HeisPoint { z: BigComplex::new(x, y), t })
}

/// The defaults used throughout: 512-bit arithmetic, 250-bit coordinates.
pub fn default_bigfloat_fixture<R: Rng>(rng: &mut R) -> Result<FloatPoint> {
    Ok(bigfloat_fixture(rng, 250, PrecisionContext::new(512)?))
}
