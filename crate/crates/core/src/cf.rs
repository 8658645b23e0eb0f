//! Continued-fraction expansion via the Gauss map `h ↦ [ιh]⁻¹ * ιh`.

use serde_json::{json, Value};

use crate::domain::{Domain, IntegerPoint};
use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::moebius::{Triple, UMatrix};
use crate::siegel::{ExactPoint, ProjIntPoint, SiegelPoint};

/// An expansion `h = γ₀ ι γ₁ ι γ₂ …` truncated at some depth.
///
/// `iterates[i]` is `h_i` and `continuants[i]` is `Q_i`, so all three vectors
/// of per-index data have length `depth + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CfExpansion<C> {
    pub input: SiegelPoint<C>,
    pub gamma0: IntegerPoint,
    pub digits: Vec<IntegerPoint>,
    pub iterates: Vec<SiegelPoint<C>>,
    pub continuants: Vec<UMatrix>,
    /// The last iterate is the origin.
    pub terminated: bool,
    /// Working precision that certified each of `γ₀, γ₁, …` (`None` when exact).
    pub cert_bits: Vec<Option<u32>>,
}

/// One application of the Gauss map.
pub fn gauss_map_step<C: ComplexField, D: Domain>(
    h: &SiegelPoint<C>,
    dom: &D,
) -> Result<(IntegerPoint, SiegelPoint<C>, Option<u32>)> {
    if h.is_origin() {
        return Ok((IntegerPoint::zero(), h.clone(), h.precision()));
    }
    let Some(base) = h.precision() else {
        let ih = h.koranyi_inversion()?;
        let n = dom.nearest(&ih)?;
        let next = n.gamma.inv().to_backend(&ih.u).mul_unchecked(&ih);
        return Ok((n.gamma, next, None));
    };
    // ιh has size about 1/|v|, and translating it back cancels that many
    // leading bits; work with enough headroom that the new iterate keeps
    // `base` bits absolutely.
    let mag_v = h.v.re().magnitude_bits().max(h.v.im().magnitude_bits());
    let k = (2 - mag_v).max(0) as u32;
    let work = base + k + 16;
    let (ih, rescale) = match h.escalate(work) {
        Some(hw) => (hw.koranyi_inversion()?, true),
        None => (h.koranyi_inversion()?, false),
    };
    let n = dom.nearest(&ih)?;
    let mut next = n.gamma.inv().to_backend(&ih.u).mul_unchecked(&ih).repaired();
    if rescale {
        next = next.escalate(base).expect("float backend");
    }
    Ok((n.gamma, next, n.bits))
}

/// Expands `h` to at most `max_depth` digits after `γ₀`, stopping early at the origin.
pub fn expand<C: ComplexField, D: Domain>(
    h: &SiegelPoint<C>,
    dom: &D,
    max_depth: usize,
) -> Result<CfExpansion<C>> {
    let n0 = dom.nearest(h)?;
    let gamma0 = n0.gamma;
    let h0 = gamma0.inv().to_backend(&h.u).mul_unchecked(h).repaired();
    let mut e = CfExpansion {
        input: h.clone(),
        gamma0,
        digits: Vec::new(),
        iterates: vec![h0],
        continuants: vec![UMatrix::identity()],
        terminated: false,
        cert_bits: vec![n0.bits],
    };
    while !e.iterates.last().expect("h0").is_origin() && e.digits.len() < max_depth {
        let (g, next, bits) = gauss_map_step(e.iterates.last().expect("h0"), dom)?;
        let q = e.continuants.last().expect("Q0").mul(&UMatrix::digit(&g));
        e.digits.push(g);
        e.iterates.push(next);
        e.continuants.push(q);
        e.cert_bits.push(bits);
    }
    e.terminated = e.iterates.last().expect("h0").is_origin();
    Ok(e)
}

/// `4 · bitlen(den norm) + 32`, the depth by which a rational expansion must stop.
pub fn termination_guard(h: &ExactPoint) -> usize {
    let bits = |r: &crate::gaussian::GaussRat| r.den().norm().bits() as usize;
    4 * bits(&h.u).max(bits(&h.v)) + 32
}

/// Expands a rational point completely; overrunning the guard is an error.
pub fn expand_exact<D: Domain>(h: &ExactPoint, dom: &D) -> Result<CfExpansion<crate::gaussian::GaussRat>> {
    let guard = termination_guard(h);
    let e = expand(h, dom, guard)?;
    if !e.terminated {
        return Err(Error::TerminationGuard(guard));
    }
    Ok(e)
}

/// `γ₀ ι γ₁ ι γ₂ … ι γ_n` evaluated exactly.
pub fn reconstruct(gamma0: &IntegerPoint, digits: &[IntegerPoint]) -> Result<ExactPoint> {
    let mut h = ExactPoint::origin();
    for g in digits.iter().rev() {
        let gh = g.to_exact().mul_unchecked(&h);
        if gh.v.is_zero() {
            return Err(Error::InvalidDigitString(format!(
                "ι applied at the origin (digit {g})"
            )));
        }
        h = gh.koranyi_inversion()?;
    }
    Ok(gamma0.to_exact().mul_unchecked(&h))
}

impl<C: ComplexField> CfExpansion<C> {
    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.depth() {
            return Err(Error::IndexOutOfRange(format!(
                "n = {n} exceeds depth {}",
                self.depth()
            )));
        }
        Ok(())
    }

    pub fn continuant(&self, n: usize) -> Result<&UMatrix> {
        self.check_index(n)?;
        Ok(&self.continuants[n])
    }

    /// `(q_n, r_n, p_n)` unreduced, in the frame of `h₀`.
    pub fn raw_convergent(&self, n: usize) -> Result<Triple> {
        Ok(self.continuant(n)?.column(0))
    }

    /// `(𝔮_n, 𝔯_n, 𝔭_n)`.
    pub fn second_column(&self, n: usize) -> Result<Triple> {
        Ok(self.continuant(n)?.column(1))
    }

    /// `q_n`, unreduced (`q_{-1} = 0`).
    pub fn q(&self, n: isize) -> Result<crate::gaussian::GaussInt> {
        if n < 0 {
            return Ok(crate::gaussian::GaussInt::zero());
        }
        Ok(self.raw_convergent(n as usize)?[0].clone())
    }

    /// `T_{γ₀} · Q_n · (1:0:0)` in lowest terms.
    pub fn convergent(&self, n: usize) -> Result<ProjIntPoint> {
        let raw = self.raw_convergent(n)?;
        let [q, r, p] = UMatrix::translation(&self.gamma0).apply_triple(&raw);
        ProjIntPoint::new(q, r, p)
    }

    /// `A_{γ_{i+1}} ⋯ A_{γ_n} (1:0:0)`, unreduced.
    pub fn tail_convergent(&self, i: usize, n: usize) -> Result<Triple> {
        self.check_index(n)?;
        if i > n {
            return Err(Error::IndexOutOfRange(format!("i = {i} > n = {n}")));
        }
        let mut m = UMatrix::identity();
        for g in &self.digits[i..n] {
            m = m.mul(&UMatrix::digit(g));
        }
        Ok(m.column(0))
    }

    /// JSON-lines fixture record.
    pub fn fixture_record(&self, point_text: &str) -> Value {
        let convergents: Vec<String> = (0..=self.depth())
            .map(|n| {
                self.convergent(n)
                    .map(|c| c.to_string())
                    .unwrap_or_else(|e| format!("error: {e}"))
            })
            .collect();
        json!({
            "point": point_text,
            "gamma0": self.gamma0.to_string(),
            "digits": self.digits.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "convergents": convergents,
            "terminated": self.terminated,
            "backend": C::backend_name(),
            "bits": self.input.precision(),
        })
    }
}
