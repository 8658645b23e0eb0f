//! 3×3 matrices over `Z[i]` acting on the projective model.

use std::fmt;
use std::str::FromStr;

use crate::domain::IntegerPoint;
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::gaussian::GaussInt;
use crate::siegel::{ExactPoint, ProjIntPoint, SiegelPoint};

pub type Triple = [GaussInt; 3];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UMatrix {
    pub m: [[GaussInt; 3]; 3],
}

fn gi(re: i64, im: i64) -> GaussInt {
    GaussInt::new(re, im)
}

impl UMatrix {
    pub fn from_rows(m: [[GaussInt; 3]; 3]) -> Self {
        UMatrix { m }
    }

    pub fn identity() -> Self {
        let o = GaussInt::one;
        let z = GaussInt::zero;
        UMatrix::from_rows([[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]])
    }

    /// `J = [[0,0,−1],[0,1,0],[−1,0,0]]`; acts on planar points as the Koranyi inversion.
    pub fn j() -> Self {
        let z = GaussInt::zero;
        UMatrix::from_rows([
            [z(), z(), gi(-1, 0)],
            [z(), gi(1, 0), z()],
            [gi(-1, 0), z(), z()],
        ])
    }

    /// `T_γ = [[1,0,0],[u,1,0],[v,ū,1]]`.
    pub fn translation(g: &IntegerPoint) -> Self {
        let z = GaussInt::zero;
        let o = GaussInt::one;
        UMatrix::from_rows([
            [o(), z(), z()],
            [g.u.clone(), o(), z()],
            [g.v.clone(), g.u.conj(), o()],
        ])
    }

    /// `T_γ` for an exact planar point, which must be an integer point.
    pub fn translation_from_point(h: &ExactPoint) -> Result<Self> {
        Ok(Self::translation(&IntegerPoint::from_exact(h)?))
    }

    /// `A_γ = J·T_γ = [[−v,−ū,−1],[u,1,0],[−1,0,0]]`.
    pub fn digit(g: &IntegerPoint) -> Self {
        Self::j().mul(&Self::translation(g))
    }

    pub fn mul(&self, o: &UMatrix) -> UMatrix {
        let mut out: [[GaussInt; 3]; 3] = Default::default();
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = GaussInt::zero();
                for k in 0..3 {
                    acc = acc + &self.m[i][k] * &o.m[k][j];
                }
                *cell = acc;
            }
        }
        UMatrix { m: out }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> UMatrix {
        let mut out: [[GaussInt; 3]; 3] = Default::default();
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[j][i].conj();
            }
        }
        UMatrix { m: out }
    }

    pub fn column(&self, j: usize) -> Triple {
        [self.m[0][j].clone(), self.m[1][j].clone(), self.m[2][j].clone()]
    }

    pub fn apply_triple(&self, x: &Triple) -> Triple {
        let row = |i: usize| {
            &self.m[i][0] * &x[0] + &self.m[i][1] * &x[1] + &self.m[i][2] * &x[2]
        };
        [row(0), row(1), row(2)]
    }

    pub fn apply_proj(&self, p: &ProjIntPoint) -> Result<ProjIntPoint> {
        let [q, r, pp] = self.apply_triple(&[p.q().clone(), p.r().clone(), p.p().clone()]);
        ProjIntPoint::new(q, r, pp)
    }

    /// Projective action on a planar point `(1 : u : v)`, in the point's backend.
    pub fn apply_planar<C: ComplexField>(&self, h: &SiegelPoint<C>) -> Result<SiegelPoint<C>> {
        let x = [h.u.from_gauss_like(&GaussInt::one()), h.u.clone(), h.v.clone()];
        let row = |i: usize| {
            let mut acc = h.u.zero_like();
            for (k, xk) in x.iter().enumerate() {
                acc = acc.add(&h.u.from_gauss_like(&self.m[i][k]).mul(xk));
            }
            acc
        };
        let q = row(0);
        if q.is_zero() {
            return Err(Error::PointAtInfinity);
        }
        let u = row(1).checked_div(&q).ok_or(Error::PointAtInfinity)?;
        let v = row(2).checked_div(&q).ok_or(Error::PointAtInfinity)?;
        Ok(SiegelPoint::new_unchecked(u, v))
    }

    /// `J·M†·J·M = I`.
    pub fn u21_check(&self) -> bool {
        let j = Self::j();
        j.mul(&self.dagger()).mul(&j).mul(self) == Self::identity()
    }

    /// `J·M†·J`, the inverse of a member of `U(2,1; Z[i])`.
    pub fn u21_inverse(&self) -> Result<UMatrix> {
        if !self.u21_check() {
            return Err(Error::NotUnitary);
        }
        let j = Self::j();
        Ok(j.mul(&self.dagger()).mul(&j))
    }
}

impl fmt::Display for UMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.m.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[{}, {}, {}]", row[0], row[1], row[2])?;
        }
        write!(f, "]")
    }
}

impl FromStr for UMatrix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `[[..],[..],[..]]`, got `{s}`"));
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(bad)?;
        let mut rows: Vec<[GaussInt; 3]> = Vec::new();
        for chunk in body.split(']') {
            let chunk = chunk.trim().trim_start_matches(',').trim();
            if chunk.is_empty() {
                continue;
            }
            let chunk = chunk.strip_prefix('[').ok_or_else(bad)?;
            let entries = chunk
                .split(',')
                .map(|e| e.trim().parse::<GaussInt>())
                .collect::<Result<Vec<_>>>()?;
            let row: [GaussInt; 3] = entries.try_into().map_err(|_| bad())?;
            rows.push(row);
        }
        let m: [[GaussInt; 3]; 3] = rows.try_into().map_err(|_| bad())?;
        Ok(UMatrix { m })
    }
}
