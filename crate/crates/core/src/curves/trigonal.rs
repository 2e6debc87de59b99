use std::fmt;

use serde::{Deserialize, Serialize};

use super::extension;
use crate::algebra::{FiniteField, RationalFunction};
use crate::error::{Error, Result};

/// Largest extension for which a cube-root count table is built.
const TABLE_LIMIT: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigonalShape {
    /// v^3 = r(u) with r a squarefree polynomial.
    Kummer,
    /// v^3 - v = r(u).
    Cubic,
}

/// Cyclic or S3 triple covers of the u-line, in odd characteristic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigonalCurve {
    shape: TrigonalShape,
    r: RationalFunction,
    genus: u32,
}

impl TrigonalCurve {
    pub fn new(shape: TrigonalShape, r: RationalFunction) -> Result<Self> {
        let k = r.field().clone();
        if k.is_char2() {
            return Err(Error::EvenCharacteristic);
        }
        let genus = match shape {
            TrigonalShape::Kummer => kummer_genus(&k, &r)?,
            TrigonalShape::Cubic => cubic_genus(&k, &r)?,
        };
        Ok(TrigonalCurve { shape, r, genus })
    }

    pub fn base(&self) -> &FiniteField {
        self.r.field()
    }

    pub fn shape(&self) -> TrigonalShape {
        self.shape
    }

    pub fn r(&self) -> &RationalFunction {
        &self.r
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn count(&self, i: u32) -> Result<u64> {
        let (k, e) = extension(self.base(), i)?;
        if k.q() > TABLE_LIMIT {
            return Err(Error::ExtensionTooLarge(i));
        }
        // fibre[c] = number of v in F with v^3 = c (or v^3 - v = c)
        let mut fibre = vec![0u8; k.q() as usize];
        for v in k.elements() {
            let mut c = k.mul(k.mul(v, v), v);
            if self.shape == TrigonalShape::Cubic {
                c = k.sub(c, v);
            }
            fibre[c.0 as usize] += 1;
        }
        let r = self.r.map(&k, |c| e.apply(c));
        let affine: u64 = k
            .elements()
            .map(|u| match r.eval(u) {
                None => 1,
                Some(c) => fibre[c.0 as usize] as u64,
            })
            .sum();
        let infinity = match (self.shape, r.eval_infinity()) {
            (TrigonalShape::Kummer, _) if r.num().deg() % 3 != 0 => 1,
            (TrigonalShape::Kummer, _) => fibre[r.num().lc().0 as usize] as u64,
            (TrigonalShape::Cubic, None) => 1,
            (TrigonalShape::Cubic, Some(c)) => fibre[c.0 as usize] as u64,
        };
        Ok(affine + infinity)
    }
}

fn kummer_genus(k: &FiniteField, r: &RationalFunction) -> Result<u32> {
    if k.p() == 3 {
        return Err(Error::InvalidCurve("v^3 = r(u) is inseparable in characteristic 3".into()));
    }
    if r.den().deg() != 0 {
        return Err(Error::UnsupportedShape("Kummer form needs a polynomial right-hand side".into()));
    }
    let f = r.num();
    if f.deg() < 1 || !f.is_separable() {
        return Err(Error::InvalidCurve("r must be squarefree and nonconstant".into()));
    }
    let deg = f.deg() as u32;
    let branch = deg + u32::from(!deg.is_multiple_of(3));
    // 2g - 2 = 3(-2) + 2 * branch
    branch.checked_sub(2).ok_or_else(|| Error::InvalidCurve("genus would be negative".into()))
}

/// Pole places as (degree, order).
fn poles(r: &RationalFunction) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (p, mult) in r.den().factor() {
        out.push((p.deg() as usize, mult));
    }
    let excess = r.num().deg() - r.den().deg();
    if excess > 0 {
        out.push((1, excess as usize));
    }
    if let Some(&(_, d)) = out.iter().find(|&&(_, d)| d % 3 == 0) {
        return Err(Error::UnsupportedShape(format!("pole of order {d} divisible by 3")));
    }
    if out.is_empty() {
        return Err(Error::InvalidCurve("r has no poles".into()));
    }
    Ok(out)
}

fn cubic_genus(k: &FiniteField, r: &RationalFunction) -> Result<u32> {
    let poles = poles(r)?;
    if k.p() == 3 {
        // Artin-Schreier: g = -2 + sum (d_P + 1) deg P
        let s: usize = poles.iter().map(|&(deg, d)| (d + 1) * deg).sum();
        return Ok((s - 2) as u32);
    }
    // Tame: simple branching where 4 D^2 - 27 N^2 vanishes, total at poles.
    let (n, d) = (r.num(), r.den());
    let disc = d.mul(d).scale(k.from_int(4)).sub(&n.mul(n).scale(k.from_int(27)));
    let formal = 2 * n.deg().max(d.deg());
    let deficit = formal - disc.deg();
    if deficit > 1 || !disc.is_separable() {
        return Err(Error::UnsupportedShape("branching beyond simple ramification".into()));
    }
    let pole_points: usize = poles.iter().map(|&(deg, _)| deg).sum();
    let twice = 2 * pole_points as isize + disc.deg() + deficit - 4;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::InvalidCurve("inconsistent ramification".into()));
    }
    Ok((twice / 2) as u32)
}

impl fmt::Display for TrigonalCurve {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs = match self.shape {
            TrigonalShape::Kummer => "v^3",
            TrigonalShape::Cubic => "v^3 - v",
        };
        if self.r.den().deg() == 0 {
            write!(out, "{lhs} = {}", self.r.num().to_string_var("u"))
        } else {
            write!(out, "{lhs} = ({})/({})", self.r.num().to_string_var("u"), self.r.den().to_string_var("u"))
        }
    }
}
