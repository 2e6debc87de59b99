use std::fmt;

use super::{extension, sum_over_field};
use crate::algebra::{FiniteField, RationalFunction};
use crate::error::{Error, Result};

/// y^2 + y = f(x) in characteristic 2, restricted to reduced shapes:
/// squarefree denominator and a polynomial part of degree 0 or odd degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtinSchreierCurve {
    f: RationalFunction,
    /// (place degree, pole order) for every pole, infinity last.
    conductor: Vec<(usize, u32)>,
}

impl ArtinSchreierCurve {
    pub fn new(f: RationalFunction) -> Result<Self> {
        if !f.field().is_char2() {
            return Err(Error::OddCharacteristic);
        }
        if !f.den().is_separable() {
            return Err(Error::UnsupportedShape("denominator is not squarefree".into()));
        }
        let mut conductor = Vec::new();
        for (d, part) in f.den().distinct_degree() {
            for _ in 0..part.deg() as usize / d {
                conductor.push((d, 1));
            }
        }
        let excess = f.num().deg() - f.den().deg();
        if excess > 0 {
            if excess % 2 == 0 {
                return Err(Error::UnsupportedShape(format!("polynomial part has even degree {excess}")));
            }
            conductor.push((1, excess as u32));
        }
        if conductor.is_empty() {
            return Err(Error::InvalidCurve("f is constant".into()));
        }
        Ok(ArtinSchreierCurve { f, conductor })
    }

    pub fn base(&self) -> &FiniteField {
        self.f.field()
    }

    pub fn f(&self) -> &RationalFunction {
        &self.f
    }

    pub fn conductor(&self) -> &[(usize, u32)] {
        &self.conductor
    }

    /// -1 + (1/2) sum (d_P + 1) deg P.
    pub fn genus(&self) -> u32 {
        let s: usize = self.conductor.iter().map(|&(deg, d)| (d as usize + 1) * deg).sum();
        (s / 2 - 1) as u32
    }

    pub fn has_pole_at_infinity(&self) -> bool {
        self.f.num().deg() > self.f.den().deg()
    }

    pub fn count(&self, i: u32) -> Result<u64> {
        let (big, e) = extension(self.base(), i)?;
        let num = e.apply_poly(self.f.num());
        let den = e.apply_poly(self.f.den());
        let affine = sum_over_field(&big, |x| {
            let d = den.eval(x);
            if d.is_zero() {
                1
            } else {
                let v = big.mul(num.eval(x), big.inv_nz(d));
                2 * (1 - big.trace(v))
            }
        });
        let infinity = match self.f.map(&big, |c| e.apply(c)).eval_infinity() {
            None => 1,
            Some(v) => 2 * (1 - big.trace(v)),
        };
        Ok(affine + infinity)
    }
}

impl fmt::Display for ArtinSchreierCurve {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f.den().deg() == 0 {
            write!(out, "y^2 + y = {}", self.f.num().to_string_var("x"))
        } else {
            write!(out, "y^2 + y = ({})/({})", self.f.num().to_string_var("x"), self.f.den().to_string_var("x"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    fn curve(k: &FiniteField, num: &str, den: &str) -> Result<ArtinSchreierCurve> {
        let f = RationalFunction::new(parse_poly(k, "x", num)?, parse_poly(k, "x", den)?)?;
        ArtinSchreierCurve::new(f)
    }

    #[test]
    fn table_rows() {
        let f2 = FiniteField::prime(2).unwrap();
        let c = curve(&f2, "x^4 + x^2 + 1", "x^4 + x^3 + x^2 + x + 1").unwrap();
        assert_eq!(c.genus(), 3);
        assert_eq!(c.count(1).unwrap(), 0);
        let c = curve(&f2, "x^5 + x^2 + 1 + x^4 + x^3 + x^2 + x", "x^5 + x^2 + 1").unwrap();
        assert_eq!(c.genus(), 4);
        assert_eq!(c.count(1).unwrap(), 0);
    }

    #[test]
    fn line_is_genus_zero_with_three_points() {
        let f2 = FiniteField::prime(2).unwrap();
        let c = curve(&f2, "x", "1").unwrap();
        assert_eq!(c.genus(), 0);
        assert_eq!(c.count(1).unwrap(), 3);
        assert_eq!(c.count(3).unwrap(), 9);
    }

    #[test]
    fn unsupported_shapes() {
        let f2 = FiniteField::prime(2).unwrap();
        assert!(matches!(curve(&f2, "1", "x^2"), Err(Error::UnsupportedShape(_))));
        assert!(matches!(curve(&f2, "x^2 + x", "1"), Err(Error::UnsupportedShape(_))));
        let f3 = FiniteField::prime(3).unwrap();
        assert_eq!(curve(&f3, "x", "1"), Err(Error::OddCharacteristic));
    }
}
