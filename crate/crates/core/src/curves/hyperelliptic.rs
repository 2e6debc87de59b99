use std::fmt;

use super::{extension, sqrt_count, sum_over_field};
use crate::algebra::{Fe, FiniteField, Poly};
use crate::error::{Error, Result};

/// y^2 = f(x) in odd characteristic, with f squarefree of degree at least 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticOdd {
    f: Poly,
}

impl HyperellipticOdd {
    pub fn new(f: Poly) -> Result<Self> {
        if f.field().is_char2() {
            return Err(Error::EvenCharacteristic);
        }
        if f.deg() < 3 {
            return Err(Error::InvalidCurve(format!("degree {} is below 3", f.deg())));
        }
        if !f.is_separable() {
            return Err(Error::InvalidCurve("right-hand side is not squarefree".into()));
        }
        Ok(HyperellipticOdd { f })
    }

    pub fn base(&self) -> &FiniteField {
        self.f.field()
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn genus(&self) -> u32 {
        (self.f.deg() as u32).div_ceil(2) - 1
    }

    /// The quadratic twist y^2 = c f.
    pub fn twist(&self, c: Fe) -> Result<Self> {
        Self::new(self.f.scale(c))
    }

    pub fn count(&self, i: u32) -> Result<u64> {
        let (big, e) = extension(self.base(), i)?;
        let f = e.apply_poly(&self.f);
        let affine = sum_over_field(&big, |x| sqrt_count(&big, f.eval(x)));
        let infinity = if f.deg() % 2 == 1 {
            1
        } else if big.is_square(f.lc()) {
            2
        } else {
            0
        };
        Ok(affine + infinity)
    }
}

impl fmt::Display for HyperellipticOdd {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "y^2 = {}", self.f.to_string_var("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    fn curve(p: u64, n: usize, m: Option<&[u64]>, src: &str) -> HyperellipticOdd {
        let f = FiniteField::new(p, n, m).unwrap();
        HyperellipticOdd::new(parse_poly(&f, "x", src).unwrap()).unwrap()
    }

    #[test]
    fn f5_row_is_pointless() {
        let c = curve(5, 1, None, "2x^8 + 3x^4 + 2");
        assert_eq!(c.genus(), 3);
        assert_eq!(c.count(1).unwrap(), 0);
    }

    #[test]
    fn f27_elliptic_curve_has_twenty_points() {
        let c = curve(3, 3, Some(&[1, 2, 0, 1]), "x^3 + 2x^2 + 1");
        assert_eq!(c.genus(), 1);
        assert_eq!(c.count(1).unwrap(), 20);
    }

    #[test]
    fn f25_curve_extension_counts() {
        let c = curve(5, 2, Some(&[2, 4, 1]), "a(x^8 + 1)");
        assert_eq!(c.count(1).unwrap(), 0);
        assert_eq!(c.count(2).unwrap(), 540);
    }

    #[test]
    fn rejects_bad_input() {
        let f = FiniteField::prime(5).unwrap();
        let sq = Poly::from_ints(&f, &[1, 2, 1]).mul(&Poly::from_ints(&f, &[2, 0, 1]));
        assert!(matches!(HyperellipticOdd::new(sq), Err(Error::InvalidCurve(_))));
        let f2 = FiniteField::prime(2).unwrap();
        assert_eq!(HyperellipticOdd::new(Poly::from_ints(&f2, &[1, 1, 0, 1])), Err(Error::EvenCharacteristic));
    }

    #[test]
    fn odd_degree_has_weierstrass_point_at_infinity() {
        let c = curve(3, 1, None, "x^5 + x");
        assert!(c.count(1).unwrap() >= 1);
    }
}
