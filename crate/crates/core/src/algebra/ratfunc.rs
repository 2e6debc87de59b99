use super::field::{Fe, FiniteField};
use super::poly::Poly;
use crate::error::{Error, Result};

/// A reduced quotient num/den with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.field() != den.field() {
            return Err(Error::MixedFields);
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den)?;
        let (mut num, mut den) = if g.deg() > 0 { (num.div_exact(&g)?, den.div_exact(&g)?) } else { (num, den) };
        if num.is_zero() {
            den = Poly::one(den.field());
        }
        let inv = den.field().inv(den.lc())?;
        num = num.scale(inv);
        den = den.scale(inv);
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.field());
        RationalFunction { num: p, den }
    }

    pub fn field(&self) -> &FiniteField {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Value at x, or None at a pole.
    pub fn eval(&self, x: Fe) -> Option<Fe> {
        let f = self.field();
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(f.mul(self.num.eval(x), f.inv_nz(d)))
    }

    /// Value at infinity, or None if there is a pole there.
    pub fn eval_infinity(&self) -> Option<Fe> {
        let (dn, dd) = (self.num.deg(), self.den.deg());
        if dn > dd {
            None
        } else if dn < dd {
            Some(Fe::ZERO)
        } else {
            Some(self.field().mul(self.num.lc(), self.field().inv_nz(self.den.lc())))
        }
    }

    /// Splits into polynomial part plus proper fraction.
    pub fn polynomial_part(&self) -> (Poly, Poly) {
        let (q, r) = self.num.div_rem(&self.den).expect("nonzero denominator");
        (q, r)
    }

    pub fn add(&self, o: &RationalFunction) -> Result<Self> {
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::new(num, self.den.mul(&o.den))
    }

    pub fn add_constant(&self, c: Fe) -> Self {
        let num = self.num.add(&self.den.scale(c));
        RationalFunction { num, den: self.den.clone() }
    }

    pub fn map(&self, target: &FiniteField, phi: impl Fn(Fe) -> Fe + Copy) -> Self {
        Self::new(self.num.map(target, phi), self.den.map(target, phi)).expect("embedding preserves shape")
    }
}
