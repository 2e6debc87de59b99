use std::fmt;

use serde::Serialize;

use super::{extension, sqrt_count, sum_over_field};
use crate::algebra::{FiniteField, Poly};
use crate::error::{Error, Result};

/// The genus-4 curve y^2 = f(x), z^2 = g(x) for coprime separable cubics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberProduct {
    f: Poly,
    g: Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiberProductProperties {
    /// The span of f and g contains a nonzero constant.
    pub trigonal: bool,
    /// Automorphisms beyond the Klein group from x -> zeta x or x -> x + 1.
    pub extra_autos: bool,
}

impl FiberProduct {
    pub fn new(f: Poly, g: Poly) -> Result<Self> {
        if f.field() != g.field() {
            return Err(Error::MixedFields);
        }
        if f.field().is_char2() {
            return Err(Error::EvenCharacteristic);
        }
        for (name, h) in [("f", &f), ("g", &g)] {
            if h.deg() != 3 {
                return Err(Error::InvalidCurve(format!("{name} is not a cubic")));
            }
            if !h.is_separable() {
                return Err(Error::InvalidCurve(format!("{name} is not separable")));
            }
        }
        if f.gcd(&g)?.deg() > 0 {
            return Err(Error::InvalidCurve("f and g share a factor".into()));
        }
        Ok(FiberProduct { f, g })
    }

    pub fn base(&self) -> &FiniteField {
        self.f.field()
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    pub fn count(&self, i: u32) -> Result<u64> {
        let (big, e) = extension(self.base(), i)?;
        let f = e.apply_poly(&self.f);
        let g = e.apply_poly(&self.g);
        let affine = sum_over_field(&big, |x| {
            let a = sqrt_count(&big, f.eval(x));
            if a == 0 {
                0
            } else {
                a * sqrt_count(&big, g.eval(x))
            }
        });
        let infinity = if big.is_square(big.mul(f.lc(), g.lc())) { 2 } else { 0 };
        Ok(affine + infinity)
    }

    pub fn properties(&self) -> FiberProductProperties {
        let k = self.base();
        let (f, g) = (&self.f, &self.g);
        // a f + b g is constant only for (a, b) proportional to (g3, -f3).
        let comb = |j: usize| k.sub(k.mul(g.coeff(3), f.coeff(j)), k.mul(f.coeff(3), g.coeff(j)));
        let trigonal = comb(2).is_zero() && comb(1).is_zero() && !comb(0).is_zero();
        let pure = |h: &Poly| h.coeff(1).is_zero() && h.coeff(2).is_zero();
        let artin = |h: &Poly| h.coeff(2).is_zero() && h.coeff(1) == k.neg(h.coeff(3));
        let extra_autos = (k.q() % 3 == 1 && pure(f) && pure(g)) || (k.p() == 3 && artin(f) && artin(g));
        FiberProductProperties { trigonal, extra_autos }
    }

    /// The three double covers y^2 = f, z^2 = g and w^2 = fg whose counts
    /// determine this curve's counts.
    pub fn quotients(&self) -> [Poly; 3] {
        [self.f.clone(), self.g.clone(), self.f.mul(&self.g)]
    }
}

impl fmt::Display for FiberProduct {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "y^2 = {}, z^2 = {}", self.f.to_string_var("x"), self.g.to_string_var("x"))
    }
}
