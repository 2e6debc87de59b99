//! Two-step Artin-Schreier towers y^2 + y = f1(x), z^2 + z = f2(x, y).
//!
//! Points are counted place by place on the first curve. At places where f2
//! is regular and finite its value decides directly; elsewhere f2 is expanded
//! in a local parameter and reduced modulo u^2 + u until the remaining pole
//! (if any) has odd order.

use std::fmt;

use super::{extension, ArtinSchreierCurve};
use crate::algebra::{Fe, FiniteField, MPoly, Poly, Series};
use crate::error::{Error, Result};

/// Relative precision of local expansions.
const PRECISION: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsTower {
    first: ArtinSchreierCurve,
    num: MPoly,
    den: MPoly,
    claimed_genus: u32,
}

/// Solutions of y^2 + y = c by table lookup.
pub(crate) struct AsSolver {
    root: Vec<u32>,
}

impl AsSolver {
    pub(crate) const LIMIT: u64 = 1 << 22;

    pub(crate) fn new(k: &FiniteField) -> Result<Self> {
        if !k.is_char2() {
            return Err(Error::OddCharacteristic);
        }
        if k.q() > Self::LIMIT {
            return Err(Error::ExtensionTooLarge(k.n() as u32));
        }
        let mut root = vec![u32::MAX; k.q() as usize];
        for y in k.elements() {
            let c = k.add(k.mul(y, y), y);
            let slot = &mut root[c.0 as usize];
            if *slot == u32::MAX {
                *slot = y.0 as u32;
            }
        }
        Ok(AsSolver { root })
    }

    /// The smaller root, if any; the other one is that plus 1.
    pub(crate) fn solve(&self, c: Fe) -> Option<Fe> {
        match self.root[c.0 as usize] {
            u32::MAX => None,
            r => Some(Fe(r as u64)),
        }
    }
}

/// Local parameter data at one place of the first curve.
struct Place {
    x: Series,
    y: Series,
}

impl AsTower {
    /// `num` and `den` are polynomials in x and y (variables 0 and 1).
    pub fn new(first: ArtinSchreierCurve, num: MPoly, den: MPoly, claimed_genus: u32) -> Result<Self> {
        if num.field() != first.base() || den.field() != first.base() {
            return Err(Error::MixedFields);
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !num.uses_only(&[0, 1]) || !den.uses_only(&[0, 1]) {
            return Err(Error::InvalidCurve("second stage may only involve x and y".into()));
        }
        let f1 = first.f();
        if first.has_pole_at_infinity() && f1.num().deg() - f1.den().deg() != 1 {
            return Err(Error::UnsupportedShape("pole of order above 1 at infinity".into()));
        }
        Ok(AsTower { first, num, den, claimed_genus })
    }

    pub fn base(&self) -> &FiniteField {
        self.first.base()
    }

    pub fn first(&self) -> &ArtinSchreierCurve {
        &self.first
    }

    pub fn claimed_genus(&self) -> u32 {
        self.claimed_genus
    }

    pub fn count(&self, i: u32) -> Result<u64> {
        let (k, e) = extension(self.base(), i)?;
        let solver = AsSolver::new(&k)?;
        let n1 = e.apply_poly(self.first.f().num());
        let d1 = e.apply_poly(self.first.f().den());
        let n2 = self.num.map(&k, |c| e.apply(c));
        let d2 = self.den.map(&k, |c| e.apply(c));
        let stage = Stage { k: &k, n1: &n1, d1: &d1, n2: &n2, d2: &d2 };

        let mut total = 0u64;
        for x0 in k.elements() {
            let dv = d1.eval(x0);
            if dv.is_zero() {
                total += stage.contribution(&stage.ramified_finite(x0)?)?;
                continue;
            }
            let c = k.mul(n1.eval(x0), k.inv_nz(dv));
            let Some(y0) = solver.solve(c) else { continue };
            for y in [y0, k.add(y0, Fe::ONE)] {
                let dz = d2.eval([x0, y, Fe::ZERO]);
                if dz.is_zero() {
                    total += stage.contribution(&stage.unramified(Some(x0), y)?)?;
                } else {
                    let v = k.mul(n2.eval([x0, y, Fe::ZERO]), k.inv_nz(dz));
                    total += 2 * (1 - k.trace(v));
                }
            }
        }
        if n1.deg() > d1.deg() {
            total += stage.contribution(&stage.ramified_infinite()?)?;
        } else {
            let c = if n1.deg() == d1.deg() { k.mul(n1.lc(), k.inv_nz(d1.lc())) } else { Fe::ZERO };
            if let Some(y0) = solver.solve(c) {
                for y in [y0, k.add(y0, Fe::ONE)] {
                    total += stage.contribution(&stage.unramified(None, y)?)?;
                }
            }
        }
        Ok(total)
    }
}

struct Stage<'a> {
    k: &'a FiniteField,
    n1: &'a Poly,
    d1: &'a Poly,
    n2: &'a MPoly,
    d2: &'a MPoly,
}

impl Stage<'_> {
    fn f1_at(&self, x: &Series) -> Result<Series> {
        let d = x.eval_poly(self.d1);
        let n = x.eval_poly(self.n1);
        n.div(&d).ok_or_else(|| Error::UnsupportedShape("first-stage denominator vanishes".into()))
    }

    /// Place over x0 (or infinity when None) where the first cover is
    /// unramified, with y(0) = y0.
    fn unramified(&self, x0: Option<Fe>, y0: Fe) -> Result<Place> {
        let k = self.k;
        let t = Series::t(k, PRECISION);
        let x = match x0 {
            Some(v) => t.add(&Series::constant(k, v, PRECISION)),
            None => t.inv().expect("t is a unit times t"),
        };
        let f1 = self.f1_at(&x)?;
        let mut y = Series::constant(k, y0, PRECISION);
        for _ in 0..8 {
            y = f1.add(&y.mul(&y));
        }
        Ok(Place { x, y })
    }

    /// Place over a finite simple pole x0 of f1. Local parameter s = 1/y.
    fn ramified_finite(&self, x0: Fe) -> Result<Place> {
        let k = self.k;
        let shift = Poly::new(k, vec![x0, Fe::ONE]);
        let num = self.n1.compose(&shift);
        let den = self.d1.compose(&shift);
        let (den_red, r) = den.div_rem(&Poly::x(k))?;
        debug_assert!(r.is_zero());
        let w = self.solve_pole(&num, &den_red)?;
        let x = w.add(&Series::constant(k, x0, PRECISION));
        Ok(Place { x, y: Series::t(k, PRECISION).inv().expect("unit") })
    }

    /// Place over infinity where f1 has a simple pole.
    fn ramified_infinite(&self) -> Result<Place> {
        let k = self.k;
        let num = self.n1.reverse(self.n1.deg() as usize);
        let den = self.d1.reverse(self.d1.deg() as usize);
        let w = self.solve_pole(&num, &den)?;
        let x = w.inv().ok_or_else(|| Error::UnsupportedShape("degenerate expansion".into()))?;
        Ok(Place { x, y: Series::t(k, PRECISION).inv().expect("unit") })
    }

    /// With f1 = num(w) / (w den(w)) near w = 0 and y = 1/s, solves
    /// w den(w) (1 + s) = s^2 num(w) for w as a power series in s.
    fn solve_pole(&self, num: &Poly, den: &Poly) -> Result<Series> {
        let k = self.k;
        let s = Series::t(k, PRECISION);
        let one_plus_s = s.add(&Series::constant(k, Fe::ONE, PRECISION));
        let s2 = s.mul(&s);
        let mut w = Series::zero(k, PRECISION);
        for _ in 0..PRECISION {
            let rhs = s2.mul(&w.eval_poly(num));
            let lhs = w.eval_poly(den).mul(&one_plus_s);
            w = rhs.div(&lhs).ok_or_else(|| Error::UnsupportedShape("pole is not simple".into()))?.with_prec(PRECISION);
        }
        Ok(w)
    }

    fn eval2(&self, p: &MPoly, place: &Place) -> Series {
        let k = self.k;
        let dx = p.degree_in(0) as usize;
        let dy = p.degree_in(1) as usize;
        let exact = crate::algebra::series::EXACT;
        let mut xp = vec![Series::constant(k, Fe::ONE, exact)];
        for j in 0..dx {
            xp.push(xp[j].mul(&place.x));
        }
        let mut yp = vec![Series::constant(k, Fe::ONE, exact)];
        for j in 0..dy {
            yp.push(yp[j].mul(&place.y));
        }
        let mut acc = Series::zero(k, exact);
        for (e, c) in p.terms() {
            acc = acc.add(&xp[e[0] as usize].mul(&yp[e[1] as usize]).scale(*c));
        }
        acc
    }

    /// Points of the second cover over one place of the first.
    fn contribution(&self, place: &Place) -> Result<u64> {
        let k = self.k;
        let n = self.eval2(self.n2, place);
        let d = self.eval2(self.d2, place);
        let mut g = n
            .div(&d)
            .ok_or_else(|| Error::UnsupportedShape("second-stage denominator vanishes on a component".into()))?;
        loop {
            let v = match g.valuation() {
                None if g.prec() > 0 => return Ok(2),
                None => return Err(Error::UnsupportedShape("local expansion lost precision".into())),
                Some(v) => v,
            };
            if v >= 0 {
                return Ok(2 * (1 - k.trace(g.coeff(0))));
            }
            if v % 2 != 0 {
                return Ok(1);
            }
            let r = k.sqrt(g.leading())?;
            let h = Series::monomial(k, r, v / 2, crate::algebra::series::EXACT);
            g = g.sub(&h.mul(&h)).sub(&h);
        }
    }
}

impl fmt::Display for AsTower {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["x", "y", "z"];
        write!(out, "{}; z^2 + z = ({})/({})", self.first, self.num.format(names), self.den.format(names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::{parse_mpoly, parse_poly};
    use crate::algebra::RationalFunction;

    fn tower(k: &FiniteField, f1: (&str, &str), f2: (&str, &str), g: u32) -> AsTower {
        let first = ArtinSchreierCurve::new(
            RationalFunction::new(parse_poly(k, "x", f1.0).unwrap(), parse_poly(k, "x", f1.1).unwrap()).unwrap(),
        )
        .unwrap();
        let vars = ["x", "y"];
        AsTower::new(first, parse_mpoly(k, &vars, f2.0).unwrap(), parse_mpoly(k, &vars, f2.1).unwrap(), g).unwrap()
    }

    /// Brute force over the projective line parametrized by z.
    #[test]
    fn rational_tower_matches_line() {
        let f2 = FiniteField::prime(2).unwrap();
        let t = tower(&f2, ("x", "1"), ("y", "1"), 0);
        for i in 1..=4 {
            assert_eq!(t.count(i).unwrap(), 2u64.pow(i) + 1);
        }
    }

    #[test]
    fn reducible_tower_counts_both_components() {
        // z^2 + z = x = y^2 + y splits as z = y or z = y + 1.
        let f4 = FiniteField::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let t = tower(&f4, ("x", "1"), ("x", "1"), 0);
        assert_eq!(t.count(1).unwrap(), 2 * (4 + 1));
    }

    #[test]
    fn pole_of_second_stage_at_unramified_place() {
        // z^2 + z = 1/x over y^2 + y = x: the place x = 0, y = 0 is a simple pole.
        let f2 = FiniteField::prime(2).unwrap();
        let t = tower(&f2, ("x", "1"), ("1", "x"), 1);
        // over x = 0: y in {0, 1}, both places are simple poles of 1/x -> 1 each.
        // over x = 1: trace 1, none. over infinity: 1/x has a zero there, value 0 -> 2.
        assert_eq!(t.count(1).unwrap(), 4);
    }
}
