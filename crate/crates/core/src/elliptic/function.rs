use serde::Serialize;

use super::{EllipticCurve, EllipticPoint};
use crate::algebra::{Embedding, Fe, Poly, Series};
use crate::error::{Error, Result};

/// Terms kept in local expansions.
const LOCAL_PRECISION: i64 = 16;

/// x^i y^j with j <= 1; its pole order at infinity is 2i + 3j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
}

impl Monomial {
    pub fn pole_order(self) -> u32 {
        2 * self.i + 3 * self.j
    }
}

/// Basis of L(k inf): powers of x first, then x^i y.
pub fn rr_basis(k: u32) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = (0..=k / 2).map(|i| Monomial { i, j: 0 }).collect();
    if k >= 3 {
        out.extend((0..=(k - 3) / 2).map(|i| Monomial { i, j: 1 }));
    }
    out
}

/// A(x) + y B(x) in L(k inf), as coefficients on `rr_basis(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticFunction {
    k: u32,
    coeffs: Vec<Fe>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorShape {
    pub pole_order_at_inf: u32,
    /// Order at Q; for Q at infinity this is minus the pole order.
    pub ord_at_q: i64,
    /// Geometric points where the order is odd.
    pub odd_order_zero_count: u32,
    /// Some odd-order zero is a rational point.
    pub rational_odd_zero: bool,
    /// Zero places as (degree, order), sorted.
    pub zeros: Vec<(u32, u32)>,
    /// div f = (k - 2) odd-order non-rational points + 2Q - k inf, or
    /// (k - 2) such points - (k - 2) inf when Q is infinity.
    pub shape_ok: bool,
}

impl EllipticFunction {
    pub fn new(k: u32, coeffs: Vec<Fe>) -> Result<Self> {
        let n = rr_basis(k).len();
        if coeffs.len() != n {
            return Err(Error::InvalidCurve(format!(
                "L({k} inf) has dimension {n}, got {} coefficients",
                coeffs.len()
            )));
        }
        Ok(EllipticFunction { k, coeffs })
    }

    /// The function A(x) + y B(x), placed in the smallest L(k inf) holding it.
    pub fn from_parts(a: &Poly, b: &Poly) -> Result<Self> {
        let k = (2 * a.deg().max(0)).max(if b.is_zero() { 0 } else { 2 * b.deg() + 3 }) as u32;
        let coeffs =
            rr_basis(k).iter().map(|m| if m.j == 0 { a.coeff(m.i as usize) } else { b.coeff(m.i as usize) }).collect();
        Self::new(k, coeffs)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// (A, B) with f = A(x) + y B(x).
    pub fn parts(&self, e: &EllipticCurve) -> (Poly, Poly) {
        let k = e.base();
        let basis = rr_basis(self.k);
        let mut a = vec![Fe::ZERO; (self.k / 2 + 1) as usize];
        let mut b = vec![Fe::ZERO; (self.k / 2 + 1) as usize];
        for (m, &c) in basis.iter().zip(&self.coeffs) {
            if m.j == 0 {
                a[m.i as usize] = c;
            } else {
                b[m.i as usize] = c;
            }
        }
        (Poly::new(k, a), Poly::new(k, b))
    }

    pub fn pole_order(&self) -> u32 {
        rr_basis(self.k)
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, _)| m.pole_order())
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of the monomial with the highest pole order.
    pub fn top_coefficient(&self) -> Fe {
        let p = self.pole_order();
        rr_basis(self.k)
            .iter()
            .zip(&self.coeffs)
            .find(|(m, c)| m.pole_order() == p && !c.is_zero())
            .map_or(Fe::ZERO, |(_, &c)| c)
    }

    pub fn eval(&self, e: &EllipticCurve, x: Fe, y: Fe) -> Fe {
        let k = e.base();
        let mut acc = Fe::ZERO;
        let mut xp = Fe::ONE;
        let basis = rr_basis(self.k);
        let top = basis.iter().map(|m| m.i).max().unwrap_or(0);
        let mut powers = Vec::with_capacity(top as usize + 1);
        for _ in 0..=top {
            powers.push(xp);
            xp = k.mul(xp, x);
        }
        for (m, &c) in basis.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let mut v = k.mul(c, powers[m.i as usize]);
            if m.j == 1 {
                v = k.mul(v, y);
            }
            acc = k.add(acc, v);
        }
        acc
    }

    /// The same function with coefficients pushed into an extension.
    pub fn map(&self, emb: &Embedding) -> EllipticFunction {
        EllipticFunction { k: self.k, coeffs: self.coeffs.iter().map(|&c| emb.apply(c)).collect() }
    }

    /// N(f) = f f^sigma = A^2 - (x^3 + a2 x^2 + a4 x + a6) B^2.
    pub fn norm(&self, e: &EllipticCurve) -> Poly {
        let (a, b) = self.parts(e);
        a.mul(&a).sub(&e.cubic().mul(&b.mul(&b)))
    }

    /// Order and leading coefficient of f at an affine point, in the local
    /// parameter x - x0 (or y at points of order 2).
    pub fn local_leading(&self, e: &EllipticCurve, p: EllipticPoint) -> Result<(u32, Fe)> {
        let EllipticPoint::Affine(x0, y0) = p else {
            return Err(Error::InvalidCurve("local expansion at infinity".into()));
        };
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let (x, y) = local_coordinates(e, x0, y0)?;
        let (a, b) = self.parts(e);
        let f = x.eval_poly(&a).add(&y.mul(&x.eval_poly(&b)));
        match f.valuation() {
            Some(v) if v >= 0 => Ok((v as u32, f.leading())),
            _ => Err(Error::InvalidCurve("local expansion lost precision".into())),
        }
    }

    /// ord_P(f) at an affine point.
    pub fn vanishing_order(&self, e: &EllipticCurve, p: EllipticPoint) -> Result<u32> {
        Ok(self.local_leading(e, p)?.0)
    }

    /// Zero divisor of f from the factorization of its norm, compared with
    /// the shape 2Q + (k - 2) simple non-rational zeros - k inf.
    pub fn divisor_shape(&self, e: &EllipticCurve, q: EllipticPoint, k: u32) -> Result<DivisorShape> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let pole = self.pole_order();
        let mut zeros = Vec::new();
        for (p, mult) in self.norm(e).factor() {
            let d = p.deg() as u32;
            let mult = mult as u32;
            let (big, emb) = e.base_change(d)?;
            let x0 = emb.apply_poly(&p).roots()[0];
            let g = big.rhs(x0);
            if g.is_zero() {
                zeros.push((d, mult));
            } else if big.base().is_square(g) {
                let y0 = big.base().sqrt(g)?;
                let o = self.map(&emb).vanishing_order(&big, EllipticPoint::Affine(x0, y0))?;
                for ord in [o, mult - o] {
                    if ord > 0 {
                        zeros.push((d, ord));
                    }
                }
            } else {
                debug_assert!(mult.is_multiple_of(2));
                zeros.push((2 * d, mult / 2));
            }
        }
        zeros.sort();
        debug_assert_eq!(zeros.iter().map(|&(d, o)| d * o).sum::<u32>(), pole);
        let ord_at_q = match q {
            EllipticPoint::Infinity => -(pole as i64),
            _ => self.vanishing_order(e, q)? as i64,
        };
        let odd = zeros.iter().filter(|z| z.1 % 2 == 1).map(|z| z.0).sum::<u32>();
        let rational_odd_zero = zeros.iter().any(|&(d, o)| d == 1 && o % 2 == 1);
        let expected_pole = if q.is_infinity() { k - 2 } else { k };
        let shape_ok =
            pole == expected_pole && (q.is_infinity() || ord_at_q == 2) && odd == k - 2 && !rational_odd_zero;
        Ok(DivisorShape {
            pole_order_at_inf: pole,
            ord_at_q,
            odd_order_zero_count: odd,
            rational_odd_zero,
            zeros,
            shape_ok,
        })
    }
}

/// Local expansions (x(t), y(t)) at an affine point: t = x - x0 in general,
/// t = y at points of order 2.
pub(super) fn local_coordinates(e: &EllipticCurve, x0: Fe, y0: Fe) -> Result<(Series, Series)> {
    let k = e.base();
    let t = Series::t(k, LOCAL_PRECISION);
    let g = e.cubic();
    if !y0.is_zero() {
        let x = t.add(&Series::constant(k, x0, LOCAL_PRECISION));
        let gx = x.eval_poly(&g);
        let half = k.inv_nz(k.from_int(2));
        let mut y = Series::constant(k, y0, LOCAL_PRECISION);
        for _ in 0..6 {
            let q = gx.div(&y).ok_or(Error::DivisionByZero)?;
            y = y.add(&q).scale(half).with_prec(LOCAL_PRECISION);
        }
        return Ok((x, y));
    }
    // g(x0 + w) = g1 w + g2 w^2 + w^3 = t^2
    let shifted = g.compose(&Poly::new(k, vec![x0, Fe::ONE]));
    let (g1, g2) = (shifted.coeff(1), shifted.coeff(2));
    let inv = k.inv_nz(g1);
    let t2 = t.mul(&t);
    let mut w = Series::zero(k, LOCAL_PRECISION);
    for _ in 0..LOCAL_PRECISION {
        let w2 = w.mul(&w);
        let rest = w2.scale(g2).add(&w2.mul(&w));
        w = t2.sub(&rest).scale(inv).with_prec(LOCAL_PRECISION);
    }
    Ok((w.add(&Series::constant(k, x0, LOCAL_PRECISION)), t))
}
