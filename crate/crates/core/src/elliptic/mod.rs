//! Weierstrass curves y^2 = x^3 + a2 x^2 + a4 x + a6 in odd characteristic,
//! their rational points and the function spaces L(k inf) used to build
//! double covers.

mod cover;
mod function;

pub use cover::{cover_count, CoverPartial, CoverSearch, CoverSearchReport, CoverSurvivor, CoverTask, TorsionRule};
pub use function::{rr_basis, DivisorShape, EllipticFunction, Monomial};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::algebra::{Embedding, Fe, FiniteField, Poly};
use crate::curves::COUNT_LIMIT;
use crate::error::{Error, Result};

/// Largest field whose points are listed one by one.
pub const POINT_LIMIT: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EllipticPoint {
    Infinity,
    Affine(Fe, Fe),
}

impl EllipticPoint {
    pub fn is_infinity(self) -> bool {
        self == EllipticPoint::Infinity
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCurve {
    base: FiniteField,
    a2: Fe,
    a4: Fe,
    a6: Fe,
}

impl EllipticCurve {
    pub fn new(base: &FiniteField, a2: Fe, a4: Fe, a6: Fe) -> Result<Self> {
        if base.is_char2() {
            return Err(Error::EvenCharacteristic);
        }
        let e = EllipticCurve { base: base.clone(), a2, a4, a6 };
        if !e.cubic().is_separable() {
            return Err(Error::InvalidCurve("singular Weierstrass equation".into()));
        }
        Ok(e)
    }

    pub fn from_ints(base: &FiniteField, a2: i64, a4: i64, a6: i64) -> Result<Self> {
        Self::new(base, base.from_int(a2), base.from_int(a4), base.from_int(a6))
    }

    pub fn base(&self) -> &FiniteField {
        &self.base
    }

    pub fn coefficients(&self) -> [Fe; 3] {
        [self.a2, self.a4, self.a6]
    }

    /// The right-hand side x^3 + a2 x^2 + a4 x + a6.
    pub fn cubic(&self) -> Poly {
        Poly::new(&self.base, vec![self.a6, self.a4, self.a2, Fe::ONE])
    }

    #[inline]
    pub fn rhs(&self, x: Fe) -> Fe {
        let k = &self.base;
        let t = k.add(k.mul(k.add(x, self.a2), x), self.a4);
        k.add(k.mul(t, x), self.a6)
    }

    pub fn contains(&self, p: EllipticPoint) -> bool {
        match p {
            EllipticPoint::Infinity => true,
            EllipticPoint::Affine(x, y) => self.base.mul(y, y) == self.rhs(x),
        }
    }

    /// The same equation over F_{q^i}.
    pub fn base_change(&self, i: u32) -> Result<(EllipticCurve, Embedding)> {
        let (big, e) = crate::curves::extension(&self.base, i)?;
        let curve = EllipticCurve { base: big, a2: e.apply(self.a2), a4: e.apply(self.a4), a6: e.apply(self.a6) };
        Ok((curve, e))
    }

    /// All rational points, infinity first, then affine points in canonical
    /// (x, y) order.
    pub fn points(&self) -> Result<Vec<EllipticPoint>> {
        let k = &self.base;
        if k.q() > POINT_LIMIT {
            return Err(Error::FieldTooLarge(k.q() as u128));
        }
        let mut pts = vec![EllipticPoint::Infinity];
        for x in k.elements() {
            let v = self.rhs(x);
            if v.is_zero() {
                pts.push(EllipticPoint::Affine(x, Fe::ZERO));
            } else if k.is_square(v) {
                let r = k.sqrt(v)?;
                let s = k.neg(r);
                pts.push(EllipticPoint::Affine(x, r.min(s)));
                pts.push(EllipticPoint::Affine(x, r.max(s)));
            }
        }
        Ok(pts)
    }

    /// #E(F_q) from the character sum, without listing points.
    pub fn order(&self) -> u64 {
        let k = &self.base;
        let s: i64 = k.elements().map(|x| k.chi(self.rhs(x)) as i64).sum();
        (k.q() as i64 + 1 + s) as u64
    }

    /// #E(F_{q^i}).
    pub fn order_over(&self, i: u32) -> Result<u64> {
        if (self.base.q() as u128).pow(i) > COUNT_LIMIT as u128 {
            return Err(Error::ExtensionTooLarge(i));
        }
        Ok(self.base_change(i)?.0.order())
    }

    pub fn trace(&self) -> i64 {
        self.base.q() as i64 + 1 - self.order() as i64
    }

    pub fn neg(&self, p: EllipticPoint) -> EllipticPoint {
        match p {
            EllipticPoint::Infinity => p,
            EllipticPoint::Affine(x, y) => EllipticPoint::Affine(x, self.base.neg(y)),
        }
    }

    pub fn add(&self, p: EllipticPoint, q: EllipticPoint) -> EllipticPoint {
        use EllipticPoint::*;
        let k = &self.base;
        let (x1, y1, x2, y2) = match (p, q) {
            (Infinity, r) | (r, Infinity) => return r,
            (Affine(x1, y1), Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if k.add(y1, y2).is_zero() {
                return Infinity;
            }
            let three = k.from_int(3);
            let num = k.add(k.add(k.mul(three, k.mul(x1, x1)), k.mul(k.add(self.a2, self.a2), x1)), self.a4);
            k.mul(num, k.inv_nz(k.add(y1, y1)))
        } else {
            k.mul(k.sub(y2, y1), k.inv_nz(k.sub(x2, x1)))
        };
        let x3 = k.sub(k.sub(k.sub(k.mul(lambda, lambda), self.a2), x1), x2);
        let y3 = k.sub(k.mul(lambda, k.sub(x1, x3)), y1);
        Affine(x3, y3)
    }

    /// Addition that first checks both points lie on this curve.
    pub fn checked_add(&self, p: EllipticPoint, q: EllipticPoint) -> Result<EllipticPoint> {
        if !self.contains(p) || !self.contains(q) {
            return Err(Error::MixedCurves);
        }
        Ok(self.add(p, q))
    }

    pub fn smul(&self, n: i64, p: EllipticPoint) -> EllipticPoint {
        let mut base = if n < 0 { self.neg(p) } else { p };
        let mut m = n.unsigned_abs();
        let mut acc = EllipticPoint::Infinity;
        while m > 0 {
            if m & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            m >>= 1;
        }
        acc
    }

    /// Order of a point in a group of order `n`.
    pub fn point_order(&self, p: EllipticPoint, n: u64) -> u64 {
        let mut order = n;
        for (prime, _) in factor_u64(n) {
            while order.is_multiple_of(prime) && self.smul((order / prime) as i64, p).is_infinity() {
                order /= prime;
            }
        }
        order
    }

    /// (n1, n2) with E(F_q) = Z/n1 x Z/n2 and n1 | n2.
    pub fn group_structure(&self) -> Result<(u64, u64)> {
        let pts = self.points()?;
        let n = pts.len() as u64;
        let exponent = pts.iter().map(|&p| self.point_order(p, n)).max().unwrap_or(1);
        Ok((n / exponent, exponent))
    }

    pub fn two_torsion(&self) -> Result<Vec<EllipticPoint>> {
        Ok(self.points()?.into_iter().filter(|&p| self.add(p, p).is_infinity()).collect())
    }

    /// One representative for each coset of mE(F_q). With `exclude_torsion`
    /// representatives avoid the 2-torsion (including infinity), and a coset
    /// made only of 2-torsion points is an error.
    pub fn quotient_reps(&self, m: u32, exclude_torsion: bool) -> Result<Vec<EllipticPoint>> {
        self.reps(m, exclude_torsion, false)
    }

    /// As `quotient_reps` with exclusion, falling back to a 2-torsion
    /// representative for cosets that contain nothing else.
    pub fn quotient_reps_with_fallback(&self, m: u32) -> Result<Vec<EllipticPoint>> {
        self.reps(m, true, true)
    }

    fn reps(&self, m: u32, exclude_torsion: bool, fallback: bool) -> Result<Vec<EllipticPoint>> {
        if !(2..=3).contains(&m) {
            return Err(Error::InvalidCurve(format!("quotient by {m}E is not supported")));
        }
        let pts = self.points()?;
        let image: BTreeSet<EllipticPoint> = pts.iter().map(|&p| self.smul(m as i64, p)).collect();
        let mut coset_of: BTreeMap<EllipticPoint, usize> = BTreeMap::new();
        let mut cosets: Vec<Vec<EllipticPoint>> = Vec::new();
        for &p in &pts {
            if coset_of.contains_key(&p) {
                continue;
            }
            let mut members: Vec<EllipticPoint> = image.iter().map(|&r| self.add(p, r)).collect();
            members.sort();
            for &r in &members {
                coset_of.insert(r, cosets.len());
            }
            cosets.push(members);
        }
        let is_torsion = |p: EllipticPoint| self.add(p, p).is_infinity();
        cosets
            .iter()
            .map(|members| {
                if !exclude_torsion {
                    return Ok(members[0]);
                }
                match members.iter().find(|&&p| !is_torsion(p)) {
                    Some(&p) => Ok(p),
                    None if fallback => Ok(members[0]),
                    None => Err(Error::EmptyCosetUnderConstraint),
                }
            })
            .collect()
    }

    /// Automorphisms fixing infinity, as pairs (u, r) acting by
    /// (x, y) -> (u^2 x + r, u^3 y).
    pub fn automorphisms(&self) -> Vec<(Fe, Fe)> {
        let k = &self.base;
        let own = self.coefficients();
        let mut out = Vec::new();
        for u in k.elements().skip(1) {
            for r in k.elements() {
                if self.transform(u, r) == own {
                    out.push((u, r));
                }
            }
        }
        out
    }

    pub fn apply_automorphism(&self, (u, r): (Fe, Fe), p: EllipticPoint) -> EllipticPoint {
        let k = &self.base;
        match p {
            EllipticPoint::Infinity => p,
            EllipticPoint::Affine(x, y) => {
                let u2 = k.mul(u, u);
                EllipticPoint::Affine(k.add(k.mul(u2, x), r), k.mul(k.mul(u2, u), y))
            }
        }
    }

    /// Coset representatives of mE(F_q) as returned by `quotient_reps`,
    /// keeping one coset from each orbit under the automorphism group.
    pub fn reduce_reps_by_automorphisms(&self, m: u32, reps: &[EllipticPoint]) -> Result<Vec<EllipticPoint>> {
        let pts = self.points()?;
        let image: BTreeSet<EllipticPoint> = pts.iter().map(|&p| self.smul(m as i64, p)).collect();
        let autos = self.automorphisms();
        let same_coset = |a: EllipticPoint, b: EllipticPoint| image.contains(&self.add(a, self.neg(b)));
        let mut kept: Vec<EllipticPoint> = Vec::new();
        for &rep in reps {
            let covered =
                kept.iter().any(|&k| autos.iter().any(|&phi| same_coset(self.apply_automorphism(phi, k), rep)));
            if !covered {
                kept.push(rep);
            }
        }
        Ok(kept)
    }

    /// The image of (x, y) -> (u^2 x + r, u^3 y) pulled back to a new equation.
    fn transform(&self, u: Fe, r: Fe) -> [Fe; 3] {
        let k = &self.base;
        let u2 = k.mul(u, u);
        let (i2, i4, i6) = (k.inv_nz(u2), k.inv_nz(k.mul(u2, u2)), k.inv_nz(k.mul(u2, k.mul(u2, u2))));
        let three = k.from_int(3);
        let two = k.from_int(2);
        let b2 = k.add(k.mul(three, r), self.a2);
        let b4 = k.add(k.add(k.mul(three, k.mul(r, r)), k.mul(k.mul(two, self.a2), r)), self.a4);
        let b6 = self.rhs(r);
        [k.mul(b2, i2), k.mul(b4, i4), k.mul(b6, i6)]
    }

    /// Smallest coefficient triple in the isomorphism class.
    pub fn canonical_form(&self) -> [Fe; 3] {
        let k = &self.base;
        let rs: Vec<Fe> = if k.p() == 3 { k.elements().collect() } else { vec![self.short_shift()] };
        let mut best = [Fe(u64::MAX); 3];
        for u in k.elements().skip(1) {
            for &r in &rs {
                best = best.min(self.transform(u, r));
            }
        }
        best
    }

    /// The translation r that clears a2, away from characteristic 3.
    fn short_shift(&self) -> Fe {
        let k = &self.base;
        k.neg(k.mul(self.a2, k.inv_nz(k.from_int(3))))
    }

    /// Isomorphism classes of curves over `k` with exactly `n` points, each
    /// in canonical form, sorted.
    pub fn with_order(k: &FiniteField, n: u64) -> Result<Vec<EllipticCurve>> {
        if k.is_char2() {
            return Err(Error::EvenCharacteristic);
        }
        let a2s: Vec<Fe> = if k.p() == 3 { k.elements().collect() } else { vec![Fe::ZERO] };
        let mut seen = BTreeSet::new();
        for &a2 in &a2s {
            for a4 in k.elements() {
                for a6 in k.elements() {
                    let Ok(e) = EllipticCurve::new(k, a2, a4, a6) else { continue };
                    if e.order() == n {
                        seen.insert(e.canonical_form());
                    }
                }
            }
        }
        seen.into_iter().map(|[a2, a4, a6]| EllipticCurve::new(k, a2, a4, a6)).collect()
    }
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "y^2 = {}", self.cubic().to_string_var("x"))
    }
}
