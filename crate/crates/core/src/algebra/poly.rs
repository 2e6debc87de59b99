//! Dense univariate polynomials over a [`FiniteField`].

use std::fmt;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::field::{Fe, FiniteField};
use crate::error::{Error, Result};

/// Evaluates `coeffs` (low to high) at `x` by Horner's rule.
#[inline]
pub fn eval_coeffs(f: &FiniteField, coeffs: &[Fe], x: Fe) -> Fe {
    let mut acc = Fe::ZERO;
    for &c in coeffs.iter().rev() {
        acc = f.add(f.mul(acc, x), c);
    }
    acc
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: FiniteField,
    coeffs: Vec<Fe>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("x"))
    }
}

impl Poly {
    pub fn new(field: &FiniteField, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// From small signed integers (prime-subfield constants), low to high.
    pub fn from_ints(field: &FiniteField, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &FiniteField) -> Self {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn constant(field: &FiniteField, c: Fe) -> Self {
        Self::new(field, vec![c])
    }

    pub fn one(field: &FiniteField) -> Self {
        Self::constant(field, Fe::ONE)
    }

    /// The monomial c*x^k.
    pub fn monomial(field: &FiniteField, c: Fe, k: usize) -> Self {
        let mut v = vec![Fe::ZERO; k + 1];
        v[k] = c;
        Self::new(field, v)
    }

    pub fn x(field: &FiniteField) -> Self {
        Self::monomial(field, Fe::ONE, 1)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn lc(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn eval(&self, x: Fe) -> Fe {
        eval_coeffs(&self.field, &self.coeffs, x)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect();
        Poly::new(f, v)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect();
        Poly::new(f, v)
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn scale(&self, c: Fe) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut v = vec![Fe::ZERO; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, v)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut r = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        r
    }

    /// Checked variant of [`Poly::mul`] for operands of possibly different fields.
    pub fn try_mul(&self, o: &Poly) -> Result<Poly> {
        self.check(o)?;
        Ok(self.mul(o))
    }

    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        self.check(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        let dd = d.coeffs.len() - 1;
        let inv = f.inv(d.lc())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut quo = vec![Fe::ZERO; r.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = f.mul(r[k + dd], inv);
            quo[k] = c;
            if c.is_zero() {
                continue;
            }
            for (i, &di) in d.coeffs.iter().enumerate() {
                r[k + i] = f.sub(r[k + i], f.mul(c, di));
            }
        }
        r.truncate(dd);
        Ok((Poly::new(f, quo), Poly::new(f, r)))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).expect("nonzero divisor in same field").1
    }

    /// Exact division; errors if there is a remainder.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::InvalidCurve("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv_nz(self.lc());
        self.scale(inv)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Poly) -> Result<Poly> {
        self.check(o)?;
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int((i as u64 % f.p()) as i64)))
            .collect();
        Poly::new(f, v)
    }

    pub fn is_separable(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        self.gcd(&self.derivative()).map(|g| g.deg() == 0).unwrap_or(false)
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> Poly {
        if self.deg() <= 0 {
            return Poly::one(&self.field);
        }
        let mut out = Poly::one(&self.field);
        for (g, _) in self.squarefree_decomposition() {
            out = out.mul(&g);
        }
        out
    }

    /// Yun-style decomposition valid in positive characteristic: returns
    /// pairwise coprime squarefree monic factors with multiplicities.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let f = &self.field;
        let p = f.p() as usize;
        let mut out: Vec<(Poly, usize)> = Vec::new();
        let mut stack = vec![(self.monic(), 1usize)];
        while let Some((a, mult)) = stack.pop() {
            if a.deg() <= 0 {
                continue;
            }
            let d = a.derivative();
            if d.is_zero() {
                // a = b^p
                stack.push((a.pth_root(), mult * p));
                continue;
            }
            let c = a.gcd(&d).unwrap();
            let mut w = a.div_exact(&c).unwrap();
            let mut c = c;
            let mut i = 1;
            while w.deg() > 0 {
                let y = w.gcd(&c).unwrap();
                let z = w.div_exact(&y).unwrap();
                if z.deg() > 0 {
                    out.push((z, i * mult));
                }
                w = y;
                c = c.div_exact(&w).unwrap();
                i += 1;
            }
            if c.deg() > 0 {
                stack.push((c.pth_root(), mult * p));
            }
        }
        out
    }

    /// For a polynomial in x^p, returns its p-th root.
    fn pth_root(&self) -> Poly {
        let f = &self.field;
        let p = f.p() as usize;
        let e = f.q() / f.p();
        let v = self.coeffs.iter().step_by(p).map(|&c| f.pow(c, e)).collect();
        Poly::new(f, v)
    }

    /// self^e mod m.
    pub fn powmod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut r = Poly::one(&self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    /// Number of distinct roots in the base field.
    pub fn count_distinct_roots(&self) -> usize {
        match self.degree() {
            None => self.field.q() as usize,
            Some(0) => 0,
            Some(_) => {
                let f = &self.field;
                let x = Poly::x(f);
                let xq = x.powmod(f.q(), self).sub(&x);
                self.gcd(&xq).unwrap().deg() as usize
            }
        }
    }

    /// Distinct roots in the base field, ascending.
    pub fn roots(&self) -> Vec<Fe> {
        if self.deg() <= 0 {
            return Vec::new();
        }
        let f = &self.field;
        let mut roots = if f.q() <= 64 || self.deg() as u64 * 8 >= f.q() {
            f.elements().filter(|&v| self.eval(v).is_zero()).collect::<Vec<_>>()
        } else {
            let x = Poly::x(f);
            let xq = x.powmod(f.q(), self).sub(&x);
            let g = self.gcd(&xq).unwrap();
            let mut out = Vec::new();
            for lin in g.equal_degree_split(1) {
                out.push(f.neg(lin.coeff(0)));
            }
            out
        };
        roots.sort();
        roots
    }

    /// Distinct-degree factorization of a squarefree monic polynomial.
    pub fn distinct_degree(&self) -> Vec<(usize, Poly)> {
        let f = &self.field;
        let mut out = Vec::new();
        let mut rest = self.monic();
        let x = Poly::x(f);
        let mut h = x.rem(&rest);
        let mut d = 0;
        while rest.deg() > 0 {
            d += 1;
            if 2 * d > rest.deg() as usize {
                out.push((rest.deg() as usize, rest.clone()));
                break;
            }
            h = h.powmod(f.q(), &rest);
            let g = rest.gcd(&h.sub(&x)).unwrap();
            if g.deg() > 0 {
                rest = rest.div_exact(&g).unwrap();
                h = h.rem(&rest);
                out.push((d, g));
            }
        }
        out
    }

    /// Splits a squarefree monic product of irreducibles of degree d.
    pub fn equal_degree_split(&self, d: usize) -> Vec<Poly> {
        let f = &self.field;
        let n = self.deg();
        if n <= 0 {
            return Vec::new();
        }
        if n as usize == d {
            return vec![self.monic()];
        }
        let mut rng = SplitMix64::seed_from_u64(0x5eed ^ (n as u64) << 8 ^ d as u64);
        loop {
            let a = Poly::new(f, (0..n as usize).map(|_| Fe(rng.next_u64() % f.q())).collect());
            if a.deg() <= 0 {
                continue;
            }
            let b = if f.is_char2() {
                // absolute trace map from F_{q^d} to F_2
                let k = f.n() * d;
                let mut t = a.rem(self);
                let mut acc = t.clone();
                for _ in 1..k {
                    t = t.mul(&t).rem(self);
                    acc = acc.add(&t);
                }
                acc
            } else {
                // a^((q^d - 1)/2) via the norm a^(1 + q + .. + q^(d-1))
                let mut conj = a.rem(self);
                let mut norm = conj.clone();
                for _ in 1..d {
                    conj = conj.powmod(f.q(), self);
                    norm = norm.mul(&conj).rem(self);
                }
                norm.powmod((f.q() - 1) / 2, self).sub(&Poly::one(f))
            };
            let g = self.gcd(&b).unwrap();
            if g.deg() > 0 && g.deg() < n {
                let h = self.div_exact(&g).unwrap();
                let mut out = g.equal_degree_split(d);
                out.extend(h.equal_degree_split(d));
                return out;
            }
        }
    }

    /// Full factorization into monic irreducibles with multiplicity, sorted by
    /// (degree, coefficients).
    pub fn factor(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        for (sq, mult) in self.squarefree_decomposition() {
            for (d, g) in sq.distinct_degree() {
                for irr in g.equal_degree_split(d) {
                    out.push((irr, mult));
                }
            }
        }
        out.sort_by(|a, b| {
            a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.coeffs.iter().rev().cmp(b.0.coeffs.iter().rev()))
        });
        out
    }

    pub fn is_irreducible(&self) -> bool {
        let n = self.deg();
        if n <= 0 {
            return false;
        }
        if !self.is_separable() {
            return false;
        }
        let dd = self.distinct_degree();
        dd.len() == 1 && dd[0].0 == n as usize
    }

    /// Lagrange interpolation through (x_i, y_i).
    pub fn interpolate(field: &FiniteField, nodes: &[(Fe, Fe)]) -> Result<Poly> {
        for i in 0..nodes.len() {
            for j in 0..i {
                if nodes[i].0 == nodes[j].0 {
                    return Err(Error::DuplicateNodes);
                }
            }
        }
        let f = field;
        let mut out = Poly::zero(f);
        for (i, &(xi, yi)) in nodes.iter().enumerate() {
            let mut basis = Poly::one(f);
            let mut denom = Fe::ONE;
            for (j, &(xj, _)) in nodes.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = basis.mul(&Poly::new(f, vec![f.neg(xj), Fe::ONE]));
                denom = f.mul(denom, f.sub(xi, xj));
            }
            out = out.add(&basis.scale(f.mul(yi, f.inv(denom)?)));
        }
        Ok(out)
    }

    /// Composition self(g).
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(&self.field, c));
        }
        acc
    }

    /// Applies a coefficient map into another field.
    pub fn map(&self, target: &FiniteField, phi: impl Fn(Fe) -> Fe) -> Poly {
        Poly::new(target, self.coeffs.iter().map(|&c| phi(c)).collect())
    }

    /// Reverses coefficients with respect to degree `n`: x^n f(1/x).
    pub fn reverse(&self, n: usize) -> Poly {
        let mut v = vec![Fe::ZERO; n + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i <= n {
                v[n - i] = c;
            }
        }
        Poly::new(&self.field, v)
    }

    /// Multiplicity of the monic irreducible `pi` in self (self nonzero).
    pub fn valuation(&self, pi: &Poly) -> usize {
        let mut k = 0;
        let mut cur = self.clone();
        if cur.is_zero() {
            return usize::MAX;
        }
        loop {
            let (q, r) = cur.div_rem(pi).unwrap();
            if !r.is_zero() {
                return k;
            }
            cur = q;
            k += 1;
        }
    }

    pub fn to_string_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let cs = f.format(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            parts.push(match (i, c == Fe::ONE) {
                (0, _) => cs,
                (_, true) => mon,
                _ => format!("{cs}*{mon}"),
            });
        }
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separability_examples() {
        let f5 = FiniteField::prime(5).unwrap();
        let mut c = vec![0i64; 9];
        c[0] = 1;
        c[8] = 1;
        assert!(Poly::from_ints(&f5, &c).is_separable());
        let f2 = FiniteField::prime(2).unwrap();
        assert!(!Poly::from_ints(&f2, &c).is_separable());
        assert_eq!(Poly::from_ints(&f2, &c).squarefree_part(), Poly::from_ints(&f2, &[1, 1]));
    }

    #[test]
    fn coprime_cubics_over_f3() {
        let f3 = FiniteField::prime(3).unwrap();
        let a = Poly::from_ints(&f3, &[-1, -1, 0, 1]);
        let b = Poly::from_ints(&f3, &[-1, 1, 0, -1]);
        assert_eq!(a.gcd(&b).unwrap(), Poly::one(&f3));
    }

    #[test]
    fn mixed_fields_rejected() {
        let f3 = FiniteField::prime(3).unwrap();
        let f5 = FiniteField::prime(5).unwrap();
        let a = Poly::x(&f3);
        let b = Poly::x(&f5);
        assert_eq!(a.gcd(&b).unwrap_err(), Error::MixedFields);
    }

    #[test]
    fn interpolation_roundtrip_and_duplicates() {
        let f = FiniteField::prime(11).unwrap();
        let nodes: Vec<(Fe, Fe)> = (0..6).map(|i| (Fe(i), Fe((i * i * 7 + 3) % 11))).collect();
        let p = Poly::interpolate(&f, &nodes).unwrap();
        for (x, y) in &nodes {
            assert_eq!(p.eval(*x), *y);
        }
        let dup = vec![(Fe(1), Fe(2)), (Fe(1), Fe(3))];
        assert_eq!(Poly::interpolate(&f, &dup).unwrap_err(), Error::DuplicateNodes);
    }

    #[test]
    fn factorization_recovers_product() {
        let f = FiniteField::new(3, 2, Some(&[1, 0, 1])).unwrap();
        let a = Poly::from_ints(&f, &[1, 1, 1, 0, 1]); // some quartic
        let b = Poly::from_ints(&f, &[2, 1]);
        let prod = a.mul(&b).mul(&b);
        let fac = prod.factor();
        let mut rebuilt = Poly::one(&f);
        for (g, m) in &fac {
            assert!(g.is_irreducible());
            rebuilt = rebuilt.mul(&g.pow(*m as u64));
        }
        assert_eq!(rebuilt, prod.monic());
    }

    #[test]
    fn roots_large_field_match_scan() {
        let f = FiniteField::new(2, 10, Some(&[1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1])).unwrap();
        let p = Poly::new(&f, vec![Fe(5), Fe(17), Fe(0), Fe(1), Fe(300), Fe(1)]);
        let scan: Vec<Fe> = f.elements().filter(|&v| p.eval(v).is_zero()).collect();
        assert_eq!(p.roots(), scan);
        assert_eq!(p.count_distinct_roots(), scan.len());
    }

    #[test]
    fn char2_squarefree_decomposition() {
        let f = FiniteField::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let a = Poly::from_ints(&f, &[1, 1, 1]);
        let x = Poly::x(&f);
        let prod = a.pow(2).mul(&x.pow(3));
        let dec = prod.squarefree_decomposition();
        let mut rebuilt = Poly::one(&f);
        for (g, m) in dec {
            rebuilt = rebuilt.mul(&g.pow(m as u64));
        }
        assert_eq!(rebuilt, prod);
    }
}
