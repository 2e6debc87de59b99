//! Sparse polynomials in up to three variables.

use std::collections::BTreeMap;

use super::field::{Fe, FiniteField};
use super::poly::Poly;

pub type Exponents = [u32; 3];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    field: FiniteField,
    terms: BTreeMap<Exponents, Fe>,
}

impl MPoly {
    pub fn zero(field: &FiniteField) -> Self {
        MPoly { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(field: &FiniteField, c: Fe) -> Self {
        let mut m = Self::zero(field);
        m.add_term([0, 0, 0], c);
        m
    }

    pub fn var(field: &FiniteField, i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        let mut m = Self::zero(field);
        m.add_term(e, Fe::ONE);
        m
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Fe)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: Exponents) -> Fe {
        self.terms.get(&e).copied().unwrap_or(Fe::ZERO)
    }

    pub fn add_term(&mut self, e: Exponents, c: Fe) {
        let f = self.field.clone();
        let entry = self.terms.entry(e).or_insert(Fe::ZERO);
        *entry = f.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, *c);
        }
        r
    }

    pub fn neg(&self) -> MPoly {
        let mut r = MPoly::zero(&self.field);
        for (e, c) in &self.terms {
            r.add_term(*e, self.field.neg(*c));
        }
        r
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let f = &self.field;
        let mut r = MPoly::zero(f);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], f.mul(*c1, *c2));
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut r = MPoly::constant(&self.field, Fe::ONE);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn scale(&self, c: Fe) -> MPoly {
        let mut r = MPoly::zero(&self.field);
        for (e, v) in &self.terms {
            r.add_term(*e, self.field.mul(*v, c));
        }
        r
    }

    pub fn eval(&self, x: [Fe; 3]) -> Fe {
        let f = &self.field;
        let mut acc = Fe::ZERO;
        for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..3 {
                if e[i] > 0 {
                    t = f.mul(t, f.pow(x[i], e[i] as u64));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    pub fn partial(&self, i: usize) -> MPoly {
        let f = &self.field;
        let mut r = MPoly::zero(f);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[i] -= 1;
            r.add_term(e2, f.mul(*c, f.from_int((e[i] as u64 % f.p()) as i64)));
        }
        r
    }

    /// Maximum total degree; None for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0] + e[1] + e[2]).max()
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e[0] + e[1] + e[2] == d)
    }

    /// Highest power of variable i.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Uses only the variables whose indices are listed.
    pub fn uses_only(&self, vars: &[usize]) -> bool {
        self.terms.keys().all(|e| (0..3).all(|i| e[i] == 0 || vars.contains(&i)))
    }

    /// Substitutes fixed values for all variables except `keep`, yielding a
    /// univariate polynomial in that variable.
    pub fn restrict(&self, keep: usize, vals: [Fe; 3]) -> Poly {
        let f = &self.field;
        let deg = self.degree_in(keep) as usize;
        let mut v = vec![Fe::ZERO; deg + 1];
        for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..3 {
                if i != keep && e[i] > 0 {
                    t = f.mul(t, f.pow(vals[i], e[i] as u64));
                }
            }
            let k = e[keep] as usize;
            v[k] = f.add(v[k], t);
        }
        Poly::new(f, v)
    }

    /// Univariate polynomial when only variable `i` occurs.
    pub fn to_univariate(&self, i: usize) -> Option<Poly> {
        if !self.uses_only(&[i]) {
            return None;
        }
        Some(self.restrict(i, [Fe::ZERO; 3]))
    }

    pub fn from_univariate(p: &Poly, i: usize) -> MPoly {
        let mut r = MPoly::zero(p.field());
        for (k, &c) in p.coeffs().iter().enumerate() {
            let mut e = [0; 3];
            e[i] = k as u32;
            r.add_term(e, c);
        }
        r
    }

    /// Coefficients as polynomials in variable `outer` of powers of variable `inner`
    /// (the remaining variable must not occur): self = sum_j c_j(outer) inner^j.
    pub fn as_poly_in(&self, inner: usize, outer: usize) -> Vec<Poly> {
        let f = &self.field;
        let dj = self.degree_in(inner) as usize;
        let di = self.degree_in(outer) as usize;
        let mut rows = vec![vec![Fe::ZERO; di + 1]; dj + 1];
        for (e, c) in &self.terms {
            rows[e[inner] as usize][e[outer] as usize] = *c;
        }
        rows.into_iter().map(|r| Poly::new(f, r)).collect()
    }

    pub fn map(&self, target: &FiniteField, phi: impl Fn(Fe) -> Fe) -> MPoly {
        let mut r = MPoly::zero(target);
        for (e, c) in &self.terms {
            r.add_term(*e, phi(*c));
        }
        r
    }

    pub fn format(&self, names: [&str; 3]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut mon = String::new();
            for i in 0..3 {
                match e[i] {
                    0 => {}
                    1 => mon.push_str(names[i]),
                    k => mon.push_str(&format!("{}^{}", names[i], k)),
                }
            }
            let cs = f.format(*c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            parts.push(if mon.is_empty() {
                cs
            } else if *c == Fe::ONE {
                mon
            } else {
                format!("{cs}*{mon}")
            });
        }
        parts.join(" + ")
    }
}
