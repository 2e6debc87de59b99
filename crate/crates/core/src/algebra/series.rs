//! Truncated Laurent series in one variable.

use super::field::{Fe, FiniteField};
use super::poly::Poly;

/// Precision used for exact inputs such as polynomials.
pub const EXACT: i64 = 1 << 40;

/// Terms produced when inverting a series known exactly.
const MAX_INVERSE_TERMS: i64 = 1024;

/// `sum_k coeffs[k] t^(val + k) + O(t^prec)`.
///
/// Leading zeros are stripped, so a nonzero series has a nonzero first
/// coefficient. A series with no known nonzero term is zero to precision `prec`.
#[derive(Clone, Debug)]
pub struct Series {
    field: FiniteField,
    val: i64,
    coeffs: Vec<Fe>,
    prec: i64,
}

impl Series {
    pub fn new(field: &FiniteField, val: i64, coeffs: Vec<Fe>, prec: i64) -> Self {
        let mut s = Series { field: field.clone(), val, coeffs, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let keep = (self.prec - self.val).max(0) as usize;
        self.coeffs.truncate(keep);
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(i) => {
                self.coeffs.drain(..i);
                self.val += i as i64;
            }
            None => {
                self.coeffs.clear();
                self.val = self.prec;
            }
        }
    }

    pub fn zero(field: &FiniteField, prec: i64) -> Self {
        Series { field: field.clone(), val: prec, coeffs: vec![], prec }
    }

    pub fn constant(field: &FiniteField, c: Fe, prec: i64) -> Self {
        Self::new(field, 0, vec![c], prec)
    }

    /// The variable t itself.
    pub fn t(field: &FiniteField, prec: i64) -> Self {
        Self::new(field, 1, vec![Fe::ONE], prec)
    }

    pub fn monomial(field: &FiniteField, c: Fe, k: i64, prec: i64) -> Self {
        Self::new(field, k, vec![c], prec)
    }

    pub fn from_poly(p: &Poly, prec: i64) -> Self {
        Self::new(p.field(), 0, p.coeffs().to_vec(), prec)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation, or None when the series is zero to the known precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn leading(&self) -> Fe {
        self.coeffs.first().copied().unwrap_or(Fe::ZERO)
    }

    /// Coefficient of t^k; zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Fe {
        if k < self.val {
            return Fe::ZERO;
        }
        self.coeffs.get((k - self.val) as usize).copied().unwrap_or(Fe::ZERO)
    }

    pub fn with_prec(&self, prec: i64) -> Self {
        Self::new(&self.field, self.val, self.coeffs.clone(), prec.min(self.prec))
    }

    pub fn add(&self, o: &Series) -> Series {
        let f = &self.field;
        let prec = self.prec.min(o.prec);
        let span = |s: &Series| (!s.is_zero()).then(|| (s.val, s.val + s.coeffs.len() as i64));
        let (lo, end) = match (span(self), span(o)) {
            (None, None) => return Series::zero(f, prec),
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
        };
        let end = end.min(prec);
        let len = (end - lo).max(0) as usize;
        let mut v = vec![Fe::ZERO; len];
        for (k, slot) in v.iter_mut().enumerate() {
            let e = lo + k as i64;
            *slot = f.add(self.coeff(e), o.coeff(e));
        }
        Series::new(f, lo, v, prec)
    }

    pub fn neg(&self) -> Series {
        let v = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        Series::new(&self.field, self.val, v, self.prec)
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: Fe) -> Series {
        let v = self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect();
        Series::new(&self.field, self.val, v, self.prec)
    }

    /// Multiplication by t^k.
    pub fn shift(&self, k: i64) -> Series {
        Series::new(&self.field, self.val + k, self.coeffs.clone(), self.prec + k)
    }

    pub fn mul(&self, o: &Series) -> Series {
        let f = &self.field;
        let prec = (self.val + o.prec).min(o.val + self.prec);
        let val = self.val + o.val;
        let stored = (self.coeffs.len() + o.coeffs.len()).saturating_sub(1) as i64;
        let len = (prec - val).clamp(0, stored) as usize;
        let mut v = vec![Fe::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Series::new(f, val, v, prec)
    }

    /// Multiplicative inverse; None if the series is zero to known precision.
    pub fn inv(&self) -> Option<Series> {
        if self.is_zero() {
            return None;
        }
        let f = &self.field;
        let rel = (self.prec - self.val).min(MAX_INVERSE_TERMS) as usize;
        let l = f.inv_nz(self.coeffs[0]);
        let mut r = vec![Fe::ZERO; rel];
        r[0] = l;
        for k in 1..rel {
            let mut s = Fe::ZERO;
            for j in 1..=k.min(self.coeffs.len() - 1) {
                s = f.add(s, f.mul(self.coeffs[j], r[k - j]));
            }
            r[k] = f.neg(f.mul(s, l));
        }
        Some(Series::new(f, -self.val, r, rel as i64 - self.val))
    }

    pub fn div(&self, o: &Series) -> Option<Series> {
        Some(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: u32) -> Series {
        let mut r = Series::constant(&self.field, Fe::ONE, EXACT);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Evaluates a polynomial at this series.
    pub fn eval_poly(&self, p: &Poly) -> Series {
        let f = &self.field;
        let mut acc = Series::zero(f, EXACT);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Series::constant(f, c, EXACT));
        }
        acc
    }

    /// The part with negative exponents, as (exponent, coefficient) pairs.
    pub fn principal_part(&self) -> Vec<(i64, Fe)> {
        (self.val..0).map(|k| (k, self.coeff(k))).filter(|(_, c)| !c.is_zero()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_inverse() {
        let f = FiniteField::prime(7).unwrap();
        let one_minus_t = Series::new(&f, 0, vec![Fe::ONE, f.neg(Fe::ONE)], 10);
        let inv = one_minus_t.inv().unwrap();
        for k in 0..10 {
            assert_eq!(inv.coeff(k), Fe::ONE);
        }
        assert_eq!(inv.prec(), 10);
        let back = inv.mul(&one_minus_t);
        assert_eq!(back.valuation(), Some(0));
        assert_eq!(back.coeff(0), Fe::ONE);
        assert!((1..10).all(|k| back.coeff(k).is_zero()));
    }

    #[test]
    fn laurent_inverse_and_precision() {
        let f = FiniteField::prime(5).unwrap();
        let t = Series::t(&f, 8);
        let inv = t.inv().unwrap();
        assert_eq!(inv.valuation(), Some(-1));
        assert_eq!(inv.prec(), 6);
        assert_eq!(inv.principal_part(), vec![(-1, Fe::ONE)]);
    }

    #[test]
    fn cancellation_leaves_zero_to_precision() {
        let f = FiniteField::prime(3).unwrap();
        let a = Series::new(&f, 0, vec![Fe(1), Fe(2)], 5);
        let z = a.sub(&a);
        assert!(z.is_zero());
        assert_eq!(z.valuation(), None);
    }
}
