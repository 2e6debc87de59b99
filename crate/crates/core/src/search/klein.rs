use serde_json::json;

use super::{digits, fe_json, validated, ChunkResult, Engine, Family, Survivor};
use crate::algebra::{Fe, FiniteField, Poly, RationalFunction};
use crate::curves::{ArtinSchreierCurve, Curve, HyperellipticOdd};
use crate::error::{Error, Result};

/// y^2 = x^4 f(x + n/x) for quartic f with nonsquare leading coefficient.
///
/// The model has the Klein group generated by x -> n/x and y -> -y. Its
/// value at x = 0 is lc(f) n^4, so pointless curves need lc(f) nonsquare and
/// square scaling fixes it to the canonical nonsquare. A candidate is
/// pointless exactly when f is a nonsquare on every u = x + n/x.
pub struct Klein4OddEngine {
    k: FiniteField,
    n: Fe,
    nu: Fe,
    image: Vec<Fe>,
}

impl Klein4OddEngine {
    pub fn new(k: &FiniteField, n: Fe) -> Result<Self> {
        if k.is_char2() {
            return Err(Error::EvenCharacteristic);
        }
        if n.is_zero() {
            return Err(Error::InvalidCurve("n must be nonzero".into()));
        }
        let mut image: Vec<Fe> = k.elements().skip(1).map(|x| k.add(x, k.div(n, x).expect("x != 0"))).collect();
        image.sort();
        image.dedup();
        Ok(Klein4OddEngine { k: k.clone(), n, nu: k.first_nonsquare(), image })
    }

    fn quartic(&self, idx: u64) -> [Fe; 5] {
        let d = digits(idx, self.k.q(), 4);
        [Fe(d[3]), Fe(d[2]), Fe(d[1]), Fe(d[0]), self.nu]
    }

    fn eval(&self, c: &[Fe; 5], u: Fe) -> Fe {
        let k = &self.k;
        c.iter().rev().fold(Fe::ZERO, |acc, &a| k.add(k.mul(acc, u), a))
    }

    /// x^4 f(x + n/x) = sum c_i x^(4-i) (x^2 + n)^i.
    pub fn model(&self, c: &[Fe; 5]) -> Poly {
        let k = &self.k;
        let shift = Poly::new(k, vec![self.n, Fe::ZERO, Fe::ONE]);
        let mut acc = Poly::zero(k);
        let mut power = Poly::one(k);
        for (i, &ci) in c.iter().enumerate() {
            acc = acc.add(&power.mul(&Poly::monomial(k, ci, 4 - i)));
            power = power.mul(&shift);
        }
        acc
    }

    fn valid(&self, c: &[Fe; 5]) -> bool {
        let k = &self.k;
        let f = Poly::new(k, c.to_vec());
        let branch = Poly::new(k, vec![k.neg(k.mul(k.from_int(4), self.n)), Fe::ZERO, Fe::ONE]);
        f.is_separable() && f.gcd(&branch).map(|g| g.deg() == 0).unwrap_or(false)
    }
}

impl Engine for Klein4OddEngine {
    fn family(&self) -> Family {
        Family::Klein4HyperOdd
    }

    fn field(&self) -> &FiniteField {
        &self.k
    }

    fn parameters(&self) -> serde_json::Value {
        json!({ "n": fe_json(&self.k, self.n), "lc": fe_json(&self.k, self.nu) })
    }

    fn chunk_count(&self) -> u64 {
        self.k.q()
    }

    fn order_spec(&self) -> String {
        "f = nu u^4 + c3 u^3 + c2 u^2 + c1 u + c0; (c3, c2, c1, c0) odometer, c0 fastest; chunk = c3".into()
    }

    fn run_chunk(&self, chunk: u64, first_only: bool) -> Result<ChunkResult> {
        let q = self.k.q();
        let mut out = ChunkResult::default();
        for idx in chunk * q * q * q..(chunk + 1) * q * q * q {
            out.examined += 1;
            let c = self.quartic(idx);
            if !self.image.iter().all(|&u| self.k.chi(self.eval(&c, u)) == -1) {
                continue;
            }
            if !self.valid(&c) {
                out.bump("invalid");
                continue;
            }
            out.keys.push(vec![idx]);
            if first_only {
                break;
            }
        }
        Ok(out)
    }

    fn survivor(&self, key: &[u64]) -> Result<Survivor> {
        let c = self.quartic(key[0]);
        let curve = HyperellipticOdd::new(self.model(&c))?;
        let f = Poly::new(&self.k, c.to_vec());
        validated(key, Curve::Hyperelliptic(curve), 3, 3, json!({ "f": f.to_string_var("u") }))
    }
}

/// y^2 + y = f(x + 1/x) with f = (a u^2 + b u + c)/d(u), d monic quadratic,
/// squarefree, d(0) != 0.
pub struct Klein4EvenEngine {
    k: FiniteField,
    dens: Vec<(Fe, Fe)>,
}

impl Klein4EvenEngine {
    pub fn new(k: &FiniteField) -> Result<Self> {
        if !k.is_char2() {
            return Err(Error::OddCharacteristic);
        }
        let mut dens = Vec::new();
        for d1 in k.elements() {
            for d0 in k.elements().skip(1) {
                if Poly::new(k, vec![d0, d1, Fe::ONE]).is_separable() {
                    dens.push((d1, d0));
                }
            }
        }
        Ok(Klein4EvenEngine { k: k.clone(), dens })
    }

    fn params(&self, key: &[u64]) -> ((Fe, Fe), [Fe; 3]) {
        let q = self.k.q();
        let d = digits(key[1], q, 3);
        (self.dens[key[0] as usize], [Fe(d[0]), Fe(d[1]), Fe(d[2])])
    }

    /// Numerator and denominator after u = (x^2 + 1)/x, both times x^2.
    pub fn rational(&self, (d1, d0): (Fe, Fe), [a, b, c]: [Fe; 3]) -> (Poly, Poly) {
        let k = &self.k;
        let s = Poly::new(k, vec![Fe::ONE, Fe::ZERO, Fe::ONE]);
        let x = Poly::x(k);
        let x2 = x.mul(&x);
        let s2 = s.mul(&s);
        let num = s2.scale(a).add(&x.mul(&s).scale(b)).add(&x2.scale(c));
        let den = s2.add(&x.mul(&s).scale(d1)).add(&x2.scale(d0));
        (num, den)
    }

    fn curve(&self, key: &[u64]) -> Result<ArtinSchreierCurve> {
        let (d, abc) = self.params(key);
        let (num, den) = self.rational(d, abc);
        ArtinSchreierCurve::new(RationalFunction::new(num, den)?)
    }
}

impl Engine for Klein4EvenEngine {
    fn family(&self) -> Family {
        Family::Klein4HyperEven
    }

    fn field(&self) -> &FiniteField {
        &self.k
    }

    fn parameters(&self) -> serde_json::Value {
        json!({ "denominators": self.dens.len() })
    }

    fn chunk_count(&self) -> u64 {
        self.dens.len() as u64 * self.k.q()
    }

    fn order_spec(&self) -> String {
        "d = u^2 + d1 u + d0 in (d1, d0) order; then (a, b, c) odometer; chunk = (d, a)".into()
    }

    fn run_chunk(&self, chunk: u64, first_only: bool) -> Result<ChunkResult> {
        let k = &self.k;
        let q = k.q();
        let di = chunk / q;
        let a = chunk % q;
        let mut out = ChunkResult::default();
        for bc in 0..q * q {
            out.examined += 1;
            let key = vec![di, a * q * q + bc];
            let (d, abc) = self.params(&key);
            let (num, den) = self.rational(d, abc);
            let pointless = k.elements().all(|x| {
                let dv = den.eval(x);
                !dv.is_zero() && k.trace(k.mul(num.eval(x), k.inv_nz(dv))) == 1
            }) && k.trace(abc[0]) == 1;
            if !pointless {
                continue;
            }
            match self.curve(&key) {
                Ok(c) if c.genus() == 3 => {}
                _ => {
                    out.bump("wrong_genus");
                    continue;
                }
            }
            out.keys.push(key);
            if first_only {
                break;
            }
        }
        Ok(out)
    }

    fn survivor(&self, key: &[u64]) -> Result<Survivor> {
        let (d, [a, b, c]) = self.params(key);
        let k = &self.k;
        let detail = json!({
            "f": format!("({} u^2 + {} u + {}) / (u^2 + {} u + {})",
                k.format(a), k.format(b), k.format(c), k.format(d.0), k.format(d.1)),
        });
        validated(key, Curve::ArtinSchreier(self.curve(key)?), 3, 3, detail)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{run, SearchConfig};
    use super::*;

    #[test]
    fn f5_model_expansion() {
        let k = FiniteField::prime(5).unwrap();
        let e = Klein4OddEngine::new(&k, Fe::ONE).unwrap();
        let c = [2, 0, 2, 0, 2].map(|v| k.from_int(v));
        assert_eq!(e.model(&c), Poly::from_ints(&k, &[2, 0, 0, 0, 3, 0, 0, 0, 2]));
    }

    #[test]
    fn f5_census_contains_table_row() {
        let k = FiniteField::prime(5).unwrap();
        let e = Klein4OddEngine::new(&k, Fe::ONE).unwrap();
        let r = run(&e, &SearchConfig::census()).unwrap();
        assert!(
            r.survivors.iter().any(|s| s.curve == "y^2 = 2*x^8 + 3*x^4 + 2"),
            "{:?}",
            r.survivors.iter().map(|s| &s.curve).collect::<Vec<_>>()
        );
    }

    #[test]
    fn f2_table_row_is_in_family() {
        let k = FiniteField::prime(2).unwrap();
        let e = Klein4EvenEngine::new(&k).unwrap();
        let (num, den) = e.rational((Fe::ONE, Fe::ONE), [Fe::ONE, Fe::ZERO, Fe::ONE]);
        assert_eq!(num, Poly::from_ints(&k, &[1, 0, 1, 0, 1]));
        assert_eq!(den, Poly::from_ints(&k, &[1, 1, 1, 1, 1]));
        let r = run(&e, &SearchConfig::census()).unwrap();
        assert!(r.raw_survivors >= 1);
        assert!(r.survivors.iter().any(|s| s.detail["f"] == "(1 u^2 + 0 u + 1) / (u^2 + 1 u + 1)"));
    }
}
