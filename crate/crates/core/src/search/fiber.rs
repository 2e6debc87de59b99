use serde_json::json;

use super::{digits, validated, ChunkResult, Engine, Family, Survivor};
use crate::algebra::{Fe, FiniteField, Poly};
use crate::curves::{Curve, FiberProduct};
use crate::error::{Error, Result};

/// True when y^2 = f, z^2 = g has no affine point and the leading
/// coefficients keep the points at infinity irrational.
pub fn fiberproduct_filter(f: &Poly, g: &Poly) -> bool {
    let k = f.field();
    if k.is_square(k.mul(f.lc(), g.lc())) {
        return false;
    }
    k.elements().all(|x| k.chi(f.eval(x)) == -1 || k.chi(g.eval(x)) == -1)
}

/// f monic and lc(g) the canonical nonsquare; chunks run over f.
pub struct FiberProductEngine {
    k: FiniteField,
    nu: Fe,
}

impl FiberProductEngine {
    pub fn new(k: &FiniteField) -> Result<Self> {
        if k.is_char2() {
            return Err(Error::EvenCharacteristic);
        }
        Ok(FiberProductEngine { k: k.clone(), nu: k.first_nonsquare() })
    }

    fn cubic(&self, idx: u64, lc: Fe) -> Poly {
        let d = digits(idx, self.k.q(), 3);
        Poly::new(&self.k, vec![Fe(d[2]), Fe(d[1]), Fe(d[0]), lc])
    }

    pub fn pair(&self, key: &[u64]) -> (Poly, Poly) {
        (self.cubic(key[0], Fe::ONE), self.cubic(key[1], self.nu))
    }
}

impl Engine for FiberProductEngine {
    fn family(&self) -> Family {
        Family::Fiberproduct
    }

    fn field(&self) -> &FiniteField {
        &self.k
    }

    fn parameters(&self) -> serde_json::Value {
        json!({ "lc_f": "1", "lc_g": self.k.format(self.nu) })
    }

    fn chunk_count(&self) -> u64 {
        self.k.q().pow(3)
    }

    fn order_spec(&self) -> String {
        "chunk = (f2, f1, f0) of f; inside, (g2, g1, g0) odometer with g0 fastest".into()
    }

    fn run_chunk(&self, chunk: u64, first_only: bool) -> Result<ChunkResult> {
        let k = &self.k;
        let q = k.q();
        let mut out = ChunkResult::default();
        let f = self.cubic(chunk, Fe::ONE);
        if !f.is_separable() {
            out.examined = q * q * q;
            out.bump("f_inseparable");
            return Ok(out);
        }
        // g must be a nonsquare wherever f(x) is a square or zero
        let open: Vec<Fe> = k.elements().filter(|&x| k.chi(f.eval(x)) >= 0).collect();
        for gi in 0..q * q * q {
            out.examined += 1;
            let g = self.cubic(gi, self.nu);
            if !open.iter().all(|&x| k.chi(g.eval(x)) == -1) {
                continue;
            }
            if !g.is_separable() || f.gcd(&g)?.deg() > 0 {
                out.bump("invalid");
                continue;
            }
            out.keys.push(vec![chunk, gi]);
            if first_only {
                break;
            }
        }
        Ok(out)
    }

    fn survivor(&self, key: &[u64]) -> Result<Survivor> {
        let (f, g) = self.pair(key);
        let c = FiberProduct::new(f, g)?;
        let detail = serde_json::to_value(c.properties()).expect("plain struct");
        validated(key, Curve::FiberProduct(c), 4, 4, detail)
    }
}
