use serde_json::json;

use super::{fe_json, validated, ChunkResult, Engine, Family, Survivor};
use crate::algebra::{Fe, FiniteField};
use crate::curves::{Curve, PlaneQuartic};
use crate::error::{Error, Result};

/// (x^2+xz)^2 + beta (x^2+xz)(y^2+yz) + (y^2+yz)^2 + gamma z^4 = 0 in
/// characteristic 2. Affine points have u = x^2 + x and v = y^2 + y in the
/// trace-zero hyperplane, so the scan runs over pairs of such values.
pub struct QuarticChar2Engine {
    k: FiniteField,
    image: Vec<Fe>,
}

impl QuarticChar2Engine {
    pub fn new(k: &FiniteField) -> Result<Self> {
        if !k.is_char2() {
            return Err(Error::OddCharacteristic);
        }
        let mut image: Vec<Fe> = k.elements().map(|x| k.add(k.mul(x, x), x)).collect();
        image.sort();
        image.dedup();
        Ok(QuarticChar2Engine { k: k.clone(), image })
    }

    fn pointless(&self, beta: Fe, gamma: Fe) -> bool {
        let k = &self.k;
        // z = 0: x^4 + beta x^2 + 1 at (x : 1 : 0); (1 : 0 : 0) never lies on it
        if k.elements().any(|x| {
            let x2 = k.mul(x, x);
            k.add(k.mul(x2, k.add(x2, beta)), Fe::ONE).is_zero()
        }) {
            return false;
        }
        for &u in &self.image {
            let base = k.add(k.mul(u, u), gamma);
            let bu = k.mul(beta, u);
            for &v in &self.image {
                if k.add(base, k.mul(v, k.add(v, bu))).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

impl Engine for QuarticChar2Engine {
    fn family(&self) -> Family {
        Family::QuarticChar2
    }

    fn field(&self) -> &FiniteField {
        &self.k
    }

    fn parameters(&self) -> serde_json::Value {
        json!({})
    }

    fn chunk_count(&self) -> u64 {
        self.k.q()
    }

    fn order_spec(&self) -> String {
        "chunk = beta; gamma fastest".into()
    }

    fn run_chunk(&self, chunk: u64, first_only: bool) -> Result<ChunkResult> {
        let mut out = ChunkResult::default();
        for gamma in self.k.elements() {
            out.examined += 1;
            let beta = Fe(chunk);
            if !self.pointless(beta, gamma) {
                continue;
            }
            if !PlaneQuartic::klein_twist(&self.k, beta, gamma)?.is_smooth()? {
                out.bump("singular");
                continue;
            }
            out.keys.push(vec![chunk, gamma.0]);
            if first_only {
                break;
            }
        }
        Ok(out)
    }

    fn survivor(&self, key: &[u64]) -> Result<Survivor> {
        let (beta, gamma) = (Fe(key[0]), Fe(key[1]));
        let curve = PlaneQuartic::klein_twist(&self.k, beta, gamma)?;
        let detail = json!({ "beta": fe_json(&self.k, beta), "gamma": fe_json(&self.k, gamma) });
        validated(key, Curve::Quartic(curve), 3, 2, detail)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{run, SearchConfig};
    use super::*;

    #[test]
    fn f2_census() {
        let k = FiniteField::prime(2).unwrap();
        let r = run(&QuarticChar2Engine::new(&k).unwrap(), &SearchConfig::census()).unwrap();
        assert!(r.survivors.iter().any(|s| s.key == vec![1, 1]));
    }

    #[test]
    fn f16_table_row_survives() {
        let k = FiniteField::new(2, 4, Some(&[1, 1, 0, 0, 1])).unwrap();
        let e = QuarticChar2Engine::new(&k).unwrap();
        let a = k.generator();
        assert!(e.pointless(a, k.pow(a, 7)));
    }
}
