use serde_json::json;

use super::{digits, fe_json, validated, ChunkResult, Engine, Family, Survivor};
use crate::algebra::{Fe, FiniteField};
use crate::curves::{Curve, PlaneQuartic};
use crate::error::{Error, Result};

/// x^4 + b y^4 + c z^4 + d x^2y^2 + e x^2z^2 + f y^2z^2 = 0.
///
/// The equation only sees X = x^2, Y = y^2, Z = z^2, so a point exists iff
/// the associated conic-like form vanishes at some triple of squares. b and
/// c are nonzero, otherwise (0:1:0) or (0:0:1) lies on the curve.
pub struct DiagonalQuarticEngine {
    k: FiniteField,
    squares: Vec<Fe>,
}

impl DiagonalQuarticEngine {
    pub fn new(k: &FiniteField) -> Result<Self> {
        if k.is_char2() {
            return Err(Error::EvenCharacteristic);
        }
        let mut squares: Vec<Fe> = k.elements().map(|x| k.mul(x, x)).collect();
        squares.sort();
        squares.dedup();
        Ok(DiagonalQuarticEngine { k: k.clone(), squares })
    }

    /// (1, b, c, d, e, f) for a candidate index.
    pub fn coefficients(&self, key: &[u64]) -> [Fe; 6] {
        let q = self.k.q();
        let d = digits(key[1], q, 3);
        [Fe::ONE, Fe(key[0] / (q - 1) + 1), Fe(key[0] % (q - 1) + 1), Fe(d[0]), Fe(d[1]), Fe(d[2])]
    }

    fn pointless(&self, c: &[Fe; 6]) -> bool {
        let k = &self.k;
        let [_, b, cc, d, e, f] = *c;
        for &x in &self.squares {
            // z = 0, y = 1
            if k.add(k.mul(x, k.add(x, d)), b).is_zero() {
                return false;
            }
            // z = 1: X^2 + e X + c + Y (b Y + d X + f)
            let base = k.add(k.mul(x, k.add(x, e)), cc);
            let lin = k.add(k.mul(d, x), f);
            for &y in &self.squares {
                if k.add(base, k.mul(y, k.add(k.mul(b, y), lin))).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

impl Engine for DiagonalQuarticEngine {
    fn family(&self) -> Family {
        Family::DiagonalQuartic
    }

    fn field(&self) -> &FiniteField {
        &self.k
    }

    fn parameters(&self) -> serde_json::Value {
        json!({ "a": 1 })
    }

    fn chunk_count(&self) -> u64 {
        (self.k.q() - 1) * (self.k.q() - 1)
    }

    fn order_spec(&self) -> String {
        "chunk = (b, c) over nonzero elements; inside, (d, e, f) odometer with f fastest".into()
    }

    fn run_chunk(&self, chunk: u64, first_only: bool) -> Result<ChunkResult> {
        let q = self.k.q();
        let mut out = ChunkResult::default();
        for def in 0..q * q * q {
            out.examined += 1;
            let key = vec![chunk, def];
            let c = self.coefficients(&key);
            if !self.pointless(&c) {
                continue;
            }
            if !PlaneQuartic::diagonal(&self.k, c)?.is_smooth()? {
                out.bump("singular");
                continue;
            }
            out.keys.push(key);
            if first_only {
                break;
            }
        }
        Ok(out)
    }

    fn survivor(&self, key: &[u64]) -> Result<Survivor> {
        let c = self.coefficients(key);
        let curve = PlaneQuartic::diagonal(&self.k, c)?;
        let depth = if self.k.q() <= 13 { 2 } else { 1 };
        let detail = json!({ "coefficients": c.iter().map(|&v| fe_json(&self.k, v)).collect::<Vec<_>>() });
        validated(key, Curve::Quartic(curve), 3, depth, detail)
    }
}
