use serde_json::json;

use super::{validated, ChunkResult, Engine, Family, Survivor};
use crate::algebra::{Fe, FiniteField, Poly, RationalFunction};
use crate::curves::{ArtinSchreierCurve, Curve};
use crate::error::{Error, Result};

/// y^2 + y = g(x)/m(x) + t in characteristic 2 with deg m = 5, m without
/// rational roots and g coprime to m, deg g < 5.
///
/// Pointlessness at x means Tr(g(x)/m(x)) = Tr(t) + 1 and at infinity
/// Tr(t) = 1. All trace-one constants are equivalent, so t is fixed and g
/// ranges over the F_2-linear kernel of x -> Tr(g(x)/m(x)). The shift
/// x -> x + m4 removes the x^4 term of m.
pub struct HyperGenus4Char2Engine {
    k: FiniteField,
    t: Fe,
    /// Irreducible monic quadratics x^2 + s x + r as (s, r).
    quadratics: Vec<(Fe, Fe)>,
    /// trace_bits[c] has bit b set when Tr(x^b c) = 1 (x the field generator).
    trace_bits: Vec<u64>,
}

impl HyperGenus4Char2Engine {
    pub fn new(k: &FiniteField) -> Result<Self> {
        if !k.is_char2() {
            return Err(Error::OddCharacteristic);
        }
        let n = k.n();
        if 5 * n > 64 {
            return Err(Error::FieldTooLarge(k.q() as u128));
        }
        let t = k.elements().find(|&v| k.trace(v) == 1).expect("trace is onto");
        let mut quadratics = Vec::new();
        for s in k.elements() {
            for r in k.elements().skip(1) {
                if Poly::new(k, vec![r, s, Fe::ONE]).roots().is_empty() {
                    quadratics.push((s, r));
                }
            }
        }
        let trace_bits =
            k.elements().map(|c| (0..n).fold(0u64, |acc, b| acc | (k.trace(k.mul(Fe(1 << b), c)) << b))).collect();
        Ok(HyperGenus4Char2Engine { k: k.clone(), t, quadratics, trace_bits })
    }

    fn quintic_chunks(&self) -> u64 {
        self.k.q() * self.k.q()
    }

    fn code(&self, m: &Poly) -> u64 {
        let q = self.k.q();
        (0..5).rev().fold(0, |acc, i| acc * q + m.coeff(i).0)
    }

    fn decode_m(&self, code: u64) -> Poly {
        let q = self.k.q();
        let mut c: Vec<Fe> = (0..5).map(|i| Fe(code / q.pow(i) % q)).collect();
        c.push(Fe::ONE);
        Poly::new(&self.k, c)
    }

    fn decode_g(&self, bits: u64) -> Poly {
        let n = self.k.n();
        let mask = (1u64 << n) - 1;
        Poly::new(&self.k, (0..5).map(|i| Fe((bits >> (i * n)) & mask)).collect())
    }

    pub fn curve(&self, m: &Poly, g: &Poly) -> Result<ArtinSchreierCurve> {
        ArtinSchreierCurve::new(RationalFunction::new(g.add(&m.scale(self.t)), m.clone())?)
    }

    /// Pushes [code(m), g bits] for every admissible g.
    fn scan(&self, m: &Poly, first_only: bool, out: &mut ChunkResult) {
        let k = &self.k;
        let n = k.n();
        let mut rows = Vec::with_capacity(k.q() as usize);
        for x in k.elements() {
            let w = k.inv_nz(m.eval(x));
            let mut row = 0u64;
            let mut c = w;
            for i in 0..5 {
                row |= self.trace_bits[c.0 as usize] << (i * n);
                c = k.mul(c, x);
            }
            rows.push(row);
        }
        let basis = f2_kernel(&rows, 5 * n);
        let mut span: Vec<u64> = (1u64..(1 << basis.len()))
            .map(|combo| basis.iter().enumerate().filter(|(j, _)| combo >> j & 1 == 1).fold(0, |a, (_, v)| a ^ v))
            .collect();
        span.sort_unstable_by(|a, b| b.cmp(a));
        for bits in span {
            out.examined += 1;
            let g = self.decode_g(bits);
            if m.gcd(&g).map(|d| d.deg() > 0).unwrap_or(true) {
                out.bump("not_coprime");
                continue;
            }
            out.keys.push(vec![self.code(m), bits]);
            if first_only {
                return;
            }
        }
    }
}

/// Basis of {v : popcount(row & v) even for every row} on `ncols` bits.
fn f2_kernel(rows: &[u64], ncols: usize) -> Vec<u64> {
    let mut pivots: Vec<(usize, u64)> = Vec::new();
    for &r in rows {
        let mut r = r;
        for &(col, p) in &pivots {
            if r >> col & 1 == 1 {
                r ^= p;
            }
        }
        if r == 0 {
            continue;
        }
        let col = r.trailing_zeros() as usize;
        for (_, p) in pivots.iter_mut() {
            if *p >> col & 1 == 1 {
                *p ^= r;
            }
        }
        pivots.push((col, r));
    }
    (0..ncols)
        .filter(|c| pivots.iter().all(|&(pc, _)| pc != *c))
        .map(|free| {
            let mut v = 1u64 << free;
            for &(pc, p) in &pivots {
                if p >> free & 1 == 1 {
                    v |= 1 << pc;
                }
            }
            v
        })
        .collect()
}

impl Engine for HyperGenus4Char2Engine {
    fn family(&self) -> Family {
        Family::HyperGenus4Char2
    }

    fn field(&self) -> &FiniteField {
        &self.k
    }

    fn parameters(&self) -> serde_json::Value {
        json!({ "t": self.k.format(self.t), "shapes": ["5", "2+3"] })
    }

    fn chunk_count(&self) -> u64 {
        self.quintic_chunks() + self.quadratics.len() as u64
    }

    fn order_spec(&self) -> String {
        "irreducible m = x^5 + m3 x^3 + m2 x^2 + m1 x + m0 with chunk (m3, m2), then m = p2 p3 with chunk p2; g over the trace kernel, largest coefficient code first".into()
    }

    fn run_chunk(&self, chunk: u64, first_only: bool) -> Result<ChunkResult> {
        let k = &self.k;
        let q = k.q();
        let mut out = ChunkResult::default();
        if chunk < self.quintic_chunks() {
            let (m3, m2) = (Fe(chunk / q), Fe(chunk % q));
            for m1 in k.elements() {
                for m0 in k.elements().skip(1) {
                    let m = Poly::new(k, vec![m0, m1, m2, m3, Fe::ZERO, Fe::ONE]);
                    if k.elements().any(|x| m.eval(x).is_zero()) || !m.is_irreducible() {
                        continue;
                    }
                    self.scan(&m, first_only, &mut out);
                    if first_only && !out.keys.is_empty() {
                        return Ok(out);
                    }
                }
            }
        } else {
            let (s, r) = self.quadratics[(chunk - self.quintic_chunks()) as usize];
            let p2 = Poly::new(k, vec![r, s, Fe::ONE]);
            for u in k.elements() {
                for w in k.elements().skip(1) {
                    let p3 = Poly::new(k, vec![w, u, s, Fe::ONE]);
                    if k.elements().any(|x| p3.eval(x).is_zero()) {
                        continue;
                    }
                    self.scan(&p2.mul(&p3), first_only, &mut out);
                    if first_only && !out.keys.is_empty() {
                        return Ok(out);
                    }
                }
            }
        }
        Ok(out)
    }

    fn survivor(&self, key: &[u64]) -> Result<Survivor> {
        let m = self.decode_m(key[0]);
        let g = self.decode_g(key[1]);
        let curve = self.curve(&m, &g)?;
        let detail = json!({
            "t": self.k.format(self.t),
            "g": g.to_string_var("x"),
            "m": m.to_string_var("x"),
        });
        validated(key, Curve::ArtinSchreier(curve), 4, 4, detail)
    }
}
