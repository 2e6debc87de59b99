use std::collections::HashSet;

use serde_json::json;

use super::{digits, validated, ChunkResult, Engine, Family, Survivor};
use crate::algebra::{Fe, FiniteField, Poly};
use crate::curves::{Curve, HyperellipticOdd};
use crate::error::{Error, Result};

const NODES: usize = 8;

/// All y^2 = f with deg f = 8 and lc(f) the canonical nonsquare.
///
/// f is pinned by its values at the first eight field elements, each drawn
/// from the nonsquares; the remaining q - 8 values are checked as the value
/// tuple streams past in odometer order.
pub struct HyperGenus3Engine {
    k: FiniteField,
    nu: Fe,
    nonsquares: Vec<Fe>,
    /// nu W + sum v_i L_i as polynomials: W and the Lagrange basis.
    w: Poly,
    lagrange: Vec<Poly>,
    /// nu W(r) at the other points.
    base: Vec<Fe>,
    /// contrib[i][v][r] = nonsquares[v] L_i(r).
    contrib: Vec<Vec<Vec<Fe>>>,
}

impl HyperGenus3Engine {
    pub fn new(k: &FiniteField) -> Result<Self> {
        if k.is_char2() {
            return Err(Error::EvenCharacteristic);
        }
        if k.q() <= NODES as u64 {
            return Err(Error::InvalidField(format!("exhaustive census needs q > {NODES}")));
        }
        let nu = k.first_nonsquare();
        let nodes: Vec<Fe> = k.elements().take(NODES).collect();
        let rest: Vec<Fe> = k.elements().skip(NODES).collect();
        let nonsquares: Vec<Fe> = k.elements().filter(|&x| k.chi(x) == -1).collect();
        let w = nodes.iter().fold(Poly::one(k), |acc, &n| acc.mul(&Poly::new(k, vec![k.neg(n), Fe::ONE])));
        let lagrange = (0..NODES)
            .map(|i| {
                let pts: Vec<(Fe, Fe)> =
                    nodes.iter().enumerate().map(|(j, &n)| (n, if i == j { Fe::ONE } else { Fe::ZERO })).collect();
                Poly::interpolate(k, &pts)
            })
            .collect::<Result<Vec<_>>>()?;
        let base = rest.iter().map(|&r| k.mul(nu, w.eval(r))).collect();
        let contrib = lagrange
            .iter()
            .map(|l| nonsquares.iter().map(|&v| rest.iter().map(|&r| k.mul(v, l.eval(r))).collect()).collect())
            .collect();
        Ok(HyperGenus3Engine { k: k.clone(), nu, nonsquares, w, lagrange, base, contrib })
    }

    fn radix(&self) -> u64 {
        self.nonsquares.len() as u64
    }

    pub fn polynomial(&self, idx: u64) -> Poly {
        let d = digits(idx, self.radix(), NODES);
        d.iter()
            .zip(&self.lagrange)
            .fold(self.w.scale(self.nu), |acc, (&v, l)| acc.add(&l.scale(self.nonsquares[v as usize])))
    }

    /// Depth-first over the value tuple from `level`, with `part` the partial
    /// sums at the non-node points.
    fn descend(&self, level: usize, prefix: u64, part: &[Fe], first_only: bool, out: &mut ChunkResult) {
        let k = &self.k;
        let n = self.radix();
        if level == NODES - 1 {
            for (v, add) in self.contrib[level].iter().enumerate() {
                out.examined += 1;
                if part.iter().zip(add).all(|(&a, &b)| k.chi(k.add(a, b)) == -1) {
                    let idx = prefix * n + v as u64;
                    if self.polynomial(idx).is_separable() {
                        out.keys.push(vec![idx]);
                        if first_only {
                            return;
                        }
                    } else {
                        out.bump("not_squarefree");
                    }
                }
            }
            return;
        }
        let mut next = vec![Fe::ZERO; part.len()];
        for (v, add) in self.contrib[level].iter().enumerate() {
            for ((slot, &a), &b) in next.iter_mut().zip(part).zip(add) {
                *slot = k.add(a, b);
            }
            self.descend(level + 1, prefix * n + v as u64, &next, first_only, out);
            if first_only && !out.keys.is_empty() {
                return;
            }
        }
    }
}

impl Engine for HyperGenus3Engine {
    fn family(&self) -> Family {
        Family::HyperGenus3
    }

    fn field(&self) -> &FiniteField {
        &self.k
    }

    fn parameters(&self) -> serde_json::Value {
        json!({ "nodes": NODES, "lc": self.k.format(self.nu) })
    }

    fn chunk_count(&self) -> u64 {
        self.radix() * self.radix()
    }

    fn order_spec(&self) -> String {
        "values at the first 8 elements, each over the sorted nonsquares; odometer with the last node fastest; chunk = first two values".into()
    }

    fn run_chunk(&self, chunk: u64, first_only: bool) -> Result<ChunkResult> {
        let k = &self.k;
        let n = self.radix() as usize;
        let (v0, v1) = (chunk as usize / n, chunk as usize % n);
        let part: Vec<Fe> = (0..self.base.len())
            .map(|r| k.add(k.add(self.base[r], self.contrib[0][v0][r]), self.contrib[1][v1][r]))
            .collect();
        let mut out = ChunkResult::default();
        self.descend(2, chunk, &part, first_only, &mut out);
        Ok(out)
    }

    fn survivor(&self, key: &[u64]) -> Result<Survivor> {
        let f = self.polynomial(key[0]);
        let detail = json!({ "f": f.to_string_var("x") });
        validated(key, Curve::Hyperelliptic(HyperellipticOdd::new(f)?), 3, 2, detail)
    }

    fn classes(&self, survivors: &[Survivor]) -> Result<usize> {
        let polys: Vec<Poly> = survivors.iter().map(|s| self.polynomial(s.key[0])).collect();
        pgl2_classes(&self.k, &polys)
    }
}

/// Number of PGL_2 orbits among degree-8 models y^2 = f with f a nonsquare
/// at every rational point. Each orbit member is rescaled to lc(f) = nu. The
/// quadratic twist of each representative is checked to carry 2q + 2 points.
pub fn pgl2_classes(k: &FiniteField, polys: &[Poly]) -> Result<usize> {
    let nu = k.first_nonsquare();
    let mut seen: HashSet<Vec<Fe>> = HashSet::new();
    let mut classes = 0;
    for f in polys {
        if f.deg() != 8 {
            return Err(Error::UnsupportedShape("PGL_2 classes need degree-8 models".into()));
        }
        let normal = normalize(f, nu);
        if seen.contains(normal.coeffs()) {
            continue;
        }
        classes += 1;
        let twist = HyperellipticOdd::new(f.clone())?.twist(nu)?;
        if twist.count(1)? != 2 * k.q() + 2 {
            return Err(Error::InvalidCurve(format!(
                "twist of {} is not maximal over its rational x-line",
                f.to_string_var("x")
            )));
        }
        for m in pgl2(k) {
            let g = normalize(&transform(f, m), nu);
            seen.insert(g.coeffs().to_vec());
        }
    }
    Ok(classes)
}

fn normalize(f: &Poly, nu: Fe) -> Poly {
    let k = f.field();
    f.scale(k.mul(nu, k.inv_nz(f.lc())))
}

/// Matrices [[a, b], [c, d]] up to scalars: c = 0, d = 1 or c = 1.
fn pgl2(k: &FiniteField) -> impl Iterator<Item = [Fe; 4]> + '_ {
    let upper = k.elements().skip(1).flat_map(move |a| k.elements().map(move |b| [a, b, Fe::ZERO, Fe::ONE]));
    let lower = k.elements().flat_map(move |a| {
        k.elements().flat_map(move |b| k.elements().filter(move |&d| k.mul(a, d) != b).map(move |d| [a, b, Fe::ONE, d]))
    });
    upper.chain(lower)
}

/// (cx + d)^8 f((ax + b)/(cx + d)).
fn transform(f: &Poly, [a, b, c, d]: [Fe; 4]) -> Poly {
    let k = f.field();
    let num = Poly::new(k, vec![b, a]);
    let den = Poly::new(k, vec![d, c]);
    let deg = f.deg() as usize;
    let mut num_pow = vec![Poly::one(k)];
    let mut den_pow = vec![Poly::one(k)];
    for i in 1..=deg {
        num_pow.push(num_pow[i - 1].mul(&num));
        den_pow.push(den_pow[i - 1].mul(&den));
    }
    (0..=deg).fold(Poly::zero(k), |acc, i| acc.add(&num_pow[i].mul(&den_pow[deg - i]).scale(f.coeff(i))))
}

#[cfg(test)]
mod tests {
    use super::super::{run, SearchConfig};
    use super::*;

    #[test]
    fn interpolation_roundtrip() {
        let k = FiniteField::prime(11).unwrap();
        let e = HyperGenus3Engine::new(&k).unwrap();
        let idx = 12345;
        let f = e.polynomial(idx);
        assert_eq!(f.lc(), k.first_nonsquare());
        assert_eq!(f.deg(), 8);
        let d = digits(idx, e.radix(), NODES);
        for (i, x) in k.elements().take(NODES).enumerate() {
            assert_eq!(f.eval(x), e.nonsquares[d[i] as usize]);
        }
    }

    #[test]
    fn pgl2_has_expected_order() {
        let k = FiniteField::prime(7).unwrap();
        assert_eq!(pgl2(&k).count(), 7 * 7 * 7 - 7);
    }

    #[test]
    fn f11_census_is_consistent() {
        let k = FiniteField::prime(11).unwrap();
        let e = HyperGenus3Engine::new(&k).unwrap();
        let r = run(&e, &SearchConfig::census()).unwrap();
        assert_eq!(r.candidates, 5u64.pow(8));
        assert!(r.classes <= r.raw_survivors);
        let polys: Vec<Poly> = r.survivors.iter().map(|s| e.polynomial(s.key[0])).collect();
        // every orbit image of a survivor is itself a survivor
        if let Some(f) = polys.first() {
            let nu = k.first_nonsquare();
            let set: HashSet<Vec<Fe>> = polys.iter().map(|p| p.coeffs().to_vec()).collect();
            for m in pgl2(&k).take(50) {
                assert!(set.contains(normalize(&transform(f, m), nu).coeffs()));
            }
        }
    }
}
