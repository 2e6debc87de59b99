//! Densities of places with a rational point above them, and Monte Carlo
//! checks of the resulting pointlessness heuristic.
//!
//! A degree-d cover with Galois group G acting on d sheets has a rational
//! point above a place exactly when the Frobenius class fixes a sheet, so the
//! density is the fraction of elements of G with a fixed point.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Pow, ToPrimitive, Zero};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::algebra::{Fe, FiniteField, Poly};
use crate::curves::{HyperellipticOdd, PlaneQuartic};
use crate::error::{Error, Result};
use crate::search::{Family, Klein4OddEngine};

/// Largest group enumerated element by element.
pub const GROUP_LIMIT: usize = 1_000_000;

/// Permutation of {0, .., d-1} in image form.
pub type Perm = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityProblem {
    degree: usize,
    generators: Vec<Perm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityResult {
    pub degree: usize,
    pub group_order: u64,
    #[serde(serialize_with = "ratio_str")]
    pub delta: Ratio<u64>,
    #[serde(serialize_with = "ratio_str")]
    pub lower_bound: Ratio<u64>,
    #[serde(serialize_with = "ratio_str")]
    pub upper_bound: Ratio<u64>,
    pub is_galois: bool,
}

fn ratio_str<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl DensityProblem {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        for g in &generators {
            if g.len() != degree {
                return Err(Error::InvalidPermutation(format!("{g:?} does not act on {degree} points")));
            }
            let mut seen = vec![false; degree];
            for &i in g {
                match seen.get_mut(i as usize) {
                    Some(s) if !*s => *s = true,
                    _ => return Err(Error::InvalidPermutation(format!("{g:?} is not a bijection"))),
                }
            }
        }
        let mut reached = vec![false; degree];
        reached[0] = true;
        let mut queue = VecDeque::from([0u32]);
        while let Some(i) = queue.pop_front() {
            for g in &generators {
                let j = g[i as usize];
                if !reached[j as usize] {
                    reached[j as usize] = true;
                    queue.push_back(j);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(Error::NotTransitive);
        }
        Ok(DensityProblem { degree, generators })
    }

    /// Parses 1-based cycle notation, generators separated by commas:
    /// "(1 2 3), (1 2)(3 4)". An empty cycle list is the identity.
    pub fn parse(degree: usize, src: &str) -> Result<Self> {
        let mut gens = Vec::new();
        for part in src.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            gens.push(parse_cycles(degree, part)?);
        }
        Self::new(degree, gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Closure of the generators, identity first.
    pub fn elements(&self) -> Result<Vec<Perm>> {
        let id: Perm = (0..self.degree as u32).collect();
        let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let next: Perm = p.iter().map(|&i| g[i as usize]).collect();
                if seen.insert(next.clone()) {
                    if seen.len() > GROUP_LIMIT {
                        return Err(Error::GroupTooLarge(GROUP_LIMIT));
                    }
                    out.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Ok(out)
    }

    pub fn density(&self) -> Result<DensityResult> {
        let elements = self.elements()?;
        let order = elements.len() as u64;
        let fixing = elements.iter().filter(|p| p.iter().enumerate().any(|(i, &j)| i as u32 == j)).count() as u64;
        let d = self.degree as u64;
        Ok(DensityResult {
            degree: self.degree,
            group_order: order,
            delta: Ratio::new(fixing, order),
            lower_bound: Ratio::new(1, d),
            upper_bound: Ratio::new(order - (d - 1), order),
            is_galois: order == d,
        })
    }
}

fn parse_cycles(degree: usize, src: &str) -> Result<Perm> {
    let mut perm: Perm = (0..degree as u32).collect();
    let bad = |m: &str| Error::InvalidPermutation(format!("{src}: {m}"));
    let mut rest = src.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
        let end = body.find(')').ok_or_else(|| bad("unclosed cycle"))?;
        let points = body[..end]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| match s.parse::<usize>() {
                Ok(v) if (1..=degree).contains(&v) => Ok(v as u32 - 1),
                _ => Err(bad(&format!("point {s} outside 1..{degree}"))),
            })
            .collect::<Result<Vec<u32>>>()?;
        let mut cycle: Perm = (0..degree as u32).collect();
        for (i, &p) in points.iter().enumerate() {
            cycle[p as usize] = points[(i + 1) % points.len()];
        }
        if points.iter().collect::<HashSet<_>>().len() != points.len() {
            return Err(bad("repeated point in a cycle"));
        }
        // cycles compose left to right
        perm = perm.iter().map(|&i| cycle[i as usize]).collect();
        rest = body[end + 1..].trim_start();
    }
    Ok(perm)
}

/// (1 - delta)^points, the heuristic chance that no rational place of the
/// base has a rational point above it.
pub fn heuristic_pointless_probability(delta: &BigRational, points: u64) -> Result<BigRational> {
    if delta < &BigRational::zero() || delta > &BigRational::one() {
        return Err(Error::InvalidPermutation(format!("density {delta} outside [0, 1]")));
    }
    Ok(Pow::pow(BigRational::one() - delta, points))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub family: Family,
    pub q: u64,
    pub samples: u64,
    pub seed: u64,
    pub pointless: u64,
    /// Draws discarded as invalid before a valid sample was found.
    pub rejected: u64,
    pub observed_rate: f64,
    pub wilson_interval: (f64, f64),
    /// The heuristic as an exact expression and its value.
    pub heuristic: String,
    pub heuristic_rate: f64,
}

/// Sub-streams; fixed so reports do not depend on the thread count.
const STREAMS: u64 = 16;

/// Samples uniformly from a family's valid parameters and reports the
/// fraction of pointless curves against (3/4)^(q+1): each family is a
/// Klein-group cover of degree 4 over a genus-0 curve with q + 1 points.
pub fn montecarlo_pointless_rate(family: Family, k: &FiniteField, samples: u64, seed: u64) -> Result<MonteCarloReport> {
    match family {
        Family::Klein4HyperOdd | Family::DiagonalQuartic | Family::Fiberproduct => {}
        other => return Err(Error::UnknownFamily(other.name().to_string())),
    }
    if k.is_char2() {
        return Err(Error::EvenCharacteristic);
    }
    if samples == 0 {
        return Err(Error::InvalidField("samples must be positive".into()));
    }
    let mut master = SplitMix64::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..STREAMS).map(|_| master.next_u64()).collect();
    let parts = seeds
        .par_iter()
        .enumerate()
        .map(|(s, &sub)| {
            let n = samples / STREAMS + u64::from((s as u64) < samples % STREAMS);
            let mut rng = SplitMix64::seed_from_u64(sub);
            let mut pointless = 0u64;
            let mut rejected = 0u64;
            for _ in 0..n {
                loop {
                    match sample(family, k, &mut rng)? {
                        Some(hit) => {
                            pointless += u64::from(hit);
                            break;
                        }
                        None => rejected += 1,
                    }
                }
            }
            Ok((pointless, rejected))
        })
        .collect::<Result<Vec<_>>>()?;
    let pointless: u64 = parts.iter().map(|p| p.0).sum();
    let rejected: u64 = parts.iter().map(|p| p.1).sum();
    let exponent = k.q() + 1;
    let heuristic = heuristic_pointless_probability(&BigRational::new(BigInt::from(1), BigInt::from(4)), exponent)?;
    Ok(MonteCarloReport {
        family,
        q: k.q(),
        samples,
        seed,
        pointless,
        rejected,
        observed_rate: pointless as f64 / samples as f64,
        wilson_interval: wilson(pointless, samples),
        heuristic: format!("(3/4)^{exponent}"),
        heuristic_rate: heuristic.to_f64().unwrap_or(0.0),
    })
}

/// 95% Wilson score interval.
pub fn wilson(successes: u64, trials: u64) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + Z * Z / n;
    let centre = (p + Z * Z / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + Z * Z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn uniform(rng: &mut SplitMix64, k: &FiniteField) -> Fe {
    Fe(((rng.next_u64() as u128 * k.q() as u128) >> 64) as u64)
}

fn nonzero(rng: &mut SplitMix64, k: &FiniteField) -> Fe {
    Fe(1 + ((rng.next_u64() as u128 * (k.q() - 1) as u128) >> 64) as u64)
}

/// One draw: Some(pointless?) for a valid curve, None for a rejected draw.
fn sample(family: Family, k: &FiniteField, rng: &mut SplitMix64) -> Result<Option<bool>> {
    match family {
        Family::Klein4HyperOdd => {
            let n = nonzero(rng, k);
            let mut c = [Fe::ZERO; 5];
            for slot in c.iter_mut().take(4) {
                *slot = uniform(rng, k);
            }
            c[4] = nonzero(rng, k);
            let f = Poly::new(k, c.to_vec());
            let branch = Poly::new(k, vec![k.neg(k.mul(k.from_int(4), n)), Fe::ZERO, Fe::ONE]);
            if !f.is_separable() || f.gcd(&branch)?.deg() > 0 {
                return Ok(None);
            }
            let model = Klein4OddEngine::new(k, n)?.model(&c);
            Ok(Some(HyperellipticOdd::new(model)?.count(1)? == 0))
        }
        Family::DiagonalQuartic => {
            let c: [Fe; 6] = std::array::from_fn(|_| uniform(rng, k));
            let curve = match PlaneQuartic::diagonal(k, c) {
                Ok(curve) => curve,
                Err(_) => return Ok(None),
            };
            if !curve.is_smooth()? {
                return Ok(None);
            }
            Ok(Some(curve.count(1)? == 0))
        }
        Family::Fiberproduct => {
            let cubic = |rng: &mut SplitMix64| {
                let mut c: Vec<Fe> = (0..3).map(|_| uniform(rng, k)).collect();
                c.push(nonzero(rng, k));
                Poly::new(k, c)
            };
            let f = cubic(rng);
            let g = cubic(rng);
            match crate::curves::FiberProduct::new(f, g) {
                Ok(c) => Ok(Some(c.count(1)? == 0)),
                Err(_) => Ok(None),
            }
        }
        other => Err(Error::UnknownFamily(other.name().to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn symmetric_group_on_three_points() {
        let r = DensityProblem::parse(3, "(1 2 3), (1 2)").unwrap().density().unwrap();
        assert_eq!(r.group_order, 6);
        assert_eq!(r.delta, Ratio::new(2, 3));
        assert!(!r.is_galois);
    }

    #[test]
    fn dihedral_group_on_four_points() {
        let p = DensityProblem::parse(4, "(1 2 3 4), (1 3)").unwrap();
        let r = p.density().unwrap();
        assert_eq!(r.group_order, 8);
        assert_eq!(r.delta, Ratio::new(3, 8));
    }

    #[test]
    fn regular_klein_group() {
        let r = DensityProblem::parse(4, "(1 2)(3 4), (1 3)(2 4)").unwrap().density().unwrap();
        assert_eq!(r.delta, Ratio::new(1, 4));
        assert!(r.is_galois);
    }

    #[test]
    fn rejects_intransitive_and_malformed() {
        assert_eq!(DensityProblem::parse(4, "(1 2), (3 4)"), Err(Error::NotTransitive));
        assert!(matches!(DensityProblem::parse(3, "(1 4)"), Err(Error::InvalidPermutation(_))));
        assert!(matches!(DensityProblem::parse(3, "(1 2"), Err(Error::InvalidPermutation(_))));
        assert!(matches!(DensityProblem::new(3, vec![vec![0, 0, 1]]), Err(Error::InvalidPermutation(_))));
    }

    #[test]
    fn large_group_is_refused() {
        let gens = "(1 2), (1 2 3 4 5 6 7 8 9 10)";
        assert_eq!(DensityProblem::parse(10, gens).unwrap().density(), Err(Error::GroupTooLarge(GROUP_LIMIT)));
    }

    #[test]
    fn heuristic_values() {
        assert_eq!(heuristic_pointless_probability(&rat(1, 2), 6).unwrap(), rat(1, 64));
        assert_eq!(heuristic_pointless_probability(&rat(1, 4), 6).unwrap(), rat(729, 4096));
        assert_eq!(heuristic_pointless_probability(&rat(2, 7), 0).unwrap(), rat(1, 1));
        assert!(heuristic_pointless_probability(&rat(3, 2), 1).is_err());
    }

    #[test]
    fn montecarlo_is_reproducible() {
        let k = FiniteField::prime(5).unwrap();
        let a = montecarlo_pointless_rate(Family::Klein4HyperOdd, &k, 2000, 7).unwrap();
        let b = montecarlo_pointless_rate(Family::Klein4HyperOdd, &k, 2000, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.pointless > 0);
        assert!(a.wilson_interval.0 <= a.observed_rate && a.observed_rate <= a.wilson_interval.1);
        let k2 = FiniteField::prime(2).unwrap();
        assert_eq!(montecarlo_pointless_rate(Family::DiagonalQuartic, &k2, 10, 1), Err(Error::EvenCharacteristic));
        assert!(matches!(montecarlo_pointless_rate(Family::HyperGenus3, &k, 10, 1), Err(Error::UnknownFamily(_))));
    }
}
