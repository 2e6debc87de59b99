//! Double covers z^2 = f of an elliptic curve, with f in L(k inf) having a
//! double zero at a chosen point Q.
//!
//! Candidates are filtered by two tests. Test 1 discards f if some rational
//! point P has f(P) a nonzero square. Test 2 asks for the divisor shape
//! 2Q + (k - 2) simple non-rational zeros - k inf. Functions passing both are
//! counted exactly over F_{q^i}, which also settles whether points lie over
//! Q or infinity.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::function::local_coordinates;
use super::{rr_basis, DivisorShape, EllipticCurve, EllipticFunction, EllipticPoint};
use crate::algebra::Fe;
use crate::curves::sqrt_count;
use crate::error::{Error, Result};
use crate::zeta::{self, IntPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionRule {
    /// Q ranges over all coset representatives, torsion allowed.
    Include,
    /// Q avoids 2-torsion; a coset without such a point is an error.
    Exclude,
    /// Q avoids 2-torsion where the coset allows it.
    ExcludeWithFallback,
}

#[derive(Clone, Debug)]
pub struct CoverSearch {
    curve: EllipticCurve,
    genus: u32,
    torsion: TorsionRule,
    targets: Vec<IntPoly>,
    depth: u32,
    up_to_automorphism: bool,
}

/// One unit of work: functions whose first nonzero kernel coordinate is at
/// `lead_pos` with value `lead`, and (if any) next coordinate `second`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverTask {
    pub rep: usize,
    pub lead_pos: usize,
    pub lead: Fe,
    pub second: Option<Fe>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverPartial {
    pub examined: u64,
    pub killed_test1: u64,
    pub killed_test2: u64,
    /// (rep index, coefficients on rr_basis(k)) of functions passing both tests.
    pub passed: Vec<(usize, Vec<Fe>)>,
}

impl CoverPartial {
    pub fn merge(&mut self, o: CoverPartial) {
        self.examined += o.examined;
        self.killed_test1 += o.killed_test1;
        self.killed_test2 += o.killed_test2;
        self.passed.extend(o.passed);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverSurvivor {
    pub q_point: EllipticPoint,
    pub function: String,
    pub coefficients: Vec<Fe>,
    pub shape: DivisorShape,
    /// N_1 .. N_depth of the cover.
    pub counts: Vec<u64>,
    pub pointless: bool,
    pub real_weil: Option<String>,
    pub matches_target: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverSearchReport {
    pub curve: String,
    pub points: u64,
    pub genus: u32,
    pub k: u32,
    pub reps: Vec<EllipticPoint>,
    pub examined: u64,
    pub killed_test1: u64,
    pub killed_test2: u64,
    /// Functions passing tests 1 and 2.
    pub passed_tests: usize,
    pub survivors: Vec<CoverSurvivor>,
    /// Functions whose cover has no rational point.
    pub pointless: usize,
    /// Distinct count vectors among pointless covers.
    pub classes: usize,
}

impl CoverSearch {
    pub fn new(curve: EllipticCurve, genus: u32, torsion: TorsionRule) -> Result<Self> {
        if !(3..=4).contains(&genus) {
            return Err(Error::UnsupportedShape(format!("double covers of genus {genus}")));
        }
        Ok(CoverSearch { curve, genus, torsion, targets: Vec::new(), depth: 2, up_to_automorphism: true })
    }

    /// Real Weil polynomials a survivor is compared with.
    pub fn with_targets(mut self, targets: Vec<IntPoly>) -> Self {
        self.targets = targets;
        self
    }

    /// Number of extensions F_{q^i} over which survivors are counted.
    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth.max(1);
        self
    }

    /// Whether Q runs over cosets modulo automorphisms of E (default) or
    /// over all cosets.
    pub fn with_automorphism_reduction(mut self, on: bool) -> Self {
        self.up_to_automorphism = on;
        self
    }

    pub fn curve(&self) -> &EllipticCurve {
        &self.curve
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn torsion(&self) -> TorsionRule {
        self.torsion
    }

    /// Pole budget k: 6 for genus 3, 8 for genus 4.
    pub fn k(&self) -> u32 {
        2 * self.genus
    }

    pub fn reps(&self) -> Result<Vec<EllipticPoint>> {
        let m = if self.genus == 3 { 2 } else { 3 };
        let reps = match self.torsion {
            TorsionRule::Include => self.curve.quotient_reps(m, false)?,
            TorsionRule::Exclude => self.curve.quotient_reps(m, true)?,
            TorsionRule::ExcludeWithFallback => self.curve.quotient_reps_with_fallback(m)?,
        };
        if self.up_to_automorphism {
            self.curve.reduce_reps_by_automorphisms(m, &reps)
        } else {
            Ok(reps)
        }
    }

    /// Functions in L(k inf) with a double zero at q, as a basis of
    /// coefficient vectors on rr_basis(k).
    pub fn kernel(&self, q: EllipticPoint) -> Result<Vec<Vec<Fe>>> {
        let f = self.curve.base();
        let basis = rr_basis(self.k());
        let EllipticPoint::Affine(x0, y0) = q else {
            return Ok(basis
                .iter()
                .enumerate()
                .filter(|(_, m)| m.pole_order() <= self.k() - 2)
                .map(|(i, _)| unit(basis.len(), i))
                .collect());
        };
        let (x, y) = local_coordinates(&self.curve, x0, y0)?;
        let mut rows = vec![vec![Fe::ZERO; basis.len()]; 2];
        for (col, m) in basis.iter().enumerate() {
            let mut s = x.pow(m.i);
            if m.j == 1 {
                s = s.mul(&y);
            }
            rows[0][col] = s.coeff(0);
            rows[1][col] = s.coeff(1);
        }
        Ok(nullspace(f, rows, basis.len()))
    }

    pub fn tasks(&self) -> Result<Vec<CoverTask>> {
        let f = self.curve.base();
        let nu = f.first_nonsquare();
        let mut out = Vec::new();
        for (rep, &q) in self.reps()?.iter().enumerate() {
            let dim = self.kernel(q)?.len();
            for lead_pos in 0..dim {
                for lead in [Fe::ONE, nu] {
                    if lead_pos + 1 < dim {
                        for s in f.elements() {
                            out.push(CoverTask { rep, lead_pos, lead, second: Some(s) });
                        }
                    } else {
                        out.push(CoverTask { rep, lead_pos, lead, second: None });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Runs tests 1 and 2 on every function of one task.
    pub fn run_task(&self, task: &CoverTask) -> Result<CoverPartial> {
        let e = &self.curve;
        let f = e.base();
        let q = self.reps()?[task.rep];
        let kernel = self.kernel(q)?;
        let dim = kernel.len();
        let affine: Vec<(Fe, Fe)> = e
            .points()?
            .into_iter()
            .filter_map(|p| match p {
                EllipticPoint::Affine(x, y) => Some((x, y)),
                EllipticPoint::Infinity => None,
            })
            .collect();
        // vals[j][P]: kernel basis function j at point P
        let vals: Vec<Vec<Fe>> = kernel
            .iter()
            .map(|v| {
                let g = EllipticFunction::new(self.k(), v.clone()).expect("basis length");
                affine.iter().map(|&(x, y)| g.eval(e, x, y)).collect()
            })
            .collect();

        let mut lambda = vec![Fe::ZERO; dim];
        lambda[task.lead_pos] = task.lead;
        let mut fixed = task.lead_pos + 1;
        if let Some(s) = task.second {
            lambda[fixed] = s;
            fixed += 1;
        }
        let free = dim - fixed;
        let qn = f.q();
        let mut part = CoverPartial::default();
        let total = qn.checked_pow(free as u32).ok_or(Error::BudgetExceeded(u64::MAX))?;
        let mut values = vec![Fe::ZERO; affine.len()];
        for idx in 0..total {
            let mut r = idx;
            for slot in lambda[fixed..].iter_mut().rev() {
                *slot = Fe(r % qn);
                r /= qn;
            }
            part.examined += 1;
            let mut killed = false;
            for (pi, slot) in values.iter_mut().enumerate() {
                let mut v = Fe::ZERO;
                for (j, &l) in lambda.iter().enumerate() {
                    if !l.is_zero() {
                        v = f.add(v, f.mul(l, vals[j][pi]));
                    }
                }
                *slot = v;
                if !v.is_zero() && f.is_square(v) {
                    killed = true;
                    break;
                }
            }
            if killed {
                part.killed_test1 += 1;
                continue;
            }
            let coeffs = combine(f, &kernel, &lambda);
            let func = EllipticFunction::new(self.k(), coeffs.clone())?;
            if func.divisor_shape(e, q, self.k())?.shape_ok {
                part.passed.push((task.rep, coeffs));
            } else {
                part.killed_test2 += 1;
            }
        }
        Ok(part)
    }

    /// Counts survivors of both tests and assembles the report.
    pub fn finish(&self, mut part: CoverPartial) -> Result<CoverSearchReport> {
        let e = &self.curve;
        let reps = self.reps()?;
        part.passed.sort();
        let survivors =
            part.passed.iter().map(|(rep, coeffs)| self.survivor(reps[*rep], coeffs)).collect::<Result<Vec<_>>>()?;
        let pointless: Vec<&CoverSurvivor> = survivors.iter().filter(|s| s.pointless).collect();
        let classes: BTreeSet<&Vec<u64>> = pointless.iter().map(|s| &s.counts).collect();
        Ok(CoverSearchReport {
            curve: e.to_string(),
            points: e.order(),
            genus: self.genus,
            k: self.k(),
            reps,
            examined: part.examined,
            killed_test1: part.killed_test1,
            killed_test2: part.killed_test2,
            passed_tests: survivors.len(),
            pointless: pointless.len(),
            classes: classes.len(),
            survivors,
        })
    }

    pub fn run(&self) -> Result<CoverSearchReport> {
        let parts = self.tasks()?.par_iter().map(|t| self.run_task(t)).collect::<Result<Vec<_>>>()?;
        let mut total = CoverPartial::default();
        for p in parts {
            total.merge(p);
        }
        self.finish(total)
    }

    /// Counts and describes the cover z^2 = f for f given on rr_basis(k).
    pub fn survivor(&self, q: EllipticPoint, coeffs: &[Fe]) -> Result<CoverSurvivor> {
        let e = &self.curve;
        let func = EllipticFunction::new(self.k(), coeffs.to_vec())?;
        let shape = func.divisor_shape(e, q, self.k())?;
        let counts = (1..=self.depth).map(|i| cover_count(e, &func, i)).collect::<Result<Vec<_>>>()?;
        let (real_weil, matches_target) = if counts.len() >= self.genus as usize {
            let q_size = e.base().q();
            let g = self.genus as usize;
            match zeta::l_from_counts(q_size, g, &counts).and_then(|l| zeta::real_weil_from_l(&l, q_size, g)) {
                Ok(h) => (Some(zeta::format_factored(&h)), Some(self.targets.contains(&h))),
                Err(_) => (None, Some(false)),
            }
        } else {
            (None, None)
        };
        let (a, b) = func.parts(e);
        Ok(CoverSurvivor {
            q_point: q,
            function: format!("z^2 = {} + y({})", a.to_string_var("x"), b.to_string_var("x")),
            coefficients: coeffs.to_vec(),
            shape,
            pointless: counts[0] == 0,
            counts,
            real_weil,
            matches_target,
        })
    }
}

/// Points on the smooth model of z^2 = f over F_{q^i}.
pub fn cover_count(e: &EllipticCurve, f: &EllipticFunction, i: u32) -> Result<u64> {
    let (big, emb) = e.base_change(i)?;
    let g = f.map(&emb);
    let k = big.base().clone();
    let over = |x: Fe, y: Fe| -> Result<u64> {
        let v = g.eval(&big, x, y);
        if !v.is_zero() {
            return Ok(sqrt_count(&k, v));
        }
        let (ord, lead) = g.local_leading(&big, EllipticPoint::Affine(x, y))?;
        Ok(if ord % 2 == 1 { 1 } else { sqrt_count(&k, lead) })
    };
    let mut total = 0;
    for x in k.elements() {
        let v = big.rhs(x);
        if v.is_zero() {
            total += over(x, Fe::ZERO)?;
        } else if k.is_square(v) {
            let y = k.sqrt(v)?;
            total += over(x, y)? + over(x, k.neg(y))?;
        }
    }
    // at infinity f ~ c t^(-pole) with t = x/y
    total += if g.pole_order() % 2 == 1 { 1 } else { sqrt_count(&k, g.top_coefficient()) };
    Ok(total)
}

fn unit(n: usize, i: usize) -> Vec<Fe> {
    let mut v = vec![Fe::ZERO; n];
    v[i] = Fe::ONE;
    v
}

fn combine(f: &crate::algebra::FiniteField, kernel: &[Vec<Fe>], lambda: &[Fe]) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; kernel[0].len()];
    for (v, &l) in kernel.iter().zip(lambda) {
        if l.is_zero() {
            continue;
        }
        for (o, &c) in out.iter_mut().zip(v) {
            *o = f.add(*o, f.mul(l, c));
        }
    }
    out
}

/// Basis of the right kernel, one vector per free column in increasing order.
fn nullspace(f: &crate::algebra::FiniteField, mut rows: Vec<Vec<Fe>>, ncols: usize) -> Vec<Vec<Fe>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = f.inv_nz(rows[r][c]);
        for v in rows[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let m = row[c];
                for (v, &pv) in row.iter_mut().zip(&pivot) {
                    *v = f.sub(*v, f.mul(m, pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = unit(ncols, free);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(rows[row][free]);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteField;

    #[test]
    fn kernel_functions_vanish_twice() {
        let k = FiniteField::prime(7).unwrap();
        let e = EllipticCurve::from_ints(&k, 0, 1, 3).unwrap();
        let search = CoverSearch::new(e.clone(), 3, TorsionRule::Exclude).unwrap();
        for q in search.reps().unwrap() {
            let ker = search.kernel(q).unwrap();
            assert_eq!(ker.len(), 4);
            for v in ker {
                let f = EllipticFunction::new(6, v).unwrap();
                assert!(f.vanishing_order(&e, q).unwrap() >= 2);
            }
        }
    }

    #[test]
    fn cover_counts_sum_with_twist() {
        // z^2 = f and z^2 = nu f together see each point with f(P) != 0 twice
        let k = FiniteField::prime(11).unwrap();
        let e = EllipticCurve::from_ints(&k, 0, 1, 1).unwrap();
        let f = EllipticFunction::new(6, [1, 2, 0, 1, 3, 0].iter().map(|&c| k.from_int(c)).collect()).unwrap();
        let nu = k.first_nonsquare();
        let g = EllipticFunction::new(6, f.coeffs().iter().map(|&c| k.mul(c, nu)).collect()).unwrap();
        let a = cover_count(&e, &f, 1).unwrap();
        let b = cover_count(&e, &g, 1).unwrap();
        assert_eq!(a + b, 2 * e.order());
    }
}
