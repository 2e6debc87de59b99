use std::fmt;

use super::{extension, sum_over_field};
use crate::algebra::{embed, Fe, FiniteField, MPoly, Poly};
use crate::error::{Error, Result};

/// Above this size counting goes line by line through root counting.
const CHART_SCAN_LIMIT: u64 = 256;

/// A plane quartic F(x, y, z) = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneQuartic {
    f: MPoly,
}

impl PlaneQuartic {
    /// Accepts a homogeneous quartic. Smoothness is checked separately.
    pub fn new(f: MPoly) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !f.is_homogeneous(4) {
            return Err(Error::InvalidCurve("not a homogeneous quartic".into()));
        }
        Ok(PlaneQuartic { f })
    }

    /// Homogenizes an affine equation in x, y of degree at most 4.
    pub fn from_affine(f: &MPoly) -> Result<Self> {
        if !f.uses_only(&[0, 1]) {
            return Err(Error::InvalidCurve("affine equation must only use x and y".into()));
        }
        let mut h = MPoly::zero(f.field());
        for (e, c) in f.terms() {
            let d = e[0] + e[1];
            if d > 4 {
                return Err(Error::InvalidCurve("affine equation has degree above 4".into()));
            }
            h.add_term([e[0], e[1], 4 - d], *c);
        }
        Self::new(h)
    }

    pub fn base(&self) -> &FiniteField {
        self.f.field()
    }

    pub fn equation(&self) -> &MPoly {
        &self.f
    }

    /// Diagonal form a x^4 + b y^4 + c z^4 + d x^2y^2 + e x^2z^2 + f y^2z^2.
    pub fn diagonal(field: &FiniteField, c: [Fe; 6]) -> Result<Self> {
        let exps = [[4, 0, 0], [0, 4, 0], [0, 0, 4], [2, 2, 0], [2, 0, 2], [0, 2, 2]];
        let mut f = MPoly::zero(field);
        for (e, v) in exps.iter().zip(c) {
            f.add_term(*e, v);
        }
        Self::new(f)
    }

    /// (x^2+xz)^2 + beta (x^2+xz)(y^2+yz) + (y^2+yz)^2 + gamma z^4.
    pub fn klein_twist(field: &FiniteField, beta: Fe, gamma: Fe) -> Result<Self> {
        let x = MPoly::var(field, 0);
        let y = MPoly::var(field, 1);
        let z = MPoly::var(field, 2);
        let u = x.mul(&x).add(&x.mul(&z));
        let v = y.mul(&y).add(&y.mul(&z));
        let f = u.mul(&u).add(&u.mul(&v).scale(beta)).add(&v.mul(&v)).add(&z.pow(4).scale(gamma));
        Self::new(f)
    }

    pub fn count(&self, i: u32) -> Result<u64> {
        let (big, _) = extension(self.base(), i)?;
        if big.q() <= CHART_SCAN_LIMIT {
            self.count_chart(i)
        } else {
            self.count_lines(i)
        }
    }

    /// Counts by evaluating every point of the affine chart z = 1.
    pub fn count_chart(&self, i: u32) -> Result<u64> {
        let (big, e) = extension(self.base(), i)?;
        let f = self.f.map(&big, |c| e.apply(c));
        let affine = sum_over_field(&big, |x| {
            let row = f.restrict(1, [x, Fe::ZERO, Fe::ONE]);
            big.elements().filter(|&y| row.eval(y).is_zero()).count() as u64
        });
        Ok(affine + Self::count_at_infinity(&f))
    }

    /// Counts each vertical line x = x0 of the chart z = 1 through the number
    /// of distinct roots of F(x0, y, 1).
    pub fn count_lines(&self, i: u32) -> Result<u64> {
        let (big, e) = extension(self.base(), i)?;
        let f = self.f.map(&big, |c| e.apply(c));
        let affine = sum_over_field(&big, |x| f.restrict(1, [x, Fe::ZERO, Fe::ONE]).count_distinct_roots() as u64);
        Ok(affine + Self::count_at_infinity(&f))
    }

    fn count_at_infinity(f: &MPoly) -> u64 {
        let on_line = f.restrict(0, [Fe::ZERO, Fe::ONE, Fe::ZERO]).count_distinct_roots() as u64;
        let corner = f.eval([Fe::ONE, Fe::ZERO, Fe::ZERO]).is_zero() as u64;
        on_line + corner
    }

    /// True iff F and its partials have no common zero over the algebraic closure.
    pub fn is_smooth(&self) -> Result<bool> {
        let grad: Vec<MPoly> = (0..3).map(|i| self.f.partial(i)).collect();
        if grad.iter().all(|g| g.is_zero()) {
            return Ok(false);
        }
        // Work over a field with at least 5 elements so that some combination
        // of the partials shares no component with F.
        let base = self.base();
        let mut m = 1;
        while base.q().pow(m as u32) < 5 {
            m += 1;
        }
        let (k, e) = embed(base, m)?;
        let f = self.f.map(&k, |c| e.apply(c));
        let grad: Vec<MPoly> = grad.iter().map(|g| g.map(&k, |c| e.apply(c))).collect();
        let system: Vec<&MPoly> = std::iter::once(&f).chain(grad.iter()).collect();

        if system.iter().all(|g| g.eval([Fe::ONE, Fe::ZERO, Fe::ZERO]).is_zero()) {
            return Ok(false);
        }
        // Points (x : 1 : 0).
        let line: Vec<Poly> = system.iter().map(|g| g.restrict(0, [Fe::ZERO, Fe::ONE, Fe::ZERO])).collect();
        if common_root_exists(&line)? {
            return Ok(false);
        }
        // Affine chart z = 1, eliminating y.
        let chart: Vec<Vec<Poly>> = system.iter().map(|g| dehomogenize(g)).collect();
        let Some(res) = eliminating_resultant(&k, &chart)? else {
            return Ok(false);
        };
        if res.deg() <= 0 {
            return Ok(true);
        }
        for (d, part) in res.squarefree_part().distinct_degree() {
            if d > 6 {
                // a singular point of a plane quartic has degree at most 6
                continue;
            }
            let (big, e2) = embed(&k, d)?;
            let chart_big: Vec<Vec<Poly>> =
                chart.iter().map(|rows| rows.iter().map(|r| e2.apply_poly(r)).collect()).collect();
            for x0 in e2.apply_poly(&part).roots() {
                let fibre: Vec<Poly> =
                    chart_big.iter().map(|rows| Poly::new(&big, rows.iter().map(|r| r.eval(x0)).collect())).collect();
                if common_root_exists(&fibre)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Whether the polynomials share a root over the algebraic closure; all-zero
/// input counts as sharing every root.
fn common_root_exists(polys: &[Poly]) -> Result<bool> {
    let mut g: Option<Poly> = None;
    for p in polys.iter().filter(|p| !p.is_zero()) {
        g = Some(match g {
            None => p.monic(),
            Some(h) => h.gcd(p)?,
        });
    }
    Ok(match g {
        None => true,
        Some(h) => h.deg() >= 1,
    })
}

/// F(x, y, 1) as coefficients c_j(x) of y^j.
fn dehomogenize(f: &MPoly) -> Vec<Poly> {
    let k = f.field();
    let mut rows: Vec<Vec<Fe>> = vec![vec![Fe::ZERO; 5]; 5];
    for (e, c) in f.terms() {
        let slot = &mut rows[e[1] as usize][e[0] as usize];
        *slot = k.add(*slot, *c);
    }
    let mut out: Vec<Poly> = rows.into_iter().map(|r| Poly::new(k, r)).collect();
    while out.last().is_some_and(|p| p.is_zero()) {
        out.pop();
    }
    out
}

/// Res_y(F, l . grad F) for the first projective l giving a nonzero result.
/// None means every choice vanishes identically, so F and all partials share
/// a component.
fn eliminating_resultant(k: &FiniteField, chart: &[Vec<Poly>]) -> Result<Option<Poly>> {
    let f = &chart[0];
    for l in projective_points(k) {
        let mut comb: Vec<Poly> = Vec::new();
        for (c, g) in l.iter().zip(&chart[1..]) {
            for (j, row) in g.iter().enumerate() {
                if comb.len() <= j {
                    comb.push(Poly::zero(k));
                }
                comb[j] = comb[j].add(&row.scale(*c));
            }
        }
        while comb.last().is_some_and(|p| p.is_zero()) {
            comb.pop();
        }
        if comb.is_empty() {
            continue;
        }
        let r = resultant_y(f, &comb);
        if !r.is_zero() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

fn projective_points(k: &FiniteField) -> impl Iterator<Item = [Fe; 3]> + '_ {
    let q = k.q();
    let one = Fe::ONE;
    let a = (0..q).flat_map(move |u| (0..q).map(move |v| [one, Fe(u), Fe(v)]));
    let b = (0..q).map(move |v| [Fe::ZERO, one, Fe(v)]);
    a.chain(b).chain(std::iter::once([Fe::ZERO, Fe::ZERO, one]))
}

/// Resultant in y of two polynomials given by their y-coefficients.
fn resultant_y(a: &[Poly], b: &[Poly]) -> Poly {
    let k = a[0].field().clone();
    let (m, n) = (a.len() - 1, b.len() - 1);
    if m == 0 {
        return a[0].clone();
    }
    if n == 0 {
        return b[0].clone();
    }
    let size = m + n;
    let mut mat = vec![vec![Poly::zero(&k); size]; size];
    for r in 0..n {
        for (j, c) in a.iter().rev().enumerate() {
            mat[r][r + j] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            mat[n + r][r + j] = c.clone();
        }
    }
    determinant(mat)
}

/// Fraction-free Gaussian elimination over F[x].
fn determinant(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    let k = m[0][0].field().clone();
    let mut negate = false;
    let mut prev = Poly::one(&k);
    for c in 0..n - 1 {
        if m[c][c].is_zero() {
            match (c + 1..n).find(|&r| !m[r][c].is_zero()) {
                Some(r) => {
                    m.swap(c, r);
                    negate = !negate;
                }
                None => return Poly::zero(&k),
            }
        }
        for r in c + 1..n {
            for j in c + 1..n {
                let t = m[c][c].mul(&m[r][j]).sub(&m[r][c].mul(&m[c][j]));
                m[r][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[c][c].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

impl fmt::Display for PlaneQuartic {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{} = 0", self.f.format(["x", "y", "z"]))
    }
}
