//! L-polynomials from point counts, real Weil polynomials and the Weil/Serre
//! bound scans. All arithmetic is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::field::prime_power;
use crate::error::{Error, Result};

/// Integer polynomial, coefficients low to high.
pub type IntPoly = Vec<BigInt>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaReport {
    pub q: u64,
    pub genus: usize,
    pub counts: Vec<u64>,
    /// L(T), low to high, degree 2g.
    #[serde(rename = "L")]
    pub l: Vec<String>,
    /// Monic real Weil polynomial h(x), low to high, degree g.
    #[serde(rename = "h")]
    pub real_weil: Vec<String>,
    pub real_weil_factored: String,
    pub valid: bool,
    /// N_1 .. N_{2g} implied by L.
    pub predicted: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Weil,
    Serre,
}

/// L(T) = sum a_k T^k from N_1 .. N_g via Newton's identities and the
/// functional equation a_{2g-k} = q^{g-k} a_k.
pub fn l_from_counts(q: u64, g: usize, counts: &[u64]) -> Result<IntPoly> {
    if counts.len() < g {
        return Err(Error::NonIntegralResult(format!("{} counts given for genus {g}", counts.len())));
    }
    let qb = BigInt::from(q);
    let power_sums: Vec<BigInt> = (1..=g).map(|i| qb.pow(i as u32) + 1 - BigInt::from(counts[i - 1])).collect();
    let mut e = vec![BigInt::one()];
    for k in 1..=g {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &power_sums[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (quo, rem) = acc.div_rem(&BigInt::from(k));
        if !rem.is_zero() {
            return Err(Error::NonIntegralResult(format!("e_{k} = {acc}/{k} is not an integer")));
        }
        e.push(quo);
    }
    let mut l = vec![BigInt::zero(); 2 * g + 1];
    for k in 0..=g {
        l[k] = if k % 2 == 0 { e[k].clone() } else { -e[k].clone() };
    }
    for k in 0..g {
        l[2 * g - k] = qb.pow((g - k) as u32) * &l[k];
    }
    Ok(l)
}

/// The monic h of degree g with L(T) = T^g h(1/T + qT).
pub fn real_weil_from_l(l: &[BigInt], q: u64, g: usize) -> Result<IntPoly> {
    if l.len() != 2 * g + 1 {
        return Err(Error::NonIntegralResult(format!("L has degree {} not {}", l.len() as isize - 1, 2 * g)));
    }
    let qb = BigInt::from(q);
    let mut h = vec![BigInt::zero(); g + 1];
    h[g] = BigInt::one();
    // coefficient of T^j in sum_k h_k T^{g-k} (1 + q T^2)^k
    for (j, lj) in l.iter().enumerate().take(g + 1) {
        let k0 = g - j;
        let mut acc = lj.clone();
        let mut m = 1;
        while k0 + 2 * m <= g {
            let k = k0 + 2 * m;
            acc -= &h[k] * binomial(k, m) * qb.pow(m as u32);
            m += 1;
        }
        if j == 0 {
            if acc != BigInt::one() {
                return Err(Error::NonIntegralResult("L(0) must be 1".into()));
            }
        } else {
            h[k0] = acc;
        }
    }
    if expand_real_weil(&h, q) != l {
        return Err(Error::NonIntegralResult("L violates the functional equation".into()));
    }
    Ok(h)
}

/// T^g h(1/T + qT).
pub fn expand_real_weil(h: &[BigInt], q: u64) -> IntPoly {
    let g = h.len() - 1;
    let qb = BigInt::from(q);
    let mut l = vec![BigInt::zero(); 2 * g + 1];
    for (k, hk) in h.iter().enumerate() {
        for m in 0..=k {
            l[g - k + 2 * m] += hk * binomial(k, m) * qb.pow(m as u32);
        }
    }
    l
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// N_i = q^i + 1 - S_i with S_i recovered from L by Newton's identities.
pub fn predicted_counts(l: &[BigInt], q: u64, i: usize) -> BigInt {
    let s = power_sums(l, i);
    BigInt::from(q).pow(i as u32) + 1 - &s[i - 1]
}

/// S_1 .. S_n of the inverse roots of L.
fn power_sums(l: &[BigInt], n: usize) -> Vec<BigInt> {
    let e = |k: usize| -> BigInt {
        match l.get(k) {
            Some(a) if k.is_multiple_of(2) => a.clone(),
            Some(a) => -a.clone(),
            None => BigInt::zero(),
        }
    };
    let mut s: Vec<BigInt> = Vec::with_capacity(n);
    for k in 1..=n {
        // k e_k = sum_{i=1}^{k} (-1)^{i-1} e_{k-i} S_i
        let mut acc = BigInt::from(k) * e(k);
        for i in 1..k {
            let term = e(k - i) * &s[i - 1];
            if i % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        s.push(if k % 2 == 1 { acc } else { -acc });
    }
    s
}

/// All roots of h are real and lie in [-2 sqrt q, 2 sqrt q].
pub fn validate_weil(h: &[BigInt], q: u64) -> bool {
    let p = to_rational(h);
    if degree(&p) <= 0 {
        return true;
    }
    let mut s = squarefree(&p);
    let target = degree(&s) as usize;
    let mut at_ends = 0;
    let r = num_integer::Roots::sqrt(&q);
    if r * r == q {
        for end in [-2 * r as i64, 2 * r as i64] {
            let c = BigRational::from_integer(BigInt::from(end));
            if eval(&s, &c).is_zero() {
                s = div_exact(&s, &[-c.clone(), BigRational::one()]);
                at_ends += 1;
            }
        }
    } else {
        let quad =
            vec![BigRational::from_integer(BigInt::from(-4 * q as i64)), BigRational::zero(), BigRational::one()];
        let (quo, rem) = div_rem(&s, &quad);
        if rem.iter().all(|c| c.is_zero()) {
            s = quo;
            at_ends = 2;
        }
    }
    let seq = sturm_sequence(&s);
    let inside = sign_changes(&seq, q, -1) as isize - sign_changes(&seq, q, 1) as isize;
    inside + at_ends == target as isize
}

type RatPoly = Vec<BigRational>;

fn to_rational(h: &[BigInt]) -> RatPoly {
    trim(h.iter().map(|c| BigRational::from_integer(c.clone())).collect())
}

fn trim(mut p: RatPoly) -> RatPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn degree(p: &RatPoly) -> isize {
    p.len() as isize - 1
}

fn eval(p: &RatPoly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &RatPoly) -> RatPoly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect())
}

fn div_rem(a: &[BigRational], b: &[BigRational]) -> (RatPoly, RatPoly) {
    let mut r = a.to_vec();
    let db = b.len() as isize - 1;
    if degree(&r) < db {
        return (Vec::new(), r);
    }
    let mut quo = vec![BigRational::zero(); (degree(&r) - db + 1) as usize];
    let lead = b.last().unwrap().clone();
    while degree(&r) >= db && !r.is_empty() {
        let shift = (degree(&r) - db) as usize;
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &c * bc;
        }
        quo[shift] = c;
        r = trim(r);
    }
    (trim(quo), r)
}

fn div_exact(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    div_rem(a, b).0
}

fn gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = div_rem(&x, &y).1;
        x = y;
        y = r;
    }
    x
}

fn squarefree(p: &RatPoly) -> RatPoly {
    let g = gcd(p, &derivative(p));
    div_exact(p, &g)
}

fn sturm_sequence(p: &RatPoly) -> Vec<RatPoly> {
    let mut seq = vec![p.clone(), derivative(p)];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            return seq;
        }
        let r = div_rem(&seq[n - 2], &seq[n - 1]).1;
        seq.push(r.into_iter().map(|c| -c).collect());
    }
}

/// Sign of p at x = side * 2 sqrt(q), evaluated as A + B sqrt(q).
fn sign_at(p: &RatPoly, q: u64, side: i64) -> i32 {
    let four_q = BigRational::from_integer(BigInt::from(4 * q));
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    // x^k = (2 side)^k q^{k/2}
    let mut even = BigRational::one(); // (4q)^{k/2} for even k
    for (k, c) in p.iter().enumerate() {
        if k % 2 == 0 {
            if k > 0 {
                even = &even * &four_q;
            }
            a += c * &even;
        } else {
            let coef = &even * BigRational::from_integer(BigInt::from(2 * side));
            b += c * coef;
        }
    }
    let sa = sgn(&a);
    let sb = sgn(&b);
    if sb == 0 || sa == sb {
        return if sa == 0 { sb } else { sa };
    }
    if sa == 0 {
        return sb;
    }
    let lhs = &a * &a;
    let rhs = &b * &b * BigRational::from_integer(BigInt::from(q));
    if lhs > rhs {
        sa
    } else if lhs < rhs {
        sb
    } else {
        0
    }
}

fn sgn(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_changes(seq: &[RatPoly], q: u64, side: i64) -> usize {
    let signs: Vec<i32> = seq.iter().map(|p| sign_at(p, q, side)).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Largest prime power q for which a genus-g curve with no points is not
/// excluded by the bound, or None if there is none.
pub fn pointless_q_range(g: u64, bound: Bound) -> Option<u64> {
    let limit = 4 * g * g + 2;
    (2..=limit)
        .filter(|&q| prime_power(q).is_some())
        .filter(|&q| match bound {
            // q + 1 <= 2 g sqrt(q)
            Bound::Weil => (q + 1) * (q + 1) <= 4 * g * g * q,
            // q + 1 <= g floor(2 sqrt(q))
            Bound::Serre => q < g * num_integer::Roots::sqrt(&(4 * q)),
        })
        .max()
}

/// Renders h as a product of integer linear factors times the remainder.
pub fn format_factored(h: &[BigInt]) -> String {
    let mut rest = to_rational(h);
    let mut factors: Vec<(BigInt, usize)> = Vec::new();
    let bound: BigInt = rest.iter().map(|c| c.abs().ceil().to_integer()).max().unwrap_or_default() + 1;
    let limit = bound.to_i64().unwrap_or(i64::MAX).min(1 << 20);
    let mut r = -limit;
    while r <= limit && degree(&rest) > 0 {
        let c = BigRational::from_integer(BigInt::from(r));
        let lin = vec![-c.clone(), BigRational::one()];
        let mut mult = 0;
        while degree(&rest) > 0 && eval(&rest, &c).is_zero() {
            rest = div_exact(&rest, &lin);
            mult += 1;
        }
        if mult > 0 {
            factors.push((BigInt::from(r), mult));
        }
        r += 1;
    }
    // list larger roots first, as in (x - 10)^2 (x - 6)
    factors.sort_by(|a, b| b.0.cmp(&a.0));
    let mut parts: Vec<String> = factors
        .iter()
        .map(|(root, m)| {
            let lin = if root.is_zero() {
                "x".to_string()
            } else if root.is_positive() {
                format!("(x - {root})")
            } else {
                format!("(x + {})", -root)
            };
            if *m > 1 {
                format!("{lin}^{m}")
            } else {
                lin
            }
        })
        .collect();
    if degree(&rest) > 0 {
        let ints: Vec<BigInt> = rest.iter().map(|c| c.to_integer()).collect();
        parts.push(format!("({})", format_int_poly(&ints, "x")));
    } else if parts.is_empty() {
        parts.push("1".into());
    }
    parts.join(" ")
}

pub fn format_int_poly(p: &[BigInt], var: &str) -> String {
    let mut out = String::new();
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        if mono.is_empty() || !mag.is_one() {
            out.push_str(&mag.to_string());
        }
        out.push_str(&mono);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Everything the zeta module derives from N_1 .. N_g.
pub fn zeta_report(q: u64, g: usize, counts: &[u64]) -> Result<ZetaReport> {
    let l = l_from_counts(q, g, counts)?;
    let h = real_weil_from_l(&l, q, g)?;
    let valid = validate_weil(&h, q);
    let predicted = (1..=2 * g).map(|i| predicted_counts(&l, q, i).to_string()).collect();
    Ok(ZetaReport {
        q,
        genus: g,
        counts: counts[..g].to_vec(),
        l: l.iter().map(|c| c.to_string()).collect(),
        real_weil: h.iter().map(|c| c.to_string()).collect(),
        real_weil_factored: format_factored(&h),
        valid,
        predicted,
    })
}

/// Expands a product of integer polynomials.
pub fn product(factors: &[IntPoly]) -> IntPoly {
    let mut acc = vec![BigInt::one()];
    for f in factors {
        let mut next = vec![BigInt::zero(); acc.len() + f.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// Convenience: integer polynomial from small coefficients, low to high.
pub fn int_poly(c: &[i64]) -> IntPoly {
    c.iter().map(|&v| BigInt::from(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(t: i64, q: i64) -> IntPoly {
        int_poly(&[1, -t, q])
    }

    #[test]
    fn elliptic_curve_over_f32() {
        assert_eq!(l_from_counts(32, 1, &[22]).unwrap(), quad(11, 32));
    }

    #[test]
    fn f25_curve() {
        let l = l_from_counts(25, 3, &[0, 540, 15360]).unwrap();
        assert_eq!(l, product(&[quad(10, 25), quad(10, 25), quad(6, 25)]));
        let h = real_weil_from_l(&l, 25, 3).unwrap();
        assert_eq!(h, product(&[int_poly(&[-10, 1]), int_poly(&[-10, 1]), int_poly(&[-6, 1])]));
        assert!(validate_weil(&h, 25));
        assert_eq!(format_factored(&h), "(x - 10)^2 (x - 6)");
        assert_eq!(predicted_counts(&l, 25, 2), BigInt::from(540));
    }

    #[test]
    fn cube_of_elliptic_curve_over_f32() {
        let l = l_from_counts(32, 3, &[0, 854, 31944]).unwrap();
        assert_eq!(l, product(&[quad(11, 32), quad(11, 32), quad(11, 32)]));
        let h = real_weil_from_l(&l, 32, 3).unwrap();
        assert_eq!(format_factored(&h), "(x - 11)^3");
        assert_eq!(predicted_counts(&l, 32, 1), BigInt::from(0));
    }

    #[test]
    fn f27_targets() {
        let l = product(&[quad(10, 27), quad(10, 27), quad(8, 27)]);
        let h = real_weil_from_l(&l, 27, 3).unwrap();
        assert_eq!(format_factored(&h), "(x - 10)^2 (x - 8)");
        assert_eq!(predicted_counts(&l, 27, 2), BigInt::from(628));
    }

    #[test]
    fn weil_validation() {
        assert!(!validate_weil(&int_poly(&[-12, 1]), 25));
        assert!(validate_weil(&int_poly(&[-2, 0, 1]), 2));
        // x^2 - 16x + 62 has roots 8 +- sqrt 2 inside [-10, 10]
        assert!(validate_weil(&product(&[int_poly(&[-10, 1]), int_poly(&[62, -16, 1])]), 25));
        // complex roots
        assert!(!validate_weil(&int_poly(&[1, 0, 1]), 25));
        // root exactly at 2 sqrt q for nonsquare q
        assert!(validate_weil(&int_poly(&[-8, 0, 1]), 2));
        assert!(!validate_weil(&int_poly(&[-9, 0, 1]), 2));
    }

    #[test]
    fn bound_scans() {
        assert_eq!(pointless_q_range(2, Bound::Weil), Some(13));
        assert_eq!(pointless_q_range(3, Bound::Weil), Some(32));
        assert_eq!(pointless_q_range(4, Bound::Serre), Some(59));
        assert_eq!(pointless_q_range(1, Bound::Weil), None);
    }

    #[test]
    fn non_integral_counts_rejected() {
        // S_1 = 1, S_2 = 0 gives e_2 = 1/2
        assert!(matches!(l_from_counts(5, 2, &[5, 26]), Err(Error::NonIntegralResult(_))));
    }
}
