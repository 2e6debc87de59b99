//! Explicit finite fields F_{p^n} with caller-supplied presentations.
//!
//! An element is stored as the packed integer `sum c_i p^i` of its coefficient
//! vector `[c_0, .., c_{n-1}]` over the power basis of the generator `a`.  The
//! packed value doubles as the canonical total order on elements, so "the
//! first nonsquare" or "the smallest root" are well defined and reproducible.
//!
//! Small fields (q <= 2^20) additionally carry exp/log/Zech tables that the
//! hot counting loops go through; the coefficient-vector path remains the
//! reference arithmetic and the tables are built from it.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field that gets exp/log tables.
pub const TABLE_LIMIT: u64 = 1 << 20;
/// Largest supported field size.
pub const FIELD_LIMIT: u64 = 1 << 40;

/// A field element: packed coefficient vector in base p.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Backend {
    Prime,
    Table2,
    TableOdd,
    Slow2,
    SlowOdd,
}

struct Tables {
    /// exp[k] = g^k for 0 <= k < 2(q-1).
    exp: Vec<u32>,
    /// log[a] for a != 0.
    log: Vec<u32>,
    /// zech[k] = log(1 + g^k), or NO_LOG when 1 + g^k = 0. Odd extensions only.
    zech: Vec<u32>,
}

const NO_LOG: u32 = u32::MAX;

struct Inner {
    p: u64,
    n: usize,
    q: u64,
    /// Defining polynomial, low to high, monic of degree n (for n = 1 this is x).
    modulus: Vec<u64>,
    /// For p = 2: bitmask of x^n reduced, i.e. the low coefficients of the modulus.
    low_mask: u64,
    pow_p: Vec<u64>,
    /// Absolute trace to F_p of each basis element a^i.
    basis_trace: Vec<u64>,
    trace_mask: u64,
    backend: Backend,
    tables: Option<Tables>,
    minus_one_log: u32,
}

/// A finite field F_q, q = p^n, presented as F_p[a]/(m(a)).
#[derive(Clone)]
pub struct FiniteField(Arc<Inner>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}
impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.n == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{} = F_{}[a]/({:?})", self.0.q, self.0.p, self.0.modulus)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power into (p, n); None if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut m = q;
    let mut n = 0;
    while m.is_multiple_of(p) {
        m /= p;
        n += 1;
    }
    (m == 1).then_some((p, n))
}

fn factor_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---- dense polynomials over F_p (used for construction only) ----

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_inv(a: u64, p: u64) -> u64 {
    fp_pow(a, p - 2, p)
}

fn fp_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * a as u128 % p as u128) as u64;
        }
        a = (a as u128 * a as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let inv = fp_inv(m[dm], p);
    while r.len() > dm && !r.is_empty() {
        let c = r[r.len() - 1] * inv % p;
        let shift = r.len() - 1 - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    fp_rem(&r, m, p)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// x^(p^k) mod m.
fn fp_frob_power(m: &[u64], p: u64, k: usize) -> Vec<u64> {
    let mut x = vec![0, 1];
    x = fp_rem(&x, m, p);
    for _ in 0..k {
        // raise to the p-th power
        let mut base = x.clone();
        let mut res = vec![1u64];
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                res = fp_mulmod(&res, &base, m, p);
            }
            base = fp_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        x = res;
    }
    x
}

/// Rabin irreducibility test for a monic polynomial over F_p (low to high).
pub fn is_irreducible_fp(m: &[u64], p: u64) -> bool {
    let n = m.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    // x^(p^n) == x mod m
    let xn = fp_frob_power(m, p, n);
    if xn != vec![0, 1] {
        return false;
    }
    for r in factor_u64(n as u64) {
        let k = n / r as usize;
        let mut xk = fp_frob_power(m, p, k);
        // x^(p^k) - x
        while xk.len() < 2 {
            xk.push(0);
        }
        xk[1] = (xk[1] + p - 1) % p;
        fp_trim(&mut xk);
        let g = fp_gcd(m, &xk, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree n over F_p, ordering the
/// lower coefficients as a base-p integer.
pub fn smallest_irreducible(p: u64, n: usize) -> Vec<u64> {
    if n == 1 {
        return vec![0, 1];
    }
    let total = p.pow(n as u32);
    for k in 0..total {
        let mut m = Vec::with_capacity(n + 1);
        let mut t = k;
        for _ in 0..n {
            m.push(t % p);
            t /= p;
        }
        m.push(1);
        if m[0] == 0 {
            continue;
        }
        if is_irreducible_fp(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

type FieldCache = Mutex<HashMap<(u64, Vec<u64>), FiniteField>>;

fn field_cache() -> &'static FieldCache {
    static CACHE: OnceLock<FieldCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FiniteField {
    /// Creates F_{p^n}. For n > 1 the defining polynomial (low-to-high,
    /// monic, degree n) is required and must be irreducible.
    pub fn new(p: u64, n: usize, defining_poly: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::CompositeCharacteristic(p));
        }
        if n == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if q > FIELD_LIMIT as u128 {
            return Err(Error::FieldTooLarge(q));
        }
        let modulus: Vec<u64> = match (n, defining_poly) {
            (1, None) => vec![0, 1],
            (1, Some(m)) => {
                let m: Vec<u64> = m.iter().map(|c| c % p).collect();
                if m.len() != 2 || m[1] != 1 {
                    return Err(Error::InvalidField("degree-1 modulus must be monic linear".into()));
                }
                vec![0, 1]
            }
            (_, None) => return Err(Error::InvalidField(format!("a defining polynomial of degree {n} is required"))),
            (_, Some(m)) => {
                let m: Vec<u64> = m.iter().map(|c| c % p).collect();
                if m.len() != n + 1 || m[n] != 1 {
                    return Err(Error::InvalidField(format!("defining polynomial must be monic of degree {n}")));
                }
                if !is_irreducible_fp(&m, p) {
                    return Err(Error::ReduciblePolynomial(p));
                }
                m
            }
        };
        let key = (p, modulus.clone());
        if let Some(f) = field_cache().lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let f = Self::build(p, n, q as u64, modulus);
        if f.0.tables.is_some() {
            field_cache().lock().unwrap().insert(key, f.clone());
        }
        Ok(f)
    }

    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// F_{p^n} with the deterministic smallest irreducible modulus.
    pub fn standard(p: u64, n: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::CompositeCharacteristic(p));
        }
        let m = smallest_irreducible(p, n);
        Self::new(p, n, Some(&m))
    }

    fn build(p: u64, n: usize, q: u64, modulus: Vec<u64>) -> Self {
        let mut pow_p = vec![1u64; n + 1];
        for i in 1..=n {
            pow_p[i] = pow_p[i - 1] * p;
        }
        let low_mask =
            if p == 2 { modulus[..n].iter().enumerate().fold(0u64, |acc, (i, &c)| acc | (c << i)) } else { 0 };
        let backend = if n == 1 {
            Backend::Prime
        } else if p == 2 {
            Backend::Slow2
        } else {
            Backend::SlowOdd
        };
        let mut inner = Inner {
            p,
            n,
            q,
            modulus,
            low_mask,
            pow_p,
            basis_trace: Vec::new(),
            trace_mask: 0,
            backend,
            tables: None,
            minus_one_log: 0,
        };
        // trace of basis elements via the slow path
        let tmp = FiniteField(Arc::new(Inner { tables: None, basis_trace: vec![], ..clone_inner(&inner) }));
        let mut bt = Vec::with_capacity(n);
        for i in 0..n {
            let e = Fe(tmp.0.pow_p[i]);
            bt.push(tmp.trace_slow(e));
        }
        inner.trace_mask = if p == 2 { bt.iter().enumerate().fold(0, |acc, (i, &t)| acc | (t << i)) } else { 0 };
        inner.basis_trace = bt;
        if q <= TABLE_LIMIT {
            let tables = tmp.build_tables();
            inner.minus_one_log = if p == 2 { 0 } else { ((q - 1) / 2) as u32 };
            if n > 1 {
                inner.backend = if p == 2 { Backend::Table2 } else { Backend::TableOdd };
            }
            inner.tables = Some(tables);
        }
        FiniteField(Arc::new(inner))
    }

    fn build_tables(&self) -> Tables {
        let q = self.0.q;
        let order = q - 1;
        let primes = factor_u64(order);
        let mut g = 1u64;
        loop {
            let cand = Fe(g);
            if order == 1 || primes.iter().all(|&r| self.pow(cand, order / r) != Fe::ONE) {
                break;
            }
            g += 1;
        }
        let g = Fe(if order == 1 { 1 } else { g });
        let mut exp = vec![0u32; (2 * order).max(1) as usize];
        let mut log = vec![NO_LOG; q as usize];
        let mut cur = Fe::ONE;
        for k in 0..order {
            exp[k as usize] = cur.0 as u32;
            log[cur.0 as usize] = k as u32;
            cur = self.mul_slow(cur, g);
        }
        for k in order..2 * order {
            exp[k as usize] = exp[(k - order) as usize];
        }
        let mut zech = Vec::new();
        if self.0.p != 2 && self.0.n > 1 {
            zech = vec![NO_LOG; order as usize];
            for k in 0..order {
                let s = self.add_slow(Fe::ONE, Fe(exp[k as usize] as u64));
                zech[k as usize] = if s.is_zero() { NO_LOG } else { log[s.0 as usize] };
            }
        }
        Tables { exp, log, zech }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.0.p
    }
    #[inline]
    pub fn n(&self) -> usize {
        self.0.n
    }
    #[inline]
    pub fn q(&self) -> u64 {
        self.0.q
    }
    /// Defining polynomial, low to high.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }
    pub fn has_tables(&self) -> bool {
        self.0.tables.is_some()
    }
    pub fn is_char2(&self) -> bool {
        self.0.p == 2
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.0.q).map(Fe)
    }

    /// The generator `a` of the presentation; 1 for prime fields.
    pub fn generator(&self) -> Fe {
        if self.0.n == 1 {
            Fe::ONE
        } else {
            Fe(self.0.p)
        }
    }

    /// Reduces an integer into the prime subfield.
    pub fn from_int(&self, v: i64) -> Fe {
        let p = self.0.p as i128;
        Fe((((v as i128) % p + p) % p) as u64)
    }

    pub fn digits(&self, a: Fe) -> Vec<u64> {
        let p = self.0.p;
        let mut v = a.0;
        (0..self.0.n)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u64]) -> Result<Fe> {
        if d.len() > self.0.n {
            return Err(Error::InvalidField(format!(
                "coefficient vector of length {} in a degree-{} field",
                d.len(),
                self.0.n
            )));
        }
        let mut v = 0u64;
        for (i, &c) in d.iter().enumerate() {
            v += (c % self.0.p) * self.0.pow_p[i];
        }
        Ok(Fe(v))
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.0.q
    }

    // ---- arithmetic ----

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match self.0.backend {
            Backend::Prime => {
                let s = a.0 + b.0;
                Fe(if s >= self.0.p { s - self.0.p } else { s })
            }
            Backend::Table2 | Backend::Slow2 => Fe(a.0 ^ b.0),
            Backend::TableOdd => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let t = self.0.tables.as_ref().unwrap();
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let order = (self.0.q - 1) as u32;
                let d = if lb >= la { lb - la } else { lb + order - la };
                let z = t.zech[d as usize];
                if z == NO_LOG {
                    Fe::ZERO
                } else {
                    Fe(t.exp[(la + z) as usize] as u64)
                }
            }
            Backend::SlowOdd => self.add_slow(a, b),
        }
    }

    fn add_slow(&self, a: Fe, b: Fe) -> Fe {
        let p = self.0.p;
        if p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        for i in 0..self.0.n {
            let d = (x % p + y % p) % p;
            out += d * self.0.pow_p[i];
            x /= p;
            y /= p;
        }
        Fe(out)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 {
            return a;
        }
        match self.0.backend {
            Backend::Prime => Fe(self.0.p - a.0),
            Backend::Table2 | Backend::Slow2 => a,
            Backend::TableOdd => {
                let t = self.0.tables.as_ref().unwrap();
                Fe(t.exp[(t.log[a.0 as usize] + self.0.minus_one_log) as usize] as u64)
            }
            Backend::SlowOdd => {
                let p = self.0.p;
                let mut x = a.0;
                let mut out = 0;
                for i in 0..self.0.n {
                    let d = x % p;
                    out += ((p - d) % p) * self.0.pow_p[i];
                    x /= p;
                }
                Fe(out)
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match self.0.backend {
            Backend::Prime => Fe(((a.0 as u128 * b.0 as u128) % self.0.p as u128) as u64),
            Backend::Table2 | Backend::TableOdd => {
                if a.0 == 0 || b.0 == 0 {
                    return Fe::ZERO;
                }
                let t = self.0.tables.as_ref().unwrap();
                Fe(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize] as u64)
            }
            _ => self.mul_slow(a, b),
        }
    }

    /// Reference multiplication on coefficient vectors.
    pub fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        let inner = &self.0;
        if inner.n == 1 {
            return Fe(((a.0 as u128 * b.0 as u128) % inner.p as u128) as u64);
        }
        if inner.p == 2 {
            let n = inner.n;
            let top = 1u64 << n;
            let mut x = a.0;
            let mut y = b.0;
            let mut r = 0u64;
            while y != 0 {
                if y & 1 == 1 {
                    r ^= x;
                }
                y >>= 1;
                x <<= 1;
                if x & top != 0 {
                    x ^= top | inner.low_mask;
                }
            }
            return Fe(r);
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let prod = fp_mulmod(&da, &db, &inner.modulus, inner.p);
        self.from_digits(&prod).expect("reduced product fits")
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        if let Some(t) = &self.0.tables {
            if a.0 == 0 {
                return if e == 0 { Fe::ONE } else { Fe::ZERO };
            }
            let order = self.0.q - 1;
            let l = (t.log[a.0 as usize] as u128 * (e % order) as u128 % order as u128) as usize;
            return Fe(t.exp[l] as u64);
        }
        let mut base = a;
        let mut r = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.0.tables {
            let order = (self.0.q - 1) as u32;
            let l = t.log[a.0 as usize];
            return Ok(Fe(t.exp[((order - l) % order.max(1)) as usize] as u64));
        }
        Ok(self.pow(a, self.0.q - 2))
    }

    /// Inverse of a known-nonzero element.
    #[inline]
    pub fn inv_nz(&self, a: Fe) -> Fe {
        self.inv(a).expect("nonzero")
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Euler criterion; every element is a square in characteristic 2; 0 counts as a square.
    #[inline]
    pub fn is_square(&self, a: Fe) -> bool {
        if a.0 == 0 || self.0.p == 2 {
            return true;
        }
        if let Some(t) = &self.0.tables {
            return t.log[a.0 as usize] & 1 == 0;
        }
        self.pow(a, (self.0.q - 1) / 2) == Fe::ONE
    }

    /// Quadratic character: 1 for nonzero squares, -1 for nonsquares, 0 at 0. Odd q only.
    #[inline]
    pub fn chi(&self, a: Fe) -> i32 {
        if a.0 == 0 {
            0
        } else if self.is_square(a) {
            1
        } else {
            -1
        }
    }

    pub fn sqrt(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Ok(a);
        }
        if self.0.p == 2 {
            return Ok(self.pow(a, self.0.q / 2));
        }
        if let Some(t) = &self.0.tables {
            let l = t.log[a.0 as usize];
            if l & 1 == 1 {
                return Err(Error::NoSquareRoot);
            }
            return Ok(Fe(t.exp[(l / 2) as usize] as u64));
        }
        if !self.is_square(a) {
            return Err(Error::NoSquareRoot);
        }
        // Tonelli-Shanks
        let q = self.0.q;
        let mut s = 0;
        let mut odd = q - 1;
        while odd.is_multiple_of(2) {
            odd /= 2;
            s += 1;
        }
        let z = self.first_nonsquare();
        let mut m = s;
        let mut c = self.pow(z, odd);
        let mut t = self.pow(a, odd);
        let mut r = self.pow(a, odd.div_ceil(2));
        while t != Fe::ONE {
            let mut i = 0;
            let mut tt = t;
            while tt != Fe::ONE {
                tt = self.mul(tt, tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Ok(r)
    }

    /// First nonsquare in canonical order (odd q).
    pub fn first_nonsquare(&self) -> Fe {
        assert!(self.0.p != 2, "no nonsquares in characteristic 2");
        self.elements().find(|&v| !self.is_square(v)).expect("odd field has nonsquares")
    }

    /// Absolute trace to the prime field.
    #[inline]
    pub fn trace(&self, a: Fe) -> u64 {
        if self.0.p == 2 {
            return ((a.0 & self.0.trace_mask).count_ones() & 1) as u64;
        }
        let p = self.0.p;
        let mut x = a.0;
        let mut s = 0u64;
        for i in 0..self.0.n {
            s = (s + (x % p) * self.0.basis_trace[i]) % p;
            x /= p;
        }
        s
    }

    fn trace_slow(&self, a: Fe) -> u64 {
        let mut s = Fe::ZERO;
        let mut c = a;
        for _ in 0..self.0.n {
            s = self.add_slow(s, c);
            let mut r = Fe::ONE;
            for _ in 0..self.0.p {
                r = self.mul_slow(r, c);
            }
            c = r;
        }
        debug_assert!(s.0 < self.0.p);
        s.0
    }

    /// Trace to F_2; errors in odd characteristic.
    pub fn trace_to_f2(&self, a: Fe) -> Result<u8> {
        if self.0.p != 2 {
            return Err(Error::OddCharacteristic);
        }
        Ok(self.trace(a) as u8)
    }

    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.0.p)
    }

    /// Discrete log with respect to the table generator (table fields only).
    #[inline]
    pub fn log(&self, a: Fe) -> Option<u32> {
        let t = self.0.tables.as_ref()?;
        if a.0 == 0 {
            None
        } else {
            Some(t.log[a.0 as usize])
        }
    }

    /// Renders an element as a polynomial in `a`.
    pub fn format(&self, v: Fe) -> String {
        if self.0.n == 1 {
            return v.0.to_string();
        }
        let d = self.digits(v);
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mon,
                _ => format!("{c}*{mon}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn clone_inner(i: &Inner) -> Inner {
    Inner {
        p: i.p,
        n: i.n,
        q: i.q,
        modulus: i.modulus.clone(),
        low_mask: i.low_mask,
        pow_p: i.pow_p.clone(),
        basis_trace: i.basis_trace.clone(),
        trace_mask: i.trace_mask,
        backend: match i.backend {
            Backend::Prime => Backend::Prime,
            _ if i.p == 2 => Backend::Slow2,
            _ => Backend::SlowOdd,
        },
        tables: None,
        minus_one_log: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f32() -> FiniteField {
        FiniteField::new(2, 5, Some(&[1, 0, 1, 0, 0, 1])).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FiniteField::new(6, 1, None).unwrap_err(), Error::CompositeCharacteristic(6));
        assert_eq!(FiniteField::new(3, 2, Some(&[2, 0, 1])).unwrap_err(), Error::ReduciblePolynomial(3));
        assert!(FiniteField::new(3, 2, Some(&[1, 0, 1])).is_ok());
        assert!(FiniteField::new(2, 41, Some(&[1; 42])).is_err());
    }

    #[test]
    fn prime_field_inverse() {
        let f = FiniteField::prime(5).unwrap();
        assert_eq!(f.inv(Fe(2)).unwrap(), Fe(3));
        assert_eq!(f.inv(Fe::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn f32_reduction() {
        let f = f32();
        let a = f.generator();
        // a^5 = a^2 + 1
        assert_eq!(f.pow(a, 5), f.from_digits(&[1, 0, 1]).unwrap());
        assert_eq!(f.mul_slow(f.pow(a, 4), a), Fe(0b101));
    }

    #[test]
    fn f4_sqrt() {
        let f = FiniteField::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let a = f.generator();
        let r = f.sqrt(a).unwrap();
        assert_eq!(r, f.mul(a, a));
        assert_eq!(r, f.add(a, Fe::ONE));
    }

    #[test]
    fn squares() {
        let f5 = FiniteField::prime(5).unwrap();
        assert!(!f5.is_square(Fe(2)));
        let f9 = FiniteField::new(3, 2, Some(&[1, 0, 1])).unwrap();
        assert!(f9.is_square(f9.from_int(-1)));
        let f8 = FiniteField::new(2, 3, Some(&[1, 1, 0, 1])).unwrap();
        assert!(f8.elements().all(|v| f8.is_square(v)));
        for f in [f5, f9] {
            let count = f.elements().filter(|&v| f.is_square(v)).count() as u64;
            assert_eq!(count, f.q().div_ceil(2));
        }
    }

    #[test]
    fn traces() {
        let f = f32();
        assert_eq!(f.trace_to_f2(Fe::ONE).unwrap(), 1);
        let f4 = FiniteField::new(2, 2, Some(&[1, 1, 1])).unwrap();
        assert_eq!(f4.trace_to_f2(f4.generator()).unwrap(), 1);
        let f16 = FiniteField::new(2, 4, Some(&[1, 1, 0, 0, 1])).unwrap();
        assert_eq!(f16.trace_to_f2(Fe::ONE).unwrap(), 0);
        let f5 = FiniteField::prime(5).unwrap();
        assert_eq!(f5.trace_to_f2(Fe::ONE), Err(Error::OddCharacteristic));
    }

    #[test]
    fn table_and_slow_paths_agree() {
        for (p, m) in [(3u64, vec![1u64, 2, 0, 1]), (5, vec![2, 4, 1]), (2, vec![1, 1, 0, 0, 1])] {
            let n = m.len() - 1;
            let f = FiniteField::new(p, n, Some(&m)).unwrap();
            assert!(f.has_tables());
            for a in f.elements() {
                for b in f.elements().step_by(3) {
                    assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                    assert_eq!(f.add(a, b), f.add_slow(a, b));
                }
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                assert_eq!(f.trace(a), f.trace_slow(a));
            }
        }
    }

    #[test]
    fn frobenius_fixes_base_field() {
        let f = FiniteField::new(5, 2, Some(&[2, 4, 1])).unwrap();
        for v in f.elements() {
            assert_eq!(f.pow(v, f.q()), v);
        }
    }

    #[test]
    fn tonelli_shanks_large_field() {
        // F_{3^14} has no tables.
        let f = FiniteField::standard(3, 14).unwrap();
        assert!(!f.has_tables());
        for k in 1..40u64 {
            let v = Fe(k * 7919 % f.q());
            let s = f.mul(v, v);
            let r = f.sqrt(s).unwrap();
            assert_eq!(f.mul(r, r), s);
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(32), Some((2, 5)));
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(59), Some((59, 1)));
    }
}
