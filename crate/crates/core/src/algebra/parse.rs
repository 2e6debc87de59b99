//! Field constants and polynomial expressions.
//!
//! Grammar (whitespace ignored, juxtaposition multiplies):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'] factor)*
//! factor := atom ['^' integer]
//! atom   := integer | 'a' | variable | '(' expr ')' | '[' integer (',' integer)* ']'
//! ```
//!
//! `a` is the generator of the field presentation and `[c0,c1,..]` is a
//! coefficient vector in the power basis.

use super::field::{Fe, FiniteField};
use super::multipoly::MPoly;
use super::poly::Poly;
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a FiniteField,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: 1, column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match s.parse::<u64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("integer too large")
            }
        }
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = MPoly::zero(self.field);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(c) if c.is_ascii_alphanumeric() || c == b'(' || c == b'[' => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let e = self.integer()?;
            if base.uses_only(&[]) {
                let c = base.coeff([0, 0, 0]);
                return Ok(MPoly::constant(self.field, self.field.pow(c, e)));
            }
            if e > 4096 {
                self.pos = at;
                return self.err("exponent too large");
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly> {
        let f = self.field;
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                let mut digits = Vec::new();
                loop {
                    let d = self.integer()?;
                    if d >= f.p() {
                        return self.err(format!("digit {d} not below characteristic {}", f.p()));
                    }
                    digits.push(d);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return self.err("expected ',' or ']'"),
                    }
                }
                if digits.len() > f.n() {
                    return self.err(format!("vector longer than field degree {}", f.n()));
                }
                Ok(MPoly::constant(f, f.from_digits(&digits)?))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(MPoly::constant(f, f.from_int((v % f.p()) as i64)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = (c as char).to_string();
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    self.pos += 1;
                    return Ok(MPoly::var(f, i));
                }
                if c == b'a' {
                    if f.n() == 1 {
                        return self.err("generator 'a' used over a prime field");
                    }
                    self.pos += 1;
                    return Ok(MPoly::constant(f, f.generator()));
                }
                self.err(format!("unknown symbol '{name}'"))
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
        }
    }
}

/// Parses an expression in up to three single-letter variables.
pub fn parse_mpoly(field: &FiniteField, vars: &[&str], src: &str) -> Result<MPoly> {
    assert!(vars.len() <= 3);
    let mut p = Parser { src: src.as_bytes(), pos: 0, field, vars };
    let r = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(r)
}

/// Parses a univariate polynomial in `var`.
pub fn parse_poly(field: &FiniteField, var: &str, src: &str) -> Result<Poly> {
    let m = parse_mpoly(field, &[var], src)?;
    Ok(m.to_univariate(0).expect("single variable"))
}

/// Parses a field constant such as `3`, `a^7`, `a^2+1` or `[1,0,1]`.
pub fn parse_constant(field: &FiniteField, src: &str) -> Result<Fe> {
    let m = parse_mpoly(field, &[], src)?;
    Ok(m.coeff([0, 0, 0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let f = FiniteField::new(2, 5, Some(&[1, 0, 1, 0, 0, 1])).unwrap();
        let a = f.generator();
        assert_eq!(parse_constant(&f, "a^5").unwrap(), f.add(f.pow(a, 2), Fe::ONE));
        assert_eq!(parse_constant(&f, "[1,0,1]").unwrap(), Fe(0b101));
        assert_eq!(parse_constant(&f, "a^31").unwrap(), Fe::ONE);
        assert_eq!(parse_constant(&f, "3").unwrap(), Fe::ONE);
    }

    #[test]
    fn juxtaposition_and_powers() {
        let f = FiniteField::prime(7).unwrap();
        let p = parse_poly(&f, "x", "2x^3 - x + 5").unwrap();
        assert_eq!(p, Poly::from_ints(&f, &[5, -1, 0, 2]));
        let q = parse_poly(&f, "x", "(x+1)^2").unwrap();
        assert_eq!(q, Poly::from_ints(&f, &[1, 2, 1]));
    }

    #[test]
    fn trivariate() {
        let f = FiniteField::prime(3).unwrap();
        let m = parse_mpoly(&f, &["x", "y", "z"], "x^4 + y^4 - z^4 + x^2yz").unwrap();
        assert!(m.is_homogeneous(4));
        assert_eq!(m.coeff([2, 1, 1]), Fe::ONE);
        assert_eq!(m.coeff([0, 0, 4]), Fe(2));
    }

    #[test]
    fn errors_carry_column() {
        let f = FiniteField::prime(5).unwrap();
        match parse_poly(&f, "x", "x + a") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_poly(&f, "x", "x +").is_err());
        assert!(parse_poly(&f, "x", "(x").is_err());
    }
}
