//! Parser for rational-function expressions such as `T^2+2*T+1`,
//! `T*(T-1)`, `xi*T` or `1/(T-1)`.
//!
//! Grammar: integers, `T`, `xi` (the designated constant), `g` (the field
//! generator for non-prime fields), `+ - * / ^`, parentheses. Exponents are
//! nonnegative integers; a negative power is written as a quotient.

use super::field::Field;
use super::poly::Poly;
use super::ratfunc::{RatFunc, RatFuncField};
use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse()
                .map_err(|_| Error::Parse(format!("integer out of range: {text}")))?;
            out.push(Tok::Int(n));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    k: &'a RatFuncField,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = if self.eat('-') {
            let t = self.term()?;
            self.k.neg(&t)
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = self.k.add(&acc, &self.term()?);
            } else if self.eat('-') {
                acc = self.k.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = self.k.mul(&acc, &self.power()?);
            } else if self.eat('/') {
                acc = self.k.div(&acc, &self.power()?)?;
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                // implicit multiplication: 2T, 2(T+1)
                acc = self.k.mul(&acc, &self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    self.k.pow(&base, n as i64)
                }
                _ => Err(Error::Parse("exponent must be a nonnegative integer".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let field = self.k.field();
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(self.k.constant(field.from_int((n % field.p() as u64) as i64)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "T" => Ok(RatFunc::from_poly(Poly::t())),
                    "xi" => Ok(self.k.constant(field.choose_xi())),
                    "g" => field
                        .generator()
                        .map(|g| self.k.constant(g))
                        .ok_or_else(|| Error::Parse("`g` needs a non-prime field".into())),
                    other => Err(Error::Parse(format!("unknown symbol {other:?}"))),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

/// Parses a rational function over the given field.
pub fn parse_ratfunc(field: &Field, s: &str) -> Result<RatFunc> {
    let k = RatFuncField::new(field.clone());
    let mut p = Parser { k: &k, toks: tokenize(s)?, pos: 0 };
    if p.toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let r = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(r)
}

/// Parses a polynomial; quotients are allowed if they simplify.
pub fn parse_poly(field: &Field, s: &str) -> Result<Poly> {
    let r = parse_ratfunc(field, s)?;
    r.as_poly()
        .cloned()
        .ok_or_else(|| Error::Parse(format!("{s:?} is not a polynomial")))
}

/// Splits `H(a, b)` into its two argument strings.
pub fn split_algebra_spec(s: &str) -> Result<(String, String)> {
    let t = s.trim();
    let inner = t
        .strip_prefix("H(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected H(a, b), got {s:?}")))?;
    let mut depth = 0i32;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                return Ok((inner[..i].trim().to_string(), inner[i + 1..].trim().to_string()));
            }
            _ => {}
        }
    }
    Err(Error::Parse(format!("expected two arguments in {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfpoly::field::Fe;

    #[test]
    fn polynomials_round_trip() {
        let f = Field::new(3, 1).unwrap();
        for s in ["T^2+2*T+1", "T", "2", "T^3+T+2", "0"] {
            let p = parse_poly(&f, s).unwrap();
            assert_eq!(p.display(&f).to_string(), s);
        }
        let p = parse_poly(&f, "T*(T-1)").unwrap();
        assert_eq!(p.display(&f).to_string(), "T^2+2*T");
        assert_eq!(parse_poly(&f, "2T-1").unwrap(), Poly::from_coeffs(vec![Fe(2), Fe(2)]));
        assert_eq!(parse_poly(&f, "xi").unwrap(), Poly::constant(Fe(2)));
        assert_eq!(parse_poly(&f, "(T^2-1)/(T+1)").unwrap().display(&f).to_string(), "T+2");
    }

    #[test]
    fn rational_and_errors() {
        let f = Field::new(5, 1).unwrap();
        let r = parse_ratfunc(&f, "1/(T-1)").unwrap();
        assert_eq!(r.ord_inf(), Some(1));
        assert!(parse_poly(&f, "1/T").is_err());
        assert!(parse_poly(&f, "T+").is_err());
        assert!(parse_poly(&f, "(T").is_err());
        assert!(parse_poly(&f, "T^-1").is_err());
        assert!(parse_poly(&f, "g").is_err());
        assert!(parse_poly(&f, "T $").is_err());
        let f4 = Field::new(2, 2).unwrap();
        assert_eq!(parse_poly(&f4, "g*T").unwrap().leading(), f4.generator().unwrap());
    }

    #[test]
    fn algebra_spec() {
        assert_eq!(
            split_algebra_spec("H(xi, T*(T-1))").unwrap(),
            ("xi".to_string(), "T*(T-1)".to_string())
        );
        assert!(split_algebra_spec("H(T)").is_err());
        assert!(split_algebra_spec("Q(1,2)").is_err());
    }
}
