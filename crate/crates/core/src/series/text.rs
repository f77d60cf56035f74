//! Plain-text series syntax, e.g. `t + 2*t^(3/2) - t^(-1) + O(t^4)`.
//!
//! ```text
//! series   := ['+'|'-'] term (('+'|'-') term)*
//! term     := 'O' '(' ('1' | 't' ['^' exponent]) ')' | factor (['*'] factor)*
//! factor   := int ['/' int] | '[' int (',' int)* ']' | 'g' ['^' int] | 't' ['^' exponent]
//! exponent := ['-'] int | '(' ['+'|'-'] int ['/' int] ')'
//! ```
//!
//! `[c0,c1,..]` is a coordinate vector in the polynomial basis of `GF(p^m)`
//! and `g` is the field generator. Whitespace is allowed between tokens.
//! Parsing [`HahnSeries`]'s `Display` output gives back the same series.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{HahnSeries, Term};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::numerics::{fmt_rational, rat_int, ExtRational};

pub fn parse_series(input: &str, field: &Field) -> Result<HahnSeries> {
    let mut p = Parser { s: input.as_bytes(), pos: 0, field };
    p.series()
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    field: &'a Field,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(BigInt::from_str(digits).expect("digits parse"))
    }

    fn lift<T>(&self, r: Result<T>) -> Result<T> {
        r.map_err(|e| Error::Parse { pos: self.pos, msg: e.to_string() })
    }

    fn series(&mut self) -> Result<HahnSeries> {
        let mut terms: Vec<(BigRational, FieldElement)> = Vec::new();
        let mut tail = ExtRational::Infinity;
        let mut negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            None => return self.err("empty series"),
            _ => false,
        };
        loop {
            match self.term()? {
                Parsed::BigO(beta) => tail = tail.min(ExtRational::Finite(beta)),
                Parsed::Term(exp, coeff) => {
                    terms.push((exp, if negate { coeff.neg() } else { coeff }));
                }
            }
            match self.peek() {
                None => break,
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                Some(c) => return self.err(format!("unexpected '{}'", c as char)),
            }
            self.pos += 1;
        }
        let field = self.field;
        self.lift(HahnSeries::from_terms(field, terms, tail))
    }

    fn term(&mut self) -> Result<Parsed> {
        if self.peek() == Some(b'O') {
            self.pos += 1;
            self.expect(b'(')?;
            let beta = match self.peek() {
                Some(b'1') => {
                    self.pos += 1;
                    rat_int(0)
                }
                Some(b't') => {
                    self.pos += 1;
                    self.opt_exponent()?
                }
                _ => return self.err("expected 't' or '1' inside O(...)"),
            };
            self.expect(b')')?;
            return Ok(Parsed::BigO(beta));
        }
        let mut coeff = self.field.one();
        let mut exp = rat_int(0);
        let mut factors = 0;
        while let Some(c) = self.peek() {
            match c {
                b'*' if factors > 0 => {
                    self.pos += 1;
                    if !matches!(self.peek(), Some(b'0'..=b'9' | b'[' | b'g' | b't')) {
                        return self.err("expected a factor after '*'");
                    }
                    continue;
                }
                b'0'..=b'9' => {
                    let num = self.uint()?;
                    let q = if self.eat(b'/') {
                        let den = self.uint()?;
                        if den.is_zero() {
                            return self.err("zero denominator");
                        }
                        BigRational::new(num, den)
                    } else {
                        BigRational::from_integer(num)
                    };
                    let v = self.field.from_rational(&q);
                    coeff = coeff.mul(&self.lift(v)?);
                }
                b'[' => {
                    self.pos += 1;
                    let mut coords = Vec::new();
                    loop {
                        let n = self.uint()?;
                        let r = n % BigInt::from(self.field.characteristic().max(1));
                        coords.push(u64::try_from(r).unwrap_or(0));
                        if !self.eat(b',') {
                            break;
                        }
                    }
                    self.expect(b']')?;
                    let v = self.field.from_coords(&coords);
                    coeff = coeff.mul(&self.lift(v)?);
                }
                b'g' => {
                    self.pos += 1;
                    let k = if self.eat(b'^') { self.uint()? } else { BigInt::from(1) };
                    let g = self.field.generator();
                    let g = self.lift(g)?;
                    let v = g.pow_signed(&k);
                    coeff = coeff.mul(&self.lift(v)?);
                }
                b't' => {
                    self.pos += 1;
                    exp += self.opt_exponent()?;
                }
                _ => break,
            }
            factors += 1;
        }
        if factors == 0 {
            return self.err("expected a term");
        }
        Ok(Parsed::Term(exp, coeff))
    }

    /// The optional `^exponent` after `t`; defaults to 1.
    fn opt_exponent(&mut self) -> Result<BigRational> {
        if !self.eat(b'^') {
            return Ok(rat_int(1));
        }
        if self.eat(b'(') {
            let neg = if self.eat(b'-') {
                true
            } else {
                self.eat(b'+');
                false
            };
            let num = self.uint()?;
            let den = if self.eat(b'/') { self.uint()? } else { BigInt::from(1) };
            if den.is_zero() {
                return self.err("zero denominator");
            }
            self.expect(b')')?;
            let q = BigRational::new(num, den);
            Ok(if neg { -q } else { q })
        } else {
            let neg = self.eat(b'-');
            let n = self.uint()?;
            Ok(BigRational::from_integer(if neg { -n } else { n }))
        }
    }
}

enum Parsed {
    BigO(BigRational),
    Term(BigRational, FieldElement),
}

fn fmt_power(exp: &BigRational) -> String {
    if exp.is_integer() && !exp.is_negative() {
        if exp == &rat_int(1) {
            "t".into()
        } else {
            format!("t^{}", exp.numer())
        }
    } else {
        format!("t^({})", fmt_rational(exp))
    }
}

fn fmt_term(t: &Term, out: &mut String, first: bool) {
    let (negative, coeff) = match t.coeff.as_rational() {
        Some(q) if q.is_negative() => (true, t.coeff.neg()),
        _ => (false, t.coeff.clone()),
    };
    match (first, negative) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
    }
    if t.exp.is_zero() {
        out.push_str(&coeff.to_string());
    } else if coeff.is_one() {
        out.push_str(&fmt_power(&t.exp));
    } else {
        out.push_str(&format!("{}*{}", coeff, fmt_power(&t.exp)));
    }
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            fmt_term(t, &mut out, i == 0);
        }
        if let ExtRational::Finite(beta) = &self.tail {
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(&format!("O({})", fmt_power(beta)));
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}
