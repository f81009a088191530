//! Text grammar for polynomials:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := power ('*' power)*
//! power   := unary ('^' integer)?
//! unary   := '-' unary | atom
//! atom    := integer ('/' integer)? | generator | '(' expr ')' | '[' expr (',' expr)+ ']'
//! ```
//!
//! Generators are `x`, `y`, `z`, `t` (slots 0..3) or `x1`..`x9` (slots 0..8).
//! Brackets denote right-normed commutators.

use thiserror::Error;

use super::NcPoly;
use crate::scalars::{FieldSpec, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    rank: usize,
    field: FieldSpec,
}

impl NcPoly {
    /// Parses `text` as an element of the free algebra of the given rank.
    pub fn parse(text: &str, rank: usize, field: FieldSpec) -> Result<NcPoly, super::FreeAlgError> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, rank, field };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input").into());
        }
        Ok(out)
    }
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.to_string() }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<NcPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<NcPoly, ParseError> {
        let mut acc = self.power()?;
        while self.eat(b'*') {
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<NcPoly, ParseError> {
        let base = self.unary()?;
        if self.eat(b'^') {
            self.skip_ws();
            let e = self.integer()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<NcPoly, ParseError> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        self.atom()
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError { pos: start, msg: "integer overflow".into() })
    }

    fn atom(&mut self) -> Result<NcPoly, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut r = Rational::from_int(n);
                if self.eat(b'/') {
                    self.skip_ws();
                    let d = self.integer()?;
                    if d == 0 {
                        return Err(self.err("zero denominator"));
                    }
                    r = Rational::new(n, d);
                }
                let c = self.field.from_rational(&r).map_err(|e| self.err(&e.to_string()))?;
                Ok(NcPoly::constant(self.rank, self.field, c))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                let mut args = vec![self.expr()?];
                while self.eat(b',') {
                    args.push(self.expr()?);
                }
                if !self.eat(b']') {
                    return Err(self.err("expected ']'"));
                }
                NcPoly::right_normed(&args).map_err(|e| self.err(&e.to_string()))
            }
            Some(c @ (b'x' | b'y' | b'z' | b't')) => {
                self.pos += 1;
                let mut slot = match c {
                    b'x' => 0,
                    b'y' => 1,
                    b'z' => 2,
                    _ => 3,
                };
                if c == b'x' {
                    if let Some(d @ b'1'..=b'9') = self.src.get(self.pos).copied() {
                        self.pos += 1;
                        slot = (d - b'1') as usize;
                    }
                }
                if slot >= self.rank {
                    return Err(self.err(&format!("generator slot {slot} outside rank {}", self.rank)));
                }
                Ok(NcPoly::var(self.rank, self.field, slot))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::FreeAlgError;

    #[test]
    fn parses_grammar_example() {
        let f = NcPoly::parse("2*[x,y]*x^4*y^4 - (1/3)*x*y", 2, FieldSpec::Q).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.total_degree(), 10);
    }

    #[test]
    fn indexed_generators() {
        let a = NcPoly::parse("x1*x2 - x2*x1", 3, FieldSpec::Q).unwrap();
        let b = NcPoly::parse("[x,y]", 3, FieldSpec::Q).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(NcPoly::parse("x +", 2, FieldSpec::Q), Err(FreeAlgError::Parse(_))));
        assert!(NcPoly::parse("z", 2, FieldSpec::Q).is_err());
        assert!(NcPoly::parse("[x]", 2, FieldSpec::Q).is_err());
        assert!(NcPoly::parse("1/5*x", 2, FieldSpec::new(5).unwrap()).is_err());
    }
}
