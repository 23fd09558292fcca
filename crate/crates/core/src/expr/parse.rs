//! Recursive-descent parser for the expression grammar.
//!
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := "-" factor | base ("^" exponent)?
//! base   := number | ident | ident "(" expr ")" | "(" expr ")"
//! Exponents are signed integers or parenthesized integer ratios.

use num::{BigInt, BigRational};
use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    /// Consume an ASCII '-' or the UTF-8 minus sign U+2212.
    fn eat_minus(&mut self) -> bool {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return true;
        }
        if self.src[self.pos..].starts_with("\u{2212}".as_bytes()) {
            self.pos += 3;
            return true;
        }
        false
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            if self.eat(b'+') {
                self.skip_ws();
                acc = acc.add(&self.term()?);
            } else if self.eat_minus() {
                self.skip_ws();
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat(b'*') {
                self.skip_ws();
                acc = acc.mul(&self.factor()?);
            } else if self.eat(b'/') {
                self.skip_ws();
                let offset = self.pos;
                let rhs = self.factor()?;
                acc = acc.checked_div(&rhs).ok_or(ParseError::Syntax {
                    offset,
                    expected: "nonzero divisor".to_string(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        if self.eat_minus() {
            return Ok(self.factor()?.neg());
        }
        let base = self.base()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let q = self.exponent()?;
            return Ok(base.pow_rational(&q));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<BigRational, ParseError> {
        if self.eat(b'(') {
            self.skip_ws();
            let neg = self.eat_minus();
            let n = self.integer()?;
            self.skip_ws();
            if !self.eat(b'/') {
                return Err(self.err("`/` in rational exponent"));
            }
            self.skip_ws();
            let d = self.integer()?;
            if d == BigInt::from(0) {
                return Err(self.err("nonzero exponent denominator"));
            }
            self.skip_ws();
            if !self.eat(b')') {
                return Err(self.err("`)`"));
            }
            let mut q = BigRational::new(n, d);
            if neg {
                q = -q;
            }
            Ok(q)
        } else {
            let neg = self.eat_minus();
            let n = self.integer()?;
            let mut q = BigRational::from_integer(n);
            if neg {
                q = -q;
            }
            Ok(q)
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.err("`)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident_or_call(),
            _ => Err(self.err("number, identifier, or `(`")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let int = self.integer()?;
        if self.peek() == Some(b'.') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                self.pos += 1;
            }
            if self.pos == start {
                return Err(self.err("fractional digits"));
            }
            let frac = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let scale = num::pow::pow(BigInt::from(10), frac.len());
            let frac_int: BigInt = frac.parse().unwrap();
            let val = BigRational::new(int * &scale + frac_int, scale);
            return Ok(Expr::rational_from(val));
        }
        Ok(Expr::rational_from(BigRational::from_integer(int)))
    }

    fn ident_or_call(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_alphanumeric() || c == b'_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        let save = self.pos;
        self.skip_ws();
        if self.eat(b'(') {
            let func = match name.as_str() {
                "sin" => Some(Func::Sin),
                "cos" => Some(Func::Cos),
                "exp" => Some(Func::Exp),
                "log" => Some(Func::Log),
                "tan" | "sqrt" => None,
                _ => {
                    return Err(ParseError::UnknownFunction {
                        offset: start,
                        name,
                    })
                }
            };
            self.skip_ws();
            let arg = self.expr()?;
            self.skip_ws();
            if !self.eat(b')') {
                return Err(self.err("`)`"));
            }
            return Ok(match (func, name.as_str()) {
                (Some(f), _) => Expr::apply(f, arg),
                (None, "tan") => Expr::tan(arg),
                (None, _) => arg.sqrt(),
            });
        }
        self.pos = save;
        Ok(Expr::symbol(name))
    }
}
