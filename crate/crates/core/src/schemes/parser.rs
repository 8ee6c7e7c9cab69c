//! Line-oriented scheme file reader.
//!
//! ```text
//! # comment
//! scheme heat_centered
//! q = 2
//! pde A[2] = -1
//! stencil B[-1] = 1
//! stencil B[0] = -2
//! stencil B[1] = 1
//! ```
//!
//! Stencil weights are polynomials in `lambda` written as sums of terms
//! `<rational>`, `<rational>*lambda[^k]` or `lambda[^k]`.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{SchemeError, SchemeSpec};
use crate::exactalg::{GaussRat, LambdaPoly, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

struct Line {
    number: usize,
    tokens: Vec<Token>,
    pos: usize,
    end_column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> SchemeError {
    SchemeError::Syntax { line, column, message: message.into() }
}

fn tokenize(number: usize, text: &str) -> Result<Line, SchemeError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            tokens.push(Token { tok: Tok::Int(chars[start..i].iter().collect()), column });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), column });
        } else if "[]=+-*/^".contains(c) {
            tokens.push(Token { tok: Tok::Sym(c), column });
            i += 1;
        } else {
            return Err(syntax(number, column, format!("unexpected character '{c}'")));
        }
    }
    Ok(Line { number, tokens, pos: 0, end_column: chars.len() + 1 })
}

impl Line {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |t| t.column)
    }

    fn error(&self, message: impl Into<String>) -> SchemeError {
        syntax(self.number, self.column(), message)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), SchemeError> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected '{c}'"))),
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<(), SchemeError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == name => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected '{name}'"))),
        }
    }

    fn expect_end(&self) -> Result<(), SchemeError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error("unexpected trailing input")),
        }
    }

    fn eat_sign(&mut self) -> bool {
        match self.peek() {
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                true
            }
            Some(Tok::Sym('+')) => {
                self.pos += 1;
                false
            }
            _ => false,
        }
    }

    fn unsigned_int(&mut self) -> Result<BigInt, SchemeError> {
        match self.peek() {
            Some(Tok::Int(digits)) => {
                let v = BigInt::from_str(digits).expect("digits");
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.error("expected an integer")),
        }
    }

    fn signed_int(&mut self) -> Result<BigInt, SchemeError> {
        let negative = self.eat_sign();
        let v = self.unsigned_int()?;
        Ok(if negative { -v } else { v })
    }

    fn small_int(&mut self, signed: bool) -> Result<i64, SchemeError> {
        let column = self.column();
        let v = if signed { self.signed_int()? } else { self.unsigned_int()? };
        v.to_i64().ok_or_else(|| syntax(self.number, column, "integer out of range"))
    }

    fn unsigned_rational(&mut self) -> Result<Rational, SchemeError> {
        let num = self.unsigned_int()?;
        if self.peek() == Some(&Tok::Sym('/')) {
            self.pos += 1;
            let column = self.column();
            let den = self.unsigned_int()?;
            if den.is_zero() {
                return Err(syntax(self.number, column, "zero denominator"));
            }
            return Ok(Rational::new(num, den));
        }
        Ok(Rational::from_integer(num))
    }

    fn signed_rational(&mut self) -> Result<Rational, SchemeError> {
        let negative = self.eat_sign();
        let v = self.unsigned_rational()?;
        Ok(if negative { -v } else { v })
    }

    /// `lambda ['^' int]`, returning the power.
    fn lambda_power(&mut self) -> Result<usize, SchemeError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == "lambda" => self.pos += 1,
            Some(Tok::Ident(s)) if is_dx(s) => {
                return Err(
                    self.error("stencil weights may depend on lambda only; residual dx dependence is not supported")
                )
            }
            _ => return Err(self.error("expected 'lambda'")),
        }
        if self.peek() == Some(&Tok::Sym('^')) {
            self.pos += 1;
            let column = self.column();
            let k = self.small_int(false)?;
            return usize::try_from(k).map_err(|_| syntax(self.number, column, "exponent too large"));
        }
        Ok(1)
    }

    fn term(&mut self) -> Result<LambdaPoly, SchemeError> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                let c = self.unsigned_rational()?;
                if self.peek() == Some(&Tok::Sym('*')) {
                    self.pos += 1;
                    let k = self.lambda_power()?;
                    return Ok(LambdaPoly::monomial(GaussRat::real(c), k));
                }
                Ok(LambdaPoly::constant(GaussRat::real(c)))
            }
            Some(Tok::Ident(_)) => {
                let k = self.lambda_power()?;
                Ok(LambdaPoly::monomial(GaussRat::from_int(1), k))
            }
            _ => Err(self.error("expected a term")),
        }
    }

    fn poly(&mut self) -> Result<LambdaPoly, SchemeError> {
        let negative = self.eat_sign();
        let first = self.term()?;
        let mut acc = if negative { -first } else { first };
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Sym('-')) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }
}

fn is_dx(s: &str) -> bool {
    matches!(s, "dx" | "Δx" | "deltax" | "delta_x")
}

/// Parses a standalone weight polynomial such as `1/2 + 1/2*lambda`.
pub fn parse_poly(text: &str) -> Result<LambdaPoly, SchemeError> {
    let mut line = tokenize(1, text)?;
    let poly = line.poly()?;
    line.expect_end()?;
    Ok(poly)
}

/// Parses and validates a scheme file.
pub fn parse_scheme(text: &str) -> Result<SchemeSpec, SchemeError> {
    let mut name: Option<String> = None;
    let mut q: Option<i64> = None;
    let mut pde = BTreeMap::new();
    let mut stencil = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        let mut line = tokenize(number, raw)?;
        let keyword_column = line.column();
        let keyword = match line.next() {
            None => continue,
            Some(Tok::Ident(k)) => k,
            Some(_) => return Err(syntax(number, keyword_column, "expected a statement keyword")),
        };
        match keyword.as_str() {
            "scheme" => {
                let column = line.column();
                let ident = match line.next() {
                    Some(Tok::Ident(id)) => id,
                    _ => return Err(syntax(number, column, "expected a scheme name")),
                };
                line.expect_end()?;
                if name.replace(ident).is_some() {
                    return Err(syntax(number, keyword_column, "scheme name declared twice"));
                }
            }
            "q" => {
                line.expect_sym('=')?;
                let value = line.small_int(true)?;
                line.expect_end()?;
                if value < 1 {
                    return Err(SchemeError::InvalidQ(value));
                }
                if q.replace(value).is_some() {
                    return Err(syntax(number, keyword_column, "q declared twice"));
                }
            }
            "pde" => {
                line.expect_ident("A")?;
                line.expect_sym('[')?;
                let column = line.column();
                let order = line.small_int(false)?;
                let order = u32::try_from(order)
                    .ok()
                    .filter(|&o| o >= 1)
                    .ok_or_else(|| syntax(number, column, "derivative order must be >= 1"))?;
                line.expect_sym(']')?;
                line.expect_sym('=')?;
                let value = line.signed_rational()?;
                line.expect_end()?;
                if pde.insert(order, value).is_some() {
                    return Err(SchemeError::DuplicatePdeOrder(order));
                }
            }
            "stencil" => {
                line.expect_ident("B")?;
                line.expect_sym('[')?;
                let offset = line.small_int(true)?;
                line.expect_sym(']')?;
                line.expect_sym('=')?;
                let weight = line.poly()?;
                line.expect_end()?;
                if stencil.insert(offset, weight).is_some() {
                    return Err(SchemeError::DuplicateOffset(offset));
                }
            }
            other => return Err(syntax(number, keyword_column, format!("unknown statement '{other}'"))),
        }
    }
    let name = name.ok_or(SchemeError::Missing("scheme"))?;
    let q = q.ok_or(SchemeError::Missing("q"))?;
    let q = u32::try_from(q).map_err(|_| SchemeError::InvalidQ(q))?;
    SchemeSpec::new(name, q, stencil, pde)
}
