//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := atom ('^' unary)?          exponent must be a rational constant
//! atom    := number | 'pi' | ident | func '(' expr ')' | '(' expr ')'
//! number  := digits ['.' digits] [('e'|'E') ['-'|'+'] digits]
//! func    := sin | cos | tan | cot | arcsin | arccos | arctan | arccot
//!          | exp | ln | sqrt
//! ```
//!
//! Decimal literals are converted to exact rationals. Any other identifier is
//! a variable.

use num_rational::BigRational;

use super::{Expr, ExprError, Func};
use crate::rational::Rational;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn syntax(pos: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax { pos, message: message.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(Expr::neg(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::add(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat('*') {
                factors.push(self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                factors.push(Expr::pow(d, BigRational::from_integer((-1).into())));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::mul(factors) })
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            let e = self.unary()?;
            return Ok(match e.as_const() {
                Some(q) => Expr::num(-q),
                None => Expr::neg(e),
            });
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            let at = self.pos;
            let e = self.unary()?;
            let q = e.as_const().cloned().ok_or_else(|| syntax(at, "exponent must be a rational constant"))?;
            return Ok(Expr::pow(base, q));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let Some(c) = self.peek() else {
            return Err(syntax(start, "unexpected end of input"));
        };
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(syntax(self.pos, "expected `)`"));
            }
            return Ok(e);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let name = self.ident();
            if name == "pi" {
                return Ok(Expr::pi());
            }
            let is_func = name == "sqrt" || Func::from_name(&name).is_some();
            if is_func {
                if !self.eat('(') {
                    return Err(syntax(self.pos, format!("expected `(` after `{name}`")));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(syntax(self.pos, "expected `)`"));
                }
                return Ok(match Func::from_name(&name) {
                    Some(f) => Expr::apply(f, arg),
                    None => Expr::sqrt(arg),
                });
            }
            return Ok(Expr::var(&name));
        }
        Err(syntax(start, format!("unexpected character `{c}`")))
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.src[start..self.pos].to_string()
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'-' || bytes[j] == b'+') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.src[start..i];
        let q: Rational = text.parse().map_err(|_| syntax(start, format!("invalid number `{text}`")))?;
        self.pos = i;
        Ok(Expr::num(q.to_big()))
    }
}

/// Parses an expression; errors report the byte offset of the problem.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(syntax(p.pos, "unexpected trailing input"));
    }
    Ok(e)
}
