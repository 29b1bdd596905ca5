//! Text syntax for integer polynomials.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' integer)?
//! atom  := integer | x<k> | y<k> | '(' expr ')'
//! ```
//!
//! `-y1^2` parses as `-(y1^2)`. Variables `x1..xN` are parameters and
//! `y1..yM` witnesses; both are numbered from 1.

use num::BigInt;
use thiserror::Error;

use super::IntPolynomial;

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarKind {
    Param,
    Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Var(VarKind, usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Token::Int(text[start..i].parse().expect("digits"))));
                continue;
            }
            b'x' | b'y' => {
                i += 1;
                let digits = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let index: usize = text[digits..i].parse().map_err(|_| ParseError {
                    offset: start,
                    message: "variable needs a numeric index, e.g. x1 or y2".into(),
                })?;
                if index == 0 {
                    return Err(ParseError { offset: start, message: "variables are numbered from 1".into() });
                }
                let kind = if c == b'x' { VarKind::Param } else { VarKind::Witness };
                out.push((start, Token::Var(kind, index)));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError { offset: start, message: format!("unexpected character {ch:?}") });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// Intermediate tree; variables are laid out once their counts are known.
enum Expr {
    Int(BigInt),
    Var(VarKind, usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            let at = self.offset();
            match self.peek().cloned() {
                Some(Token::Int(k)) => {
                    let k: u32 = match k.try_into() {
                        Ok(k) if k <= MAX_EXPONENT => k,
                        _ => {
                            return Err(ParseError { offset: at, message: format!("exponent must be at most {MAX_EXPONENT}") })
                        }
                    };
                    self.pos += 1;
                    Ok(Expr::Pow(Box::new(base), k))
                }
                _ => self.err("expected a non-negative integer exponent after '^'"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Token::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some(Token::Var(kind, index)) => {
                self.pos += 1;
                Ok(Expr::Var(kind, index))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(_) => self.err("expected a number, variable or '('"),
            None => self.err("unexpected end of input"),
        }
    }
}

fn max_index(e: &Expr, kind: VarKind) -> usize {
    match e {
        Expr::Int(_) => 0,
        Expr::Var(k, i) => {
            if *k == kind {
                *i
            } else {
                0
            }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => max_index(a, kind).max(max_index(b, kind)),
        Expr::Neg(a) | Expr::Pow(a, _) => max_index(a, kind),
    }
}

fn build(e: &Expr, n_params: usize, arity: usize) -> IntPolynomial {
    match e {
        Expr::Int(v) => IntPolynomial::constant(arity, v.clone()),
        Expr::Var(VarKind::Param, i) => IntPolynomial::var(arity, i - 1),
        Expr::Var(VarKind::Witness, i) => IntPolynomial::var(arity, n_params + i - 1),
        Expr::Add(a, b) => build(a, n_params, arity).add(&build(b, n_params, arity)),
        Expr::Sub(a, b) => build(a, n_params, arity).sub(&build(b, n_params, arity)),
        Expr::Mul(a, b) => build(a, n_params, arity).mul(&build(b, n_params, arity)),
        Expr::Neg(a) => build(a, n_params, arity).neg(),
        Expr::Pow(a, k) => build(a, n_params, arity).pow(*k),
    }
}

/// Parsed polynomial together with the parameter/witness split it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedPolynomial {
    pub poly: IntPolynomial,
    pub n_params: usize,
    pub m_witnesses: usize,
}

/// Parses `text`, laying out variables as `x1..xN, y1..yM`.
///
/// `N` and `M` are the largest indices used, raised to `min_params` and
/// `min_witnesses` when those are larger.
pub fn parse_polynomial(text: &str, min_params: usize, min_witnesses: usize) -> Result<ParsedPolynomial, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let expr = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return parser.err("unexpected token");
    }
    let n_params = max_index(&expr, VarKind::Param).max(min_params);
    let m_witnesses = max_index(&expr, VarKind::Witness).max(min_witnesses);
    let poly = build(&expr, n_params, n_params + m_witnesses);
    Ok(ParsedPolynomial { poly, n_params, m_witnesses })
}
