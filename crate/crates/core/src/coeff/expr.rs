//! A small arithmetic language for coefficient formulas such as `2*cos(2*pi*n/3)`.
//!
//! Precedence, loosest first: binary `+ -`, binary `* /`, unary `-`, `^`.
//! `^` is right-associative and its exponent must evaluate to a nonnegative integer.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{parse_decimal, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    /// The sequence index.
    N,
    /// The grid variable of sampled rings.
    S,
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Cos,
    Sin,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Cos => "cos",
            Func::Sin => "sin",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(BigInt),
    /// Decimal literal, kept as written so it stays exact over exact rings.
    Decimal(String),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let lit = &text[start..i];
            if lit.matches('.').count() > 1 || lit == "." {
                return Err(Error::Parse { offset: start, message: format!("malformed number {lit:?}") });
            }
            out.push((start, Tok::Num(lit.to_string())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else if c == '(' {
            out.push((i, Tok::LParen));
            i += 1;
        } else if c == ')' {
            out.push((i, Tok::RParen));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or(c);
            return Err(Error::Parse { offset: i, message: format!("unexpected character {ch:?}") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.offset(), message: message.into() })
    }

    fn eat_op(&mut self, ops: &str) -> Option<char> {
        match self.peek() {
            Some(Tok::Op(c)) if ops.contains(*c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(c) = self.eat_op("+-") {
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op("*/") {
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op("-").is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op("^").is_some() {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.error("unexpected end of input"),
        };
        self.pos += 1;
        match tok {
            Tok::Num(lit) => {
                if lit.contains('.') {
                    Ok(Expr::Decimal(lit))
                } else {
                    Ok(Expr::Int(lit.parse().expect("digits")))
                }
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "n" => return Ok(Expr::Var(Var::N)),
                    "s" => return Ok(Expr::Var(Var::S)),
                    "pi" => return Ok(Expr::Var(Var::Pi)),
                    "cos" => Func::Cos,
                    "sin" => Func::Sin,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        return Err(Error::Parse { offset, message: format!("unknown identifier {name:?}") })
                    }
                };
                if self.peek() != Some(&Tok::LParen) {
                    return self.error(format!("expected '(' after {name}"));
                }
                self.pos += 1;
                let arg = self.sum()?;
                self.expect_rparen()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Tok::LParen => {
                let e = self.sum()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Op(c) => Err(Error::Parse { offset, message: format!("unexpected operator '{c}'") }),
            Tok::RParen => Err(Error::Parse { offset, message: "unexpected ')'".into() }),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            self.error("expected ')'")
        }
    }
}

/// Parse without reference to a ring.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let e = p.sum()?;
    if p.pos < p.toks.len() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

/// Parse and check that every construct is meaningful over `ring`.
pub fn parse_expression<R: Ring>(text: &str, ring: &R) -> Result<Expr> {
    let e = parse(text)?;
    e.check(ring)?;
    Ok(e)
}

impl Expr {
    /// Reject real-only constructs over exact rings and `s` outside sampled rings.
    pub fn check<R: Ring>(&self, ring: &R) -> Result<()> {
        let exact = ring.is_exact();
        match self {
            Expr::Int(_) | Expr::Decimal(_) | Expr::Var(Var::N) => Ok(()),
            Expr::Var(Var::S) => ring.variable_s().map(|_| ()),
            Expr::Var(Var::Pi) if exact => {
                Err(Error::Type(format!("pi is not exact; not allowed over {}", ring.descriptor())))
            }
            Expr::Var(Var::Pi) => Ok(()),
            Expr::Call(f, _) if exact => Err(Error::Type(format!(
                "{} is not allowed over the exact ring {}",
                f.name(),
                ring.descriptor()
            ))),
            Expr::Call(_, a) | Expr::Neg(a) => a.check(ring),
            Expr::Bin(_, a, b) => {
                a.check(ring)?;
                b.check(ring)
            }
            Expr::Pow(a, b) => {
                a.check(ring)?;
                b.check_integer()
            }
        }
    }

    fn check_integer(&self) -> Result<()> {
        match self {
            Expr::Int(_) | Expr::Var(Var::N) => Ok(()),
            Expr::Neg(a) => a.check_integer(),
            Expr::Bin(_, a, b) | Expr::Pow(a, b) => {
                a.check_integer()?;
                b.check_integer()
            }
            other => Err(Error::Type(format!("exponent must be an integer expression, found {other}"))),
        }
    }

    /// Value at index n.
    pub fn eval<R: Ring>(&self, ring: &R, n: usize) -> Result<R::Elem> {
        let fail = |message: String| Error::Eval { n, message };
        Ok(match self {
            Expr::Int(v) => ring.from_bigint(v),
            Expr::Decimal(lit) => {
                let q = parse_decimal(lit).ok_or_else(|| fail(format!("bad literal {lit}")))?;
                ring.from_rational(&q).map_err(|e| fail(e.to_string()))?
            }
            Expr::Var(Var::N) => ring.from_bigint(&BigInt::from(n)),
            Expr::Var(Var::S) => ring.variable_s().map_err(|e| fail(e.to_string()))?,
            Expr::Var(Var::Pi) => ring
                .real_constant(std::f64::consts::PI)
                .map_err(|e| fail(e.to_string()))?,
            Expr::Neg(a) => ring.neg(&a.eval(ring, n)?),
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(ring, n)?, b.eval(ring, n)?);
                match op {
                    BinOp::Add => ring.add(&x, &y),
                    BinOp::Sub => ring.sub(&x, &y),
                    BinOp::Mul => ring.mul(&x, &y),
                    BinOp::Div => ring
                        .div(&x, &y)
                        .map_err(|e| fail(format!("division by a non-unit: {e}")))?,
                }
            }
            Expr::Pow(a, b) => {
                let e = b.eval_integer(n)?;
                if e.is_negative() {
                    return Err(fail(format!("negative exponent {e}")));
                }
                let e = e.to_u64().ok_or_else(|| fail(format!("exponent {e} is too large")))?;
                ring.pow(&a.eval(ring, n)?, e)
            }
            Expr::Call(f, a) => {
                let x = a.eval(ring, n)?;
                let r = match f {
                    Func::Cos => ring.map_real(&x, &f64::cos),
                    Func::Sin => ring.map_real(&x, &f64::sin),
                    Func::Sqrt => ring.sqrt(&x),
                };
                r.map_err(|e| fail(e.to_string()))?
            }
        })
    }

    fn eval_integer(&self, n: usize) -> Result<BigInt> {
        let fail = |message: String| Error::Eval { n, message };
        Ok(match self {
            Expr::Int(v) => v.clone(),
            Expr::Var(Var::N) => BigInt::from(n),
            Expr::Neg(a) => -a.eval_integer(n)?,
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval_integer(n)?, b.eval_integer(n)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.is_zero() || !(&x % &y).is_zero() {
                            return Err(fail(format!("exponent {x}/{y} is not an integer")));
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, b) => {
                let base = a.eval_integer(n)?;
                let e = b
                    .eval_integer(n)?
                    .to_u32()
                    .ok_or_else(|| fail("exponent must be a small nonnegative integer".into()))?;
                num_traits::pow(base, e as usize)
            }
            other => return Err(fail(format!("exponent must be an integer expression, found {other}"))),
        })
    }

    /// Rational value when the expression involves only exact constants.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Expr::Int(v) => Some(BigRational::from_integer(v.clone())),
            Expr::Decimal(lit) => parse_decimal(lit),
            _ => None,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Decimal(lit) => f.write_str(lit),
            Expr::Var(Var::N) => f.write_str("n"),
            Expr::Var(Var::S) => f.write_str("s"),
            Expr::Var(Var::Pi) => f.write_str("pi"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_wrapped(f, a, a.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = self.precedence();
                write_wrapped(f, a, a.precedence() < p)?;
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                f.write_str(sym)?;
                write_wrapped(f, b, b.precedence() <= p)
            }
            Expr::Pow(a, b) => {
                write_wrapped(f, a, a.precedence() < 5)?;
                f.write_str("^")?;
                write_wrapped(f, b, b.precedence() < 3)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
