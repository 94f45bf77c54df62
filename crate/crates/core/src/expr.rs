//! A small expression language for germs and series.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' exponent)?          exponent := ('-' | '+')* power
//! atom    := number | ident | ident '(' sum ')' | '(' sum ')' | O '(' z^n ')'
//! ```
//!
//! `^` binds tighter than unary minus and associates to the right; its
//! exponent must fold to an integer. Identifiers are `z`, named parameters,
//! the functions `exp log sin expm1 moebius`, and the germs `expm1`, `sin`,
//! `zexp` (`z·e^z`), `quadratic` (`z + z²`). `O(z^n)` caps the order at
//! `n − 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::coeff::{parse_rational, rational_fraction_string, rational_to_f64, Complex, Rational};
use crate::poincare::Map;
use crate::series::{ExactSeries, PowerSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("exponent must be an integer constant")]
    NonIntegerExponent,
    #[error("{0}")]
    Series(SeriesError),
    #[error("not a supported numeric map: {0}")]
    NotEvaluable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {pos}: {kind}")]
pub struct ExprError {
    pub pos: usize,
    pub kind: ExprErrorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Expm1,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Germ {
    Expm1,
    Sin,
    ZExp,
    Quadratic,
    Moebius(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Num(Rational),
    Z,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Call(Func, Box<Expr>),
    Germ(Germ),
    /// `O(z^n)`
    BigO(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    /// Byte offset of the node in the source.
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let lit = &text[start..i];
            let v = parse_rational(lit).ok_or_else(|| ExprError {
                pos: start,
                kind: ExprErrorKind::Syntax(format!("bad number `{lit}`")),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if b"+-*/^(),".contains(&c) {
            out.push((start, Tok::Op(c as char)));
            i += 1;
        } else {
            let ch = text[start..].chars().next().unwrap();
            return Err(ExprError {
                pos: start,
                kind: ExprErrorKind::Syntax(format!("unexpected character `{ch}`")),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    params: &'a BTreeMap<String, Rational>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn syntax(&self, msg: impl Into<String>) -> ExprError {
        ExprError {
            pos: self.here(),
            kind: ExprErrorKind::Syntax(msg.into()),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ExprError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{op}`")))
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.product()?;
        loop {
            let pos = self.here();
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(acc);
            };
            let rhs = self.product()?;
            acc = Expr {
                kind: ExprKind::Bin(op, Box::new(acc), Box::new(rhs)),
                pos,
            };
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            let pos = self.here();
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(acc);
            };
            let rhs = self.unary()?;
            acc = Expr {
                kind: ExprKind::Bin(op, Box::new(acc), Box::new(rhs)),
                pos,
            };
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        let pos = self.here();
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                pos,
            });
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        let pos = self.here();
        if !self.eat('^') {
            return Ok(base);
        }
        let exp_pos = self.here();
        let mut negate = false;
        loop {
            if self.eat('-') {
                negate = !negate;
            } else if !self.eat('+') {
                break;
            }
        }
        let e = self.power()?;
        let v = e.const_value().ok_or(ExprError {
            pos: exp_pos,
            kind: ExprErrorKind::NonIntegerExponent,
        })?;
        let n = v
            .is_integer()
            .then(|| v.to_integer().to_i64())
            .flatten()
            .ok_or(ExprError {
                pos: exp_pos,
                kind: ExprErrorKind::NonIntegerExponent,
            })?;
        Ok(Expr {
            kind: ExprKind::Pow(Box::new(base), if negate { -n } else { n }),
            pos,
        })
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let pos = self.here();
        let tok = self.peek().cloned();
        let kind = match tok {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                ExprKind::Num(v)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                return Ok(inner);
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let called = self.peek() == Some(&Tok::Op('('));
                self.ident(&name, pos, called)?
            }
            _ => return Err(self.syntax("expected a number, identifier or `(`")),
        };
        Ok(Expr { kind, pos })
    }

    fn argument(&mut self) -> Result<Expr, ExprError> {
        self.expect('(')?;
        let arg = self.sum()?;
        self.expect(')')?;
        Ok(arg)
    }

    fn ident(&mut self, name: &str, pos: usize, called: bool) -> Result<ExprKind, ExprError> {
        let func = match name {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "expm1" => Some(Func::Expm1),
            _ => None,
        };
        if called {
            if let Some(f) = func {
                return Ok(ExprKind::Call(f, Box::new(self.argument()?)));
            }
            match name {
                "moebius" => {
                    let arg_pos = self.here();
                    let c = self.argument()?.const_value().ok_or(ExprError {
                        pos: arg_pos,
                        kind: ExprErrorKind::Syntax("moebius parameter must be a constant".into()),
                    })?;
                    return Ok(ExprKind::Germ(Germ::Moebius(c)));
                }
                "O" => {
                    let arg_pos = self.here();
                    let arg = self.argument()?;
                    return match arg.kind {
                        ExprKind::Z => Ok(ExprKind::BigO(1)),
                        ExprKind::Pow(b, n) if b.kind == ExprKind::Z && n >= 1 => {
                            Ok(ExprKind::BigO(n as usize))
                        }
                        _ => Err(ExprError {
                            pos: arg_pos,
                            kind: ExprErrorKind::Syntax("expected O(z^n) with n ≥ 1".into()),
                        }),
                    };
                }
                _ => {}
            }
        }
        Ok(match name {
            "z" => ExprKind::Z,
            "expm1" => ExprKind::Germ(Germ::Expm1),
            "sin" => ExprKind::Germ(Germ::Sin),
            "zexp" => ExprKind::Germ(Germ::ZExp),
            "quadratic" => ExprKind::Germ(Germ::Quadratic),
            _ => match self.params.get(name) {
                Some(v) => ExprKind::Num(v.clone()),
                None => {
                    return Err(ExprError {
                        pos,
                        kind: ExprErrorKind::UnknownIdentifier(name.to_string()),
                    })
                }
            },
        })
    }
}

fn series_err(pos: usize) -> impl Fn(SeriesError) -> ExprError {
    move |e| ExprError {
        pos,
        kind: ExprErrorKind::Series(e),
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        Self::parse_with(text, &BTreeMap::new())
    }

    /// Parse with named rational parameters.
    pub fn parse_with(text: &str, params: &BTreeMap<String, Rational>) -> Result<Expr, ExprError> {
        let mut p = Parser {
            toks: lex(text)?,
            pos: 0,
            end: text.len(),
            params,
        };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(p.syntax("unexpected trailing input"));
        }
        Ok(e)
    }

    /// The value if the expression is a constant.
    pub fn const_value(&self) -> Option<Rational> {
        match &self.kind {
            ExprKind::Num(v) => Some(v.clone()),
            ExprKind::Neg(a) => a.const_value().map(|v| -v),
            ExprKind::Bin(op, a, b) => {
                let (a, b) = (a.const_value()?, b.const_value()?);
                match op {
                    BinOp::Add => Some(a + b),
                    BinOp::Sub => Some(a - b),
                    BinOp::Mul => Some(a * b),
                    BinOp::Div => (!b.is_zero()).then(|| a / b),
                }
            }
            ExprKind::Pow(a, n) => {
                let a = a.const_value()?;
                if a.is_zero() && *n < 0 {
                    None
                } else {
                    Some(num_traits::pow::Pow::pow(a, *n as i32))
                }
            }
            _ => None,
        }
    }

    fn eval_raw(&self, order: usize) -> Result<ExactSeries, ExprError> {
        let err = series_err(self.pos);
        let z = || PowerSeries::var(order);
        Ok(match &self.kind {
            ExprKind::Num(v) => PowerSeries::constant(v.clone(), order),
            ExprKind::Z => z(),
            ExprKind::Neg(a) => a.eval_raw(order)?.neg(),
            ExprKind::Bin(op, a, b) => {
                let (a, b) = (a.eval_raw(order)?, b.eval_raw(order)?);
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b).map_err(err)?,
                }
            }
            ExprKind::Pow(a, n) => {
                let a = a.eval_raw(order)?;
                let p = a.pow(n.unsigned_abs() as u32);
                if *n < 0 {
                    PowerSeries::one(order).div(&p).map_err(err)?
                } else {
                    p
                }
            }
            ExprKind::Call(f, a) => {
                let a = a.eval_raw(order)?;
                match f {
                    Func::Exp => a.exp().map_err(err)?,
                    Func::Log => a.log().map_err(err)?,
                    Func::Sin => a.sin_cos().map_err(err)?.0,
                    Func::Expm1 => {
                        let n = a.order();
                        a.exp().map_err(err)?.sub(&PowerSeries::one(n))
                    }
                }
            }
            ExprKind::Germ(g) => match g {
                Germ::Expm1 => z().exp().map_err(err)?.sub(&PowerSeries::one(order)),
                Germ::Sin => z().sin_cos().map_err(err)?.0,
                Germ::ZExp => z().mul(&z().exp().map_err(err)?),
                Germ::Quadratic => z().add(&z().mul(&z())),
                Germ::Moebius(c) => {
                    let den = PowerSeries::one(order).sub(&z().scale(c));
                    z().div(&den).map_err(err)?
                }
            },
            ExprKind::BigO(n) => PowerSeries::zero(order.min(n - 1)),
        })
    }

    /// Exact series to order `order`, or lower if an `O(z^n)` term caps it.
    /// Divisions by series of positive valuation lose orders; those are
    /// recovered by evaluating at a higher working order.
    pub fn eval(&self, order: usize) -> Result<ExactSeries, ExprError> {
        let cap = self.order_cap().map_or(order, |c| c.min(order));
        let mut work = order;
        for _ in 0..16 {
            let s = self.eval_raw(work)?;
            if s.order() >= cap {
                return Ok(s.truncate(cap));
            }
            work += cap - s.order();
        }
        self.eval_raw(work)
    }

    fn order_cap(&self) -> Option<usize> {
        match &self.kind {
            ExprKind::BigO(n) => Some(n - 1),
            ExprKind::Neg(a) | ExprKind::Pow(a, _) | ExprKind::Call(_, a) => a.order_cap(),
            ExprKind::Bin(_, a, b) => match (a.order_cap(), b.order_cap()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            _ => None,
        }
    }

    fn has_transcendental(&self) -> bool {
        match &self.kind {
            ExprKind::Call(..) => true,
            ExprKind::Germ(Germ::Expm1 | Germ::Sin | Germ::ZExp) => true,
            ExprKind::Neg(a) | ExprKind::Pow(a, _) => a.has_transcendental(),
            ExprKind::Bin(_, a, b) => a.has_transcendental() || b.has_transcendental(),
            _ => false,
        }
    }

    /// `z ↦ p(z)/q(z)` if the expression is a rational function.
    fn rational_function(&self) -> Option<(Vec<Rational>, Vec<Rational>)> {
        type Rf = (Vec<Rational>, Vec<Rational>);
        fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
            let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        }
        fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
            let n = a.len().max(b.len());
            (0..n)
                .map(|k| {
                    a.get(k).cloned().unwrap_or_default() + b.get(k).cloned().unwrap_or_default()
                })
                .collect()
        }
        fn neg(a: &[Rational]) -> Vec<Rational> {
            a.iter().map(|v| -v).collect()
        }
        fn trim(mut a: Vec<Rational>) -> Vec<Rational> {
            while a.len() > 1 && a.last().is_some_and(Zero::is_zero) {
                a.pop();
            }
            a
        }
        let one = || vec![Rational::one()];
        let r: Rf = match &self.kind {
            ExprKind::Num(v) => (vec![v.clone()], one()),
            ExprKind::Z => (vec![Rational::zero(), Rational::one()], one()),
            ExprKind::Germ(Germ::Quadratic) => (
                vec![Rational::zero(), Rational::one(), Rational::one()],
                one(),
            ),
            ExprKind::Germ(Germ::Moebius(c)) => (
                vec![Rational::zero(), Rational::one()],
                vec![Rational::one(), -c.clone()],
            ),
            ExprKind::Neg(a) => {
                let (p, q) = a.rational_function()?;
                (neg(&p), q)
            }
            ExprKind::Bin(op, a, b) => {
                let (p1, q1) = a.rational_function()?;
                let (p2, q2) = b.rational_function()?;
                match op {
                    BinOp::Add => (add(&mul(&p1, &q2), &mul(&p2, &q1)), mul(&q1, &q2)),
                    BinOp::Sub => (add(&mul(&p1, &q2), &neg(&mul(&p2, &q1))), mul(&q1, &q2)),
                    BinOp::Mul => (mul(&p1, &p2), mul(&q1, &q2)),
                    BinOp::Div => {
                        if trim(p2.clone()).iter().all(Zero::is_zero) {
                            return None;
                        }
                        (mul(&p1, &q2), mul(&q1, &p2))
                    }
                }
            }
            ExprKind::Pow(a, n) => {
                let (p, q) = a.rational_function()?;
                let (mut p2, mut q2) = (one(), one());
                for _ in 0..n.unsigned_abs() {
                    p2 = mul(&p2, &p);
                    q2 = mul(&q2, &q);
                }
                if *n < 0 {
                    if trim(p.clone()).iter().all(Zero::is_zero) {
                        return None;
                    }
                    (q2, p2)
                } else {
                    (p2, q2)
                }
            }
            _ => return None,
        };
        Some((trim(r.0), trim(r.1)))
    }

    /// The numeric map for the Poincaré evaluator: rational functions, or
    /// one of `e^z − 1`, `sin z`, `z·e^z` written in a recognized form.
    pub fn to_map(&self) -> Result<Map, ExprError> {
        let not = |msg: &str| ExprError {
            pos: self.pos,
            kind: ExprErrorKind::NotEvaluable(msg.into()),
        };
        if self.order_cap().is_some() {
            return Err(not("truncated expressions have no numeric value"));
        }
        if !self.has_transcendental() {
            let (p, q) = self
                .rational_function()
                .ok_or_else(|| not("division by zero"))?;
            let c = |v: &[Rational]| -> Vec<Complex> {
                v.iter()
                    .map(|x| Complex::new(rational_to_f64(x), 0.0))
                    .collect()
            };
            return Ok(if q.len() == 1 {
                let d = &q[0];
                Map::Polynomial(c(&p.iter().map(|x| x / d).collect::<Vec<_>>()))
            } else {
                Map::Rational {
                    num: c(&p),
                    den: c(&q),
                }
            });
        }
        let is_z = |e: &Expr| e.kind == ExprKind::Z;
        let is_exp_z = |e: &Expr| matches!(&e.kind, ExprKind::Call(Func::Exp, a) if is_z(a));
        let is_one = |e: &Expr| e.const_value().is_some_and(|v| v.is_one());
        match &self.kind {
            ExprKind::Germ(Germ::Expm1) => Ok(Map::Expm1),
            ExprKind::Germ(Germ::Sin) => Ok(Map::Sin),
            ExprKind::Germ(Germ::ZExp) => Ok(Map::ZExp),
            ExprKind::Call(Func::Expm1, a) if is_z(a) => Ok(Map::Expm1),
            ExprKind::Call(Func::Sin, a) if is_z(a) => Ok(Map::Sin),
            ExprKind::Bin(BinOp::Sub, a, b) if is_exp_z(a) && is_one(b) => Ok(Map::Expm1),
            ExprKind::Bin(BinOp::Mul, a, b)
                if (is_z(a) && is_exp_z(b)) || (is_exp_z(a) && is_z(b)) =>
            {
                Ok(Map::ZExp)
            }
            _ => Err(not(
                "only rational functions, e^z − 1, sin z and z·e^z are supported",
            )),
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized canonical form; stable, used for cache keys.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(v) => write!(f, "({})", rational_fraction_string(v)),
            ExprKind::Z => f.write_str("z"),
            ExprKind::Neg(a) => write!(f, "(-{a})"),
            ExprKind::Bin(op, a, b) => {
                let c = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "({a}{c}{b})")
            }
            ExprKind::Pow(a, n) => write!(f, "({a}^({n}))"),
            ExprKind::Call(func, a) => {
                let name = match func {
                    Func::Exp => "exp",
                    Func::Log => "log",
                    Func::Sin => "sin",
                    Func::Expm1 => "expm1",
                };
                write!(f, "{name}({a})")
            }
            ExprKind::Germ(g) => match g {
                Germ::Expm1 => f.write_str("expm1"),
                Germ::Sin => f.write_str("sin"),
                Germ::ZExp => f.write_str("zexp"),
                Germ::Quadratic => f.write_str("quadratic"),
                Germ::Moebius(c) => write!(f, "moebius({})", rational_fraction_string(c)),
            },
            ExprKind::BigO(n) => write!(f, "O(z^{n})"),
        }
    }
}

/// An exact series as an expression that parses back to the same value,
/// e.g. `1/2*z^2 - 1/12*z^3 + O(z^4)`.
pub fn series_to_expr(s: &ExactSeries) -> String {
    let mut out = String::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = rational_fraction_string(&c.abs());
        let mag = mag.strip_suffix("/1").unwrap_or(&mag);
        let body = match k {
            0 => mag.to_string(),
            1 => format!("{mag}*z"),
            _ => format!("{mag}*z^{k}"),
        };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if !out.is_empty() {
        out.push_str(" + ");
    }
    out.push_str(&format!("O(z^{})", s.order() + 1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;
    use proptest::prelude::*;

    fn series(text: &str, n: usize) -> ExactSeries {
        Expr::parse(text).unwrap().eval(n).unwrap()
    }

    fn poly(c: &[Rational], n: usize) -> ExactSeries {
        PowerSeries::from_polynomial(c, n)
    }

    #[test]
    fn precedence() {
        assert_eq!(
            series("-z^2", 4),
            poly(&[rat(0, 1), rat(0, 1), rat(-1, 1)], 4)
        );
        assert_eq!(series("2^3^2", 0), PowerSeries::constant(rat(512, 1), 0));
        assert_eq!(series("1 - 2 - 3", 0), PowerSeries::constant(rat(-4, 1), 0));
        assert_eq!(series("12/2/3", 0), PowerSeries::constant(rat(2, 1), 0));
        assert_eq!(series("2^-1", 0), PowerSeries::constant(rat(1, 2), 0));
        assert_eq!(series("0.25*z", 2), poly(&[rat(0, 1), rat(1, 4)], 2));
    }

    #[test]
    fn named_functions() {
        let e = series("exp(z)-1", 7);
        let want: Vec<Rational> = (0..=7)
            .map(|k| {
                if k == 0 {
                    rat(0, 1)
                } else {
                    Rational::new(1.into(), crate::coeff::factorial(k))
                }
            })
            .collect();
        assert_eq!(e.coeffs(), &want[..]);
        assert_eq!(series("expm1", 7), e);
        assert_eq!(series("expm1(z)", 7), e);
        assert_eq!(
            series("sin(z)", 7),
            poly(
                &[
                    rat(0, 1),
                    rat(1, 1),
                    rat(0, 1),
                    rat(-1, 6),
                    rat(0, 1),
                    rat(1, 120),
                    rat(0, 1),
                    rat(-1, 5040)
                ],
                7
            )
        );
        assert_eq!(
            series("z*exp(z)", 4),
            poly(&[rat(0, 1), rat(1, 1), rat(1, 1), rat(1, 2), rat(1, 6)], 4)
        );
        assert_eq!(series("zexp", 4), series("z*exp(z)", 4));
        assert_eq!(series("quadratic", 5), series("z + z^2", 5));
        assert_eq!(series("log(exp(z))", 9), series("z", 9));
    }

    #[test]
    fn moebius_forms_agree() {
        assert_eq!(series("z/(1 - (3/5)*z)", 12), series("moebius(3/5)", 12));
        let mut params = BTreeMap::new();
        params.insert("c".to_string(), rat(3, 5));
        let e = Expr::parse_with("z/(1 - c*z)", &params).unwrap();
        assert_eq!(e.eval(12).unwrap(), series("moebius(3/5)", 12));
    }

    #[test]
    fn division_by_valuation_keeps_order() {
        // (e^z − 1)/z loses one order at the working order; eval recovers it
        let s = series("(exp(z) - 1)/z", 6);
        assert_eq!(s.order(), 6);
        assert_eq!(s.coeffs()[6], rat(1, 5040));
        assert_eq!(series("z + O(z^3)", 10).order(), 2);
    }

    #[test]
    fn errors_carry_positions() {
        let e = Expr::parse("z + foo").unwrap_err();
        assert_eq!(e.pos, 4);
        assert_eq!(e.kind, ExprErrorKind::UnknownIdentifier("foo".into()));
        assert_eq!(
            Expr::parse("z^(1/2)").unwrap_err().kind,
            ExprErrorKind::NonIntegerExponent
        );
        assert_eq!(Expr::parse("z^z").unwrap_err().pos, 2);
        assert_eq!(Expr::parse("(z + 1").unwrap_err().pos, 6);
        assert!(matches!(
            Expr::parse("z $ 1").unwrap_err().kind,
            ExprErrorKind::Syntax(_)
        ));
        let e = Expr::parse("1 + exp(1 + z)").unwrap().eval(5).unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(matches!(e.kind, ExprErrorKind::Series(_)));
        assert!(Expr::parse("log(z)").unwrap().eval(5).is_err());
    }

    #[test]
    fn numeric_maps() {
        let m = Expr::parse("2*z/(1+z^2)").unwrap().to_map().unwrap();
        let x = Complex::new(0.3, 0.0);
        assert!((m.eval(x) - 2.0 * x / (1.0 + x * x)).norm() < 1e-15);
        assert!(matches!(
            Expr::parse("z^2").unwrap().to_map().unwrap(),
            Map::Polynomial(_)
        ));
        assert_eq!(
            Expr::parse("exp(z) - 1").unwrap().to_map().unwrap(),
            Map::Expm1
        );
        assert_eq!(
            Expr::parse("exp(z)*z").unwrap().to_map().unwrap(),
            Map::ZExp
        );
        assert_eq!(Expr::parse("sin(z)").unwrap().to_map().unwrap(), Map::Sin);
        assert!(Expr::parse("exp(z) + z").unwrap().to_map().is_err());
    }

    #[test]
    fn canonical_text() {
        let a = Expr::parse("z+ z^2").unwrap().to_string();
        let b = Expr::parse("(z) + (z^2)").unwrap().to_string();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn printed_series_parse_back(
            coeffs in prop::collection::vec((-20i64..20, 1i64..9), 1..12)
        ) {
            let s = PowerSeries::from_coeffs(coeffs.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap();
            let text = series_to_expr(&s);
            prop_assert_eq!(series(&text, 40), s);
        }
    }
}
