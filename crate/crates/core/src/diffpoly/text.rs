//! Printing and parsing of differential polynomials.
//!
//! Terms appear in ascending rank order; a monomial is written
//! `X^a (X')^b (X'')^c …` with factors separated by spaces, and compound
//! coefficients (polynomials in `z`) are parenthesized:
//!
//! ```text
//! -Y + (1 - z) Y'
//! X X'' - (X')^2
//! ```

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use super::{DiffCoeff, DiffPolynomial, MultiIndex, RatPoly};
use crate::coeff::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn monomial_text(index: &MultiIndex, var: char) -> String {
    let mut parts = Vec::new();
    for (k, &e) in index.entries().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let base = format!("{var}{}", "'".repeat(k));
        parts.push(match (k, e) {
            (_, 1) => base,
            (0, _) => format!("{base}^{e}"),
            _ => format!("({base})^{e}"),
        });
    }
    parts.join(" ")
}

impl<R: DiffCoeff> DiffPolynomial<R> {
    /// Text form with `var` as the differential indeterminate.
    /// Terms are written from the highest rank down.
    pub fn render(&self, var: char) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, (index, c)) in self.terms().rev().enumerate() {
            let mono = monomial_text(index, var);
            let (ctext, compound) = c.render();
            let term = if mono.is_empty() {
                ctext
            } else {
                match c.unit_sign() {
                    Some(1) => mono,
                    Some(_) => format!("-{mono}"),
                    None if compound => format!("({ctext}) {mono}"),
                    None => format!("{ctext} {mono}"),
                }
            };
            if n == 0 {
                out.push_str(&term);
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }
}

impl<R: DiffCoeff> fmt::Display for DiffPolynomial<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render('Y'))
    }
}

impl<R: DiffCoeff> fmt::Debug for DiffPolynomial<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffPolynomial({})", self.render('Y'))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Z,
    Var(char, usize),
    Caret,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'/') {
                    i += 1;
                }
                let lit = &text[start..i];
                let v = parse_rational(lit).ok_or(ParseError {
                    pos: start,
                    msg: format!("bad number `{lit}`"),
                })?;
                out.push((start, Tok::Num(v)));
                continue;
            }
            'z' => out.push((start, Tok::Z)),
            'A'..='Z' => {
                i += 1;
                let mut primes = 0;
                while i < bytes.len() && bytes[i] == b'\'' {
                    primes += 1;
                    i += 1;
                }
                out.push((start, Tok::Var(c, primes)));
                continue;
            }
            '^' => out.push((start, Tok::Caret)),
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            other => {
                return Err(ParseError {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

type RatDiff = DiffPolynomial<RatPoly>;

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    var: Option<char>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.here(),
            msg: msg.into(),
        }
    }

    fn sum(&mut self) -> Result<RatDiff, ParseError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                self.product()?.neg()
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<RatDiff, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(Tok::Num(_) | Tok::Z | Tok::Var(..) | Tok::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<RatDiff, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n.is_integer() => {
                    self.pos += 1;
                    let e: u32 = n
                        .numer()
                        .try_into()
                        .map_err(|_| self.err("exponent out of range"))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("expected a non-negative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatDiff, ParseError> {
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(DiffPolynomial::term(
                    RatPoly::constant(n),
                    MultiIndex::zero(),
                ))
            }
            Some(Tok::Z) => {
                self.pos += 1;
                Ok(DiffPolynomial::term(
                    RatPoly::monomial(Rational::from_integer(1.into()), 1),
                    MultiIndex::zero(),
                ))
            }
            Some(Tok::Var(c, k)) => {
                match self.var {
                    Some(v) if v != c => {
                        return Err(self.err(format!("mixed indeterminates `{v}` and `{c}`")))
                    }
                    _ => self.var = Some(c),
                }
                self.pos += 1;
                Ok(DiffPolynomial::derivative_var(k))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

/// Parse a differential polynomial with coefficients in `ℚ[z]`. Any single
/// capital letter may serve as the indeterminate.
pub fn parse_rat_diff(text: &str) -> Result<RatDiff, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        var: None,
    };
    let out = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

/// Parse a differential polynomial with integer coefficients.
pub fn parse_int_diff(text: &str) -> Result<DiffPolynomial<BigInt>, ParseError> {
    let p = parse_rat_diff(text)?;
    let mut out = DiffPolynomial::zero();
    for (i, c) in p.terms() {
        match c.coeffs() {
            [v] if v.is_integer() => out.add_term(i.clone(), v.numer().clone()),
            _ => {
                return Err(ParseError {
                    pos: 0,
                    msg: "coefficients must be integers".into(),
                })
            }
        }
    }
    Ok(out)
}

impl std::str::FromStr for DiffPolynomial<RatPoly> {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_rat_diff(s)
    }
}

impl std::str::FromStr for DiffPolynomial<BigInt> {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_int_diff(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;
    use crate::diffpoly::chain_a;
    use proptest::prelude::*;

    #[test]
    fn renders_chain_rows() {
        let a = chain_a(2);
        assert_eq!(a.get(0, 2).render('X'), "X X'' - (X')^2");
        assert_eq!(a.get(2, 2).render('X'), "X^2");
        assert_eq!(a.get(0, 0).render('X'), "1");
    }

    #[test]
    fn renders_polynomial_coefficients() {
        let p = DiffPolynomial::from_terms([
            (
                MultiIndex::unit(1),
                RatPoly::new(vec![rat(1, 1), rat(-1, 1)]),
            ),
            (MultiIndex::unit(0), RatPoly::constant(rat(-1, 1))),
        ]);
        assert_eq!(p.to_string(), "(1 - z) Y' - Y");
        assert_eq!(parse_rat_diff("-Y + (1 - z) Y'").unwrap(), p);
    }

    #[test]
    fn parses_loose_forms() {
        let p = parse_int_diff("Y*Y'' + Y'^3").unwrap();
        // `^` binds to the primed variable
        assert_eq!(p.rank().unwrap(), &MultiIndex::new(vec![1, 0, 1]));
        assert_eq!(parse_int_diff("2 X (X')^2 - 3").unwrap().len(), 2);
        assert!(parse_int_diff("1/2 Y").is_err());
        assert!(parse_rat_diff("X + Y").is_err());
        assert!(parse_rat_diff("Y +").is_err());
        assert!(parse_rat_diff("Y ^ z").is_err());
    }

    fn arb_poly() -> impl Strategy<Value = DiffPolynomial<RatPoly>> {
        let term = (
            prop::collection::vec(0u32..3, 0..4),
            prop::collection::vec((-5i64..6, 1i64..4), 1..3),
        );
        prop::collection::vec(term, 0..5).prop_map(|terms| {
            DiffPolynomial::from_terms(terms.into_iter().map(|(i, c)| {
                (
                    MultiIndex::new(i),
                    RatPoly::new(c.into_iter().map(|(n, d)| rat(n, d)).collect()),
                )
            }))
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(p in arb_poly()) {
            let text = p.render('Y');
            prop_assert_eq!(parse_rat_diff(&text).unwrap(), p);
        }
    }
}
