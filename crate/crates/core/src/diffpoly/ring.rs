//! Coefficient rings for differential polynomials: integers, polynomials in
//! `z` over the rationals, and truncated power series.

use std::fmt::{self, Debug};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::coeff::{Coeff, Rational};
use crate::series::{ExactSeries, PowerSeries, SeriesError};

pub trait DiffCoeff: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// The ring's own derivation `d/dz` (zero on the integers).
    fn derive(&self) -> Self;
    /// Embed into a series ring at the given order.
    fn to_series<C: Coeff>(&self, order: usize) -> Result<PowerSeries<C>, SeriesError>;
    /// Text for the printing format, plus whether the value is compound
    /// and needs parentheses in front of a monomial.
    fn render(&self) -> (String, bool);
    /// `Some(±1)` when the value is the unit or its negative.
    fn unit_sign(&self) -> Option<i8>;
}

impl DiffCoeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn derive(&self) -> Self {
        Zero::zero()
    }
    fn to_series<C: Coeff>(&self, order: usize) -> Result<PowerSeries<C>, SeriesError> {
        let r = Rational::from_integer(self.clone());
        Ok(PowerSeries::constant(C::from_rational(&r), order))
    }
    fn render(&self) -> (String, bool) {
        (self.to_string(), false)
    }
    fn unit_sign(&self) -> Option<i8> {
        if self.is_one() {
            Some(1)
        } else if (-self).is_one() {
            Some(-1)
        } else {
            None
        }
    }
}

/// Polynomial in `z` with rational coefficients, lowest degree first,
/// without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly(Vec<Rational>);

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly(coeffs)
    }

    pub fn constant(c: Rational) -> Self {
        RatPoly::new(vec![c])
    }

    /// `c·z^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![<Rational as Zero>::zero(); k + 1];
        v[k] = c;
        RatPoly::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    /// Degree in `z`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.0.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatPoly::new(self.0.iter().map(|x| x * c).collect())
    }
}

impl Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({})", self.render().0)
    }
}

fn rational_text(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl DiffCoeff for RatPoly {
    fn zero() -> Self {
        RatPoly(Vec::new())
    }
    fn one() -> Self {
        RatPoly::constant(<Rational as One>::one())
    }
    fn from_i64(v: i64) -> Self {
        RatPoly::constant(Rational::from_integer(BigInt::from(v)))
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = <Rational as Zero>::zero();
        RatPoly::new(
            (0..n)
                .map(|k| self.0.get(k).unwrap_or(&zero) + other.0.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
    fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return RatPoly(Vec::new());
        }
        let mut out = vec![<Rational as Zero>::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
    fn neg(&self) -> Self {
        RatPoly(self.0.iter().map(|c| -c).collect())
    }
    fn derive(&self) -> Self {
        RatPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }
    fn to_series<C: Coeff>(&self, order: usize) -> Result<PowerSeries<C>, SeriesError> {
        let c: Vec<C> = self.0.iter().map(C::from_rational).collect();
        Ok(PowerSeries::from_polynomial(&c, order))
    }
    fn render(&self) -> (String, bool) {
        let terms: Vec<(usize, &Rational)> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .collect();
        if terms.is_empty() {
            return ("0".into(), false);
        }
        let mut out = String::new();
        for (n, (k, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            let body = match (*k, mag.is_one()) {
                (0, _) => rational_text(&mag),
                (1, true) => "z".to_string(),
                (1, false) => format!("{} z", rational_text(&mag)),
                (_, true) => format!("z^{k}"),
                (_, false) => format!("{} z^{k}", rational_text(&mag)),
            };
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        (out, terms.len() > 1)
    }
    fn unit_sign(&self) -> Option<i8> {
        if self.0.len() != 1 {
            return None;
        }
        if self.0[0].is_one() {
            Some(1)
        } else if (-&self.0[0]).is_one() {
            Some(-1)
        } else {
            None
        }
    }
}

impl DiffCoeff for ExactSeries {
    fn zero() -> Self {
        PowerSeries::zero(0)
    }
    fn one() -> Self {
        PowerSeries::one(0)
    }
    fn from_i64(v: i64) -> Self {
        PowerSeries::constant(<Rational as Coeff>::from_i64(v), 0)
    }
    fn is_zero(&self) -> bool {
        PowerSeries::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        // constants (order 0) act as exact scalars
        match (self.order(), other.order()) {
            (0, n) if n > 0 => PowerSeries::constant(self.coeffs()[0].clone(), n).add(other),
            (n, 0) if n > 0 => self.add(&PowerSeries::constant(other.coeffs()[0].clone(), n)),
            _ => PowerSeries::add(self, other),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        match (self.order(), other.order()) {
            (0, n) if n > 0 => other.scale(&self.coeffs()[0]),
            (n, 0) if n > 0 => self.scale(&other.coeffs()[0]),
            _ => PowerSeries::mul(self, other),
        }
    }
    fn neg(&self) -> Self {
        PowerSeries::neg(self)
    }
    fn derive(&self) -> Self {
        PowerSeries::derive(self).unwrap_or_else(|_| PowerSeries::zero(0))
    }
    fn to_series<C: Coeff>(&self, order: usize) -> Result<PowerSeries<C>, SeriesError> {
        let s = if self.order() == 0 {
            PowerSeries::constant(self.coeffs()[0].clone(), order)
        } else {
            self.truncate(order)
        };
        Ok(s.map(C::from_rational))
    }
    fn render(&self) -> (String, bool) {
        let poly = RatPoly::new(self.coeffs().to_vec());
        let (text, _) = poly.render();
        if self.order() == 0 {
            (text, false)
        } else {
            (format!("{text} + O(z^{})", self.order() + 1), true)
        }
    }
    fn unit_sign(&self) -> Option<i8> {
        if self.order() != 0 {
            return None;
        }
        RatPoly::new(self.coeffs().to_vec()).unit_sign()
    }
}
