//! Coefficient domains for truncated power series.
//!
//! Two domains exist: exact rationals ([`Rational`], always kept in lowest
//! terms with a positive denominator) and double-precision complex numbers
//! ([`Complex`]). Series algorithms are written once against [`Coeff`]; the
//! type system keeps the two domains from ever mixing in one computation.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;
pub type Complex = num_complex::Complex64;

/// Pivots with modulus below this are treated as vanishing in float mode.
pub const FLOAT_PIVOT_TOL: f64 = 1e-12;

/// Arithmetic needed by the series algorithms.
///
/// The `*_ref` methods exist so big-rational code can avoid clones.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync + 'static {
    /// `true` for the exact rational domain.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;

    fn is_zero(&self) -> bool;
    /// Zero test used for division pivots: structural in exact mode,
    /// `|x| < FLOAT_PIVOT_TOL` in float mode.
    fn is_negligible(&self) -> bool;
    /// Modulus as a float, for diagnostics and multiplier checks.
    fn modulus(&self) -> f64;

    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    /// Caller guarantees `other` is non-zero.
    fn div_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn mul_i64(&self, k: i64) -> Self {
        self.mul_ref(&Self::from_i64(k))
    }

    fn div_i64(&self, k: i64) -> Self {
        self.div_ref(&Self::from_i64(k))
    }

    /// `Σ a_i·b_i` over the given pairs.
    fn dot<'a, I>(pairs: I) -> Self
    where
        I: Iterator<Item = (&'a Self, &'a Self)>,
        Self: 'a,
    {
        let mut acc = Self::zero();
        for (a, b) in pairs {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = acc.add_ref(&a.mul_ref(b));
        }
        acc
    }
}

impl Coeff for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negligible(&self) -> bool {
        Zero::is_zero(self)
    }
    fn modulus(&self) -> f64 {
        rational_to_f64(&self.abs())
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }
    fn neg_ref(&self) -> Self {
        -self
    }

    // Sums the products over their common denominator and reduces once,
    // instead of paying a gcd per addition.
    fn dot<'a, I>(pairs: I) -> Self
    where
        I: Iterator<Item = (&'a Self, &'a Self)>,
    {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (a, b) in pairs {
            if Zero::is_zero(a) || Zero::is_zero(b) {
                continue;
            }
            let pn = a.numer() * b.numer();
            let pd = a.denom() * b.denom();
            if pd == den {
                num += pn;
            } else {
                let g = den.gcd(&pd);
                let scale_acc = &pd / &g;
                let scale_term = &den / &g;
                num = num * &scale_acc + pn * scale_term;
                den *= scale_acc;
            }
        }
        Rational::new(num, den)
    }
}

impl Coeff for Complex {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex::new(v as f64, 0.0)
    }
    fn from_rational(r: &Rational) -> Self {
        Complex::new(rational_to_f64(r), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_negligible(&self) -> bool {
        self.norm() < FLOAT_PIVOT_TOL
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

/// Nearest-ish `f64` for a big rational, robust to huge numerators and
/// denominators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    // keep ~60 significant bits of each part
    let ns = (nb - 60).max(0);
    let ds = (db - 60).max(0);
    let n = (r.numer() >> ns as usize).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> ds as usize).to_f64().unwrap_or(f64::NAN);
    let exp = ns - ds;
    (n / d) * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Parse `a`, `a/b` or a decimal `a.b` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mut n: BigInt = digits.parse().ok()?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        return Some(Rational::new(n, d));
    }
    let n: BigInt = text.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// `num/den` with the denominator always written, as in the series text format.
pub fn rational_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_canonical() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(rat(2, 4), rat(1, 2));
    }

    #[test]
    fn rational_dot_matches_naive_sum() {
        let a = [rat(1, 2), rat(-2, 3), rat(5, 7), rat(0, 1)];
        let b = [rat(3, 4), rat(9, 10), rat(-1, 6), rat(4, 1)];
        let naive = a.iter().zip(&b).fold(rat(0, 1), |acc, (x, y)| acc + x * y);
        assert_eq!(<Rational as Coeff>::dot(a.iter().zip(&b)), naive);
    }

    #[test]
    fn parses_rational_literals() {
        assert_eq!(parse_rational("3/5"), Some(rat(3, 5)));
        assert_eq!(parse_rational("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_rational("7"), Some(rat(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn huge_rational_to_float() {
        let big = Rational::new(factorial(300), factorial(299));
        assert!((rational_to_f64(&big) - 300.0).abs() < 1e-9);
    }
}
