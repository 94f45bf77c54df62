//! Truncated formal power series.
//!
//! A [`PowerSeries`] of order `N` stores `c_0, …, c_N`; everything past `N`
//! is unknown, not zero. Each operation reports the order up to which its
//! result is guaranteed, so truncation error never turns into fabricated
//! coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::coeff::{Coeff, Complex, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("coefficient domains differ (exact rational vs complex float)")]
    DomainMismatch,
    #[error("division by the zero series")]
    DivisionByZero,
    #[error("quotient is not a power series: divisor valuation {divisor} exceeds dividend valuation {dividend}")]
    NotAPowerSeries { dividend: usize, divisor: usize },
    #[error("derivative of an order-0 series has no known coefficients")]
    EmptyResult,
    #[error("composition is not formal: inner series has non-zero constant term")]
    CompositionNotFormal,
    #[error("series is not invertible under composition: {0}")]
    NotInvertible(&'static str),
    #[error("{op} needs constant term {expected}")]
    NonFormalTranscendental {
        op: &'static str,
        expected: &'static str,
    },
    #[error("series must contain at least one coefficient")]
    Empty,
}

/// Truncated power series `c_0 + c_1 z + … + c_N z^N + O(z^{N+1})`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries<C> {
    coeffs: Vec<C>,
}

pub type ExactSeries = PowerSeries<Rational>;
pub type FloatSeries = PowerSeries<Complex>;

impl<C: Coeff> PowerSeries<C> {
    /// Series whose order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<C>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(PowerSeries { coeffs })
    }

    /// An exact polynomial viewed as a series of the given order; terms of
    /// degree above `order` are dropped.
    pub fn from_polynomial(poly: &[C], order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| poly.get(k).cloned().unwrap_or_else(C::zero))
            .collect();
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![C::zero(); order + 1],
        }
    }

    pub fn constant(c: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(C::one(), order)
    }

    /// `c·z^k`, truncated at `order`.
    pub fn monomial(c: C, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The identity series `z`.
    pub fn var(order: usize) -> Self {
        Self::monomial(C::one(), 1, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `z^k`, or `None` beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&C> {
        self.coeffs.get(k)
    }

    /// Index of the first non-zero coefficient, `None` if all known
    /// coefficients vanish.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Drop coefficients above `order` (no-op if already shorter).
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        PowerSeries {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PowerSeries<D> {
        PowerSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|x| x.mul_ref(c))
    }

    /// Multiply by `z^k`; the order grows by `k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        PowerSeries { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| self.coeffs[k].add_ref(&other.coeffs[k]))
            .collect();
        PowerSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| self.coeffs[k].sub_ref(&other.coeffs[k]))
            .collect();
        PowerSeries { coeffs }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg_ref())
    }

    /// Cauchy product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        self.mul_to(other, n)
    }

    /// Cauchy product truncated at `order`. Only exact if both factors are
    /// known far enough, see [`PowerSeries::mul_sharp`].
    pub(crate) fn mul_to(&self, other: &Self, order: usize) -> Self {
        let a = &self.coeffs;
        let b = &other.coeffs;
        let va = self.valuation().unwrap_or(a.len());
        let vb = other.valuation().unwrap_or(b.len());
        let coeffs = (0..=order)
            .map(|k| {
                if k < va + vb {
                    return C::zero();
                }
                let lo = k.saturating_sub(b.len() - 1).max(va);
                let hi = (k - vb).min(a.len() - 1);
                if lo > hi {
                    return C::zero();
                }
                C::dot((lo..=hi).map(|i| (&a[i], &b[k - i])))
            })
            .collect();
        PowerSeries { coeffs }
    }

    /// Cauchy product at the tightest guaranteed order
    /// `min(N_a + v_b, N_b + v_a)`, where `v` is the valuation.
    pub fn mul_sharp(&self, other: &Self) -> Self {
        let order = match (self.valuation(), other.valuation()) {
            (Some(va), Some(vb)) => (self.order() + vb).min(other.order() + va),
            (None, Some(vb)) => self.order() + vb,
            (Some(va), None) => other.order() + va,
            (None, None) => self.order().max(other.order()),
        };
        self.mul_to(other, order)
    }

    /// Integer power by repeated multiplication at the smaller order.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient `q` with `q·b ≡ a`; result order `min(N_a, N_b) − v_b`.
    pub fn div(&self, divisor: &Self) -> Result<Self, SeriesError> {
        let vb = divisor.valuation().ok_or(SeriesError::DivisionByZero)?;
        match self.valuation() {
            Some(va) if va < vb => {
                return Err(SeriesError::NotAPowerSeries {
                    dividend: va,
                    divisor: vb,
                })
            }
            None if self.order() < vb => {
                return Err(SeriesError::NotAPowerSeries {
                    dividend: self.order() + 1,
                    divisor: vb,
                })
            }
            _ => {}
        }
        let n = self.order().min(divisor.order()) - vb;
        let a = &self.coeffs[vb..];
        let b = &divisor.coeffs[vb..];
        let lead = &b[0];
        let mut q: Vec<C> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let known = C::dot((1..=k).map(|i| (&b[i], &q[k - i])));
            q.push(a[k].sub_ref(&known).div_ref(lead));
        }
        Ok(PowerSeries { coeffs: q })
    }

    pub fn derive(&self) -> Result<Self, SeriesError> {
        if self.order() == 0 {
            return Err(SeriesError::EmptyResult);
        }
        let coeffs = (1..=self.order())
            .map(|k| self.coeffs[k].mul_i64(k as i64))
            .collect();
        Ok(PowerSeries { coeffs })
    }

    /// Antiderivative with zero constant term; the order grows by one.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.div_i64(k as i64 + 1));
        }
        PowerSeries { coeffs }
    }

    /// `outer(inner(z))` by Horner's rule, truncated at the smaller order.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::CompositionNotFormal);
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Self::constant(self.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].add_ref(&self.coeffs[k]);
        }
        Ok(acc)
    }

    /// Compositional inverse `g` with `a(g(z)) = z`, same order as `a`.
    pub fn reverse(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NotInvertible("constant term is non-zero"));
        }
        if self.order() == 0 {
            return Err(SeriesError::NotInvertible("order 0 carries no linear term"));
        }
        let a1 = &self.coeffs[1];
        if a1.is_negligible() {
            return Err(SeriesError::NotInvertible("linear coefficient vanishes"));
        }
        let n = self.order();
        // Solve [z^k] a(g) = 0 for k ≥ 2 one coefficient at a time, keeping
        // the power table g^j incrementally: [z^k] g^j only involves g_i, i < k
        // once j ≥ 2.
        let mut g = vec![C::zero(); n + 1];
        g[1] = C::one().div_ref(a1);
        // pw[j][k] = [z^k] g^j
        let mut pw = vec![vec![C::zero(); n + 1]; n + 1];
        pw[1][1] = g[1].clone();
        for k in 2..=n {
            for j in 2..=k {
                let val = C::dot((1..=k + 1 - j).map(|i| (&g[i], &pw[j - 1][k - i])));
                pw[j][k] = val;
            }
            let rest = C::dot((2..=k).map(|j| (&self.coeffs[j], &pw[j][k])));
            g[k] = rest.neg_ref().div_ref(a1);
            pw[1][k] = g[k].clone();
        }
        Ok(PowerSeries { coeffs: g })
    }

    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonFormalTranscendental {
                op: "exp",
                expected: "0",
            });
        }
        // k·E_k = Σ_{j=1}^k j·a_j·E_{k−j}
        let n = self.order();
        let da: Vec<C> = (0..=n).map(|j| self.coeffs[j].mul_i64(j as i64)).collect();
        let mut e: Vec<C> = Vec::with_capacity(n + 1);
        e.push(C::one());
        for k in 1..=n {
            let s = C::dot((1..=k).map(|j| (&da[j], &e[k - j])));
            e.push(s.div_i64(k as i64));
        }
        Ok(PowerSeries { coeffs: e })
    }

    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] != C::one() {
            return Err(SeriesError::NonFormalTranscendental {
                op: "log",
                expected: "1",
            });
        }
        // k·a_k = Σ_{j=1}^k j·L_j·a_{k−j}
        let n = self.order();
        let mut jl: Vec<C> = vec![C::zero(); n + 1];
        for k in 1..=n {
            let s = C::dot((1..k).map(|j| (&jl[j], &self.coeffs[k - j])));
            jl[k] = self.coeffs[k].mul_i64(k as i64).sub_ref(&s);
        }
        let coeffs = jl
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k == 0 {
                    C::zero()
                } else {
                    c.div_i64(k as i64)
                }
            })
            .collect();
        Ok(PowerSeries { coeffs })
    }

    /// `(sin a, cos a)` for `a(0) = 0`.
    pub fn sin_cos(&self) -> Result<(Self, Self), SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonFormalTranscendental {
                op: "sin/cos",
                expected: "0",
            });
        }
        let n = self.order();
        let da: Vec<C> = (0..=n).map(|j| self.coeffs[j].mul_i64(j as i64)).collect();
        let mut s: Vec<C> = vec![C::zero()];
        let mut c: Vec<C> = vec![C::one()];
        for k in 1..=n {
            let sk = C::dot((1..=k).map(|j| (&da[j], &c[k - j])));
            let ck = C::dot((1..=k).map(|j| (&da[j], &s[k - j])));
            s.push(sk.div_i64(k as i64));
            c.push(ck.neg_ref().div_i64(k as i64));
        }
        Ok((PowerSeries { coeffs: s }, PowerSeries { coeffs: c }))
    }

    /// Coefficient-wise agreement up to the smaller of the two orders.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = self.order().min(other.order());
        self.coeffs[..=n] == other.coeffs[..=n]
    }

    /// Evaluate the truncated polynomial at a point (float mode).
    pub fn eval_at(&self, z: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc.mul_ref(z).add_ref(c))
    }
}

impl PowerSeries<Complex> {
    /// Largest coefficient-wise modulus of the difference, over the common order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl PowerSeries<Rational> {
    pub fn to_float(&self) -> PowerSeries<Complex> {
        self.map(Complex::from_rational)
    }
}

impl<C: fmt::Debug> fmt::Debug for PowerSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowerSeries[")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            write!(f, " {k}: {c:?};")?;
        }
        write!(f, " O(z^{})]", self.coeffs.len())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl<C: Coeff> $tr<&PowerSeries<C>> for &PowerSeries<C> {
            type Output = PowerSeries<C>;
            fn $m(self, rhs: &PowerSeries<C>) -> PowerSeries<C> {
                PowerSeries::$m(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<C: Coeff> Neg for &PowerSeries<C> {
    type Output = PowerSeries<C>;
    fn neg(self) -> PowerSeries<C> {
        PowerSeries::neg(self)
    }
}

/// A series in either coefficient domain, as read from a series file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySeries {
    Exact(ExactSeries),
    Float(FloatSeries),
}

impl AnySeries {
    pub fn order(&self) -> usize {
        match self {
            AnySeries::Exact(s) => s.order(),
            AnySeries::Float(s) => s.order(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        match (self, other) {
            (AnySeries::Exact(a), AnySeries::Exact(b)) => Ok(AnySeries::Exact(a.add(b))),
            (AnySeries::Float(a), AnySeries::Float(b)) => Ok(AnySeries::Float(a.add(b))),
            _ => Err(SeriesError::DomainMismatch),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        match (self, other) {
            (AnySeries::Exact(a), AnySeries::Exact(b)) => Ok(AnySeries::Exact(a.mul(b))),
            (AnySeries::Float(a), AnySeries::Float(b)) => Ok(AnySeries::Float(a.mul(b))),
            _ => Err(SeriesError::DomainMismatch),
        }
    }

    pub fn into_exact(self) -> Result<ExactSeries, SeriesError> {
        match self {
            AnySeries::Exact(s) => Ok(s),
            AnySeries::Float(_) => Err(SeriesError::DomainMismatch),
        }
    }
}
