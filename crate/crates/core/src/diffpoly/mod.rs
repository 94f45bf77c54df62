//! Differential polynomials `P = Σ P_i Y^i` in one differential
//! indeterminate, with anti-lexicographic ranking, degree/weight, evaluation
//! at power series, and the chain-rule families produced by differentiating
//! Julia's equation.

mod chain;
mod multi_index;
mod ring;
mod text;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeff::Coeff;
use crate::series::{PowerSeries, SeriesError};

pub use chain::{chain_a, chain_b, ChainFamilyA};
pub use multi_index::{compare_antilex, MultiIndex};
pub use ring::{DiffCoeff, RatPoly};
pub use text::{parse_int_diff, parse_rat_diff, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffPolyError {
    #[error("rank is undefined for the zero differential polynomial")]
    RankOfZero,
    #[error("degree and weight are undefined for the zero differential polynomial")]
    DegreeOfZero,
    #[error("series of order {available} is too short for a derivative of order {needed}")]
    OrderDeficit { needed: usize, available: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A finite sum of coefficient × differential monomial. Zero coefficients
/// are never stored; iteration is in ascending anti-lexicographic order.
#[derive(Clone, PartialEq)]
pub struct DiffPolynomial<R> {
    terms: BTreeMap<MultiIndex, R>,
}

impl<R: DiffCoeff> Default for DiffPolynomial<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: DiffCoeff> DiffPolynomial<R> {
    pub fn zero() -> Self {
        DiffPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::term(R::one(), MultiIndex::zero())
    }

    pub fn term(c: R, index: MultiIndex) -> Self {
        let mut p = Self::zero();
        p.add_term(index, c);
        p
    }

    /// The monomial `Y^{(k)}`.
    pub fn derivative_var(k: usize) -> Self {
        Self::term(R::one(), MultiIndex::unit(k))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, R)>) -> Self {
        let mut p = Self::zero();
        for (i, c) in terms {
            p.add_term(i, c);
        }
        p
    }

    pub fn add_term(&mut self, index: MultiIndex, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&index) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&index);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(index, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &R)> {
        self.terms.iter()
    }

    pub fn coeff(&self, index: &MultiIndex) -> Option<&R> {
        self.terms.get(index)
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest derivative index occurring in the support (0 for constants).
    pub fn order(&self) -> usize {
        self.terms
            .keys()
            .filter_map(MultiIndex::order)
            .max()
            .unwrap_or(0)
    }

    /// Anti-lexicographically largest element of the support.
    pub fn rank(&self) -> Result<&MultiIndex, DiffPolyError> {
        self.terms
            .keys()
            .next_back()
            .ok_or(DiffPolyError::RankOfZero)
    }

    /// `(deg, wt)`: the maxima of `|i|` and `‖i‖` over the support.
    pub fn degree_weight(&self) -> Result<(u32, u32), DiffPolyError> {
        if self.is_zero() {
            return Err(DiffPolyError::DegreeOfZero);
        }
        let deg = self.terms.keys().map(MultiIndex::abs).max().unwrap();
        let wt = self.terms.keys().map(MultiIndex::wt).max().unwrap();
        Ok((deg, wt))
    }

    /// Every supported index has `|i| = deg(P)`.
    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(MultiIndex::abs);
        match it.next() {
            Some(d) => it.all(|x| x == d),
            None => true,
        }
    }

    /// Every supported index has `‖i‖ = wt(P)`.
    pub fn is_isobaric(&self) -> bool {
        let mut it = self.terms.keys().map(MultiIndex::wt);
        match it.next() {
            Some(w) => it.all(|x| x == w),
            None => true,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        DiffPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (i.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                out.add_term(i.add(j), a.mul(b));
            }
        }
        out
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_terms(self.terms.iter().map(|(i, x)| (i.clone(), x.mul(c))))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// The derivation extended from `Y^{(k)} ↦ Y^{(k+1)}` and the
    /// coefficient ring's own derivation.
    pub fn derive(&self) -> Self {
        let mut out = Self::zero();
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c.derive());
            for (k, &e) in i.entries().iter().enumerate() {
                if e > 0 {
                    out.add_term(i.moved(k, k + 1), c.mul(&R::from_i64(e as i64)));
                }
            }
        }
        out
    }

    /// Map coefficients into another ring.
    pub fn map_coeffs<S: DiffCoeff>(&self, f: impl Fn(&R) -> S) -> DiffPolynomial<S> {
        DiffPolynomial::from_terms(self.terms.iter().map(|(i, c)| (i.clone(), f(c))))
    }

    /// Substitute `y, y', y'', …` for `Y, Y', Y'', …`.
    ///
    /// The result has order `N − order(P)` where `N` is the order of `y`.
    pub fn evaluate<C: Coeff>(&self, y: &PowerSeries<C>) -> Result<PowerSeries<C>, DiffPolyError> {
        let r = self.order();
        if y.order() < r {
            return Err(DiffPolyError::OrderDeficit {
                needed: r,
                available: y.order(),
            });
        }
        let out_order = y.order() - r;
        let mut derivs = vec![y.truncate(out_order + r)];
        for k in 1..=r {
            let d = derivs[k - 1].derive()?;
            derivs.push(d);
        }
        let derivs: Vec<PowerSeries<C>> = derivs.iter().map(|d| d.truncate(out_order)).collect();
        // cache powers of each derivative
        let mut powers: Vec<Vec<PowerSeries<C>>> = vec![vec![PowerSeries::one(out_order)]; r + 1];
        let mut acc = PowerSeries::zero(out_order);
        for (i, c) in &self.terms {
            let mut mono = c.to_series::<C>(out_order)?;
            for (k, &e) in i.entries().iter().enumerate() {
                while powers[k].len() <= e as usize {
                    let next = powers[k].last().unwrap().mul(&derivs[k]);
                    powers[k].push(next);
                }
                if e > 0 {
                    mono = mono.mul(&powers[k][e as usize]);
                }
            }
            acc = acc.add(&mono);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, Rational};
    use num_bigint::BigInt;

    type IntPoly = DiffPolynomial<BigInt>;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn ip(terms: &[(i64, &[u32])]) -> IntPoly {
        DiffPolynomial::from_terms(terms.iter().map(|(c, i)| (mi(i), BigInt::from(*c))))
    }

    #[test]
    fn rank_examples() {
        let p = ip(&[(1, &[1, 0, 1]), (1, &[0, 3])]);
        assert_eq!(p.rank().unwrap(), &mi(&[1, 0, 1]));
        assert_eq!(ip(&[(1, &[1])]).rank().unwrap(), &mi(&[1]));
        assert_eq!(IntPoly::zero().rank(), Err(DiffPolyError::RankOfZero));
    }

    #[test]
    fn degree_weight_examples() {
        let p = ip(&[(1, &[1, 0, 1]), (1, &[0, 2])]);
        assert_eq!(p.degree_weight().unwrap(), (2, 2));
        assert!(p.is_homogeneous() && p.is_isobaric());
        let q = ip(&[(1, &[1]), (1, &[0, 1])]);
        assert_eq!(q.degree_weight().unwrap(), (1, 1));
        assert!(q.is_homogeneous() && !q.is_isobaric());
        assert_eq!(
            IntPoly::zero().degree_weight(),
            Err(DiffPolyError::DegreeOfZero)
        );
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = ip(&[(2, &[1, 1]), (-2, &[1, 1])]);
        assert!(p.is_zero());
        let q = ip(&[(1, &[1])]);
        assert!(q.sub(&q).is_zero());
    }

    #[test]
    fn derivation() {
        // (Y Y')' = (Y')² + Y Y''
        let p = ip(&[(1, &[1, 1])]);
        assert_eq!(p.derive(), ip(&[(1, &[0, 2]), (1, &[1, 0, 1])]));
        // z' = 1 in the polynomial ring
        let z = DiffPolynomial::term(RatPoly::monomial(rat(1, 1), 1), MultiIndex::zero());
        assert_eq!(z.derive(), DiffPolynomial::<RatPoly>::one());
    }

    fn exp_series(order: usize) -> PowerSeries<Rational> {
        PowerSeries::var(order).exp().unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let p = ip(&[(1, &[0, 1]), (-1, &[1])]);
        assert!(p.evaluate(&exp_series(15)).unwrap().is_zero());

        // z Y' − 2Y at z²
        let q = DiffPolynomial::from_terms([
            (mi(&[0, 1]), RatPoly::monomial(rat(1, 1), 1)),
            (mi(&[1]), RatPoly::constant(rat(-2, 1))),
        ]);
        let z2 = PowerSeries::monomial(rat(1, 1), 2, 10);
        assert!(q.evaluate(&z2).unwrap().is_zero());

        // Y' − 1 + Y² at tanh, known through z⁹
        let two_z = PowerSeries::monomial(rat(2, 1), 1, 9);
        let e2 = two_z.exp().unwrap();
        let one = PowerSeries::one(9);
        let tanh = e2.sub(&one).div(&e2.add(&one)).unwrap();
        let r = ip(&[(1, &[0, 1]), (-1, &[]), (1, &[2])]);
        let v = r.evaluate(&tanh).unwrap();
        assert_eq!(v.order(), 8);
        assert!(v.is_zero());
    }

    #[test]
    fn evaluate_order_deficit() {
        let p = ip(&[(1, &[0, 0, 1])]);
        assert_eq!(
            p.evaluate(&PowerSeries::<Rational>::var(1)),
            Err(DiffPolyError::OrderDeficit {
                needed: 2,
                available: 1
            })
        );
    }
}
