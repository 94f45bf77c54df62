//! Exact search for differential equations satisfied by a truncated series.
//!
//! The ansatz `Σ c_{a,i} z^a Y^i = 0` ranges over monomials `Y^i` of order
//! at most `r` and degree at most `d`, with polynomial coefficients of
//! `z`-degree at most `e`. Every column `z^a·y^i` is expanded to the known
//! order and an exact kernel vector is searched for. A miss means only that
//! no equation of that shape annihilates the series to the checked order.

mod linalg;

use num_bigint::BigInt;
use thiserror::Error;

use crate::coeff::{Coeff, Rational};
use crate::diffpoly::{DiffPolyError, DiffPolynomial, MultiIndex, RatPoly};
use crate::funceq::{itlog, itlog_input_order, FunceqError};
use crate::germ::ParabolicGerm;
use crate::series::{ExactSeries, PowerSeries};

/// Attached to every negative outcome.
pub const CAVEAT: &str = "no equation within the searched bounds; this is evidence only, \
not a proof of differential transcendence";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuessError {
    #[error(
        "series order {available} is too small: {unknowns} unknowns + margin {margin} need order {needed}"
    )]
    OrderDeficit {
        needed: usize,
        available: usize,
        unknowns: usize,
        margin: usize,
    },
    #[error("margin must be at least 1")]
    ZeroMargin,
    #[error("candidate failed the independent re-check; this is a bug")]
    Unsound,
    #[error(transparent)]
    DiffPoly(#[from] DiffPolyError),
    #[error(transparent)]
    Funceq(#[from] FunceqError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_order: usize,
    pub max_total_degree: u32,
    pub max_z_degree: usize,
    pub margin: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_order: 2,
            max_total_degree: 3,
            max_z_degree: 4,
            margin: 20,
        }
    }
}

impl SearchBounds {
    pub fn new(
        max_order: usize,
        max_total_degree: u32,
        max_z_degree: usize,
        margin: usize,
    ) -> Self {
        SearchBounds {
            max_order,
            max_total_degree,
            max_z_degree,
            margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Found,
    NoneWithinBounds,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Found => "found",
            Verdict::NoneWithinBounds => "none_within_bounds",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Algebraic differential equations, monomials of degree ≤ d.
    Ade,
    /// Homogeneous linear equations in `Y, …, Y^{(r)}`.
    LinearHomogeneous,
    /// Linear equations with an extra polynomial term.
    LinearAffine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuessOutcome {
    pub verdict: Verdict,
    pub candidate: Option<DiffPolynomial<RatPoly>>,
    /// Coefficients `0..=verified_to` of `P(y)` are exactly zero (found) or
    /// were all used in the search (none).
    pub verified_to: usize,
    pub bounds: SearchBounds,
    pub mode: SearchMode,
    pub unknowns: usize,
    pub equations: usize,
}

impl GuessOutcome {
    pub fn caveat(&self) -> Option<&'static str> {
        match self.verdict {
            Verdict::Found => None,
            Verdict::NoneWithinBounds => Some(CAVEAT),
        }
    }
}

fn monomials(mode: SearchMode, b: &SearchBounds) -> Vec<MultiIndex> {
    match mode {
        SearchMode::Ade => MultiIndex::enumerate(b.max_order, b.max_total_degree),
        SearchMode::LinearHomogeneous | SearchMode::LinearAffine => {
            let mut v = Vec::new();
            if mode == SearchMode::LinearAffine {
                v.push(MultiIndex::zero());
            }
            v.extend((0..=b.max_order).map(MultiIndex::unit));
            v
        }
    }
}

fn search(y: &ExactSeries, b: &SearchBounds, mode: SearchMode) -> Result<GuessOutcome, GuessError> {
    if b.margin == 0 {
        return Err(GuessError::ZeroMargin);
    }
    let monos = monomials(mode, b);
    let zdeg = b.max_z_degree;
    let unknowns = monos.len() * (zdeg + 1);
    let n = y.order();
    let r = b.max_order;
    // coefficients 0..=n−r of every column are known exactly
    let equations = (n + 1).saturating_sub(r);
    if unknowns + b.margin > n || equations <= unknowns {
        return Err(GuessError::OrderDeficit {
            needed: (unknowns + b.margin).max(unknowns + r),
            available: n,
            unknowns,
            margin: b.margin,
        });
    }
    let top = equations - 1;

    let values: Vec<ExactSeries> = monos
        .iter()
        .map(|i| {
            DiffPolynomial::term(
                RatPoly::constant(Rational::from_integer(1.into())),
                i.clone(),
            )
            .evaluate(&y.truncate(top + r))
            .map(|v| v.truncate(top))
        })
        .collect::<Result<_, _>>()?;

    // columns in ascending (monomial, z-power) order
    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(unknowns);
    let mut labels: Vec<(usize, usize)> = Vec::with_capacity(unknowns);
    for (mi, v) in values.iter().enumerate() {
        for a in 0..=zdeg {
            let col: Vec<Rational> = (0..equations)
                .map(|k| {
                    if k < a {
                        <Rational as Coeff>::zero()
                    } else {
                        v.coeffs()[k - a].clone()
                    }
                })
                .collect();
            cols.push(col);
            labels.push((mi, a));
        }
    }

    let outcome = |verdict, candidate| GuessOutcome {
        verdict,
        candidate,
        verified_to: top,
        bounds: *b,
        mode,
        unknowns,
        equations,
    };

    let Some((_, x)) = linalg::first_dependency(&cols, equations) else {
        return Ok(outcome(Verdict::NoneWithinBounds, None));
    };
    let ints = linalg::normalize(&x);
    let mut per_mono: Vec<Vec<Rational>> =
        vec![vec![<Rational as Coeff>::zero(); zdeg + 1]; monos.len()];
    for ((mi, a), c) in labels.iter().zip(ints) {
        per_mono[*mi][*a] = Rational::from_integer(c);
    }
    let candidate = DiffPolynomial::from_terms(
        monos
            .iter()
            .cloned()
            .zip(per_mono.into_iter().map(RatPoly::new)),
    );

    // independent re-check through series evaluation
    let check = candidate.evaluate(y)?;
    if check.order() < top || !check.truncate(top).is_zero() {
        return Err(GuessError::Unsound);
    }
    Ok(outcome(Verdict::Found, Some(candidate)))
}

/// Search for an algebraic differential equation `P(z, y, y', …) = 0`.
pub fn guess_ade(y: &ExactSeries, b: &SearchBounds) -> Result<GuessOutcome, GuessError> {
    search(y, b, SearchMode::Ade)
}

/// Search for a linear differential equation with polynomial coefficients.
/// `max_total_degree` is ignored (fixed to 1); `affine` adds a
/// polynomial inhomogeneous term.
pub fn guess_linear_ode(
    y: &ExactSeries,
    b: &SearchBounds,
    affine: bool,
) -> Result<GuessOutcome, GuessError> {
    let b = SearchBounds {
        max_total_degree: 1,
        ..*b
    };
    let mode = if affine {
        SearchMode::LinearAffine
    } else {
        SearchMode::LinearHomogeneous
    };
    search(y, &b, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// Multiply coefficient `k` by `k!`.
    ToOgf,
    /// Divide coefficient `k` by `k!`.
    ToEgf,
}

pub fn egf_ogf_transform(y: &ExactSeries, direction: Transform) -> ExactSeries {
    let mut fact = BigInt::from(1);
    let coeffs = y
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if k > 0 {
                fact *= k;
            }
            let f = Rational::from_integer(fact.clone());
            match direction {
                Transform::ToOgf => c * f,
                Transform::ToEgf => c / f,
            }
        })
        .collect();
    PowerSeries::from_coeffs(coeffs).expect("non-empty")
}

/// Indices `k` in `p+1..=k_max` with `itlog(f)_k = 0`.
pub fn nonvanishing_scan(
    f: &ParabolicGerm<Rational>,
    k_max: usize,
) -> Result<Vec<usize>, GuessError> {
    let p = f.p();
    if k_max <= p {
        return Ok(Vec::new());
    }
    let g = f.truncate(itlog_input_order(p, k_max))?;
    let phi = itlog(&g, k_max)?.phi;
    Ok((p + 1..=k_max)
        .filter(|&k| Coeff::is_zero(&phi.coeffs()[k]))
        .collect())
}

impl From<crate::germ::GermError> for GuessError {
    fn from(e: crate::germ::GermError) -> Self {
        GuessError::Funceq(FunceqError::Germ(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{factorial, rat};
    use crate::diffpoly::parse_rat_diff;

    fn exp_series(order: usize) -> ExactSeries {
        PowerSeries::var(order).exp().unwrap()
    }

    #[test]
    fn exp_gives_first_order_linear() {
        let out = guess_ade(&exp_series(30), &SearchBounds::new(1, 1, 0, 20)).unwrap();
        assert_eq!(out.verdict, Verdict::Found);
        assert_eq!(out.candidate.unwrap(), parse_rat_diff("Y' - Y").unwrap());
    }

    #[test]
    fn z_squared() {
        let y = PowerSeries::monomial(rat(1, 1), 2, 30);
        let out = guess_ade(&y, &SearchBounds::new(1, 1, 1, 20)).unwrap();
        assert_eq!(out.candidate.unwrap(), parse_rat_diff("Y' - 2 z").unwrap());
        // without the constant monomial the homogeneous relation appears
        let out = guess_linear_ode(&y, &SearchBounds::new(1, 1, 1, 20), false).unwrap();
        assert_eq!(
            out.candidate.unwrap(),
            parse_rat_diff("z Y' - 2 Y").unwrap()
        );
    }

    #[test]
    fn geometric_series_linear() {
        let y = PowerSeries::from_polynomial(&vec![rat(1, 1); 41], 40);
        let out = guess_linear_ode(&y, &SearchBounds::new(1, 1, 1, 20), false).unwrap();
        assert_eq!(
            out.candidate.unwrap(),
            parse_rat_diff("Y + (z - 1) Y'").unwrap()
        );
    }

    #[test]
    fn factorial_ogf_needs_affine_term() {
        // a_{k+1} = (k+1) a_k gives z² y' + (z − 1) y + 1 = 0
        let y = PowerSeries::from_coeffs(
            (0..=60)
                .map(|k| Rational::from_integer(factorial(k)))
                .collect(),
        )
        .unwrap();
        let b = SearchBounds::new(1, 1, 2, 20);
        let hom = guess_linear_ode(&y, &b, false).unwrap();
        assert_eq!(hom.verdict, Verdict::NoneWithinBounds);
        assert!(hom.caveat().is_some());
        let aff = guess_linear_ode(&y, &b, true).unwrap();
        assert_eq!(
            aff.candidate.unwrap(),
            parse_rat_diff("1 + (z - 1) Y + z^2 Y'").unwrap()
        );
    }

    #[test]
    fn order_deficit_is_reported() {
        let err = guess_ade(&exp_series(10), &SearchBounds::default()).unwrap_err();
        assert!(matches!(
            err,
            GuessError::OrderDeficit {
                unknowns: 100,
                margin: 20,
                ..
            }
        ));
        assert_eq!(
            guess_ade(&exp_series(40), &SearchBounds::new(1, 1, 0, 0)),
            Err(GuessError::ZeroMargin)
        );
    }

    #[test]
    fn transforms() {
        let y = PowerSeries::monomial(rat(1, 1), 2, 5);
        assert_eq!(
            egf_ogf_transform(&y, Transform::ToOgf),
            PowerSeries::monomial(rat(2, 1), 2, 5)
        );
        let e = exp_series(12);
        let back = egf_ogf_transform(&egf_ogf_transform(&e, Transform::ToOgf), Transform::ToEgf);
        assert_eq!(back, e);
    }

    #[test]
    fn scan_small_cases() {
        let moebius = ParabolicGerm::new(
            PowerSeries::from_coeffs(
                (0..=60)
                    .map(|k| rat(if k == 0 { 0 } else { 1 }, 1))
                    .collect(),
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(
            nonvanishing_scan(&moebius, 50).unwrap(),
            (3..=50).collect::<Vec<_>>()
        );

        let quad = ParabolicGerm::new(PowerSeries::from_polynomial(
            &[rat(0, 1), rat(1, 1), rat(1, 1)],
            20,
        ))
        .unwrap();
        let direct = itlog(&quad, 10).unwrap().phi;
        let expect: Vec<usize> = (3..=10)
            .filter(|&k| Coeff::is_zero(&direct.coeffs()[k]))
            .collect();
        assert_eq!(nonvanishing_scan(&quad, 10).unwrap(), expect);
    }
}
