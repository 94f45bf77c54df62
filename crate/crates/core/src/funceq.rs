//! Solvers for Julia's equation `φ(f(z)) = f'(z)·φ(z)` (the iterative
//! logarithm), Schröder's equation `φ(λz) = f(φ(z))`, and the formal flow
//! generated by the iterative logarithm.

use thiserror::Error;

use crate::coeff::{Coeff, Rational};
use crate::germ::{GermError, ParabolicGerm};
use crate::series::{PowerSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunceqError {
    #[error("input truncated at order {available}, but order {needed} is required")]
    OrderDeficit { needed: usize, available: usize },
    #[error("requested order {requested} is below the parabolic index p = {p}")]
    OrderBelowP { requested: usize, p: usize },
    #[error("iteration count must be at least 1")]
    ZeroIterate,
    #[error("map does not fix 0")]
    NotFixingZero,
    #[error("multiplier 0 is the Böttcher case, not handled here")]
    BottcherCase,
    #[error("multiplier is resonant: λ^{k} = λ")]
    ResonantMultiplier { k: usize },
    #[error("multiplier has modulus 1; float Schröder solving needs |λ| ≠ 1")]
    UnitModulusMultiplier,
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The iterative logarithm of a parabolic germ, exact to `verified_order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItlogResult<C> {
    pub phi: PowerSeries<C>,
    pub source_p: usize,
    pub verified_order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchroederResult<C> {
    pub lambda: C,
    pub phi: PowerSeries<C>,
    pub verified_order: usize,
}

/// Input order `itlog` needs from `f` to produce `order` exact coefficients.
pub fn itlog_input_order(p: usize, order: usize) -> usize {
    order + p - 1
}

/// Solve Julia's equation for the unique `φ = f_p z^p + …` up to `z^order`.
///
/// Coefficient `φ_m` is read off the coefficient of `z^{m+p−1}` of
/// `φ∘f − f'·φ`, which is linear in `φ_m` with pivot `(m−p)·f_p`; lower
/// coefficients of the residual vanish identically. `f` must therefore be
/// known up to `z^{order+p−1}`.
pub fn itlog<C: Coeff>(f: &ParabolicGerm<C>, order: usize) -> Result<ItlogResult<C>, FunceqError> {
    let p = f.p();
    if order < p {
        return Err(FunceqError::OrderBelowP {
            requested: order,
            p,
        });
    }
    let top = itlog_input_order(p, order);
    if f.order() < top {
        return Err(FunceqError::OrderDeficit {
            needed: top,
            available: f.order(),
        });
    }
    let fs = f.series().truncate(top);
    let fc = fs.coeffs();
    let fprime: Vec<C> = (0..top).map(|j| fc[j + 1].mul_i64(j as i64 + 1)).collect();

    // powers[k - p] = f^k truncated at `top`; f^k has valuation k.
    let mut powers: Vec<PowerSeries<C>> = Vec::with_capacity(order - p + 1);
    let mut cur = fs.pow(p as u32);
    for k in p..=order {
        if k > p {
            cur = cur.mul(&fs);
        }
        powers.push(cur.clone());
    }

    let fp = f.leading().clone();
    let mut phi = vec![C::zero(); order + 1];
    phi[p] = fp.clone();
    for m in p + 1..=order {
        let idx = m + p - 1;
        // Σ_{k=p}^{m−1} φ_k·([z^idx] f^k − f'_{idx−k})
        let weights: Vec<C> = (p..m)
            .map(|k| powers[k - p].coeffs()[idx].sub_ref(&fprime[idx - k]))
            .collect();
        let s = C::dot(phi[p..m].iter().zip(&weights));
        let pivot = fp.mul_i64((m - p) as i64);
        phi[m] = s.neg_ref().div_ref(&pivot);
    }
    Ok(ItlogResult {
        phi: PowerSeries::from_coeffs(phi).expect("non-empty"),
        source_p: p,
        verified_order: order,
    })
}

/// `φ∘f − f'·φ`, at order `min(order(φ), order(f) − 1)`.
pub fn julia_residual<C: Coeff>(
    f: &ParabolicGerm<C>,
    phi: &PowerSeries<C>,
) -> Result<PowerSeries<C>, FunceqError> {
    let lhs = phi.compose(f.series())?;
    let rhs = f.series().derive()?.mul(phi);
    Ok(lhs.sub(&rhs))
}

/// Check `itlog(f^n) = n·itlog(f)` exactly up to `z^order`.
pub fn scale_check<C: Coeff>(
    f: &ParabolicGerm<C>,
    n: u32,
    order: usize,
) -> Result<bool, FunceqError> {
    if n == 0 {
        return Err(FunceqError::ZeroIterate);
    }
    let needed = itlog_input_order(f.p(), order);
    if f.order() < needed {
        return Err(FunceqError::OrderDeficit {
            needed,
            available: f.order(),
        });
    }
    let base = itlog(f, order)?;
    if n == 1 {
        return Ok(true);
    }
    let fitn = f.truncate(needed)?.iterate(n)?;
    let iterated = itlog(&fitn, order)?;
    Ok(iterated.phi == base.phi.scale(&C::from_i64(n as i64)))
}

/// Koenigs linearization: the unique `φ = z + …` with `φ(λz) = f(φ(z))`,
/// where `λ = f'(0)`.
pub fn schroeder_solve<C: Coeff>(
    f: &PowerSeries<C>,
    order: usize,
) -> Result<SchroederResult<C>, FunceqError> {
    let fc = f.coeffs();
    if !fc[0].is_zero() {
        return Err(FunceqError::NotFixingZero);
    }
    if f.order() < order.max(1) {
        return Err(FunceqError::OrderDeficit {
            needed: order.max(1),
            available: f.order(),
        });
    }
    let lambda = fc[1].clone();
    if lambda.is_negligible() {
        return Err(FunceqError::BottcherCase);
    }
    if !C::EXACT && (lambda.modulus() - 1.0).abs() < crate::coeff::FLOAT_PIVOT_TOL {
        return Err(FunceqError::UnitModulusMultiplier);
    }
    let mut lambda_pow = vec![C::one(), lambda.clone()];
    for k in 2..=order {
        let next = lambda_pow[k - 1].mul_ref(&lambda);
        lambda_pow.push(next);
    }
    let pivots: Vec<C> = (0..=order)
        .map(|k| lambda_pow[k].sub_ref(&lambda))
        .collect();
    if let Some(k) = (2..=order).find(|&k| pivots[k].is_negligible()) {
        return Err(FunceqError::ResonantMultiplier { k });
    }

    // pw[j][k] = [z^k] φ^j, filled one column k at a time.
    let mut phi = vec![C::zero(); order + 1];
    if order >= 1 {
        phi[1] = C::one();
    }
    let mut pw = vec![vec![C::zero(); order + 1]; order + 1];
    if order >= 1 {
        pw[1][1] = C::one();
    }
    for k in 2..=order {
        for j in 2..=k {
            pw[j][k] = C::dot((1..=k + 1 - j).map(|i| (&phi[i], &pw[j - 1][k - i])));
        }
        let s = C::dot((2..=k).map(|j| (&fc[j], &pw[j][k])));
        phi[k] = s.div_ref(&pivots[k]);
        pw[1][k] = phi[k].clone();
    }
    Ok(SchroederResult {
        lambda,
        phi: PowerSeries::from_coeffs(phi).expect("non-empty"),
        verified_order: order,
    })
}

/// `φ(λz) − f(φ(z))`.
pub fn schroeder_residual<C: Coeff>(
    f: &PowerSeries<C>,
    res: &SchroederResult<C>,
) -> Result<PowerSeries<C>, FunceqError> {
    let mut scale = C::one();
    let scaled: Vec<C> = res
        .phi
        .coeffs()
        .iter()
        .map(|c| {
            let v = c.mul_ref(&scale);
            scale = scale.mul_ref(&res.lambda);
            v
        })
        .collect();
    let lhs = PowerSeries::from_coeffs(scaled)?;
    let rhs = f.compose(&res.phi)?;
    Ok(lhs.sub(&rhs))
}

/// The time-`t` map of the formal flow whose time-1 map is `f`:
/// `exp(t·D)(z)` with `D(g) = itlog(f)·g'`.
pub fn flow(
    f: &ParabolicGerm<Rational>,
    t: &Rational,
    order: usize,
) -> Result<PowerSeries<Rational>, FunceqError> {
    let phi = itlog(f, order)?.phi;
    let mut term = PowerSeries::<Rational>::var(order);
    let mut acc = term.clone();
    let mut coef = Rational::one();
    let mut k: i64 = 0;
    loop {
        k += 1;
        // D raises the valuation by p − 1, so the sum stops within `order` steps.
        term = phi.mul_sharp(&term.derive()?).truncate(order);
        if term.is_zero() {
            break;
        }
        coef = coef.mul_ref(t).div_i64(k);
        acc = acc.add(&term.scale(&coef));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn quadratic(order: usize) -> ParabolicGerm<Rational> {
        ParabolicGerm::new(PowerSeries::from_polynomial(
            &[rat(0, 1), rat(1, 1), rat(1, 1)],
            order,
        ))
        .unwrap()
    }

    fn expm1(order: usize) -> ParabolicGerm<Rational> {
        let s = PowerSeries::<Rational>::var(order).exp().unwrap();
        ParabolicGerm::new(s.sub(&PowerSeries::one(order))).unwrap()
    }

    fn moebius(c: Rational, order: usize) -> ParabolicGerm<Rational> {
        // z/(1 − cz) = Σ c^{k−1} z^k
        let mut coeffs = vec![rat(0, 1)];
        let mut pw = rat(1, 1);
        for _ in 1..=order {
            coeffs.push(pw.clone());
            pw *= &c;
        }
        ParabolicGerm::new(PowerSeries::from_coeffs(coeffs).unwrap()).unwrap()
    }

    #[test]
    fn itlog_expm1_leading_terms() {
        let r = itlog(&expm1(8), 7).unwrap();
        let expect = [
            rat(0, 1),
            rat(0, 1),
            rat(1, 2),
            rat(-1, 12),
            rat(1, 48),
            rat(-1, 180),
            rat(11, 8640),
            rat(-1, 6720),
        ];
        assert_eq!(r.phi.coeffs(), &expect[..]);
        assert_eq!(r.source_p, 2);
    }

    #[test]
    fn itlog_moebius_is_monomial() {
        let c = rat(3, 5);
        let r = itlog(&moebius(c.clone(), 30), 29).unwrap();
        assert_eq!(r.phi, PowerSeries::monomial(c, 2, 29));
    }

    #[test]
    fn itlog_quadratic_by_hand() {
        // Substituting φ = z² + a z³ + b z⁴ into φ(z+z²) = (1+2z)φ and
        // matching z⁴, z⁵ gives a = −1, b = 3/2.
        let r = itlog(&quadratic(10), 4).unwrap();
        assert_eq!(
            r.phi.coeffs(),
            &[rat(0, 1), rat(0, 1), rat(1, 1), rat(-1, 1), rat(3, 2)][..]
        );
    }

    #[test]
    fn itlog_order_errors() {
        assert_eq!(
            itlog(&quadratic(10), 1),
            Err(FunceqError::OrderBelowP { requested: 1, p: 2 })
        );
        assert_eq!(
            itlog(&expm1(8), 8),
            Err(FunceqError::OrderDeficit {
                needed: 9,
                available: 8
            })
        );
    }

    #[test]
    fn residual_examples() {
        let f = expm1(25);
        let r = itlog(&f, 24).unwrap();
        assert!(julia_residual(&f, &r.phi).unwrap().is_zero());

        let c = rat(-2, 1);
        let m = moebius(c.clone(), 20);
        let phi = PowerSeries::monomial(c, 2, 20);
        assert!(julia_residual(&m, &phi).unwrap().is_zero());

        let q = quadratic(8);
        let res = julia_residual(&q, &PowerSeries::monomial(rat(1, 1), 2, 8)).unwrap();
        assert_eq!(res.valuation(), Some(4));
        assert_eq!(res.coeff(4), Some(&rat(1, 1)));
    }

    #[test]
    fn higher_p_germ() {
        // z + z³ − z⁴: p = 3
        let f = ParabolicGerm::new(PowerSeries::from_polynomial(
            &[rat(0, 1), rat(1, 1), rat(0, 1), rat(1, 1), rat(-1, 1)],
            30,
        ))
        .unwrap();
        let r = itlog(&f, 25).unwrap();
        assert_eq!(r.phi.valuation(), Some(3));
        assert!(julia_residual(&f, &r.phi).unwrap().truncate(25).is_zero());
        assert!(scale_check(&f, 3, 20).unwrap());
    }

    #[test]
    fn scale_check_examples() {
        assert!(scale_check(&quadratic(60), 2, 40).unwrap());
        assert!(scale_check(&expm1(45), 3, 40).unwrap());
        assert!(scale_check(&expm1(45), 1, 40).unwrap());
        assert_eq!(
            scale_check(&quadratic(60), 0, 10),
            Err(FunceqError::ZeroIterate)
        );
        assert_eq!(
            scale_check(&expm1(30), 2, 40),
            Err(FunceqError::OrderDeficit {
                needed: 41,
                available: 30
            })
        );
    }

    #[test]
    fn schroeder_examples() {
        let f = PowerSeries::from_polynomial(&[rat(0, 1), rat(2, 1), rat(1, 1)], 20);
        let r = schroeder_solve(&f, 20).unwrap();
        for (k, c) in r.phi.coeffs().iter().enumerate().skip(1) {
            assert_eq!(
                c,
                &Rational::new(1.into(), crate::coeff::factorial(k as u64))
            );
        }
        assert!(schroeder_residual(&f, &r).unwrap().is_zero());

        let lin = PowerSeries::from_polynomial(&[rat(0, 1), rat(-3, 7)], 10);
        assert_eq!(schroeder_solve(&lin, 10).unwrap().phi, PowerSeries::var(10));
    }

    #[test]
    fn schroeder_errors() {
        let bott = PowerSeries::from_polynomial(&[rat(0, 1), rat(0, 1), rat(1, 1)], 5);
        assert_eq!(schroeder_solve(&bott, 5), Err(FunceqError::BottcherCase));
        let res = PowerSeries::from_polynomial(&[rat(0, 1), rat(-1, 1), rat(1, 1)], 5);
        assert_eq!(
            schroeder_solve(&res, 5),
            Err(FunceqError::ResonantMultiplier { k: 3 })
        );
        let para = PowerSeries::from_polynomial(&[rat(0, 1), rat(1, 1), rat(1, 1)], 5);
        assert_eq!(
            schroeder_solve(&para, 5),
            Err(FunceqError::ResonantMultiplier { k: 2 })
        );
    }

    #[test]
    fn flow_identities() {
        let f = quadratic(40);
        assert_eq!(flow(&f, &rat(0, 1), 20).unwrap(), PowerSeries::var(20));
        assert_eq!(flow(&f, &rat(1, 1), 20).unwrap(), f.series().truncate(20));
        let m = moebius(rat(1, 1), 40);
        let expect = moebius(rat(2, 3), 20);
        assert_eq!(flow(&m, &rat(2, 3), 20).unwrap(), expect.series().clone());
    }
}
