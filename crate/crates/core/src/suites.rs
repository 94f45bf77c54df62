//! Self-checking invariant suites, run by `itlog verify`.
//!
//! Each check is exact; a failure is reported, never hidden behind a
//! tolerance.

use num_bigint::BigInt;

use crate::coeff::{rat, Rational};
use crate::diffpoly::{chain_a, chain_b, DiffPolyError, DiffPolynomial, MultiIndex};
use crate::funceq::{flow, itlog, itlog_input_order, julia_residual, scale_check, FunceqError};
use crate::germ::ParabolicGerm;
use crate::series::{ExactSeries, PowerSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: Result<(bool, String), FunceqError>) -> Self {
        match r {
            Ok((ok, detail)) => Check::new(name, ok, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Julia,
    ChainA,
    ChainB,
    Flow,
    Scale,
}

impl Suite {
    pub fn run(self) -> Vec<Check> {
        match self {
            Suite::Julia => julia_suite(),
            Suite::ChainA => chain_a_suite(),
            Suite::ChainB => chain_b_suite(),
            Suite::Flow => flow_suite(),
            Suite::Scale => scale_suite(),
        }
    }
}

/// The germs used by the suites, exactly truncated at `order`.
pub fn sample_germs(order: usize) -> Vec<(&'static str, ParabolicGerm<Rational>)> {
    let z = || PowerSeries::<Rational>::var(order);
    let one = || PowerSeries::<Rational>::one(order);
    let e = z().exp().expect("formal");
    let germ = |s: ExactSeries| ParabolicGerm::new(s).expect("parabolic");
    vec![
        ("z+z^2", germ(z().add(&z().mul(&z())))),
        ("exp(z)-1", germ(e.sub(&one()))),
        ("z*exp(z)", germ(z().mul(&e))),
        ("sin(z)", germ(z().sin_cos().expect("formal").0)),
    ]
}

pub fn moebius(c: &Rational, order: usize) -> ParabolicGerm<Rational> {
    let den = PowerSeries::one(order).sub(&PowerSeries::var(order).scale(c));
    ParabolicGerm::new(PowerSeries::var(order).div(&den).expect("unit divisor")).expect("parabolic")
}

fn julia_suite() -> Vec<Check> {
    let n = 30;
    let mut out = Vec::new();
    for (name, f) in sample_germs(n + 3) {
        let r = itlog(&f, n).and_then(|res| {
            let resid = julia_residual(&f, &res.phi)?;
            let ok = resid.is_zero() && resid.order() >= n;
            Ok((ok, format!("residual zero through z^{}", resid.order())))
        });
        out.push(Check::from_result(format!("julia residual {name}"), r));
    }
    for c in [rat(1, 1), rat(-2, 1), rat(3, 5)] {
        let f = moebius(&c, 61);
        let r = itlog(&f, 60).map(|res| {
            let want = PowerSeries::monomial(c.clone(), 2, 60);
            (res.phi == want, "itlog = c z^2 through z^60".to_string())
        });
        out.push(Check::from_result(format!("moebius c={c}"), r));
    }
    let r = itlog(&sample_germs(8).remove(1).1, 7).map(|res| {
        let want = [
            rat(1, 2),
            rat(-1, 12),
            rat(1, 48),
            rat(-1, 180),
            rat(11, 8640),
            rat(-1, 6720),
        ];
        (
            res.phi.coeffs()[2..] == want,
            "itlog(exp(z)-1) through z^7".to_string(),
        )
    });
    out.push(Check::from_result("exp(z)-1 leading coefficients", r));
    out
}

fn scale_suite() -> Vec<Check> {
    let order = 40;
    let mut out = Vec::new();
    for (name, f) in sample_germs(order + 3) {
        for n in [2u32, 3] {
            let r = scale_check(&f, n, order).map(|ok| (ok, format!("through z^{order}")));
            out.push(Check::from_result(
                format!("itlog({name}^{n}) = {n} itlog({name})"),
                r,
            ));
        }
    }
    // conjugation by z ↦ 2z: f_s(z) = f(2z)/2 has itlog φ(2z)/2
    let s = rat(2, 1);
    let f = sample_germs(31).remove(0).1;
    let r = (|| {
        let sz = PowerSeries::monomial(s.clone(), 1, 31);
        let inv = Rational::new(1.into(), 2.into());
        let fs = ParabolicGerm::new(f.series().compose(&sz)?.scale(&inv))?;
        let lhs = itlog(&fs, 30)?.phi;
        let rhs = itlog(&f, 30)?.phi.compose(&sz.truncate(30))?.scale(&inv);
        Ok((lhs == rhs, "through z^30".to_string()))
    })();
    out.push(Check::from_result("conjugation by scaling, s = 2", r));
    out
}

type IntPoly = DiffPolynomial<BigInt>;

fn dp_err(e: DiffPolyError) -> FunceqError {
    match e {
        DiffPolyError::OrderDeficit { needed, available } => {
            FunceqError::OrderDeficit { needed, available }
        }
        DiffPolyError::Series(s) => FunceqError::Series(s),
        other => unreachable!("evaluation cannot fail with {other}"),
    }
}

fn chain_structure(upper: usize) -> Vec<Check> {
    let fam = chain_a(upper);
    let x = IntPoly::derivative_var(0);
    let mut out = Vec::new();
    for j in 0..=upper {
        out.push(Check::new(
            format!("A_{j}{j} = X^{j}"),
            fam.get(j, j) == x.pow(j as u32),
            "",
        ));
        for i in 0..=j {
            let a = fam.get(i, j);
            if a.is_zero() {
                continue;
            }
            let dw = a.degree_weight().expect("non-zero");
            out.push(Check::new(
                format!("A_{i}{j} homogeneous/isobaric"),
                a.is_homogeneous() && a.is_isobaric() && dw == (j as u32, (j - i) as u32),
                format!("(deg, wt) = {dw:?}"),
            ));
        }
        if j >= 1 {
            let mut top = MultiIndex::unit(j);
            top = top.add(&MultiIndex::power(j as u32 - 1));
            let rank = fam.get(0, j).rank().ok().cloned();
            out.push(Check::new(
                format!("rank A_0{j} = X^({j}) X^{}", j - 1),
                rank.as_ref() == Some(&top),
                format!("{rank:?}"),
            ));
        }
    }
    out
}

/// `φ^{(k)}` of an exact series, at order `order(φ) − k`.
fn nth_derivative(phi: &ExactSeries, k: usize) -> ExactSeries {
    (0..k).fold(phi.clone(), |s, _| s.derive().expect("positive order"))
}

/// Both sides of the chain-A identity for `φ = itlog(f)`, truncated to
/// their common order.
pub fn chain_a_sides(
    f: &ParabolicGerm<Rational>,
    phi: &ExactSeries,
    a: &[IntPoly],
    j: usize,
) -> Result<(ExactSeries, ExactSeries), FunceqError> {
    let df = f.series().derive()?;
    let lhs = nth_derivative(phi, j)
        .compose(f.series())?
        .mul(&pow_signed(&df, 2 * j as i64 - 1)?);
    let mut rhs = PowerSeries::zero(phi.order());
    for (i, aij) in a.iter().enumerate().take(j + 1) {
        let term = aij
            .evaluate(&df)
            .map_err(dp_err)?
            .mul(&nth_derivative(phi, i));
        rhs = rhs.add(&term);
    }
    let n = lhs.order().min(rhs.order());
    Ok((lhs.truncate(n), rhs.truncate(n)))
}

fn pow_signed(s: &ExactSeries, e: i64) -> Result<ExactSeries, FunceqError> {
    let p = s.pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Ok(p)
    } else {
        Ok(PowerSeries::one(s.order()).div(&p)?)
    }
}

fn chain_a_suite() -> Vec<Check> {
    let upper = 6;
    let mut out = chain_structure(upper);
    let fam = chain_a(upper);
    let order = 25;
    for (name, f) in sample_germs(order + 1).into_iter().take(2) {
        let phi = match itlog(&f, order) {
            Ok(r) => r.phi,
            Err(e) => {
                out.push(Check::new(format!("itlog {name}"), false, e.to_string()));
                continue;
            }
        };
        for j in 0..=upper {
            let r = chain_a_sides(&f, &phi, fam.row(j), j)
                .map(|(l, r)| (l == r, format!("sides agree through z^{}", l.order())));
            out.push(Check::from_result(
                format!("A substitution j={j}, f={name}"),
                r,
            ));
        }
    }
    out
}

/// Multi-indices with `‖j‖ ≤ max_wt` and `|j| ≤ max_deg`.
pub fn chain_b_indices(max_wt: u32, max_deg: u32) -> Vec<MultiIndex> {
    MultiIndex::enumerate(max_wt as usize, max_deg)
        .into_iter()
        .filter(|j| j.wt() <= max_wt)
        .collect()
}

/// Both sides of the chain-B identity for `φ = itlog(f)`, with the power of
/// `f'` moved to the right when its exponent `2‖j‖ − |j|` is negative.
pub fn chain_b_sides(
    f: &ParabolicGerm<Rational>,
    phi: &ExactSeries,
    j: &MultiIndex,
) -> Result<(ExactSeries, ExactSeries), FunceqError> {
    let df = f.series().derive()?;
    let mono = |i: &MultiIndex| {
        DiffPolynomial::<BigInt>::term(BigInt::from(1), i.clone())
            .evaluate(phi)
            .map_err(dp_err)
    };
    let e = 2 * j.wt() as i64 - j.abs() as i64;
    let mut lhs = mono(j)?.compose(f.series())?;
    if e > 0 {
        lhs = lhs.mul(&df.pow(e as u32));
    }
    let mut rhs = PowerSeries::zero(phi.order());
    for (i, b) in chain_b(j) {
        rhs = rhs.add(&b.evaluate(&df).map_err(dp_err)?.mul(&mono(&i)?));
    }
    if e < 0 {
        rhs = rhs.mul(&df.pow((-e) as u32));
    }
    let n = lhs.order().min(rhs.order());
    Ok((lhs.truncate(n), rhs.truncate(n)))
}

fn chain_b_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let x = IntPoly::derivative_var(0);
    let order = 25;
    let f = sample_germs(order + 1).remove(0).1;
    let phi = itlog(&f, order).expect("parabolic").phi;
    for j in chain_b_indices(5, 5) {
        let b = chain_b(&j);
        let diag = b.get(&j).cloned().unwrap_or_default();
        out.push(Check::new(
            format!("B_jj = X^wt, j={j}"),
            diag == x.pow(j.wt()),
            "",
        ));
        let low = MultiIndex::power(j.abs());
        let bl = b.get(&low).cloned().unwrap_or_default();
        let w = j.wt();
        let structure =
            bl.is_homogeneous() && bl.is_isobaric() && bl.degree_weight().ok() == Some((w, w));
        // highest rank X^j X^{‖j‖−|j|}: j with j_0 shifted by ‖j‖ − |j|
        let mut top: Vec<u32> = j.entries().to_vec();
        top.resize(top.len().max(1), 0);
        top[0] = (j.get(0) as i64 + w as i64 - j.abs() as i64) as u32;
        let top = MultiIndex::new(top);
        out.push(Check::new(
            format!("B_(|j|),j structure, j={j}"),
            structure && bl.rank().ok() == Some(&top),
            format!("rank {:?}", bl.rank().ok()),
        ));
        let r = chain_b_sides(&f, &phi, &j)
            .map(|(l, r)| (l == r, format!("sides agree through z^{}", l.order())));
        out.push(Check::from_result(format!("B substitution j={j}"), r));
    }
    out
}

fn flow_suite() -> Vec<Check> {
    let order = 30;
    let mut out = Vec::new();
    let quad = sample_germs(order + 1).remove(0).1;
    let half = rat(1, 2);
    let r = (|| {
        let h = flow(&quad, &half, order)?;
        let hh = h.compose(&h)?;
        Ok((
            hh == quad.series().truncate(order),
            format!("through z^{order}"),
        ))
    })();
    out.push(Check::from_result("flow(z+z^2, 1/2) twice = z+z^2", r));

    let m1 = moebius(&rat(1, 1), order + 1);
    let r = flow(&m1, &rat(2, 3), order).map(|g| {
        let want = moebius(&rat(2, 3), order).series().clone();
        (g == want, format!("through z^{order}"))
    });
    out.push(Check::from_result("flow(z/(1-z), 2/3) = z/(1-2z/3)", r));

    let r = flow(&quad, &rat(1, 1), order)
        .map(|g| (g == quad.series().truncate(order), "time 1".to_string()));
    out.push(Check::from_result("flow(f, 1) = f", r));
    let r = flow(&quad, &rat(0, 1), order)
        .map(|g| (g == PowerSeries::var(order), "time 0".to_string()));
    out.push(Check::from_result("flow(f, 0) = z", r));

    for (s, t) in [
        (rat(1, 3), rat(1, 4)),
        (rat(-1, 2), rat(3, 2)),
        (rat(2, 5), rat(-1, 5)),
    ] {
        for (name, f) in sample_germs(itlog_input_order(3, order))
            .into_iter()
            .take(3)
        {
            let r = (|| {
                let a = flow(&f, &s, order)?;
                let b = flow(&f, &t, order)?;
                let st = flow(&f, &(s.clone() + t.clone()), order)?;
                Ok((a.compose(&b)? == st, format!("through z^{order}")))
            })();
            out.push(Check::from_result(
                format!("flow additivity {name}, s={s}, t={t}"),
                r,
            ));
        }
    }
    out
}

/// Whether every check passed.
pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        for suite in [
            Suite::Julia,
            Suite::ChainA,
            Suite::ChainB,
            Suite::Flow,
            Suite::Scale,
        ] {
            let checks = suite.run();
            assert!(!checks.is_empty());
            for c in &checks {
                assert!(c.passed, "{suite:?}: {} ({})", c.name, c.detail);
            }
        }
    }

    #[test]
    fn b_indices_are_bounded() {
        let js = chain_b_indices(5, 5);
        assert!(js.iter().all(|j| j.wt() <= 5 && j.abs() <= 5));
        assert!(js.contains(&MultiIndex::new(vec![0, 0, 0, 0, 0, 1])));
        assert!(js.contains(&MultiIndex::new(vec![5])));
    }
}
