//! Numeric Poincaré functions at repelling periodic points.
//!
//! For a repelling cycle `ξ = b_0 → b_1 → … → b_{p−1} → ξ` with multiplier
//! `λ`, the Poincaré function is
//!
//! ```text
//! ψ(z) = lim_n f^{np}(ξ + λ^{−n} z),   ψ(0) = ξ, ψ'(0) = 1.
//! ```
//!
//! Orbits are followed in local coordinates `w = x − b_j` with the step
//! `w ↦ f(b_j + w) − b_{j+1}` rewritten so that its constant term is exactly
//! zero. Evaluating `f(ξ + w)` directly would round `w` against `ξ` and the
//! `λ^n` expansion along the orbit would blow that error up.

use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

use crate::coeff::Complex;
use crate::diffpoly::MultiIndex;
use crate::series::{FloatSeries, PowerSeries, SeriesError};

/// Orbit magnitudes beyond this count as escape.
pub const ESCAPE_RADIUS: f64 = 1e150;
/// Largest `n` tried by the limit evaluators.
pub const MAX_N: usize = 200;
const NEWTON_STEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoincareError {
    #[error("Newton iteration found no periodic point within {steps} steps")]
    NoFixedPoint { steps: usize },
    #[error("periodic point is not repelling: |λ| = {modulus}")]
    NotRepelling { modulus: f64 },
    #[error("period must be at least 1")]
    ZeroPeriod,
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("derivative order must be at least 1")]
    ZeroDerivativeOrder,
    #[error("forward orbit escaped; last finite n = {last_finite_n:?}")]
    Divergence { last_finite_n: Option<usize> },
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The closed set of maps the evaluator handles.
#[derive(Debug, Clone, PartialEq)]
pub enum Map {
    /// Coefficients, lowest degree first.
    Polynomial(Vec<Complex>),
    /// `num / den`, coefficients lowest degree first.
    Rational {
        num: Vec<Complex>,
        den: Vec<Complex>,
    },
    /// `e^z − 1`
    Expm1,
    Sin,
    /// `z·e^z`
    ZExp,
}

fn horner(c: &[Complex], z: Complex) -> Complex {
    c.iter().rev().fold(Complex::zero(), |acc, &a| acc * z + a)
}

fn poly_derivative(c: &[Complex]) -> Vec<Complex> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

/// Coefficients of `p(b + w)` in `w`.
fn taylor_shift(c: &[Complex], b: Complex) -> Vec<Complex> {
    let mut d = c.to_vec();
    let n = d.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            let t = d[k + 1] * b;
            d[k] += t;
        }
    }
    d
}

/// `e^w − 1` without cancellation for small `w`.
fn cexpm1(w: Complex) -> Complex {
    let (x, y) = (w.re, w.im);
    let s = (y / 2.0).sin();
    Complex::new(x.exp_m1() * y.cos() - 2.0 * s * s, x.exp() * y.sin())
}

/// `cos w − 1`.
fn ccosm1(w: Complex) -> Complex {
    let s = (w / 2.0).sin();
    -(s * s) * 2.0
}

impl Map {
    pub fn eval(&self, z: Complex) -> Complex {
        match self {
            Map::Polynomial(c) => horner(c, z),
            Map::Rational { num, den } => horner(num, z) / horner(den, z),
            Map::Expm1 => cexpm1(z),
            Map::Sin => z.sin(),
            Map::ZExp => z * z.exp(),
        }
    }

    pub fn derivative(&self, z: Complex) -> Complex {
        match self {
            Map::Polynomial(c) => horner(&poly_derivative(c), z),
            Map::Rational { num, den } => {
                let (n, d) = (horner(num, z), horner(den, z));
                let (dn, dd) = (
                    horner(&poly_derivative(num), z),
                    horner(&poly_derivative(den), z),
                );
                (dn * d - n * dd) / (d * d)
            }
            Map::Expm1 => z.exp(),
            Map::Sin => z.cos(),
            Map::ZExp => (z + 1.0) * z.exp(),
        }
    }

    /// The step `w ↦ f(b + w) − next` with its constant term dropped.
    fn local(&self, b: Complex, next: Complex) -> LocalMap {
        match self {
            Map::Polynomial(c) => {
                let mut d = taylor_shift(c, b);
                if d.is_empty() {
                    d.push(Complex::zero());
                }
                d[0] = Complex::zero();
                LocalMap::Poly(d)
            }
            Map::Rational { num, den } => {
                let ns = taylor_shift(num, b);
                let ds = taylor_shift(den, b);
                let len = ns.len().max(ds.len());
                let mut top: Vec<Complex> = (0..len)
                    .map(|k| {
                        ns.get(k).copied().unwrap_or_default()
                            - next * ds.get(k).copied().unwrap_or_default()
                    })
                    .collect();
                top[0] = Complex::zero();
                LocalMap::Rational { num: top, den: ds }
            }
            Map::Expm1 => LocalMap::Expm1 { eb: b.exp() },
            Map::Sin => LocalMap::Sin {
                sb: b.sin(),
                cb: b.cos(),
            },
            Map::ZExp => LocalMap::ZExp { b, eb: b.exp() },
        }
    }
}

#[derive(Debug, Clone)]
enum LocalMap {
    Poly(Vec<Complex>),
    Rational {
        num: Vec<Complex>,
        den: Vec<Complex>,
    },
    /// `e^b·(e^w − 1)`
    Expm1 {
        eb: Complex,
    },
    /// `cos b·sin w + sin b·(cos w − 1)`
    Sin {
        sb: Complex,
        cb: Complex,
    },
    /// `b e^b (e^w − 1) + w e^b e^w`
    ZExp {
        b: Complex,
        eb: Complex,
    },
}

fn split(w: &FloatSeries) -> (Complex, FloatSeries) {
    let mut d = w.coeffs().to_vec();
    let c = d[0];
    d[0] = Complex::zero();
    (c, PowerSeries::from_coeffs(d).expect("non-empty"))
}

fn expm1_series(w: &FloatSeries) -> Result<FloatSeries, SeriesError> {
    let (c, d) = split(w);
    let em1 = d.exp()?.sub(&PowerSeries::one(w.order()));
    Ok(em1
        .scale(&c.exp())
        .add(&PowerSeries::constant(cexpm1(c), w.order())))
}

fn sin_cosm1_series(w: &FloatSeries) -> Result<(FloatSeries, FloatSeries), SeriesError> {
    let (c, d) = split(w);
    let (s, co) = d.sin_cos()?;
    let com1 = co.sub(&PowerSeries::one(w.order()));
    let sin = co.scale(&c.sin()).add(&s.scale(&c.cos()));
    let cosm1 = com1
        .scale(&c.cos())
        .sub(&s.scale(&c.sin()))
        .add(&PowerSeries::constant(ccosm1(c), w.order()));
    Ok((sin, cosm1))
}

fn horner_series(d: &[Complex], w: &FloatSeries) -> FloatSeries {
    // d[0] is zero: evaluate w·(d_1 + w·(d_2 + …)) so the constant term
    // keeps full relative precision
    let n = w.order();
    let mut acc = PowerSeries::zero(n);
    for &a in d.iter().skip(1).rev() {
        acc = acc.mul(w).add(&PowerSeries::constant(a, n));
    }
    acc.mul(w)
}

impl LocalMap {
    fn apply(&self, w: Complex) -> Complex {
        match self {
            LocalMap::Poly(d) => w * horner(&d[1..], w),
            LocalMap::Rational { num, den } => w * horner(&num[1..], w) / horner(den, w),
            LocalMap::Expm1 { eb } => eb * cexpm1(w),
            LocalMap::Sin { sb, cb } => cb * w.sin() + sb * ccosm1(w),
            LocalMap::ZExp { b, eb } => b * eb * cexpm1(w) + w * eb * w.exp(),
        }
    }

    fn apply_series(&self, w: &FloatSeries) -> Result<FloatSeries, SeriesError> {
        Ok(match self {
            LocalMap::Poly(d) => horner_series(d, w),
            LocalMap::Rational { num, den } => {
                let n = w.order();
                let mut bottom = PowerSeries::zero(n);
                for &a in den.iter().rev() {
                    bottom = bottom.mul(w).add(&PowerSeries::constant(a, n));
                }
                horner_series(num, w).div(&bottom)?
            }
            LocalMap::Expm1 { eb } => expm1_series(w)?.scale(eb),
            LocalMap::Sin { sb, cb } => {
                let (s, cm1) = sin_cosm1_series(w)?;
                s.scale(cb).add(&cm1.scale(sb))
            }
            LocalMap::ZExp { b, eb } => {
                let em1 = expm1_series(w)?;
                let e = em1.add(&PowerSeries::one(w.order()));
                em1.scale(&(b * eb)).add(&w.mul(&e).scale(eb))
            }
        })
    }
}

/// A repelling cycle `ξ = cycle[0], …, cycle[p−1]` with multiplier `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointData {
    pub xi: Complex,
    pub period: usize,
    pub lambda: Complex,
    pub cycle: Vec<Complex>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub value: Complex,
    pub n_used: usize,
    /// `|value_n − value_{n−1}|`; a heuristic, not a bound.
    pub error_estimate: f64,
    pub converged: bool,
}

fn finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Locate a repelling periodic point by Newton's method on `f^p(z) − z`.
pub fn find_repelling_fixed_point(
    f: &Map,
    seed: Complex,
    period: usize,
) -> Result<FixedPointData, PoincareError> {
    if period == 0 {
        return Err(PoincareError::ZeroPeriod);
    }
    let orbit = |z: Complex| {
        let mut x = z;
        let mut d = Complex::new(1.0, 0.0);
        for _ in 0..period {
            d *= f.derivative(x);
            x = f.eval(x);
        }
        (x, d)
    };
    let mut z = seed;
    let mut done = false;
    for _ in 0..NEWTON_STEPS {
        let (fz, d) = orbit(z);
        let g = fz - z;
        if !finite(g) || !finite(d) {
            break;
        }
        if g.norm() <= 1e-15 * (1.0 + z.norm()) {
            done = true;
            break;
        }
        let dg = d - 1.0;
        if dg.norm() == 0.0 {
            break;
        }
        let step = g / dg;
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            done = true;
            break;
        }
    }
    if !done || !finite(z) || (orbit(z).0 - z).norm() >= 1e-12 * (1.0 + z.norm()) {
        return Err(PoincareError::NoFixedPoint {
            steps: NEWTON_STEPS,
        });
    }
    let mut cycle = vec![z];
    let mut lambda = Complex::new(1.0, 0.0);
    for k in 0..period {
        lambda *= f.derivative(cycle[k]);
        if k + 1 < period {
            let next = f.eval(cycle[k]);
            cycle.push(next);
        }
    }
    if lambda.norm() <= 1.0 + 1e-9 {
        return Err(PoincareError::NotRepelling {
            modulus: lambda.norm(),
        });
    }
    Ok(FixedPointData {
        xi: z,
        period,
        lambda,
        cycle,
    })
}

struct Orbit<'a> {
    fp: &'a FixedPointData,
    locals: Vec<LocalMap>,
}

impl<'a> Orbit<'a> {
    fn new(f: &Map, fp: &'a FixedPointData) -> Self {
        let p = fp.cycle.len();
        let locals = (0..p)
            .map(|j| f.local(fp.cycle[j], fp.cycle[(j + 1) % p]))
            .collect();
        Orbit { fp, locals }
    }

    fn lambda_pow(&self, n: usize) -> Complex {
        self.fp.lambda.powi(-(n as i32))
    }

    /// `f^{np}(ξ + λ^{−n} z) − ξ`, or `None` on escape.
    fn value(&self, z: Complex, n: usize) -> Option<Complex> {
        let mut w = z * self.lambda_pow(n);
        for _ in 0..n {
            for l in &self.locals {
                w = l.apply(w);
                if !finite(w) || w.norm() > ESCAPE_RADIUS {
                    return None;
                }
            }
        }
        Some(w)
    }

    /// Jet of `u ↦ f^{np}(ξ + λ^{−n}(z + u)) − ξ` to order `m`.
    fn jet(&self, z: Complex, n: usize, m: usize) -> Result<Option<FloatSeries>, SeriesError> {
        let s = self.lambda_pow(n);
        let mut w = PowerSeries::from_polynomial(&[z * s, s], m);
        for _ in 0..n {
            for l in &self.locals {
                w = l.apply_series(&w)?;
                if w.coeffs()
                    .iter()
                    .any(|c| !finite(*c) || c.norm() > ESCAPE_RADIUS)
                {
                    return Ok(None);
                }
            }
        }
        Ok(Some(w))
    }

    /// Smallest `n` with `|λ^{−n} z| < 0.01·scale`, the scale being the
    /// reciprocal second Taylor coefficient of `f^p` at `ξ` (1 if that
    /// vanishes).
    fn start_n(&self, z: Complex) -> usize {
        let mut w = PowerSeries::var(2);
        for l in &self.locals {
            match l.apply_series(&w) {
                Ok(v) => w = v,
                Err(_) => return 0,
            }
        }
        let c2 = w.coeffs()[2].norm();
        let scale = if c2 > 1e-12 && c2.is_finite() {
            1.0 / c2
        } else {
            1.0
        };
        let ratio = self.fp.lambda.norm();
        let mut r = z.norm();
        let mut n = 0;
        while r >= 0.01 * scale && n < MAX_N {
            r /= ratio;
            n += 1;
        }
        n
    }
}

/// Run the limit `value(n)` for `n = n_0, n_0+1, …` until successive values
/// agree to `tol` or `n` reaches [`MAX_N`].
fn converge(
    n0: usize,
    tol: f64,
    mut value: impl FnMut(usize) -> Result<Option<Complex>, PoincareError>,
) -> Result<EvalReport, PoincareError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(PoincareError::BadTolerance);
    }
    let escaped = |n: usize| PoincareError::Divergence {
        last_finite_n: n.checked_sub(1),
    };
    let mut prev = value(n0)?.ok_or_else(|| escaped(n0))?;
    let last = MAX_N.max(n0 + 1);
    let mut report = EvalReport {
        value: prev,
        n_used: n0,
        error_estimate: f64::INFINITY,
        converged: false,
    };
    for n in n0 + 1..=last {
        let v = value(n)?.ok_or_else(|| escaped(n))?;
        let est = (v - prev).norm();
        report = EvalReport {
            value: v,
            n_used: n,
            error_estimate: est,
            converged: est < tol,
        };
        if report.converged {
            break;
        }
        prev = v;
    }
    Ok(report)
}

/// `ψ(z)` normalized by `ψ(0) = ξ`, `ψ'(0) = 1`.
pub fn poincare_eval(
    f: &Map,
    fp: &FixedPointData,
    z: Complex,
    tol: f64,
) -> Result<EvalReport, PoincareError> {
    let orbit = Orbit::new(f, fp);
    let mut r = converge(orbit.start_n(z), tol, |n| Ok(orbit.value(z, n)))?;
    r.value += fp.xi;
    Ok(r)
}

fn factorial_f64(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// `ψ^{(m)}(z)` via Taylor jets along the orbit.
pub fn poincare_derivative(
    f: &Map,
    fp: &FixedPointData,
    z: Complex,
    m: usize,
    tol: f64,
) -> Result<EvalReport, PoincareError> {
    if m == 0 {
        return Err(PoincareError::ZeroDerivativeOrder);
    }
    let orbit = Orbit::new(f, fp);
    let mf = factorial_f64(m);
    converge(orbit.start_n(z), tol, |n| {
        Ok(orbit.jet(z, n, m)?.map(|j| j.coeffs()[m] * mf))
    })
}

/// The limit of `λ^{−(|i|+‖i‖)n}·((f^{np})')^i(ξ + λ^{−n}z)`, which is
/// `(ψ')^i(z)`: the product over `k` of `(ψ^{(k+1)}(z))^{i_k}`.
pub fn poincare_monomial(
    f: &Map,
    fp: &FixedPointData,
    z: Complex,
    i: &MultiIndex,
    tol: f64,
) -> Result<EvalReport, PoincareError> {
    let orbit = Orbit::new(f, fp);
    let m = i.order().map_or(1, |r| r + 1);
    converge(orbit.start_n(z), tol, |n| {
        let Some(jet) = orbit.jet(z, n, m)? else {
            return Ok(None);
        };
        let mut v = Complex::new(1.0, 0.0);
        for (k, &e) in i.entries().iter().enumerate() {
            let d = jet.coeffs()[k + 1] * factorial_f64(k + 1);
            v *= d.powi(e as i32);
        }
        Ok(Some(v))
    })
}

/// `max |ψ(λz) − f^p(ψ(z))|` over the samples.
pub fn check_schroeder_numeric(
    f: &Map,
    fp: &FixedPointData,
    samples: &[Complex],
    tol: f64,
) -> Result<f64, PoincareError> {
    let mut worst = 0.0f64;
    for &z in samples {
        let lhs = poincare_eval(f, fp, fp.lambda * z, tol)?.value;
        let mut rhs = poincare_eval(f, fp, z, tol)?.value;
        for _ in 0..fp.period {
            rhs = f.eval(rhs);
        }
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Parse `re,im` lines. Blank lines, `#` comments and a non-numeric header
/// line are skipped.
pub fn parse_samples_csv(text: &str) -> Result<Vec<Complex>, PoincareError> {
    let mut out = Vec::new();
    let mut header_allowed = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|s| s.parse().ok()).collect();
        match (parsed, fields.len()) {
            (Some(v), 2) => out.push(Complex::new(v[0], v[1])),
            (Some(v), 1) => out.push(Complex::new(v[0], 0.0)),
            (None, _) if header_allowed && line.chars().any(|c| c.is_ascii_alphabetic()) => {}
            _ => {
                return Err(PoincareError::Csv {
                    line: idx + 1,
                    msg: format!("expected `re,im`, got `{line}`"),
                })
            }
        }
        header_allowed = false;
    }
    Ok(out)
}

/// Reports as CSV with columns `z_re,z_im,val_re,val_im,n_used,err`.
pub fn reports_to_csv(rows: &[(Complex, EvalReport)]) -> String {
    let mut out = String::from("z_re,z_im,val_re,val_im,n_used,err\n");
    for (z, r) in rows {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{},{:e}",
            z.re, z.im, r.value.re, r.value.im, r.n_used, r.error_estimate
        );
    }
    out
}
