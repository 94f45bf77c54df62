//! Plain-text series files.
//!
//! ```text
//! order 7
//! 2 1/2
//! 3 -1/12
//! ```
//!
//! The first line gives the truncation order; each further line holds one
//! non-zero coefficient as `k num/den` (exact) or `k re im` (float).

use std::fmt::Write as _;

use thiserror::Error;

use crate::coeff::{parse_rational, rational_fraction_string, Coeff, Complex, Rational};
use crate::series::{AnySeries, ExactSeries, FloatSeries, PowerSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("missing `order N` header")]
    MissingHeader,
    #[error("file mixes exact and float coefficients")]
    MixedDomains,
}

pub fn exact_to_text(s: &ExactSeries) -> String {
    let mut out = format!("order {}\n", s.order());
    for (k, c) in s.coeffs().iter().enumerate() {
        if !Coeff::is_zero(c) {
            writeln!(out, "{k} {}", rational_fraction_string(c)).unwrap();
        }
    }
    out
}

pub fn float_to_text(s: &FloatSeries) -> String {
    let mut out = format!("order {}\n", s.order());
    for (k, c) in s.coeffs().iter().enumerate() {
        if !Coeff::is_zero(c) {
            writeln!(out, "{k} {:e} {:e}", c.re, c.im).unwrap();
        }
    }
    out
}

pub fn any_to_text(s: &AnySeries) -> String {
    match s {
        AnySeries::Exact(s) => exact_to_text(s),
        AnySeries::Float(s) => float_to_text(s),
    }
}

/// Parse a series file. A file without coefficient lines is read as the
/// exact zero series; blank lines and `#` comments are ignored.
pub fn parse_series_text(text: &str) -> Result<AnySeries, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (hline, header) = lines.next().ok_or(FormatError::MissingHeader)?;
    let order: usize = header
        .trim()
        .strip_prefix("order")
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| FormatError::Malformed {
            line: hline + 1,
            msg: "expected `order N`".into(),
        })?;

    let mut exact: Option<Vec<Rational>> = None;
    let mut float: Option<Vec<Complex>> = None;
    for (idx, line) in lines {
        let bad = |msg: &str| FormatError::Malformed {
            line: idx + 1,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let k: usize = fields
            .first()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad("expected coefficient index"))?;
        if k > order {
            return Err(bad("coefficient index exceeds the order"));
        }
        match fields.len() {
            2 => {
                if float.is_some() {
                    return Err(FormatError::MixedDomains);
                }
                let v = parse_rational(fields[1]).ok_or_else(|| bad("bad rational"))?;
                exact.get_or_insert_with(|| vec![Coeff::zero(); order + 1])[k] = v;
            }
            3 => {
                if exact.is_some() {
                    return Err(FormatError::MixedDomains);
                }
                let re: f64 = fields[1].parse().map_err(|_| bad("bad real part"))?;
                let im: f64 = fields[2].parse().map_err(|_| bad("bad imaginary part"))?;
                float.get_or_insert_with(|| vec![Coeff::zero(); order + 1])[k] =
                    Complex::new(re, im);
            }
            _ => return Err(bad("expected `k num/den` or `k re im`")),
        }
    }
    Ok(match (exact, float) {
        (_, Some(f)) => AnySeries::Float(PowerSeries::from_coeffs(f).unwrap()),
        (Some(e), None) => AnySeries::Exact(PowerSeries::from_coeffs(e).unwrap()),
        (None, None) => AnySeries::Exact(PowerSeries::zero(order)),
    })
}
