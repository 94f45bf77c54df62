//! Exact computer algebra for the functional equations of local holomorphic
//! dynamics.
//!
//! - [`series`]: truncated power series over exact rationals or complex floats
//! - [`funceq`]: iterative logarithm (Julia's equation), Schröder
//!   linearization, fractional-iteration flows
//! - [`diffpoly`]: differential polynomials, rankings and the chain-rule
//!   families `A_ij`, `B_ij`
//! - [`guesser`]: exact search for algebraic / linear differential equations
//! - [`poincare`]: numeric Poincaré functions at repelling fixed points
//! - [`expr`]: the expression language used by the command-line tool
//! - [`suites`]: exact invariant suites behind `itlog verify`

pub mod coeff;
pub mod diffpoly;
pub mod expr;
pub mod format;
pub mod funceq;
pub mod germ;
pub mod guesser;
pub mod poincare;
pub mod series;
pub mod suites;

pub use coeff::{Coeff, Complex, Rational};
pub use germ::ParabolicGerm;
pub use series::{AnySeries, ExactSeries, FloatSeries, PowerSeries, SeriesError};
