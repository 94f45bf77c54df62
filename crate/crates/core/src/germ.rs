use thiserror::Error;

use crate::coeff::Coeff;
use crate::series::{PowerSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GermError {
    #[error("germ must fix 0 (constant term is non-zero)")]
    NotFixingZero,
    #[error("germ must be tangent to the identity (linear coefficient is not 1)")]
    NotTangentToIdentity,
    #[error("series agrees with the identity up to order {order}; no parabolic term is visible")]
    NotParabolic { order: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A germ `z + f_p z^p + …` with `p ≥ 2` and `f_p ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolicGerm<C> {
    p: usize,
    series: PowerSeries<C>,
}

impl<C: Coeff> ParabolicGerm<C> {
    pub fn new(series: PowerSeries<C>) -> Result<Self, GermError> {
        let c = series.coeffs();
        if !c[0].is_zero() {
            return Err(GermError::NotFixingZero);
        }
        if c.get(1) != Some(&C::one()) {
            return Err(GermError::NotTangentToIdentity);
        }
        let p = (2..c.len())
            .find(|&k| !c[k].is_zero())
            .ok_or(GermError::NotParabolic {
                order: series.order(),
            })?;
        Ok(ParabolicGerm { p, series })
    }

    /// Index of the first non-linear term.
    pub fn p(&self) -> usize {
        self.p
    }

    /// The coefficient `f_p`.
    pub fn leading(&self) -> &C {
        &self.series.coeffs()[self.p]
    }

    pub fn series(&self) -> &PowerSeries<C> {
        &self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn truncate(&self, order: usize) -> Result<Self, GermError> {
        Self::new(self.series.truncate(order))
    }

    /// `f^n` as a series; `n = 0` gives the identity `z` at the same order.
    pub fn iterate_series(&self, n: u32) -> PowerSeries<C> {
        let mut acc = PowerSeries::var(self.order());
        for _ in 0..n {
            acc = self.series.compose(&acc).expect("iterates of a germ fix 0");
        }
        acc
    }

    /// `f^n` as a germ. The 0-th iterate is the identity, which is not
    /// parabolic and comes back as [`GermError::NotParabolic`].
    pub fn iterate(&self, n: u32) -> Result<Self, GermError> {
        if n == 0 {
            return Err(GermError::NotParabolic {
                order: self.order(),
            });
        }
        Self::new(self.iterate_series(n))
    }
}
