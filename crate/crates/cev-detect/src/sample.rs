//! Raw bivariate observations.

use crate::{Error, Result};

/// A bivariate sample `(X_1, Y_1), …, (X_n, Y_n)`.
///
/// `Y` is the (candidate) conditioning variable; `X` is its companion.
/// Construction validates that both sequences have the same nonzero length
/// and contain only finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl BivariateSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
        }
        Ok(Self { xs, ys })
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Consume the sample, returning the underlying columns.
    pub fn into_columns(self) -> (Vec<f64>, Vec<f64>) {
        (self.xs, self.ys)
    }
}
