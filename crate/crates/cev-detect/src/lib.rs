//! Rank- and concomitant-based statistics for detecting a conditional
//! extreme value (CEV) model in bivariate data.
//!
//! Given observations `(X_i, Y_i)` where the conditioning variable `Y` is
//! assumed to lie in an extreme value domain of attraction, the crate
//! computes three statistics over the concomitants of the top-k order
//! statistics of `Y`:
//!
//! - the Hillish statistic `(1/k) Σ_j log(k/R_j) · log(k/j)`,
//! - the Pickandsish statistic, a ratio of differences of ordered
//!   concomitants across the full and half tail samples,
//! - Kendall's tau between the concomitant ranks and the tail ordering.
//!
//! Each statistic stabilizes (in k) under a CEV model, and the pair of
//! Hillish values on `(X, Y)` and `(-X, Y)` together with the Pickandsish
//! values at two probe levels characterize whether the standardized limit
//! measure is a product. The [`detection`] module turns traces of the
//! statistics over a k-grid into a structured verdict; [`models`] provides
//! seeded simulators for two analytically solved reference models plus
//! closed-form and quadrature oracles for their limit constants;
//! [`marginals`] carries the univariate extreme-value-index diagnostics
//! (Hill, Pickands, moment estimators, exponential QQ data) used to choose
//! the conditioning variable.
//!
//! All operations are pure functions of immutable inputs and are safe to
//! call concurrently; a [`rank::ConcomitantView`] may be shared read-only
//! across threads computing different k values.

pub mod detection;
mod error;
pub mod io;
pub mod marginals;
pub mod models;
pub mod quadrature;
pub mod rank;
pub mod sample;
pub mod statistics;

pub mod cli;

pub use error::Error;
pub use sample::BivariateSample;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
