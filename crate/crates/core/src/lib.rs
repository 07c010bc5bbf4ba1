//! Multi-parameter extensions of baseline survival distributions.
//!
//! A baseline CDF `F0` is composed with the support function
//!
//! ```text
//! g(u) = q^q · u · ∏_{i=2..q} (a_i + u − a_i u) / (Σa − (Σa − q) u)^q
//! ```
//!
//! giving the extended CDF `F(x) = g(F0(x))`. With `q = 1` (or all `a_i`
//! equal) this is the Marshall–Olkin family. The crate evaluates the
//! extended CDF, survival, density, hazard and quantile, computes moments
//! through power-series expansions of `g` and closed forms, and samples by
//! accept-reject, random maxima and inversion. The [`oracle`] module holds
//! independent numerical machinery (quadrature, special functions,
//! Kolmogorov–Smirnov statistics) used to cross-check all of the above.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod error;
pub mod extended;
pub mod moments;
pub mod oracle;
pub mod param_family;
pub mod sampling;

pub use baselines::BaselineModel;
pub use error::{Condition, Error, Result};
pub use extended::ExtendedDistribution;

pub use param_family::{CoefficientStream, ParameterVector, SeriesCoefficients, SeriesKind};
pub use moments::{MomentMethod, MomentQuery, MomentResult};
pub use sampling::{RandomSource, SampleBatch, SamplerKind};

