//! Numerical machinery used to check the rest of the crate: special
//! functions, quadrature, Kolmogorov–Smirnov statistics and Monte-Carlo
//! means. Nothing here calls into the series code.

pub mod ks;
pub mod quadrature;
pub mod special;

pub use ks::{ks_critical_one_sample, ks_critical_two_sample, ks_one_sample, ks_two_sample};
pub use quadrature::{integrate, integrate_semiinfinite, integrate_semiinfinite_with, QuadratureResult, Tolerance};
pub use special::{beta_fn, gamma, ln_beta, log_gamma};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub n: usize,
}

/// Mean and standard error of `f` over `values` (Welford update).
pub fn monte_carlo_mean<F: Fn(f64) -> f64>(values: &[f64], f: F) -> MonteCarloEstimate {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let y = f(x);
        let delta = y - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (y - mean);
    }
    let n = values.len();
    let standard_error = if n > 1 {
        (m2 / (n - 1) as f64 / n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    MonteCarloEstimate {
        mean,
        standard_error,
        n,
    }
}
