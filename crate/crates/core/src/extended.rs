//! The extended distribution `F(x) = g(F0(x))`.

use crate::baselines::BaselineModel;
use crate::error::{Error, Result};
use crate::param_family::ParameterVector;

/// Survival values below this make the hazard meaningless.
pub const SURVIVAL_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedDistribution {
    baseline: BaselineModel,
    pv: ParameterVector,
}

impl ExtendedDistribution {
    pub fn new(baseline: BaselineModel, pv: ParameterVector) -> Self {
        ExtendedDistribution { baseline, pv }
    }

    pub fn baseline(&self) -> &BaselineModel {
        &self.baseline
    }

    pub fn params(&self) -> &ParameterVector {
        &self.pv
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.pv.g_unit(self.baseline.cdf(x))
    }

    /// `1 − F(x)`, evaluated from the baseline survival value so that the
    /// upper tail keeps relative precision.
    pub fn sf(&self, x: f64) -> f64 {
        let (u, s) = self.baseline.cdf_sf(x);
        self.pv.g_complement_parts(u, s)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let f0 = self.baseline.pdf(x);
        if f0 == 0.0 {
            return 0.0;
        }
        self.pv.g_prime_unit(self.baseline.cdf(x)) * f0
    }

    /// `f(x) / S(x)` for `x ≥ 0`.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        let (lo, _) = self.baseline.support();
        if !(x >= lo) {
            return Err(Error::domain("x", x, "[0, ∞)"));
        }
        let (u, s) = self.baseline.cdf_sf(x);
        let survival = self.pv.g_complement_parts(u, s);
        if survival < SURVIVAL_FLOOR {
            return Err(Error::SurvivalUnderflow { x, survival });
        }
        let f0 = self.baseline.pdf(x);
        if f0 == 0.0 {
            return Ok(0.0);
        }
        Ok(self.pv.g_prime_unit(u) * f0 / survival)
    }

    /// Inverse of the extended CDF. Lower quantiles invert `g` and then
    /// `F0`; upper quantiles invert `1 − g` and then `S0`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain("p", p, "(0, 1)"));
        }
        if p <= 0.5 {
            let u = self.pv.g_inverse(p)?;
            self.baseline_quantile_clamped(u, 1.0 - u)
        } else {
            let s = self.pv.g_inverse_complement(1.0 - p)?;
            self.baseline_quantile_clamped(1.0 - s, s)
        }
    }

    fn baseline_quantile_clamped(&self, u: f64, s: f64) -> Result<f64> {
        let (lo, hi) = self.baseline.support();
        if u <= 0.0 {
            Ok(lo)
        } else if s <= 0.0 {
            Ok(hi)
        } else if u <= 0.5 {
            self.baseline.quantile(u)
        } else {
            self.baseline.isf(s)
        }
    }
}
