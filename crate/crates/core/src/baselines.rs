//! Baseline distributions `F0` on `J = (0, ∞)`.
//!
//! Every family is evaluated through its survival function with
//! `exp_m1`/`ln_1p` formulations so that upper-tail survival (and hence the
//! hazard of the extended law) keeps full relative precision.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineModel {
    /// `F0(x) = 1 − exp(−x/scale)`.
    Exponential { scale: f64 },
    /// `F0(x) = 1 − exp(−(x/scale)^shape)`.
    Weibull { scale: f64, shape: f64 },
    /// `F0(x) = 1 − exp(1 − (1 + (x/scale)^shape)^(1/power))`.
    GeneralizedWeibull { scale: f64, shape: f64, power: f64 },
    /// `F0(x) = x^shape / (scale^shape + x^shape)`.
    LogLogistic { scale: f64, shape: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonPositiveParameter {
            name: name.to_string(),
            value: v,
        })
    }
}

impl BaselineModel {
    pub fn exponential(scale: f64) -> Result<Self> {
        Ok(BaselineModel::Exponential {
            scale: positive("scale", scale)?,
        })
    }

    pub fn weibull(scale: f64, shape: f64) -> Result<Self> {
        Ok(BaselineModel::Weibull {
            scale: positive("scale", scale)?,
            shape: positive("shape", shape)?,
        })
    }

    pub fn generalized_weibull(scale: f64, shape: f64, power: f64) -> Result<Self> {
        Ok(BaselineModel::GeneralizedWeibull {
            scale: positive("scale", scale)?,
            shape: positive("shape", shape)?,
            power: positive("power", power)?,
        })
    }

    pub fn log_logistic(scale: f64, shape: f64) -> Result<Self> {
        Ok(BaselineModel::LogLogistic {
            scale: positive("scale", scale)?,
            shape: positive("shape", shape)?,
        })
    }

    /// Unit-mean exponential.
    pub fn unit_exponential() -> Self {
        BaselineModel::Exponential { scale: 1.0 }
    }

    /// `x / (1 + x)`.
    pub fn standard_log_logistic() -> Self {
        BaselineModel::LogLogistic {
            scale: 1.0,
            shape: 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaselineModel::Exponential { .. } => "exponential",
            BaselineModel::Weibull { .. } => "weibull",
            BaselineModel::GeneralizedWeibull { .. } => "generalized-weibull",
            BaselineModel::LogLogistic { .. } => "log-logistic",
        }
    }

    pub fn scale(&self) -> f64 {
        match *self {
            BaselineModel::Exponential { scale }
            | BaselineModel::Weibull { scale, .. }
            | BaselineModel::GeneralizedWeibull { scale, .. }
            | BaselineModel::LogLogistic { scale, .. } => scale,
        }
    }

    /// Endpoints of the interval `J` on which `0 < F0 < 1`.
    pub fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    /// The cumulative hazard-like exponent `t(x)` with `S0 = exp(−t)` for the
    /// Weibull-type families.
    fn exponent(&self, x: f64) -> f64 {
        match *self {
            BaselineModel::Exponential { scale } => x / scale,
            BaselineModel::Weibull { scale, shape } => (x / scale).powf(shape),
            BaselineModel::GeneralizedWeibull {
                scale,
                shape,
                power,
            } => ((x / scale).powf(shape).ln_1p() / power).exp_m1(),
            BaselineModel::LogLogistic { .. } => unreachable!(),
        }
    }

    /// `(F0(x), S0(x))`, each computed without cancellation.
    pub fn cdf_sf(&self, x: f64) -> (f64, f64) {
        if x.is_nan() {
            return (f64::NAN, f64::NAN);
        }
        if x <= 0.0 {
            return (0.0, 1.0);
        }
        match *self {
            BaselineModel::LogLogistic { scale, shape } => {
                let z = (x / scale).powf(shape);
                if z.is_infinite() {
                    return (1.0, 0.0);
                }
                (z / (1.0 + z), 1.0 / (1.0 + z))
            }
            _ => {
                let t = self.exponent(x);
                (-(-t).exp_m1(), (-t).exp())
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_sf(x).0
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.cdf_sf(x).1
    }

    /// `F0'(x)` on `J`, zero elsewhere. Where the density diverges at `0⁺`
    /// (shape < 1) the value at exactly 0 is defined as 0.
    pub fn pdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return self.pdf_at_zero();
        }
        match *self {
            BaselineModel::Exponential { scale } => (-x / scale).exp() / scale,
            BaselineModel::Weibull { scale, shape } => {
                let z = x / scale;
                let zk = z.powf(shape);
                shape / scale * zk / z * (-zk).exp()
            }
            BaselineModel::GeneralizedWeibull {
                scale,
                shape,
                power,
            } => {
                let z = x / scale;
                let zk = z.powf(shape);
                let t = (zk.ln_1p() / power).exp_m1();
                // S0 · d/dx (1 + z^k)^(1/b3)
                (-t).exp() * (t + 1.0) / (1.0 + zk) / power * shape / scale * zk / z
            }
            BaselineModel::LogLogistic { scale, shape } => {
                let z = x / scale;
                let zk = z.powf(shape);
                if zk.is_infinite() {
                    return 0.0;
                }
                shape / scale * zk / z / ((1.0 + zk) * (1.0 + zk))
            }
        }
    }

    fn pdf_at_zero(&self) -> f64 {
        match *self {
            BaselineModel::Exponential { scale } => 1.0 / scale,
            BaselineModel::Weibull { scale, shape } | BaselineModel::LogLogistic { scale, shape } => {
                if shape == 1.0 {
                    1.0 / scale
                } else {
                    0.0
                }
            }
            BaselineModel::GeneralizedWeibull {
                scale,
                shape,
                power,
            } => {
                if shape == 1.0 {
                    1.0 / (scale * power)
                } else {
                    0.0
                }
            }
        }
    }

    /// The unique `x ∈ J` with `F0(x) = p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain("p", p, "(0, 1)"));
        }
        Ok(self.quantile_from_parts(-(-p).ln_1p(), p / (1.0 - p)))
    }

    /// The unique `x ∈ J` with `S0(x) = s`.
    pub fn isf(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::domain("survival probability", s, "(0, 1)"));
        }
        Ok(self.quantile_from_parts(-s.ln(), (1.0 - s) / s))
    }

    // `t = −ln S0` for the Weibull-type families, `odds = F0/S0` for the
    // log-logistic.
    fn quantile_from_parts(&self, t: f64, odds: f64) -> f64 {
        match *self {
            BaselineModel::Exponential { scale } => scale * t,
            BaselineModel::Weibull { scale, shape } => scale * t.powf(1.0 / shape),
            BaselineModel::GeneralizedWeibull {
                scale,
                shape,
                power,
            } => scale * (power * t.ln_1p()).exp_m1().powf(1.0 / shape),
            BaselineModel::LogLogistic { scale, shape } => scale * odds.powf(1.0 / shape),
        }
    }
}
