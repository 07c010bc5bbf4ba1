//! Distribution spec files.
//!
//! ```toml
//! seed = 42                  # optional
//!
//! [baseline]
//! family = "weibull"         # exponential | weibull | generalized-weibull | log-logistic
//! scale = 2.0
//! shape = 2.0                # all families except exponential
//! # power = 1.0              # generalized-weibull only
//!
//! [parameters]
//! a = [1e-6, 0.15]
//! # q = 2                    # optional; must equal the length of a
//! ```
//!
//! Unknown keys are rejected.

use std::path::Path;

use moq_core::{BaselineModel, ExtendedDistribution, ParameterVector};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub seed: Option<u64>,
    pub baseline: BaselineSpec,
    pub parameters: ParametersSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BaselineSpec {
    Exponential { scale: f64 },
    Weibull { scale: f64, shape: f64 },
    GeneralizedWeibull { scale: f64, shape: f64, power: f64 },
    LogLogistic { scale: f64, shape: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametersSpec {
    pub a: Vec<f64>,
    pub q: Option<usize>,
}

impl DistributionSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Spec(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Spec(msg) => CliError::Spec(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn baseline_model(&self) -> Result<BaselineModel, CliError> {
        let b = match self.baseline {
            BaselineSpec::Exponential { scale } => BaselineModel::exponential(scale),
            BaselineSpec::Weibull { scale, shape } => BaselineModel::weibull(scale, shape),
            BaselineSpec::GeneralizedWeibull { scale, shape, power } => {
                BaselineModel::generalized_weibull(scale, shape, power)
            }
            BaselineSpec::LogLogistic { scale, shape } => BaselineModel::log_logistic(scale, shape),
        };
        b.map_err(|e| CliError::Spec(format!("baseline: {e}")))
    }

    pub fn parameter_vector(&self) -> Result<ParameterVector, CliError> {
        let a = &self.parameters.a;
        let pv = match self.parameters.q {
            Some(q) => ParameterVector::validate(q, a),
            None => ParameterVector::new(a.clone()),
        };
        pv.map_err(|e| CliError::Spec(format!("parameters: {e}")))
    }

    pub fn distribution(&self) -> Result<ExtendedDistribution, CliError> {
        Ok(ExtendedDistribution::new(self.baseline_model()?, self.parameter_vector()?))
    }
}
