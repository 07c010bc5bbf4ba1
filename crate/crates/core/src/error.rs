use std::fmt;

use thiserror::Error;

/// A parameter-space condition required by one of the series expansions,
/// moment formulas or samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `a1 + … + aq > q/2`: the expansion of g around 0 converges on [-1, 1].
    ExpansionAtZero,
    /// `a1 + … + aq < 2q`: the expansion of g around 1 converges on [0, 2].
    ExpansionAtOne,
    /// `a1 + … + aq ≥ q` and `ai ≤ 1` for `2 ≤ i ≤ q`: the coefficients of
    /// the expansion around 0 form a probability mass function.
    NonNegativeCoefficients,
    /// Two-parameter family with `a1 ≠ a2`.
    DistinctPair,
    /// `|r| < b2` for log-logistic moments.
    LogLogisticOrder,
    /// Integer moment order, `1/b2` and `b3` integers.
    IntegerGeneralizedWeibull,
    /// The closed form only covers two-parameter log-logistic extensions.
    TwoParameterLogLogistic,
    /// The method does not apply to this baseline family.
    Baseline,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Condition::ExpansionAtZero => "requires a1+…+aq > q/2",
            Condition::ExpansionAtOne => "requires a1+…+aq < 2q",
            Condition::NonNegativeCoefficients => "requires a1+…+aq ≥ q and ai ≤ 1 for 2 ≤ i ≤ q",
            Condition::DistinctPair => "requires q = 2 and a1 ≠ a2",
            Condition::LogLogisticOrder => "requires |r| < b2",
            Condition::IntegerGeneralizedWeibull => {
                "requires a positive integer order, 1/b2 ∈ ℕ* and b3 ∈ ℕ*"
            }
            Condition::TwoParameterLogLogistic => {
                "requires a log-logistic baseline with q = 2 (or all ai equal)"
            }
            Condition::Baseline => "is not available for this baseline family",
        };
        f.write_str(msg)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {name} = {value} must be finite and strictly positive")]
    NonPositiveParameter { name: String, value: f64 },

    #[error("expected {expected} parameters, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{what} {condition}")]
    ConditionViolated {
        what: &'static str,
        condition: Condition,
    },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Nonconvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("survival function underflows at x = {x} (S(x) = {survival:e})")]
    SurvivalUnderflow { x: f64, survival: f64 },

    #[error("envelope violated: g'(u)/M = {ratio} > 1 at u = {u}")]
    EnvelopeViolation { ratio: f64, u: f64 },

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tol:e}")]
    ToleranceNotMet { estimate: f64, tol: f64 },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }

    pub(crate) fn condition(what: &'static str, condition: Condition) -> Self {
        Error::ConditionViolated { what, condition }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
