//! The `curve`, `sample` and `moment` subcommands, written against
//! `io::Write` so they can be driven from tests.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use moq_core::moments::{moment, MomentQuery, MomentResult};
use moq_core::sampling::{sample, RandomSource, SampleBatch, SamplerKind};
use moq_core::ExtendedDistribution;

use crate::CliError;

pub const SEED_ENV: &str = "MOQ_SEED";
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Cdf,
    Sf,
    Pdf,
    Hazard,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Cdf => "cdf",
            Quantity::Sf => "sf",
            Quantity::Pdf => "pdf",
            Quantity::Hazard => "hazard",
        }
    }

    pub fn evaluate(&self, ed: &ExtendedDistribution, x: f64) -> moq_core::Result<f64> {
        Ok(match self {
            Quantity::Cdf => ed.cdf(x),
            Quantity::Sf => ed.sf(x),
            Quantity::Pdf => ed.pdf(x),
            Quantity::Hazard => ed.hazard(x)?,
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Quantity::Cdf, Quantity::Sf, Quantity::Pdf, Quantity::Hazard]
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| format!("unknown quantity '{s}' (expected cdf, sf, pdf or hazard)"))
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// `lo, lo + step, …` up to `hi` (inclusive up to rounding).
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(CliError::Usage("--lo and --hi must be finite".into()));
    }
    if !(lo < hi) {
        return Err(CliError::Usage(format!("--lo ({lo}) must be smaller than --hi ({hi})")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Usage(format!("--step ({step}) must be positive")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}

/// Writes `x,value` rows for the grid; nothing is written if any point
/// fails to evaluate.
pub fn curve(
    ed: &ExtendedDistribution,
    quantity: Quantity,
    lo: f64,
    hi: f64,
    step: f64,
    out: &mut dyn Write,
) -> Result<usize, CliError> {
    let xs = grid(lo, hi, step)?;
    let mut text = String::from("x,value\n");
    for &x in &xs {
        let v = quantity
            .evaluate(ed, x)
            .map_err(|source| CliError::Evaluation { x, source })?;
        text.push_str(&format_number(x));
        text.push(',');
        text.push_str(&format_number(v));
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    Ok(xs.len())
}

/// Seed precedence: `--seed`, then `MOQ_SEED`, then the spec file, then
/// `DEFAULT_SEED`.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, spec: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(v) = env {
        return v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v} is not an unsigned 64-bit integer")));
    }
    Ok(spec.unwrap_or(DEFAULT_SEED))
}

pub fn draw(ed: &ExtendedDistribution, kind: SamplerKind, n: usize, seed: u64) -> Result<SampleBatch, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok(sample(ed, kind, &mut RandomSource::new(seed), n)?)
}

pub fn write_samples(batch: &SampleBatch, out: &mut dyn Write) -> Result<(), CliError> {
    let mut text = format!(
        "# sampler={}\n# rng={} seed={}\n# n={} n_proposed={} acceptance_rate={}\n",
        batch.sampler,
        RandomSource::ALGORITHM,
        batch.seed,
        batch.values.len(),
        batch.n_proposed,
        format_number(batch.acceptance_rate()),
    );
    for &v in &batch.values {
        text.push_str(&format_number(v));
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn compute_moment(ed: &ExtendedDistribution, query: &MomentQuery) -> Result<MomentResult, CliError> {
    Ok(moment(ed, query)?)
}

/// `value=…\tmethod=…\tterms=…\terror_estimate=…`
pub fn format_moment(r: &MomentResult) -> String {
    format!(
        "value={}\tmethod={}\tterms={}\terror_estimate={}",
        format_number(r.value),
        r.method_used,
        r.terms_used,
        format_number(r.error_estimate)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use moq_core::moments::MomentMethod;
    use moq_core::{BaselineModel, ParameterVector};

    fn ed(b: BaselineModel, a: &[f64]) -> ExtendedDistribution {
        ExtendedDistribution::new(b, ParameterVector::new(a.to_vec()).unwrap())
    }

    #[test]
    fn grid_counts() {
        assert_eq!(grid(0.01, 6.0, 0.01).unwrap().len(), 600);
        assert_eq!(grid(0.0, 1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(matches!(grid(1.0, 1.0, 0.1), Err(CliError::Usage(_))));
        assert!(matches!(grid(0.0, 1.0, 0.0), Err(CliError::Usage(_))));
    }

    #[test]
    fn weibull_hazard_curve() {
        let d = ed(BaselineModel::weibull(2.0, 2.0).unwrap(), &[1.0]);
        let mut buf = Vec::new();
        assert_eq!(curve(&d, Quantity::Hazard, 0.01, 6.0, 0.01, &mut buf).unwrap(), 600);
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,value"));
        for line in lines {
            let (x, v) = line.split_once(',').unwrap();
            let (x, v): (f64, f64) = (x.parse().unwrap(), v.parse().unwrap());
            assert!((v - x / 2.0).abs() <= 1e-14 * x);
        }
    }

    #[test]
    fn curve_reports_underflow_with_x() {
        let d = ed(BaselineModel::unit_exponential(), &[1.0]);
        let mut buf = Vec::new();
        let err = curve(&d, Quantity::Hazard, 600.0, 800.0, 100.0, &mut buf).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("x = 700"), "{err}");
        assert!(buf.is_empty());
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some("2"), Some(3)).unwrap(), 1);
        assert_eq!(resolve_seed(None, Some("2"), Some(3)).unwrap(), 2);
        assert_eq!(resolve_seed(None, None, Some(3)).unwrap(), 3);
        assert_eq!(resolve_seed(None, None, None).unwrap(), DEFAULT_SEED);
        assert!(resolve_seed(None, Some("abc"), None).is_err());
    }

    #[test]
    fn sample_header_and_determinism() {
        let d = ed(BaselineModel::unit_exponential(), &[1.5, 0.5]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_samples(&draw(&d, SamplerKind::AcceptReject, 10, 7).unwrap(), &mut a).unwrap();
        write_samples(&draw(&d, SamplerKind::AcceptReject, 10, 7).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("# sampler=accept-reject\n# rng=ChaCha8 seed=7\n# n=10 n_proposed="));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 10);
    }

    #[test]
    fn moment_line() {
        let d = ed(BaselineModel::standard_log_logistic(), &[1.0, 1.0]);
        let r = compute_moment(&d, &MomentQuery::new(0.5, MomentMethod::ClosedForm, 1e-10)).unwrap();
        let line = format_moment(&r);
        assert!(line.starts_with("value=1.5707963267948966e0\tmethod=closed-form\tterms=1\t"), "{line}");
    }
}
