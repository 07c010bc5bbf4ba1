//! Samplers for the extended family: accept-reject against the baseline,
//! maxima of a random number of baseline draws, and inversion of the
//! extended CDF.

use std::fmt;
use std::str::FromStr;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::BaselineModel;
use crate::error::{Condition, Error, Result};
use crate::extended::ExtendedDistribution;
use crate::param_family::{CoefficientStream, ParameterVector, SeriesKind, DEFAULT_MAX_TERMS};

/// Accept-reject ratios above `1 + ENVELOPE_SLACK` are reported as bound
/// violations.
pub const ENVELOPE_SLACK: f64 = 1e-12;

/// Seeded ChaCha8 stream. Splitting keeps the seed and selects another of
/// the generator's independent streams.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub const ALGORITHM: &'static str = "ChaCha8";

    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomSource { seed, stream, rng }
    }

    /// Fresh source on stream `stream` of the same seed.
    pub fn split(&self, stream: u64) -> Self {
        Self::with_stream(self.seed, stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform().ln() / rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    AcceptReject,
    RandomMaxima,
    InverseCdf,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 3] = [
        SamplerKind::AcceptReject,
        SamplerKind::RandomMaxima,
        SamplerKind::InverseCdf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SamplerKind::AcceptReject => "accept-reject",
            SamplerKind::RandomMaxima => "random-maxima",
            SamplerKind::InverseCdf => "inverse-cdf",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SamplerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown sampler '{s}' (expected accept-reject, random-maxima or inverse-cdf)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub sampler: SamplerKind,
    /// Proposals drawn; equals `values.len()` except for accept-reject.
    pub n_proposed: usize,
    pub seed: u64,
}

impl SampleBatch {
    pub fn acceptance_rate(&self) -> f64 {
        self.values.len() as f64 / self.n_proposed as f64
    }

    /// Values in ascending order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `M` with `g'(u) ≤ M` on `[0, 1]`, so that `f ≤ M f0`.
///
/// Under the corollary conditions `g'` peaks at `u = 1` and `M = a1`;
/// otherwise each term of the derivative is bounded separately.
pub fn envelope_constant(pv: &ParameterVector) -> f64 {
    if pv.corollary_ok() {
        return pv.a1();
    }
    let q = pv.q() as f64;
    let s = pv.sum();
    let low = (s / q).min(1.0);
    let rest = &pv.a()[1..];
    let prod_max: f64 = rest.iter().map(|&a| a.max(1.0)).product();
    let lead = prod_max / low.powf(q);
    let excess = (s - q).abs() * prod_max / low.powf(q + 1.0);
    let spread: f64 = rest
        .iter()
        .enumerate()
        .map(|(i, &ai)| {
            let others: f64 = rest
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &a)| a.max(1.0))
                .product();
            (1.0 - ai).abs() * others
        })
        .sum::<f64>()
        / low.powf(q);
    lead + excess + spread
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "n ≥ 1"));
    }
    Ok(())
}

/// Accept-reject with the baseline as proposal and `M = envelope_constant`.
pub fn sample_accept_reject(ed: &ExtendedDistribution, rng: &mut RandomSource, n: usize) -> Result<SampleBatch> {
    sample_accept_reject_with_envelope(ed, rng, n, envelope_constant(ed.params()))
}

/// Accept-reject with a caller-chosen envelope constant.
pub fn sample_accept_reject_with_envelope(
    ed: &ExtendedDistribution,
    rng: &mut RandomSource,
    n: usize,
    envelope: f64,
) -> Result<SampleBatch> {
    require_n(n)?;
    if !(envelope > 0.0 && envelope.is_finite()) {
        return Err(Error::domain("envelope", envelope, "(0, ∞)"));
    }
    let pv = ed.params();
    let mut values = Vec::with_capacity(n);
    let mut proposed = 0;
    while values.len() < n {
        // u is F0 of the proposal
        let u = rng.uniform();
        let accept = rng.uniform();
        proposed += 1;
        let ratio = pv.g_prime(u)? / envelope;
        if ratio > 1.0 + ENVELOPE_SLACK {
            return Err(Error::EnvelopeViolation { ratio, u });
        }
        if accept < ratio {
            values.push(ed.baseline().quantile(u)?);
        }
    }
    Ok(SampleBatch {
        values,
        sampler: SamplerKind::AcceptReject,
        n_proposed: proposed,
        seed: rng.seed(),
    })
}

/// Inverse-CDF draws of `N` with `pr(N = m) = c_m`, from cumulative sums
/// extended on demand. Cloning takes a snapshot of the sums computed so far.
#[derive(Debug, Clone)]
pub struct CountSampler {
    stream: CoefficientStream,
    cumulative: Vec<f64>,
    max_terms: usize,
}

impl CountSampler {
    pub fn new(pv: &ParameterVector) -> Result<Self> {
        pv.require(pv.corollary_ok(), "random maxima", Condition::NonNegativeCoefficients)?;
        Ok(CountSampler {
            stream: CoefficientStream::new(pv, SeriesKind::C)?,
            cumulative: Vec::new(),
            max_terms: DEFAULT_MAX_TERMS,
        })
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms.max(1);
        self
    }

    /// Cumulative sums `c_1 + … + c_m` computed so far.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    fn extend(&mut self) {
        let last = self.cumulative.last().copied().unwrap_or(0.0);
        let c = self.stream.next().expect("infinite stream").max(0.0);
        self.cumulative.push(last + c);
    }

    /// The smallest `m` with `c_1 + … + c_m ≥ v`.
    pub fn draw_from(&mut self, v: f64) -> Result<usize> {
        if let Some(i) = self.cumulative.iter().position(|&c| c >= v) {
            return Ok(i + 1);
        }
        loop {
            if self.cumulative.len() >= self.max_terms {
                return Err(Error::Nonconvergence {
                    what: "cumulative sum of c-coefficients",
                    iterations: self.cumulative.len(),
                    residual: v - self.cumulative.last().copied().unwrap_or(0.0),
                });
            }
            self.extend();
            let m = self.cumulative.len();
            if self.cumulative[m - 1] >= v {
                return Ok(m);
            }
            // remaining mass is below rounding: the draw fell into the gap
            // left by summation error
            if self.stream.tail_bound(0.0) <= 4.0 * f64::EPSILON * m as f64 {
                return Ok(m);
            }
        }
    }

    pub fn sample(&mut self, rng: &mut RandomSource) -> Result<usize> {
        let v = rng.uniform();
        self.draw_from(v)
    }
}

/// One draw of `N` with `pr(N = m) = c_m`.
pub fn sample_n(pv: &ParameterVector, rng: &mut RandomSource) -> Result<usize> {
    CountSampler::new(pv)?.sample(rng)
}

/// Each value is the maximum of `N` baseline draws, `N ~ c`.
pub fn sample_random_maxima(ed: &ExtendedDistribution, rng: &mut RandomSource, n: usize) -> Result<SampleBatch> {
    require_n(n)?;
    let mut counts = CountSampler::new(ed.params())?;
    let baseline = ed.baseline();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let k = counts.sample(rng)?;
        let mut best = f64::NEG_INFINITY;
        for _ in 0..k {
            best = best.max(baseline.quantile(rng.uniform())?);
        }
        values.push(best);
    }
    Ok(SampleBatch {
        values,
        sampler: SamplerKind::RandomMaxima,
        n_proposed: n,
        seed: rng.seed(),
    })
}

pub fn sample_inverse_cdf(ed: &ExtendedDistribution, rng: &mut RandomSource, n: usize) -> Result<SampleBatch> {
    require_n(n)?;
    let values = (0..n)
        .map(|_| ed.quantile(rng.uniform()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch {
        values,
        sampler: SamplerKind::InverseCdf,
        n_proposed: n,
        seed: rng.seed(),
    })
}

pub fn sample(ed: &ExtendedDistribution, kind: SamplerKind, rng: &mut RandomSource, n: usize) -> Result<SampleBatch> {
    match kind {
        SamplerKind::AcceptReject => sample_accept_reject(ed, rng, n),
        SamplerKind::RandomMaxima => sample_random_maxima(ed, rng, n),
        SamplerKind::InverseCdf => sample_inverse_cdf(ed, rng, n),
    }
}

/// Maps draws of the `(a1, a2)` extension to standard-logistic draws:
/// `Y = ln(S0/F0)` (0 on the boundary of `J`), `V ~ Exp((a1+a2)/|a1−a2|)`,
/// and `L = Y + V − ln(2/(a1+a2))` when `a1 > a2`,
/// `L = −Y + V − ln((a1+a2)/2)` otherwise.
pub fn logistic_transform(
    batch: &SampleBatch,
    a1: f64,
    a2: f64,
    baseline: &BaselineModel,
    rng: &mut RandomSource,
) -> Result<Vec<f64>> {
    for (name, v) in [("a1", a1), ("a2", a2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveParameter {
                name: name.to_string(),
                value: v,
            });
        }
    }
    if a1 == a2 {
        return Err(Error::domain("a1 − a2", 0.0, "a1 ≠ a2"));
    }
    let s = a1 + a2;
    let rate = s / (a1 - a2).abs();
    Ok(batch
        .values
        .iter()
        .map(|&x| {
            let (f0, s0) = baseline.cdf_sf(x);
            let y = if f0 > 0.0 && s0 > 0.0 { s0.ln() - f0.ln() } else { 0.0 };
            let v = rng.exponential(rate);
            if a1 > a2 {
                y + v - (2.0 / s).ln()
            } else {
                -y + v - (s / 2.0).ln()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{ks_critical_one_sample, ks_critical_two_sample, ks_one_sample, ks_two_sample};
    use crate::param_family::c_coefficients;
    use proptest::prelude::*;

    const ALPHA: f64 = 0.001;

    fn ed(b: BaselineModel, a: &[f64]) -> ExtendedDistribution {
        ExtendedDistribution::new(b, ParameterVector::new(a.to_vec()).unwrap())
    }

    fn pv(a: &[f64]) -> ParameterVector {
        ParameterVector::new(a.to_vec()).unwrap()
    }

    fn grid_max(p: &ParameterVector, n: usize) -> f64 {
        (0..=n)
            .map(|i| p.g_prime(i as f64 / n as f64).unwrap())
            .fold(0.0, f64::max)
    }

    #[test]
    fn random_source_is_deterministic_and_splittable() {
        let mut a = RandomSource::new(5);
        let mut b = RandomSource::new(5);
        let xs: Vec<f64> = (0..100).map(|_| a.uniform()).collect();
        let ys: Vec<f64> = (0..100).map(|_| b.uniform()).collect();
        assert_eq!(xs, ys);
        let mut c = a.split(1);
        assert_eq!(c.seed(), 5);
        assert_eq!(c.stream(), 1);
        let zs: Vec<f64> = (0..100).map(|_| c.uniform()).collect();
        assert_ne!(xs, zs);
        assert!(xs.iter().all(|&u| u > 0.0 && u < 1.0));
        assert_eq!(RandomSource::ALGORITHM, "ChaCha8");
    }

    #[test]
    fn sampler_names_round_trip() {
        for k in SamplerKind::ALL {
            assert_eq!(k.name().parse::<SamplerKind>().unwrap(), k);
        }
        assert!("gibbs".parse::<SamplerKind>().is_err());
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(envelope_constant(&pv(&[1.0])), 1.0);
        assert_eq!(envelope_constant(&pv(&[1.5, 0.5])), 1.5);
        let p = pv(&[1e-6, 0.15]);
        let m = envelope_constant(&p);
        assert!(grid_max(&p, 10_000) <= m);
    }

    proptest! {
        #[test]
        fn envelope_dominates_derivative(
            a in prop::collection::vec(prop_oneof![1e-6..1.0f64, 1.0..20.0f64], 1..6)
        ) {
            let p = pv(&a);
            prop_assert!(grid_max(&p, 2000) <= envelope_constant(&p) + 1e-12);
        }
    }

    #[test]
    fn accept_reject_identity_accepts_everything() {
        let d = ed(BaselineModel::unit_exponential(), &[1.0]);
        let b = sample_accept_reject(&d, &mut RandomSource::new(1), 1000).unwrap();
        assert_eq!(b.n_proposed, 1000);
        assert_eq!(b.acceptance_rate(), 1.0);
    }

    #[test]
    fn accept_reject_rate_and_fit() {
        let d = ed(BaselineModel::unit_exponential(), &[1.5, 0.5]);
        let n = 100_000;
        let b = sample_accept_reject(&d, &mut RandomSource::new(42), n).unwrap();
        assert!(b.n_proposed >= n);
        let p = 1.0 / 1.5;
        let se = (p * (1.0 - p) / b.n_proposed as f64).sqrt();
        assert!((b.acceptance_rate() - p).abs() <= 3.0 * se);
        assert!(ks_one_sample(&b.sorted(), |x| d.cdf(x)) < ks_critical_one_sample(n, ALPHA));
    }

    #[test]
    fn halved_envelope_is_detected() {
        let d = ed(BaselineModel::unit_exponential(), &[1.5, 0.5]);
        let r = sample_accept_reject_with_envelope(&d, &mut RandomSource::new(3), 1000, 0.75);
        assert!(matches!(r, Err(Error::EnvelopeViolation { .. })));
    }

    #[test]
    fn counts_follow_c_coefficients() {
        let mut rng = RandomSource::new(9);
        let p = pv(&[1.0]);
        assert!((0..100).all(|_| sample_n(&p, &mut rng).unwrap() == 1));

        let n = 1_000_000;
        let mut counts = CountSampler::new(&pv(&[2.0])).unwrap();
        let mut ones = 0;
        let mut total = 0;
        for _ in 0..n {
            let k = counts.sample(&mut rng).unwrap();
            ones += (k == 1) as usize;
            total += k;
        }
        let se = (0.25 / n as f64).sqrt();
        assert!((ones as f64 / n as f64 - 0.5).abs() <= 3.0 * se);
        // E[N] = g'(1) = a1 = 2
        assert!((total as f64 / n as f64 - 2.0).abs() < 0.01);

        let p = pv(&[1.5, 0.5]);
        let c = c_coefficients(&p, 1e-14, 100).unwrap();
        let mut counts = CountSampler::new(&p).unwrap();
        let n = 200_000;
        let mut hist = [0usize; 11];
        for _ in 0..n {
            let k = counts.sample(&mut rng).unwrap();
            hist[k.min(10)] += 1;
        }
        for m in 1..=10 {
            let pm = c.values().get(m - 1).copied().unwrap_or(0.0);
            let se = (pm * (1.0 - pm) / n as f64).sqrt();
            let emp = hist[m] as f64 / n as f64;
            assert!((emp - pm).abs() <= 3.0 * se + 1e-12, "m={m}: {emp} vs {pm}");
        }
    }

    #[test]
    fn count_sampler_rejects_signed_coefficients() {
        let r = CountSampler::new(&pv(&[1e-6, 0.15]));
        assert!(matches!(
            r,
            Err(Error::ConditionViolated {
                condition: Condition::NonNegativeCoefficients,
                ..
            })
        ));
        let d = ed(BaselineModel::unit_exponential(), &[1e-6, 0.15]);
        assert!(sample_random_maxima(&d, &mut RandomSource::new(1), 10).is_err());
    }

    #[test]
    fn count_sampler_snapshot_is_independent() {
        let mut a = CountSampler::new(&pv(&[3.0, 0.4])).unwrap();
        a.draw_from(0.999).unwrap();
        let snapshot = a.clone();
        a.draw_from(1.0 - 1e-12).unwrap();
        assert!(snapshot.cumulative().len() < a.cumulative().len());
        assert_eq!(snapshot.cumulative(), &a.cumulative()[..snapshot.cumulative().len()]);
    }

    #[test]
    fn random_maxima_identity_is_the_baseline() {
        let b = BaselineModel::weibull(2.0, 2.0).unwrap();
        let d = ed(b, &[1.0]);
        let mut r1 = RandomSource::new(4);
        let mut r2 = RandomSource::new(4);
        let s = sample_random_maxima(&d, &mut r1, 100).unwrap();
        // N ≡ 1 consumes one uniform for N and one for the draw
        let direct: Vec<f64> = (0..100)
            .map(|_| {
                r2.uniform();
                b.quantile(r2.uniform()).unwrap()
            })
            .collect();
        assert_eq!(s.values, direct);
    }

    #[test]
    fn samplers_agree() {
        let n = 100_000;
        let d = ed(BaselineModel::unit_exponential(), &[1.5, 0.5]);
        let batches: Vec<Vec<f64>> = SamplerKind::ALL
            .iter()
            .enumerate()
            .map(|(i, &k)| sample(&d, k, &mut RandomSource::new(100 + i as u64), n).unwrap().sorted())
            .collect();
        for b in &batches {
            assert!(ks_one_sample(b, |x| d.cdf(x)) < ks_critical_one_sample(n, ALPHA));
        }
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(ks_two_sample(&batches[i], &batches[j]) < ks_critical_two_sample(n, n, ALPHA));
            }
        }
    }

    #[test]
    fn inverse_cdf_identity_and_determinism() {
        let b = BaselineModel::log_logistic(1.0, 3.0).unwrap();
        let d = ed(b, &[1.0]);
        let s = sample_inverse_cdf(&d, &mut RandomSource::new(8), 50).unwrap();
        let mut r = RandomSource::new(8);
        for x in &s.values {
            let want = b.quantile(r.uniform()).unwrap();
            assert!((x - want).abs() <= 1e-12 * want);
        }
        let d = ed(b, &[0.3, 2.0, 0.9]);
        let a = sample_inverse_cdf(&d, &mut RandomSource::new(8), 1000).unwrap();
        let c = sample_inverse_cdf(&d, &mut RandomSource::new(8), 1000).unwrap();
        assert_eq!(a, c);
        assert_eq!(a.seed, 8);
    }

    #[test]
    fn logistic_transform_is_standard_logistic() {
        let n = 100_000;
        let b = BaselineModel::standard_log_logistic();
        let logistic = |v: f64| 1.0 / (1.0 + (-v).exp());
        for (i, (a1, a2)) in [(1.5, 0.5), (0.5, 1.5)].into_iter().enumerate() {
            let d = ed(b, &[a1, a2]);
            let batch = sample_inverse_cdf(&d, &mut RandomSource::new(20 + i as u64), n).unwrap();
            let mut l = logistic_transform(&batch, a1, a2, &b, &mut RandomSource::with_stream(20, 1)).unwrap();
            l.sort_by(f64::total_cmp);
            assert!(ks_one_sample(&l, logistic) < ks_critical_one_sample(n, ALPHA), "({a1}, {a2})");
        }
    }

    #[test]
    fn logistic_transform_edge_cases() {
        let b = BaselineModel::standard_log_logistic();
        let batch = SampleBatch {
            values: vec![0.0, f64::INFINITY],
            sampler: SamplerKind::InverseCdf,
            n_proposed: 2,
            seed: 0,
        };
        let mut r1 = RandomSource::new(2);
        let l = logistic_transform(&batch, 1.5, 0.5, &b, &mut r1).unwrap();
        // Y = 0 at the boundary, leaving V − ln(2/(a1+a2)) = V
        let mut r2 = RandomSource::new(2);
        assert_eq!(l[0], r2.exponential(2.0));
        assert!(logistic_transform(&batch, 1.0, 1.0, &b, &mut r1).is_err());
    }
}
