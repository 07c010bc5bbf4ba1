//! The `verify` battery: named checks over the core library, run on worker
//! threads and reported as a tab-separated table.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use moq_core::moments::{
    moment, moment_bound_check, moment_exponential_with, moment_loglogistic_with, moment_q2_loglogistic_closed,
    BoundEstimator, MomentMethod, MomentQuery,
};
use moq_core::oracle::{ks_critical_one_sample, ks_one_sample, ks_two_sample};
use moq_core::param_family::{c_coefficients, d_coefficients, g_compose_check, DEFAULT_MAX_TERMS};
use moq_core::sampling::{
    envelope_constant, logistic_transform, sample, sample_accept_reject_with_envelope, sample_inverse_cdf,
    RandomSource, SamplerKind,
};
use moq_core::{BaselineModel, ExtendedDistribution, ParameterVector};

use crate::commands::{curve, Quantity};

/// Significance level of the logistic-convolution test.
pub const KS_ALPHA: f64 = 0.001;
/// Sampler checks reject when `√n · D ≥ KS_COEFFICIENT`.
pub const KS_COEFFICIENT: f64 = 1.95;
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    MoReduction,
    GProperties,
    SeriesFidelity,
    MomentCrossval,
    ClosedForm,
    SamplerKs,
    LogisticConvolution,
    ExpectationBound,
    HazardShape,
    Composition,
    Envelope,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::MoReduction,
        Check::GProperties,
        Check::SeriesFidelity,
        Check::MomentCrossval,
        Check::ClosedForm,
        Check::SamplerKs,
        Check::LogisticConvolution,
        Check::ExpectationBound,
        Check::HazardShape,
        Check::Composition,
        Check::Envelope,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::MoReduction => "mo-reduction",
            Check::GProperties => "g-properties",
            Check::SeriesFidelity => "series-fidelity",
            Check::MomentCrossval => "moment-crossval",
            Check::ClosedForm => "closed-form",
            Check::SamplerKs => "sampler-ks",
            Check::LogisticConvolution => "logistic-convolution",
            Check::ExpectationBound => "expectation-bound",
            Check::HazardShape => "hazard-shape",
            Check::Composition => "composition",
            Check::Envelope => "envelope",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
            format!("unknown check '{s}' (expected one of: {})", names.join(", "))
        })
    }
}

/// Deliberate corruption used to confirm that checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Use `M/2` as the accept-reject envelope.
    HalveEnvelope,
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "halve-envelope" => Ok(Fault::HalveEnvelope),
            _ => Err(format!("unknown fault '{s}' (expected halve-envelope)")),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Target {
    /// The built-in battery of parameter vectors and baselines.
    Battery,
    /// A single distribution from a spec file.
    Distribution(ExtendedDistribution),
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    /// Sample size of each Kolmogorov–Smirnov test.
    pub budget: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            budget: DEFAULT_BUDGET,
            seed: 0,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub check: Check,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

struct Verdict {
    status: Status,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Result<Verdict, String> {
    Ok(Verdict {
        status: Status::Pass,
        detail: detail.into(),
    })
}

fn skip(detail: impl Into<String>) -> Result<Verdict, String> {
    Ok(Verdict {
        status: Status::Skip,
        detail: detail.into(),
    })
}

fn fail(detail: impl Into<String>) -> Result<Verdict, String> {
    Err(detail.into())
}

fn judge(ok: bool, detail: String) -> Result<Verdict, String> {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn err_str(e: moq_core::Error) -> String {
    e.to_string()
}

/// Runs `checks` concurrently and returns their reports in order.
pub fn run(checks: &[Check], target: &Target, settings: &Settings) -> Vec<Report> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = checks
            .iter()
            .map(|&check| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let verdict = run_one(check, target, settings).unwrap_or_else(|detail| Verdict {
                        status: Status::Fail,
                        detail,
                    });
                    Report {
                        check,
                        status: verdict.status,
                        detail: verdict.detail,
                        seconds: start.elapsed().as_secs_f64(),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(checks)
            .map(|(h, &check)| {
                h.join().unwrap_or_else(|_| Report {
                    check,
                    status: Status::Fail,
                    detail: "check panicked".into(),
                    seconds: 0.0,
                })
            })
            .collect()
    })
}

pub fn all_passed(reports: &[Report]) -> bool {
    reports.iter().all(|r| r.status != Status::Fail)
}

pub fn table(reports: &[Report]) -> String {
    let mut out = String::from("check\tstatus\tseconds\tdetail\n");
    for r in reports {
        out.push_str(&format!("{}\t{}\t{:.2}\t{}\n", r.check, r.status, r.seconds, r.detail));
    }
    out
}

fn run_one(check: Check, target: &Target, s: &Settings) -> Result<Verdict, String> {
    // each check draws from its own stream of the seed
    let stream = Check::ALL.iter().position(|&c| c == check).unwrap() as u64;
    let mut rng = RandomSource::with_stream(s.seed, 1000 + stream);
    match target {
        Target::Battery => match check {
            Check::MoReduction => mo_reduction(&battery_uniform()),
            Check::GProperties => {
                let pvs = regime_pvs(&mut rng, 1000);
                g_properties(&pvs, 64, &mut rng)
            }
            Check::SeriesFidelity => {
                let c: Vec<_> = (0..20).map(|_| pv_with_sum(&mut rng, 0.55, 8.0)).collect();
                let d: Vec<_> = (0..20).map(|_| pv_with_sum(&mut rng, 0.15, 1.85)).collect();
                let cor: Vec<_> = (0..20).map(|_| corollary_pv(&mut rng)).collect();
                series_fidelity(&c, &d, &cor)
            }
            Check::MomentCrossval => moment_crossval_battery(),
            Check::ClosedForm => closed_form_battery(),
            Check::SamplerKs => {
                let cases = [
                    ed(BaselineModel::unit_exponential(), &[1.5, 0.5]),
                    ed(BaselineModel::weibull(2.0, 2.0).unwrap(), &[2.0, 0.8, 0.7]),
                    ed(BaselineModel::log_logistic(1.0, 3.0).unwrap(), &[1.2]),
                ];
                sampler_ks(&cases, &SamplerKind::ALL, s)
            }
            Check::LogisticConvolution => {
                let b = BaselineModel::standard_log_logistic();
                logistic_convolution(&[ed(b, &[1.5, 0.5]), ed(b, &[0.5, 1.5])], s)
            }
            Check::ExpectationBound => expectation_bound_battery(&mut rng),
            Check::HazardShape => hazard_shape(),
            Check::Composition => {
                let cases: Vec<_> = (0..1000)
                    .map(|_| {
                        let q = 1 + (rng.uniform() * 5.0) as usize;
                        let a = (0..q).map(|_| log_uniform(&mut rng, 0.03, 30.0)).collect();
                        (ParameterVector::new(a).unwrap(), log_uniform(&mut rng, 0.1, 10.0), rng.uniform())
                    })
                    .collect();
                composition(&cases)
            }
            Check::Envelope => {
                let pvs = regime_pvs(&mut rng, 1000);
                envelope(&pvs, 10_000, s.fault)
            }
        },
        Target::Distribution(d) => {
            let pv = d.params();
            match check {
                Check::MoReduction => {
                    if pv.is_uniform() {
                        mo_reduction(std::slice::from_ref(pv))
                    } else {
                        skip("parameters are not all equal")
                    }
                }
                Check::GProperties => g_properties(std::slice::from_ref(pv), 10_000, &mut rng),
                Check::SeriesFidelity => {
                    let c = if pv.dev1_ok() { vec![pv.clone()] } else { vec![] };
                    let dd = if pv.dev2_ok() { vec![pv.clone()] } else { vec![] };
                    let cor = if pv.corollary_ok() { vec![pv.clone()] } else { vec![] };
                    if c.is_empty() && dd.is_empty() {
                        return skip("neither expansion converges for these parameters");
                    }
                    series_fidelity(&c, &dd, &cor)
                }
                Check::MomentCrossval => moment_crossval_spec(d),
                Check::ClosedForm => closed_form_spec(d),
                Check::SamplerKs => {
                    let mut kinds = vec![SamplerKind::InverseCdf];
                    if pv.corollary_ok() {
                        kinds.push(SamplerKind::RandomMaxima);
                    }
                    if envelope_constant(pv) <= 50.0 {
                        kinds.push(SamplerKind::AcceptReject);
                    }
                    sampler_ks(std::slice::from_ref(d), &kinds, s)
                }
                Check::LogisticConvolution => {
                    if pv.q() == 2 && pv.a()[0] != pv.a()[1] {
                        logistic_convolution(std::slice::from_ref(d), s)
                    } else {
                        skip("needs q = 2 with a1 ≠ a2")
                    }
                }
                Check::ExpectationBound => {
                    if !pv.corollary_ok() {
                        return skip("corollary conditions fail");
                    }
                    let r = match d.baseline() {
                        BaselineModel::LogLogistic { shape, .. } => 0.5 * shape,
                        _ => 1.0,
                    };
                    expectation_bound(&[(pv.clone(), *d.baseline(), r)])
                }
                Check::HazardShape => skip("runs on the built-in battery only"),
                Check::Composition => {
                    let cases: Vec<_> = (0..1000)
                        .map(|_| (pv.clone(), log_uniform(&mut rng, 0.1, 10.0), rng.uniform()))
                        .collect();
                    composition(&cases)
                }
                Check::Envelope => envelope(std::slice::from_ref(pv), 10_000, s.fault),
            }
        }
    }
}

fn ed(b: BaselineModel, a: &[f64]) -> ExtendedDistribution {
    ExtendedDistribution::new(b, ParameterVector::new(a.to_vec()).unwrap())
}

fn log_uniform(rng: &mut RandomSource, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.uniform() * (hi / lo).ln()).exp()
}

/// `q ∈ 1..=5`, each `a_i` log-uniform on `[1e-3, 30]`.
fn random_pv(rng: &mut RandomSource) -> ParameterVector {
    let q = 1 + (rng.uniform() * 5.0) as usize;
    ParameterVector::new((0..q).map(|_| log_uniform(rng, 1e-3, 30.0)).collect()).unwrap()
}

/// Cycles through the corollary regime, `Σa/q < 1/2` (d-series only),
/// `1/2 < Σa/q < 2` (both series) and `Σa/q > 2` (c-series only).
fn regime_pvs(rng: &mut RandomSource, count: usize) -> Vec<ParameterVector> {
    (0..count)
        .map(|i| match i % 4 {
            0 => corollary_pv(rng),
            1 => pv_with_sum(rng, 0.01, 0.49),
            2 => pv_with_sum(rng, 0.51, 1.99),
            _ => pv_with_sum(rng, 2.01, 50.0),
        })
        .collect()
}

/// Random shape, rescaled so that `Σa/q` is uniform on `[lo, hi]`.
fn pv_with_sum(rng: &mut RandomSource, lo: f64, hi: f64) -> ParameterVector {
    let raw = random_pv(rng);
    let target = raw.q() as f64 * (lo + (hi - lo) * rng.uniform());
    raw.scaled(target / raw.sum()).unwrap()
}

/// `a_i ≤ 1` for `i ≥ 2` and `Σa ≥ q`.
fn corollary_pv(rng: &mut RandomSource) -> ParameterVector {
    let q = 1 + (rng.uniform() * 4.0) as usize;
    let rest: Vec<f64> = (1..q).map(|_| 0.05 + 0.95 * rng.uniform()).collect();
    let a1 = (q as f64 - rest.iter().sum::<f64>()) + 0.05 + 1.5 * rng.uniform();
    let mut a = vec![a1];
    a.extend(rest);
    ParameterVector::new(a).unwrap()
}

fn battery_uniform() -> Vec<ParameterVector> {
    let mut v = Vec::new();
    for q in 1..=5 {
        for a in [0.1, 0.5, 1.0, 2.0, 10.0] {
            v.push(ParameterVector::uniform(q, a).unwrap());
        }
    }
    v
}

fn mo_reduction(pvs: &[ParameterVector]) -> Result<Verdict, String> {
    let mut worst: f64 = 0.0;
    for pv in pvs {
        let a = pv.a1();
        for i in 0..=100 {
            let u = i as f64 / 100.0;
            let mo = u / (a + (1.0 - a) * u);
            worst = worst.max((pv.g(u).map_err(err_str)? - mo).abs());
        }
    }
    judge(
        worst <= 1e-12,
        format!("max |g − u/(a+(1−a)u)| = {worst:.2e} over {} vectors × 101 points", pvs.len()),
    )
}

fn g_properties(pvs: &[ParameterVector], points: usize, rng: &mut RandomSource) -> Result<Verdict, String> {
    for pv in pvs {
        let g0 = pv.g(0.0).map_err(err_str)?;
        let g1 = pv.g(1.0).map_err(err_str)?;
        if g0 != 0.0 || (g1 - 1.0).abs() > 1e-14 {
            return fail(format!("{:?}: g(0) = {g0}, g(1) = {g1}", pv.a()));
        }
        let d1 = pv.g_prime(1.0).map_err(err_str)?;
        if (d1 - pv.a1()).abs() > 1e-12 * pv.a1() {
            return fail(format!("{:?}: g'(1) = {d1} ≠ a1", pv.a()));
        }
        let mut us: Vec<f64> = (0..points).map(|_| rng.uniform()).collect();
        us.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for &u in &us {
            let g = pv.g(u).map_err(err_str)?;
            if g < prev {
                return fail(format!("{:?}: g decreases at u = {u}", pv.a()));
            }
            if !(pv.g_prime(u).map_err(err_str)? >= 0.0) {
                return fail(format!("{:?}: g'({u}) < 0", pv.a()));
            }
            prev = g;
        }
    }
    pass(format!("{} vectors × {points} sorted points", pvs.len()))
}

fn series_fidelity(c: &[ParameterVector], d: &[ParameterVector], corollary: &[ParameterVector]) -> Result<Verdict, String> {
    let mut worst_ratio: f64 = 0.0;
    for (pvs, kind) in [(c, "c"), (d, "d")] {
        for pv in pvs {
            let series = if kind == "c" {
                c_coefficients(pv, 1e-13, DEFAULT_MAX_TERMS)
            } else {
                d_coefficients(pv, 1e-13, DEFAULT_MAX_TERMS)
            }
            .map_err(err_str)?;
            for i in 0..=10 {
                let u = i as f64 / 10.0;
                let err = (series.evaluate(u) - pv.g(u).map_err(err_str)?).abs();
                if err > series.tail_estimate() {
                    return fail(format!(
                        "{kind}-series {:?} at u = {u}: error {err:.2e} > tail estimate {:.2e}",
                        pv.a(),
                        series.tail_estimate()
                    ));
                }
                worst_ratio = worst_ratio.max(err / series.tail_estimate());
            }
        }
    }
    for pv in corollary {
        let series = c_coefficients(pv, 1e-13, DEFAULT_MAX_TERMS).map_err(err_str)?;
        if let Some(m) = series.values().iter().position(|&v| v < 0.0) {
            return fail(format!("{:?}: c_{} < 0", pv.a(), m + 1));
        }
        let total: f64 = series.values().iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return fail(format!("{:?}: Σc = {total}", pv.a()));
        }
    }
    pass(format!(
        "{} c-series, {} d-series, {} pmf checks; max error/tail = {worst_ratio:.2e}",
        c.len(),
        d.len(),
        corollary.len()
    ))
}

struct Agreement {
    compared: usize,
    worst: f64,
}

impl Agreement {
    fn new() -> Self {
        Agreement { compared: 0, worst: 0.0 }
    }

    /// `|value − reference| ≤ max(1e-6·|reference|, error_estimate)`.
    fn compare(&mut self, label: &str, value: f64, error_estimate: f64, reference: f64) -> Result<(), String> {
        let err = (value - reference).abs();
        let allowed = (1e-6 * reference.abs()).max(error_estimate);
        self.compared += 1;
        self.worst = self.worst.max(err / reference.abs());
        if err > allowed {
            return Err(format!("{label}: {value} vs quadrature {reference} (allowed {allowed:.1e})"));
        }
        Ok(())
    }
}

fn moment_crossval_battery() -> Result<Verdict, String> {
    let mut agree = Agreement::new();
    let exp_pvs: [&[f64]; 3] = [&[1.2], &[2.0, 0.8, 0.7], &[1.6, 1.0, 0.6, 0.9]];
    let ll_pvs: [&[f64]; 2] = [&[1.3], &[1.6, 0.9, 0.8]];
    let mut cases = 0;
    for a in exp_pvs {
        let pv = ParameterVector::new(a.to_vec()).unwrap();
        for r in [0.25, 0.5, 1.0, 2.0] {
            cases += 1;
            let q = moment_exponential_with(&pv, r, MomentMethod::Quadrature, 1e-12).map_err(err_str)?;
            for m in [MomentMethod::SeriesC, MomentMethod::SeriesD] {
                let s = moment_exponential_with(&pv, r, m, 1e-10).map_err(err_str)?;
                agree.compare(&format!("exponential {a:?} r={r} {m}"), s.value, s.error_estimate, q.value)?;
            }
        }
    }
    for a in ll_pvs {
        let pv = ParameterVector::new(a.to_vec()).unwrap();
        for r in [-0.5, 0.25, 0.5, 0.9] {
            cases += 1;
            let q = moment_loglogistic_with(&pv, r, MomentMethod::Quadrature, 1e-12).map_err(err_str)?;
            for m in [MomentMethod::SeriesC, MomentMethod::SeriesD] {
                let s = moment_loglogistic_with(&pv, r, m, 1e-10).map_err(err_str)?;
                agree.compare(&format!("log-logistic {a:?} r={r} {m}"), s.value, s.error_estimate, q.value)?;
            }
        }
    }
    pass(format!(
        "{cases} cases, {} series values; max relative deviation {:.2e}",
        agree.compared, agree.worst
    ))
}

fn moment_crossval_spec(d: &ExtendedDistribution) -> Result<Verdict, String> {
    let pv = d.params();
    if !pv.corollary_ok() {
        return skip("series moments need the corollary conditions");
    }
    let orders: Vec<f64> = match *d.baseline() {
        BaselineModel::Exponential { .. } | BaselineModel::Weibull { .. } => vec![0.25, 0.5, 1.0, 2.0],
        BaselineModel::LogLogistic { shape, .. } => [-0.5, 0.25, 0.5, 0.9].iter().map(|r| r * shape).collect(),
        BaselineModel::GeneralizedWeibull { .. } => return skip("no series moments for this baseline"),
    };
    let mut agree = Agreement::new();
    for r in orders {
        let q = moment(d, &MomentQuery::new(r, MomentMethod::Quadrature, 1e-12)).map_err(err_str)?;
        let mut methods = vec![MomentMethod::SeriesC];
        if pv.dev2_ok() {
            methods.push(MomentMethod::SeriesD);
        }
        for m in methods {
            let s = moment(d, &MomentQuery::new(r, m, 1e-10)).map_err(err_str)?;
            agree.compare(&format!("r={r} {m}"), s.value, s.error_estimate, q.value)?;
        }
    }
    pass(format!("{} series values; max relative deviation {:.2e}", agree.compared, agree.worst))
}

fn closed_form_battery() -> Result<Verdict, String> {
    let v = moment_q2_loglogistic_closed(1.0, 1.0, 1.0, 1.0, 0.5).map_err(err_str)?;
    if (v - PI / 2.0).abs() > 1e-10 {
        return fail(format!("(1, 1): {v} ≠ π/2"));
    }
    let pv = ParameterVector::new(vec![1.5, 0.5]).unwrap();
    let closed = moment_loglogistic_with(&pv, 0.5, MomentMethod::ClosedForm, 1e-12).map_err(err_str)?.value;
    let series = moment_loglogistic_with(&pv, 0.5, MomentMethod::SeriesC, 1e-12).map_err(err_str)?.value;
    let quad = moment_loglogistic_with(&pv, 0.5, MomentMethod::Quadrature, 1e-12).map_err(err_str)?.value;
    for (x, y, what) in [(closed, series, "closed/series"), (closed, quad, "closed/quadrature"), (series, quad, "series/quadrature")] {
        if (x - y).abs() > 1e-6 * y.abs() {
            return fail(format!("(1.5, 0.5) {what}: {x} vs {y}"));
        }
    }
    let pv = ParameterVector::new(vec![0.5, 1.5]).unwrap();
    let closed_rev = moment_q2_loglogistic_closed(0.5, 1.5, 1.0, 1.0, 0.5).map_err(err_str)?;
    let quad_rev = moment_loglogistic_with(&pv, 0.5, MomentMethod::Quadrature, 1e-12).map_err(err_str)?.value;
    judge(
        (closed_rev - quad_rev).abs() <= 1e-6 * quad_rev,
        format!("(1,1) = π/2; (1.5,0.5) = {closed:.10}; (0.5,1.5) closed {closed_rev:.10} vs quadrature {quad_rev:.10}"),
    )
}

fn closed_form_spec(d: &ExtendedDistribution) -> Result<Verdict, String> {
    let pv = d.params();
    let BaselineModel::LogLogistic { shape, .. } = *d.baseline() else {
        return skip("closed form needs a log-logistic baseline");
    };
    if !(pv.q() == 2 || pv.is_uniform()) {
        return skip("closed form needs q = 2 or equal parameters");
    }
    let r = 0.5 * shape;
    let c = moment(d, &MomentQuery::new(r, MomentMethod::ClosedForm, 1e-12)).map_err(err_str)?.value;
    let q = moment(d, &MomentQuery::new(r, MomentMethod::Quadrature, 1e-12)).map_err(err_str)?.value;
    judge((c - q).abs() <= 1e-6 * q, format!("r = {r}: closed {c:.10} vs quadrature {q:.10}"))
}

fn sampler_ks(cases: &[ExtendedDistribution], kinds: &[SamplerKind], s: &Settings) -> Result<Verdict, String> {
    let n = s.budget;
    let crit1 = KS_COEFFICIENT / (n as f64).sqrt();
    let crit2 = KS_COEFFICIENT * (2.0 / n as f64).sqrt();
    let mut worst1: f64 = 0.0;
    let mut worst2: f64 = 0.0;
    for (ci, d) in cases.iter().enumerate() {
        let mut batches = Vec::new();
        for (ki, &kind) in kinds.iter().enumerate() {
            let mut rng = RandomSource::new(s.seed.wrapping_add((10 * ci + ki) as u64));
            let label = format!("{} {:?} {kind}", d.baseline().name(), d.params().a());
            let batch = match (kind, s.fault) {
                (SamplerKind::AcceptReject, Some(Fault::HalveEnvelope)) => {
                    let m = envelope_constant(d.params()) / 2.0;
                    sample_accept_reject_with_envelope(d, &mut rng, n, m)
                }
                _ => sample(d, kind, &mut rng, n),
            }
            .map_err(|e| format!("{label}: {e}"))?;
            if kind == SamplerKind::AcceptReject {
                let p = 1.0 / envelope_constant(d.params());
                let se = (p * (1.0 - p) / batch.n_proposed as f64).sqrt();
                let rate = batch.acceptance_rate();
                if (rate - p).abs() > 3.0 * se {
                    return fail(format!("{label}: acceptance rate {rate:.5} vs 1/M = {p:.5}"));
                }
            }
            let sorted = batch.sorted();
            let stat = ks_one_sample(&sorted, |x| d.cdf(x));
            if stat >= crit1 {
                return fail(format!("{label}: KS {stat:.5} ≥ {crit1:.5}"));
            }
            worst1 = worst1.max(stat);
            batches.push((kind, sorted));
        }
        for i in 0..batches.len() {
            for j in i + 1..batches.len() {
                let stat = ks_two_sample(&batches[i].1, &batches[j].1);
                if stat >= crit2 {
                    return fail(format!(
                        "{:?}: two-sample KS {} vs {} = {stat:.5} ≥ {crit2:.5}",
                        d.params().a(),
                        batches[i].0,
                        batches[j].0
                    ));
                }
                worst2 = worst2.max(stat);
            }
        }
    }
    let mut detail = format!(
        "{} cases × {} samplers, n = {n}: max KS {worst1:.5} (< {crit1:.5})",
        cases.len(),
        kinds.len()
    );
    if kinds.len() > 1 {
        detail.push_str(&format!(", max two-sample {worst2:.5} (< {crit2:.5})"));
    }
    pass(detail)
}

fn logistic_convolution(cases: &[ExtendedDistribution], s: &Settings) -> Result<Verdict, String> {
    let n = s.budget;
    let crit = ks_critical_one_sample(n, KS_ALPHA);
    let mut stats = Vec::new();
    for (i, d) in cases.iter().enumerate() {
        let (a1, a2) = (d.params().a()[0], d.params().a()[1]);
        let batch = sample_inverse_cdf(d, &mut RandomSource::with_stream(s.seed, 2 * i as u64), n).map_err(err_str)?;
        let mut l = logistic_transform(&batch, a1, a2, d.baseline(), &mut RandomSource::with_stream(s.seed, 2 * i as u64 + 1))
            .map_err(err_str)?;
        l.sort_by(f64::total_cmp);
        let stat = ks_one_sample(&l, |v| 1.0 / (1.0 + (-v).exp()));
        if stat >= crit {
            return fail(format!("({a1}, {a2}): KS {stat:.5} ≥ {crit:.5}"));
        }
        stats.push(format!("({a1}, {a2}) KS {stat:.5}"));
    }
    pass(format!("{} (< {crit:.5}, n = {n})", stats.join(", ")))
}

fn expectation_bound_battery(rng: &mut RandomSource) -> Result<Verdict, String> {
    let baselines = [
        (BaselineModel::unit_exponential(), 1.0),
        (BaselineModel::weibull(2.0, 2.0).unwrap(), 2.0),
        (BaselineModel::weibull(1.0, 0.7).unwrap(), 0.5),
        (BaselineModel::log_logistic(1.0, 3.0).unwrap(), 1.0),
        (BaselineModel::generalized_weibull(1.0, 0.5, 2.0).unwrap(), 1.0),
    ];
    let cases: Vec<_> = (0..10)
        .map(|i| {
            let (b, r) = baselines[i % baselines.len()];
            (corollary_pv(rng), b, r)
        })
        .collect();
    expectation_bound(&cases)
}

fn expectation_bound(cases: &[(ParameterVector, BaselineModel, f64)]) -> Result<Verdict, String> {
    let mut min_gap = f64::INFINITY;
    for (pv, b, r) in cases {
        let c = moment_bound_check(pv, b, *r, BoundEstimator::Quadrature { tol: 1e-11 }).map_err(err_str)?;
        if c.extended > c.bound + 1e-9 {
            return fail(format!(
                "{} {:?} r={r}: E|X|^r = {} > a1·E|X0|^r = {}",
                b.name(),
                pv.a(),
                c.extended,
                c.bound
            ));
        }
        min_gap = min_gap.min(c.bound - c.extended);
    }
    pass(format!("{} cases; smallest margin {min_gap:.3e}", cases.len()))
}

/// Interior local extrema of a sampled curve: sign changes of consecutive
/// differences.
pub fn count_extrema(values: &[f64]) -> usize {
    let signs: Vec<f64> = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d != 0.0)
        .map(f64::signum)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Second column of a `x,value` CSV.
pub fn csv_values(text: &str) -> Result<Vec<f64>, String> {
    text.lines()
        .skip(1)
        .map(|l| {
            l.split_once(',')
                .and_then(|(_, v)| v.parse().ok())
                .ok_or_else(|| format!("malformed row '{l}'"))
        })
        .collect()
}

fn hazard_csv(a: &[f64]) -> Result<String, String> {
    let d = ed(BaselineModel::weibull(2.0, 2.0).unwrap(), a);
    let mut buf = Vec::new();
    curve(&d, Quantity::Hazard, 0.01, 6.0, 0.01, &mut buf).map_err(|e| e.to_string())?;
    String::from_utf8(buf).map_err(|e| e.to_string())
}

fn hazard_shape() -> Result<Verdict, String> {
    let base = hazard_csv(&[1.0])?;
    let ext = hazard_csv(&[1e-6, 0.15])?;
    if base != hazard_csv(&[1.0])? || ext != hazard_csv(&[1e-6, 0.15])? {
        return fail("hazard CSV differs between runs");
    }
    let n_base = count_extrema(&csv_values(&base)?);
    let n_ext = count_extrema(&csv_values(&ext)?);
    judge(
        n_base == 0 && n_ext >= 2,
        format!("Weibull(2,2): {n_base} interior extrema; a = (1e-6, 0.15): {n_ext}"),
    )
}

fn composition(cases: &[(ParameterVector, f64, f64)]) -> Result<Verdict, String> {
    let mut worst: f64 = 0.0;
    for (pv, b, u) in cases {
        let (lhs, rhs) = g_compose_check(pv, *b, *u).map_err(err_str)?;
        let err = (lhs - rhs).abs();
        if err > 1e-12 {
            return fail(format!("{:?}, b = {b}, u = {u}: {lhs} vs {rhs}", pv.a()));
        }
        worst = worst.max(err);
    }
    pass(format!("{} triples; max deviation {worst:.2e}", cases.len()))
}

fn envelope(pvs: &[ParameterVector], grid: usize, fault: Option<Fault>) -> Result<Verdict, String> {
    let mut violations = 0;
    let mut first = None;
    for pv in pvs {
        let mut m = envelope_constant(pv);
        if fault == Some(Fault::HalveEnvelope) {
            m /= 2.0;
        }
        for i in 0..=grid {
            let u = i as f64 / grid as f64;
            let d = pv.g_prime(u).map_err(err_str)?;
            if d > m {
                violations += 1;
                first.get_or_insert(format!("{:?}: g'({u}) = {d} > M = {m}", pv.a()));
                break;
            }
        }
    }
    match first {
        Some(example) => fail(format!("{violations} of {} vectors violate the envelope; e.g. {example}", pvs.len())),
        None => pass(format!("{} vectors × {} grid points, 0 violations", pvs.len(), grid + 1)),
    }
}
