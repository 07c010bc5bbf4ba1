//! Moments `E(X^r)` of the extended family: power-series formulas over the
//! c- and d-coefficients, the two-parameter log-logistic closed form,
//! scaling relations for Weibull-type baselines, and quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::baselines::BaselineModel;
use crate::error::{Condition, Error, Result};
use crate::extended::ExtendedDistribution;
use crate::oracle::{gamma, integrate_semiinfinite_with, monte_carlo_mean, Tolerance};
use crate::param_family::{CoefficientStream, ParameterVector, SeriesKind, DEFAULT_MAX_TERMS};
use crate::sampling::{sample_inverse_cdf, RandomSource};

/// Series whose estimated condition number exceeds this are abandoned.
pub const MAX_CONDITION: f64 = 1e12;

pub const DEFAULT_TOL: f64 = 1e-10;

// how often the (comparatively costly) tail bound is refreshed
const TAIL_CHECK_EVERY: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentMethod {
    SeriesC,
    SeriesD,
    ClosedForm,
    Scaling,
    Quadrature,
    Auto,
}

impl MomentMethod {
    pub const ALL: [MomentMethod; 6] = [
        MomentMethod::SeriesC,
        MomentMethod::SeriesD,
        MomentMethod::ClosedForm,
        MomentMethod::Scaling,
        MomentMethod::Quadrature,
        MomentMethod::Auto,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MomentMethod::SeriesC => "series-c",
            MomentMethod::SeriesD => "series-d",
            MomentMethod::ClosedForm => "closed-form",
            MomentMethod::Scaling => "scaling",
            MomentMethod::Quadrature => "quadrature",
            MomentMethod::Auto => "auto",
        }
    }
}

impl fmt::Display for MomentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MomentMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        MomentMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                format!("unknown method '{s}' (expected series-c, series-d, closed-form, scaling, quadrature or auto)")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentQuery {
    pub r: f64,
    pub method: MomentMethod,
    pub tol: f64,
}

impl MomentQuery {
    pub fn new(r: f64, method: MomentMethod, tol: f64) -> Self {
        MomentQuery { r, method, tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult {
    pub value: f64,
    pub method_used: MomentMethod,
    pub terms_used: usize,
    pub error_estimate: f64,
}

impl MomentResult {
    fn exact(value: f64, method_used: MomentMethod) -> Self {
        MomentResult {
            value,
            method_used,
            terms_used: 1,
            error_estimate: 0.0,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        MomentResult {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs() + 4.0 * f64::EPSILON * (self.value * factor).abs(),
            ..self
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain("tol", tol, "(0, ∞)"));
    }
    Ok(())
}

fn check_order(r: f64) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::domain("r", r, "finite reals"));
    }
    Ok(())
}

/// Neumaier-compensated running sum that also tracks `Σ|terms|`.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
    abs: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Weight multiplying the m-th coefficient: its value, the sum of the
/// magnitudes it was assembled from, and its relative rounding error in
/// units of ε.
struct Weight {
    value: f64,
    magnitude: f64,
    ulps: f64,
}

enum SeriesOutcome {
    Done { value: f64, terms: usize, error: f64 },
    IllConditioned,
}

/// Sums `Σ coef_m · w_m` until the tail bound `factor · Σ_{m>M} |coef_m| m^p`
/// plus accumulated rounding drops below `tol · |sum|`.
fn sum_series(
    pv: &ParameterVector,
    kind: SeriesKind,
    tol: f64,
    p: f64,
    factor: f64,
    mut weight: impl FnMut(usize) -> Weight,
) -> Result<SeriesOutcome> {
    let mut stream = CoefficientStream::new(pv, kind)?;
    let q = pv.q() as f64;
    let mut acc = Compensated::default();
    let mut magnitude = 0.0;
    let mut rounding = 0.0;
    let mut tail = f64::INFINITY;
    for m in 1..=DEFAULT_MAX_TERMS {
        let c = stream.next().expect("infinite stream");
        let c_err = 8.0 * (m as f64 + q + 4.0) * stream.last_magnitude();
        let w = weight(m);
        acc.add(c * w.value);
        magnitude += c.abs() * w.magnitude;
        rounding += c_err * w.value.abs() + (w.ulps + 4.0) * c.abs() * w.magnitude;

        let value = acc.value();
        let round_abs = f64::EPSILON * (rounding + 2.0 * acc.abs);
        if value != 0.0 && (magnitude / value.abs() > MAX_CONDITION || round_abs > tol * value.abs()) {
            return Ok(SeriesOutcome::IllConditioned);
        }
        if m % TAIL_CHECK_EVERY == 0 || m <= pv.q() + 1 {
            tail = factor * stream.tail_bound(p);
            if tail + round_abs <= tol * value.abs() {
                return Ok(SeriesOutcome::Done {
                    value,
                    terms: m,
                    error: tail + round_abs,
                });
            }
        }
    }
    Err(Error::Nonconvergence {
        what: "moment series",
        iterations: DEFAULT_MAX_TERMS,
        residual: tail,
    })
}

fn require_series(pv: &ParameterVector, kind: SeriesKind) -> Result<()> {
    pv.require(pv.corollary_ok(), "moment series", Condition::NonNegativeCoefficients)?;
    if kind == SeriesKind::D {
        pv.require(pv.dev2_ok(), "moment series around 1", Condition::ExpansionAtOne)?;
    }
    Ok(())
}

fn method_of(kind: SeriesKind) -> MomentMethod {
    match kind {
        SeriesKind::C => MomentMethod::SeriesC,
        SeriesKind::D => MomentMethod::SeriesD,
    }
}

/// `E(X^r)` over the unit exponential from one series branch; `None` when
/// the branch is numerically ill-conditioned at this tolerance.
fn exponential_series(pv: &ParameterVector, kind: SeriesKind, r: f64, tol: f64) -> Result<Option<MomentResult>> {
    require_series(pv, kind)?;
    if !(r > 0.0) {
        return Err(Error::domain("r", r, "(0, ∞) for the exponential series"));
    }
    let gamma_r1 = gamma(r + 1.0)?;
    let outcome = match kind {
        SeriesKind::C => {
            // m·I_m = Σ_{k=1..m} C(m,k)(−1)^{k−1} k^{−r}, the r-th moment of
            // the maximum of m unit exponentials divided by Γ(r+1), which
            // is at most max(1, Γ(r+1)) m^r / Γ(r+1)
            let factor = gamma_r1.max(1.0) / gamma_r1;
            sum_series(pv, kind, tol, r, factor, |m| {
                let mut s = Compensated::default();
                let mut binom = 1.0;
                for k in 1..=m {
                    binom *= (m - k + 1) as f64 / k as f64;
                    let t = binom * (k as f64).powf(-r);
                    s.add(if k % 2 == 1 { t } else { -t });
                }
                Weight {
                    value: s.value(),
                    magnitude: s.abs,
                    ulps: 2.0 * m as f64 + 4.0,
                }
            })?
        }
        SeriesKind::D => sum_series(pv, kind, tol, 0.0, 1.0, |m| {
            let w = (m as f64).powf(-r);
            Weight {
                value: if m % 2 == 1 { w } else { -w },
                magnitude: w,
                ulps: 4.0,
            }
        })?,
    };
    Ok(match outcome {
        SeriesOutcome::Done { value, terms, error } => Some(
            MomentResult {
                value,
                method_used: method_of(kind),
                terms_used: terms,
                error_estimate: error,
            }
            .scaled(gamma_r1),
        ),
        SeriesOutcome::IllConditioned => None,
    })
}

/// `E(X^r)` over the standard log-logistic from one series branch.
fn loglogistic_series(pv: &ParameterVector, kind: SeriesKind, r: f64, tol: f64) -> Result<Option<MomentResult>> {
    require_series(pv, kind)?;
    if !(r.abs() < 1.0) {
        return Err(Error::domain("r", r, "(−1, 1) for the log-logistic series"));
    }
    let g_minus = gamma(1.0 - r)?;
    let g_plus = gamma(1.0 + r)?;
    // Γ(m+s)/Γ(m) by the recurrence Γ(m+1+s)/Γ(m+1) = Γ(m+s)/Γ(m) · (m+s)/m
    let mut ratio = 1.0;
    let mut next_ratio = |m: usize, s: f64| {
        if m == 1 {
            ratio = gamma(1.0 + s).expect("|s| < 1");
        } else {
            ratio *= (m as f64 - 1.0 + s) / (m as f64 - 1.0);
        }
        ratio
    };
    let outcome = match kind {
        SeriesKind::C => {
            // m·B(m+r, 1−r) = Γ(1−r) Γ(m+r)/Γ(m)
            let (p, factor) = if r >= 0.0 { (r, g_minus) } else { (0.0, g_minus * g_plus) };
            sum_series(pv, kind, tol, p, factor, |m| {
                let w = g_minus * next_ratio(m, r);
                Weight {
                    value: w,
                    magnitude: w,
                    ulps: m as f64 + 8.0,
                }
            })?
        }
        SeriesKind::D => {
            // (−1)^{m−1} m·B(m−r, 1+r) = (−1)^{m−1} Γ(1+r) Γ(m−r)/Γ(m)
            let (p, factor) = if r < 0.0 { (-r, g_plus) } else { (0.0, g_plus * g_minus) };
            sum_series(pv, kind, tol, p, factor, |m| {
                let w = g_plus * next_ratio(m, -r);
                Weight {
                    value: if m % 2 == 1 { w } else { -w },
                    magnitude: w,
                    ulps: m as f64 + 8.0,
                }
            })?
        }
    };
    Ok(match outcome {
        SeriesOutcome::Done { value, terms, error } => Some(MomentResult {
            value,
            method_used: method_of(kind),
            terms_used: terms,
            error_estimate: error,
        }),
        SeriesOutcome::IllConditioned => None,
    })
}

/// `E(|X|^r)` by quadrature of `|x|^r f(x)`.
pub fn moment_quadrature(ed: &ExtendedDistribution, r: f64, tol: f64) -> Result<MomentResult> {
    check_order(r)?;
    check_tol(tol)?;
    if r == 0.0 {
        return Ok(MomentResult::exact(1.0, MomentMethod::Quadrature));
    }
    let (lo, _) = ed.baseline().support();
    let q = integrate_semiinfinite_with(
        |x| {
            let f = ed.pdf(x);
            if f == 0.0 {
                0.0
            } else {
                x.abs().powf(r) * f
            }
        },
        lo,
        Tolerance { abs: 0.0, rel: tol },
    )?;
    Ok(MomentResult {
        value: q.value,
        method_used: MomentMethod::Quadrature,
        terms_used: q.evaluations,
        error_estimate: q.error_estimate,
    })
}

/// Picks the valid series branch with the smaller geometric ratio and falls
/// back to the other branch, then to `fallback`, when a branch is
/// ill-conditioned.
fn auto_series(
    pv: &ParameterVector,
    series: impl Fn(SeriesKind) -> Result<Option<MomentResult>>,
    fallback: impl FnOnce() -> Result<MomentResult>,
) -> Result<MomentResult> {
    let mut branches = Vec::new();
    if pv.corollary_ok() {
        branches.push(SeriesKind::C);
        if pv.dev2_ok() {
            branches.push(SeriesKind::D);
        }
    }
    let ratio = |k: &SeriesKind| CoefficientStream::new(pv, *k).map(|s| s.ratio().abs()).unwrap_or(f64::INFINITY);
    branches.sort_by(|a, b| ratio(a).total_cmp(&ratio(b)));
    for kind in branches {
        if let Some(res) = series(kind)? {
            return Ok(res);
        }
    }
    fallback()
}

/// Requested branch, else the other branch, else `fallback`.
fn series_with_fallback(
    pv: &ParameterVector,
    kind: SeriesKind,
    series: impl Fn(SeriesKind) -> Result<Option<MomentResult>>,
    fallback: impl FnOnce() -> Result<MomentResult>,
) -> Result<MomentResult> {
    if let Some(res) = series(kind)? {
        return Ok(res);
    }
    if kind == SeriesKind::C && pv.dev2_ok() {
        if let Some(res) = series(SeriesKind::D)? {
            return Ok(res);
        }
    }
    fallback()
}

fn unit_exponential(pv: &ParameterVector) -> ExtendedDistribution {
    ExtendedDistribution::new(BaselineModel::unit_exponential(), pv.clone())
}

fn unit_log_logistic(pv: &ParameterVector) -> ExtendedDistribution {
    ExtendedDistribution::new(BaselineModel::standard_log_logistic(), pv.clone())
}

/// `E(X^r)` over the unit exponential baseline with the requested method
/// (`SeriesC`, `SeriesD`, `Quadrature` or `Auto`).
pub fn moment_exponential_with(pv: &ParameterVector, r: f64, method: MomentMethod, tol: f64) -> Result<MomentResult> {
    check_order(r)?;
    check_tol(tol)?;
    if r == 0.0 {
        return Ok(MomentResult::exact(1.0, method));
    }
    let quad = || moment_quadrature(&unit_exponential(pv), r, tol);
    let series = |k| exponential_series(pv, k, r, tol);
    match method {
        MomentMethod::SeriesC => series_with_fallback(pv, SeriesKind::C, series, quad),
        MomentMethod::SeriesD => series_with_fallback(pv, SeriesKind::D, series, quad),
        MomentMethod::Quadrature => quad(),
        MomentMethod::Auto | MomentMethod::Scaling => {
            if r > 0.0 {
                auto_series(pv, series, quad)
            } else {
                quad()
            }
        }
        MomentMethod::ClosedForm => Err(Error::condition("closed-form moment", Condition::TwoParameterLogLogistic)),
    }
}

/// `E(X^r)`, `r > 0`, over the unit exponential baseline.
pub fn moment_exponential(pv: &ParameterVector, r: f64, tol: f64) -> Result<MomentResult> {
    if !(r > 0.0) {
        return Err(Error::domain("r", r, "(0, ∞)"));
    }
    pv.require(pv.corollary_ok(), "moment series", Condition::NonNegativeCoefficients)?;
    moment_exponential_with(pv, r, MomentMethod::Auto, tol)
}

/// Applicable when `q = 2` or all `a_i` are equal (where it reduces to the
/// Marshall–Olkin case).
fn closed_form_applies(pv: &ParameterVector) -> bool {
    pv.q() == 2 || pv.is_uniform()
}

fn closed_form_pair(pv: &ParameterVector) -> (f64, f64) {
    if pv.q() == 2 {
        (pv.a()[0], pv.a()[1])
    } else {
        (pv.a1(), pv.a1())
    }
}

/// `E(X^r)` over the standard log-logistic baseline with the requested
/// method (`SeriesC`, `SeriesD`, `ClosedForm`, `Quadrature` or `Auto`).
pub fn moment_loglogistic_with(pv: &ParameterVector, r: f64, method: MomentMethod, tol: f64) -> Result<MomentResult> {
    check_order(r)?;
    check_tol(tol)?;
    if !(r.abs() < 1.0) {
        return Err(Error::domain("r", r, "(−1, 1)"));
    }
    if r == 0.0 {
        return Ok(MomentResult::exact(1.0, method));
    }
    let quad = || moment_quadrature(&unit_log_logistic(pv), r, tol);
    let series = |k| loglogistic_series(pv, k, r, tol);
    let closed = || -> Result<MomentResult> {
        let (a1, a2) = closed_form_pair(pv);
        let v = moment_q2_loglogistic_closed(a1, a2, 1.0, 1.0, r)?;
        Ok(MomentResult {
            value: v,
            method_used: MomentMethod::ClosedForm,
            terms_used: 1,
            error_estimate: 16.0 * f64::EPSILON * v.abs(),
        })
    };
    match method {
        MomentMethod::SeriesC => series_with_fallback(pv, SeriesKind::C, series, quad),
        MomentMethod::SeriesD => series_with_fallback(pv, SeriesKind::D, series, quad),
        MomentMethod::Quadrature => quad(),
        MomentMethod::ClosedForm => {
            pv.require(
                closed_form_applies(pv),
                "closed-form moment",
                Condition::TwoParameterLogLogistic,
            )?;
            closed()
        }
        MomentMethod::Auto | MomentMethod::Scaling => {
            if closed_form_applies(pv) {
                closed()
            } else {
                auto_series(pv, series, quad)
            }
        }
    }
}

/// `E(X^r)`, `|r| < 1`, over the standard log-logistic baseline by series.
pub fn moment_loglogistic(pv: &ParameterVector, r: f64, tol: f64) -> Result<MomentResult> {
    if !(r.abs() < 1.0) {
        return Err(Error::domain("r", r, "(−1, 1)"));
    }
    pv.require(pv.corollary_ok(), "moment series", Condition::NonNegativeCoefficients)?;
    if r == 0.0 {
        return Ok(MomentResult::exact(1.0, MomentMethod::SeriesC));
    }
    let quad = || moment_quadrature(&unit_log_logistic(pv), r, tol);
    auto_series(pv, |k| loglogistic_series(pv, k, r, tol), quad)
}

/// `b1^r ((a1+a2)/2)^{r/b2} (rπ/b2)/sin(rπ/b2) (r(a1−a2)/(b2(a1+a2)) + 1)`,
/// the r-th moment of the two-parameter extension of the log-logistic
/// baseline with scale `b1` and shape `b2`.
pub fn moment_q2_loglogistic_closed(a1: f64, a2: f64, b1: f64, b2: f64, r: f64) -> Result<f64> {
    for (name, v) in [("a1", a1), ("a2", a2), ("b1", b1), ("b2", b2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveParameter {
                name: name.to_string(),
                value: v,
            });
        }
    }
    if !(r.abs() < b2) {
        return Err(Error::domain("r", r, "|r| < b2"));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let s = a1 + a2;
    let t = r * PI / b2;
    // t / sin t, with its series near 0
    let sinc_inv = if t.abs() < 1e-4 { 1.0 + t * t / 6.0 } else { t / t.sin() };
    Ok(b1.powf(r) * (s / 2.0).powf(r / b2) * sinc_inv * (r * (a1 - a2) / (b2 * s) + 1.0))
}

/// `b1^r · E(X^{r/b2})` with the inner moment over the unit exponential
/// (`b2 = 1` is the exponential baseline with scale `b1`).
pub fn moment_weibull_scaled(pv: &ParameterVector, b1: f64, b2: f64, r: f64, tol: f64) -> Result<MomentResult> {
    for (name, v) in [("b1", b1), ("b2", b2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveParameter {
                name: name.to_string(),
                value: v,
            });
        }
    }
    if r == 0.0 {
        return Ok(MomentResult::exact(1.0, MomentMethod::Scaling));
    }
    let inner = moment_exponential(pv, r / b2, tol)?;
    Ok(MomentResult {
        method_used: MomentMethod::Scaling,
        ..inner.scaled(b1.powf(r))
    })
}

fn as_positive_integer(v: f64) -> Option<u64> {
    let n = v.round();
    if n >= 1.0 && (v - n).abs() <= 1e-12 * n && n < 1e6 {
        Some(n as u64)
    } else {
        None
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Integer moment `E(X^m)` over the generalized Weibull baseline with
/// `1/b2` and `b3` positive integers, by binomial expansion of
/// `X = b1((1+T)^{b3} − 1)^{1/b2}` in powers of the unit-exponential
/// extension `T`.
pub fn moment_generalized_weibull(
    pv: &ParameterVector,
    b1: f64,
    b2: f64,
    b3: f64,
    m: u32,
    tol: f64,
) -> Result<MomentResult> {
    check_tol(tol)?;
    for (name, v) in [("b1", b1), ("b2", b2), ("b3", b3)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveParameter {
                name: name.to_string(),
                value: v,
            });
        }
    }
    let m2 = as_positive_integer(1.0 / b2).ok_or(Error::domain("1/b2", 1.0 / b2, "positive integers"))?;
    let b3 = as_positive_integer(b3).ok_or(Error::domain("b3", b3, "positive integers"))?;
    if m == 0 {
        return Err(Error::domain("m", 0.0, "positive integers"));
    }
    pv.require(pv.corollary_ok(), "moment series", Condition::NonNegativeCoefficients)?;
    let n = m as u64 * m2;
    let top = b3 * n;
    // coefficient of T^j in ((1+T)^{b3} − 1)^n
    let mut coef = vec![0.0; top as usize + 1];
    for k in 0..=n {
        let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let outer = sign * binomial(n, k);
        for j in 0..=b3 * k {
            coef[j as usize] += outer * binomial(b3 * k, j);
        }
    }
    let inner_tol = tol / (top as f64 + 1.0);
    let mut value = Compensated::default();
    let mut error = 0.0;
    let mut terms = 0;
    for (j, &c) in coef.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let e = if j == 0 {
            MomentResult::exact(1.0, MomentMethod::Scaling)
        } else {
            moment_exponential(pv, j as f64, inner_tol)?
        };
        value.add(c * e.value);
        error += c.abs() * e.error_estimate;
        terms += e.terms_used;
    }
    let scale = b1.powi(m as i32);
    let v = value.value();
    let rounding = 8.0 * f64::EPSILON * value.abs;
    Ok(MomentResult {
        value: scale * v,
        method_used: MomentMethod::Scaling,
        terms_used: terms.max(1),
        error_estimate: scale * (error + rounding),
    })
}

/// `E(X^r)` for any baseline, dispatching on the baseline family and the
/// requested method.
pub fn moment(ed: &ExtendedDistribution, query: &MomentQuery) -> Result<MomentResult> {
    let MomentQuery { r, method, tol } = *query;
    check_order(r)?;
    check_tol(tol)?;
    let pv = ed.params();
    if method == MomentMethod::Quadrature {
        return moment_quadrature(ed, r, tol);
    }
    match *ed.baseline() {
        BaselineModel::Exponential { scale } if method == MomentMethod::Scaling => {
            moment_weibull_scaled(pv, scale, 1.0, r, tol)
        }
        BaselineModel::Weibull { scale, shape } if method == MomentMethod::Scaling => {
            moment_weibull_scaled(pv, scale, shape, r, tol)
        }
        BaselineModel::Exponential { scale } => Ok(moment_exponential_with(pv, r, method, tol)?.scaled(scale.powf(r))),
        BaselineModel::Weibull { scale, shape } => {
            Ok(moment_exponential_with(pv, r / shape, method, tol)?.scaled(scale.powf(r)))
        }
        BaselineModel::LogLogistic { scale, shape } => {
            if !(r.abs() < shape) {
                return Err(Error::condition("log-logistic moment", Condition::LogLogisticOrder));
            }
            Ok(moment_loglogistic_with(pv, r / shape, method, tol)?.scaled(scale.powf(r)))
        }
        BaselineModel::GeneralizedWeibull { scale, shape, power } => {
            let integral = as_positive_integer(r).is_some()
                && as_positive_integer(1.0 / shape).is_some()
                && as_positive_integer(power).is_some();
            match method {
                MomentMethod::Scaling => {
                    pv.require(integral, "generalized Weibull moment", Condition::IntegerGeneralizedWeibull)?;
                    moment_generalized_weibull(pv, scale, shape, power, r.round() as u32, tol)
                }
                MomentMethod::Auto => {
                    if integral && pv.corollary_ok() {
                        moment_generalized_weibull(pv, scale, shape, power, r.round() as u32, tol)
                    } else {
                        moment_quadrature(ed, r, tol)
                    }
                }
                _ => Err(Error::condition("series moment", Condition::Baseline)),
            }
        }
    }
}

/// How the left side of the moment bound is estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundEstimator {
    Quadrature { tol: f64 },
    MonteCarlo { n: usize, seed: u64 },
}

/// Both sides of `E|X|^r ≤ a1 · E|X0|^r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub extended: f64,
    pub bound: f64,
    /// Quadrature error estimate, or the Monte-Carlo standard error.
    pub extended_error: f64,
}

impl BoundCheck {
    pub fn as_pair(&self) -> (f64, f64) {
        (self.extended, self.bound)
    }
}

/// The extended r-th absolute moment next to `a1` times the baseline one.
/// The baseline side always uses quadrature.
pub fn moment_bound_check(
    pv: &ParameterVector,
    baseline: &BaselineModel,
    r: f64,
    estimator: BoundEstimator,
) -> Result<BoundCheck> {
    pv.require(pv.corollary_ok(), "moment bound", Condition::NonNegativeCoefficients)?;
    let ed = ExtendedDistribution::new(*baseline, pv.clone());
    let base = ExtendedDistribution::new(*baseline, ParameterVector::new(vec![1.0])?);
    let (extended, extended_error, base_tol) = match estimator {
        BoundEstimator::Quadrature { tol } => {
            let e = moment_quadrature(&ed, r, tol)?;
            (e.value, e.error_estimate, tol)
        }
        BoundEstimator::MonteCarlo { n, seed } => {
            let batch = sample_inverse_cdf(&ed, &mut RandomSource::new(seed), n)?;
            let est = monte_carlo_mean(&batch.values, |x| x.abs().powf(r));
            (est.mean, est.standard_error, 1e-10)
        }
    };
    let bound = pv.a1() * moment_quadrature(&base, r, base_tol)?.value;
    Ok(BoundCheck {
        extended,
        bound,
        extended_error,
    })
}
