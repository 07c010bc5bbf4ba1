//! The support function `g` of the extended family, its derivative, and its
//! power-series expansions around `u = 0` (c-coefficients) and `u = 1`
//! (d-coefficients).

use crate::error::{Condition, Error, Result};

/// Inputs in `[-U_SLACK, 1 + U_SLACK]` are clamped onto `[0, 1]`.
pub const U_SLACK: f64 = 1e-12;

/// Default cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

const ROOT_MAX_ITER: usize = 200;

/// The external parameters `(a1, …, aq)`.
///
/// `a1` plays a distinguished role: it only enters `g` through `Σa`, and
/// `g'(1) = a1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    a: Vec<f64>,
    sum: f64,
    // 1 - g written as N(s) / (D/q)^q with s = 1 - u; these are the
    // coefficients of N (s^1 .. s^q) and the magnitudes of their parts.
    complement: Vec<f64>,
    complement_mag: Vec<f64>,
}

impl ParameterVector {
    /// Checks `q` against the length of `a` and every `a_i > 0`.
    pub fn validate(q: usize, a: &[f64]) -> Result<Self> {
        if q == 0 || a.len() != q {
            return Err(Error::LengthMismatch {
                expected: q.max(1),
                got: a.len(),
            });
        }
        Self::new(a.to_vec())
    }

    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: 0,
            });
        }
        for (i, &ai) in a.iter().enumerate() {
            if !(ai > 0.0 && ai.is_finite()) {
                return Err(Error::NonPositiveParameter {
                    name: format!("a{}", i + 1),
                    value: ai,
                });
            }
        }
        let sum: f64 = a.iter().sum();
        let q = a.len();
        let qf = q as f64;
        let rho = (sum - qf) / qf;

        // (1 - s) ∏ (1 - w_i s) = Σ (-1)^k e_k s^k with e_k over {1, w_2, .., w_q}
        let mut weights = Vec::with_capacity(q);
        weights.push(1.0);
        weights.extend(a[1..].iter().map(|&ai| 1.0 - ai));
        let e = sigma_terms(&weights, q);

        let mut complement = Vec::with_capacity(q);
        let mut complement_mag = Vec::with_capacity(q);
        let mut binom = 1.0;
        for k in 1..=q {
            binom *= (q - k + 1) as f64 / k as f64;
            let ek = if k % 2 == 0 { e[k] } else { -e[k] };
            complement.push(binom * rho.powi(k as i32) - ek);
            complement_mag.push(binom * rho.abs().powi(k as i32) + e[k].abs());
        }
        // n_1 = qρ + 1 + Σ w_i = a1 exactly
        complement[0] = a[0];

        Ok(ParameterVector {
            a,
            sum,
            complement,
            complement_mag,
        })
    }

    /// `(b, …, b)` of length `q`: the Marshall–Olkin member with parameter `b`.
    pub fn uniform(q: usize, b: f64) -> Result<Self> {
        Self::new(vec![b; q.max(1)])
    }

    /// `(b·a1, …, b·aq)`.
    pub fn scaled(&self, b: f64) -> Result<Self> {
        Self::new(self.a.iter().map(|&ai| ai * b).collect())
    }

    pub fn q(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn a1(&self) -> f64 {
        self.a[0]
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    /// `Σa > q/2`.
    pub fn dev1_ok(&self) -> bool {
        self.sum > self.q() as f64 / 2.0
    }

    /// `Σa < 2q`.
    pub fn dev2_ok(&self) -> bool {
        self.sum < 2.0 * self.q() as f64
    }

    /// `Σa ≥ q` and `a_i ≤ 1` for `i ≥ 2`.
    pub fn corollary_ok(&self) -> bool {
        self.sum >= self.q() as f64 && self.a[1..].iter().all(|&ai| ai <= 1.0)
    }

    /// True when all `a_i` are equal, i.e. the Marshall–Olkin subfamily.
    pub fn is_uniform(&self) -> bool {
        self.a.iter().all(|&ai| ai == self.a[0])
    }

    pub(crate) fn require(&self, ok: bool, what: &'static str, c: Condition) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::condition(what, c))
        }
    }

    /// `Σa − (Σa − q)u`, always written as a sum of non-negative terms.
    fn denom(&self, u: f64, s: f64) -> f64 {
        let q = self.q() as f64;
        let d = if self.sum >= q {
            q + (self.sum - q) * s
        } else {
            self.sum + (q - self.sum) * u
        };
        debug_assert!(d >= 0.99 * q.min(self.sum) && d <= 1.01 * q.max(self.sum));
        d
    }

    /// `g(u)` for `u` already in `[0, 1]`.
    pub(crate) fn g_unit(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let s = 1.0 - u;
        let q = self.q() as f64;
        let d = self.denom(u, s);
        let mut v = q * u / d;
        for &ai in &self.a[1..] {
            v *= q * factor(ai, u, s) / d;
        }
        v.clamp(0.0, 1.0)
    }

    /// `g'(u)` for `u` already in `[0, 1]`, from the three-term derivative.
    pub(crate) fn g_prime_unit(&self, u: f64) -> f64 {
        let s = 1.0 - u;
        let q = self.q() as f64;
        let d = self.denom(u, s);
        let excess = self.sum - q;
        let mut p = q / d;
        let mut lin = 0.0; // Σ (1 - a_i) / f_i
        let mut quad = 0.0; // Σ (1 - a_i)^2 / f_i
        for &ai in &self.a[1..] {
            let f = factor(ai, u, s);
            let w = 1.0 - ai;
            p *= q * f / d;
            lin += w / f;
            quad += w * w / f;
        }
        // At u = 1 the bracket reduces to a1; near there it is rewritten as
        // a1 + s·(…) so the value stays accurate when a1 is tiny.
        let bracket = if u < 0.5 {
            1.0 + u * (q * excess / d + lin)
        } else {
            let a1 = self.a[0];
            a1 + s * ((1.0 - a1) + u * (quad - excess * excess / d))
        };
        (p * bracket).max(0.0)
    }

    /// `1 − g(u)` given both `u` and `s = 1 − u` (the caller may have a more
    /// accurate `s` than `1 − u`, e.g. a baseline survival value).
    pub(crate) fn g_complement_parts(&self, u: f64, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if u <= 0.0 {
            return 1.0;
        }
        let q = self.q();
        let direct = 1.0 - self.g_unit(u);
        let scale = (self.denom(u, s) / q as f64).powi(q as i32);
        let mut poly = 0.0;
        let mut mag = 0.0;
        for k in (0..q).rev() {
            poly = poly * s + self.complement[k];
            mag = mag * s + self.complement_mag[k];
        }
        poly *= s;
        mag *= s;
        // compare rounding-error estimates (in units of ε)
        let err_poly = (q + 2) as f64 * mag / scale;
        let err_direct = 2.0 * (q + 2) as f64;
        if err_poly < err_direct {
            (poly / scale).clamp(0.0, 1.0)
        } else {
            direct.clamp(0.0, 1.0)
        }
    }

    /// `g(u)`; inputs within `U_SLACK` of `[0, 1]` are clamped.
    pub fn g(&self, u: f64) -> Result<f64> {
        Ok(self.g_unit(check_unit("u", u)?))
    }

    /// `g'(u) ≥ 0`, with `g'(1) = a1`.
    pub fn g_prime(&self, u: f64) -> Result<f64> {
        Ok(self.g_prime_unit(check_unit("u", u)?))
    }

    /// `1 − g(u)`, evaluated without cancellation near `u = 1`.
    pub fn g_complement(&self, u: f64) -> Result<f64> {
        let u = check_unit("u", u)?;
        Ok(self.g_complement_parts(u, 1.0 - u))
    }

    /// The unique `u ∈ [0, 1]` with `g(u) = p`.
    pub fn g_inverse(&self, p: f64) -> Result<f64> {
        let p = check_unit("p", p)?;
        if p == 0.0 || p == 1.0 {
            return Ok(p);
        }
        increasing_root(|u| self.g_unit(u) - p, 0.0, 1.0, p)
    }

    /// The unique `s ∈ [0, 1]` with `1 − g(1 − s) = t`; used for upper-tail
    /// quantiles where `1 − p` carries more information than `p`.
    pub fn g_inverse_complement(&self, t: f64) -> Result<f64> {
        let t = check_unit("survival probability", t)?;
        if t == 0.0 || t == 1.0 {
            return Ok(t);
        }
        increasing_root(|s| self.g_complement_parts(1.0 - s, s) - t, 0.0, 1.0, t)
    }
}

/// `a + (1 − a)u`, written as a sum of non-negative terms.
fn factor(a: f64, u: f64, s: f64) -> f64 {
    if a <= 1.0 {
        a + (1.0 - a) * u
    } else {
        1.0 + (a - 1.0) * s
    }
}

pub(crate) fn check_unit(what: &'static str, u: f64) -> Result<f64> {
    if (-U_SLACK..=1.0 + U_SLACK).contains(&u) {
        Ok(u.clamp(0.0, 1.0))
    } else {
        Err(Error::domain(what, u, "[0, 1]"))
    }
}

/// Root of an increasing `f` on `[lo, hi]` with `f(lo) ≤ 0 ≤ f(hi)`:
/// Illinois-modified regula falsi with a bisection step whenever the bracket
/// fails to halve over two iterations.
pub(crate) fn increasing_root(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    target: f64,
) -> Result<f64> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo >= 0.0 {
        return Ok(lo);
    }
    if fhi <= 0.0 {
        return Ok(hi);
    }
    let resid_tol = 2.0 * f64::EPSILON * target.abs();
    let mut side = 0i8;
    let mut width_two_back = hi - lo;
    let mut width_one_back = hi - lo;
    for it in 0..ROOT_MAX_ITER {
        let width = hi - lo;
        let mid = 0.5 * (lo + hi);
        if width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) || mid <= lo || mid >= hi {
            return Ok(if -flo < fhi { lo } else { hi });
        }
        let bisect = it >= 2 && width > 0.5 * width_two_back;
        width_two_back = width_one_back;
        width_one_back = width;
        let mut x = lo - flo * (hi - lo) / (fhi - flo);
        if bisect || !(x > lo && x < hi) {
            x = mid;
            side = 0;
        }
        let fx = f(x);
        if fx.abs() <= resid_tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::Nonconvergence {
        what: "inversion of g",
        iterations: ROOT_MAX_ITER,
        residual: flo.abs().min(fhi.abs()),
    })
}

/// Elementary symmetric polynomials `σ_0 = 1, σ_1, …` of `weights`, padded
/// with zeros (or truncated) to `upto + 1` entries.
///
/// Computed as the coefficients of `∏ (1 + w x)`.
pub fn sigma_terms(weights: &[f64], upto: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &w in weights {
        poly.push(0.0);
        for i in (1..poly.len()).rev() {
            poly[i] += w * poly[i - 1];
        }
    }
    poly.resize(upto + 1, 0.0);
    poly
}

/// Which expansion of `g` a coefficient sequence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `g(u) = Σ_{m≥1} c_m u^m`, needs `Σa > q/2`.
    C,
    /// `g(u) = 1 + Σ_{m≥1} d_m (u − 1)^m`, needs `Σa < 2q`.
    D,
}

/// Lazily generated c- or d-coefficients.
///
/// Both sequences have the shape
/// `coef_m = A · Σ_{j=0..q} κ_j · C(m−j+q−1, q−1) · ρ^{m−j}`:
/// a fixed kernel `κ` built from elementary symmetric terms convolved with
/// the negative-binomial expansion of `(1 − ρx)^{-q}`. Binomial factors and
/// the prefactor are carried in log space.
#[derive(Debug, Clone)]
pub struct CoefficientStream {
    kind: SeriesKind,
    q: usize,
    log_prefactor: f64,
    ratio: f64,
    kernel: Vec<f64>,
    kernel_abs: f64,
    sigma: Vec<f64>,
    // ln|b(k)| = ln C(k+q−1, q−1) + k ln|ρ| for the last q+1 values of k
    ring: Vec<f64>,
    log_binom: f64,
    m: usize,
    last_magnitude: f64,
}

impl CoefficientStream {
    pub fn new(pv: &ParameterVector, kind: SeriesKind) -> Result<Self> {
        let q = pv.q();
        let qf = q as f64;
        let s = pv.sum();
        let (ratio, log_prefactor, sigma, kernel) = match kind {
            SeriesKind::C => {
                pv.require(pv.dev1_ok(), "expansion of g around 0", Condition::ExpansionAtZero)?;
                let w: Vec<f64> = pv.a()[1..].iter().map(|&a| (1.0 - a) / a).collect();
                let sigma = sigma_terms(&w, q);
                let mut kernel = vec![0.0; q + 1];
                kernel[1..].copy_from_slice(&sigma[..q]);
                let log_pref =
                    qf * qf.ln() + pv.a()[1..].iter().map(|a| a.ln()).sum::<f64>() - qf * s.ln();
                ((s - qf) / s, log_pref, sigma, kernel)
            }
            SeriesKind::D => {
                pv.require(pv.dev2_ok(), "expansion of g around 1", Condition::ExpansionAtOne)?;
                let w: Vec<f64> = pv.a()[1..].iter().map(|&a| 1.0 - a).collect();
                let sigma = sigma_terms(&w, q);
                let mut kernel = vec![1.0; q + 1];
                for j in 1..=q {
                    kernel[j] = sigma[j] + sigma[j - 1];
                }
                ((s - qf) / qf, 0.0, sigma, kernel)
            }
        };
        let kernel_abs = kernel.iter().map(|k| k.abs()).sum();
        let mut ring = vec![f64::NEG_INFINITY; q + 1];
        ring[0] = 0.0;
        Ok(CoefficientStream {
            kind,
            q,
            log_prefactor,
            ratio,
            kernel,
            kernel_abs,
            sigma,
            ring,
            log_binom: 0.0,
            m: 1,
            last_magnitude: 0.0,
        })
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    /// Geometric ratio `ρ` of the expansion: `(Σa−q)/Σa` for c, `(Σa−q)/q` for d.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Elementary symmetric terms `σ_0 … σ_q` used by this expansion.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `Σ_j |κ_j · b(m−j)|` for the last coefficient: the scale of the
    /// rounding error it carries.
    pub fn last_magnitude(&self) -> f64 {
        self.last_magnitude
    }

    /// Number of coefficients produced so far.
    pub fn produced(&self) -> usize {
        self.m - 1
    }

    fn ln_b(&self, k: usize) -> f64 {
        self.ring[k % (self.q + 1)]
    }

    fn b_signed(&self, k: usize) -> f64 {
        let v = (self.log_prefactor + self.ln_b(k)).exp();
        if self.ratio < 0.0 && k % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// Upper bound on `Σ_{m > M} |coef_m| · m^p` where `M` is the number of
    /// coefficients produced so far. Negative `p` is treated as 0.
    pub fn tail_bound(&self, p: f64) -> f64 {
        let p = p.max(0.0);
        let big_m = self.produced();
        let q = self.q;
        let k0 = (big_m + 1).saturating_sub(q);
        let rho = self.ratio.abs();
        let scale = self.log_prefactor.exp() * self.kernel_abs;
        if scale == 0.0 {
            return 0.0;
        }
        if rho == 0.0 {
            return if k0 == 0 { scale * (q as f64).powf(p) } else { 0.0 };
        }
        // ratio of consecutive bound terms is decreasing in k and tends to ρ
        let step = |k: usize| {
            let kf = k as f64;
            let qf = q as f64;
            rho * (kf + qf) / (kf + 1.0) * ((kf + qf + 1.0) / (kf + qf)).powf(p)
        };
        let mut term = (self.ln_b(k0) + (k0 as f64 + q as f64).ln() * p).exp();
        let mut acc = 0.0;
        for k in k0..k0 + 1_000_000 {
            let r = step(k);
            if r < 1.0 {
                return scale * (acc + term / (1.0 - r));
            }
            acc += term;
            term *= r;
            if !acc.is_finite() {
                break;
            }
        }
        f64::INFINITY
    }
}

impl Iterator for CoefficientStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let m = self.m;
        let q = self.q;
        // ln C(m+q−1, q−1) from ln C(m+q−2, q−1)
        self.log_binom += ((m + q - 1) as f64 / m as f64).ln();
        let ln_b = if self.ratio == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.log_binom + m as f64 * self.ratio.abs().ln()
        };
        self.ring[m % (q + 1)] = ln_b;
        let mut acc = 0.0;
        let mut mag = 0.0;
        for j in 0..=q.min(m) {
            let kappa = self.kernel[j];
            if kappa != 0.0 {
                let t = kappa * self.b_signed(m - j);
                acc += t;
                mag += t.abs();
            }
        }
        self.last_magnitude = mag;
        self.m += 1;
        Some(acc)
    }
}

/// A truncated c- or d-coefficient sequence.
#[derive(Debug, Clone)]
pub struct SeriesCoefficients {
    kind: SeriesKind,
    values: Vec<f64>,
    tail_estimate: f64,
    sigma: Vec<f64>,
    stream: CoefficientStream,
}

impl SeriesCoefficients {
    fn generate(pv: &ParameterVector, kind: SeriesKind, tol: f64, max_terms: usize) -> Result<Self> {
        let mut stream = CoefficientStream::new(pv, kind)?;
        let mut values = Vec::new();
        let mut tail = f64::INFINITY;
        let mut magnitude = 1.0;
        while values.len() < max_terms.max(1) {
            values.push(stream.next().expect("infinite stream"));
            magnitude += stream.last_magnitude();
            tail = stream.tail_bound(0.0);
            if tail <= tol {
                break;
            }
        }
        if tail > tol {
            return Err(Error::Nonconvergence {
                what: "coefficient series",
                iterations: values.len(),
                residual: tail,
            });
        }
        // each coefficient is a signed sum whose rounding error scales with
        // its term magnitudes, not with its value
        let rounding = 64.0 * f64::EPSILON * (values.len() + pv.q()) as f64 * magnitude;
        Ok(SeriesCoefficients {
            kind,
            sigma: stream.sigma().to_vec(),
            values,
            tail_estimate: tail + rounding,
            stream,
        })
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    /// Coefficients for `m = 1 ..= M`; `values()[0]` is `m = 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `M`, the index of the last retained coefficient.
    pub fn truncation_index(&self) -> usize {
        self.values.len()
    }

    /// Bound on the truncation plus rounding error of the partial sum,
    /// valid for `|u| ≤ 1` (c) or `|u − 1| ≤ 1` (d).
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn ratio(&self) -> f64 {
        self.stream.ratio()
    }

    /// Bound on `Σ_{m>M} |coef_m| m^p`.
    pub fn weighted_tail(&self, p: f64) -> f64 {
        self.stream.tail_bound(p)
    }

    /// Partial sum of the series at `u`.
    pub fn evaluate(&self, u: f64) -> f64 {
        match self.kind {
            SeriesKind::C => self.values.iter().rev().fold(0.0, |acc, &c| (acc + c) * u),
            SeriesKind::D => {
                let w = u - 1.0;
                1.0 + self.values.iter().rev().fold(0.0, |acc, &d| (acc + d) * w)
            }
        }
    }
}

/// Coefficients `c_m` of `g(u) = Σ c_m u^m`, truncated once the tail bound
/// drops below `tol`.
pub fn c_coefficients(pv: &ParameterVector, tol: f64, max_terms: usize) -> Result<SeriesCoefficients> {
    SeriesCoefficients::generate(pv, SeriesKind::C, tol, max_terms)
}

/// Coefficients `d_m` of `g(u) = 1 + Σ d_m (u − 1)^m`.
pub fn d_coefficients(pv: &ParameterVector, tol: f64, max_terms: usize) -> Result<SeriesCoefficients> {
    SeriesCoefficients::generate(pv, SeriesKind::D, tol, max_terms)
}

/// Both sides of `g_a(g_{b,…,b}(u)) = g_{b·a}(u)`.
pub fn g_compose_check(pv: &ParameterVector, b: f64, u: f64) -> Result<(f64, f64)> {
    let inner = ParameterVector::uniform(pv.q(), b)?;
    let lhs = pv.g(inner.g(u)?)?;
    let rhs = pv.scaled(b)?.g(u)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(a: &[f64]) -> ParameterVector {
        ParameterVector::new(a.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // Taylor coefficients by power-series division of the numerator
    // polynomial by the expanded denominator; shares nothing with the
    // σ/binomial path.
    fn series_division(num: &[f64], den: &[f64], terms: usize) -> Vec<f64> {
        let mut out = vec![0.0; terms];
        for m in 0..terms {
            let mut acc = num.get(m).copied().unwrap_or(0.0);
            for i in 1..den.len().min(m + 1) {
                acc -= den[i] * out[m - i];
            }
            out[m] = acc / den[0];
        }
        out
    }

    fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn c_oracle(a: &[f64], terms: usize) -> Vec<f64> {
        let q = a.len();
        let s: f64 = a.iter().sum();
        let qq = (q as f64).powi(q as i32);
        let mut num = vec![0.0, qq];
        for &ai in &a[1..] {
            num = poly_mul(&num, &[ai, 1.0 - ai]);
        }
        let mut den = vec![1.0];
        for _ in 0..q {
            den = poly_mul(&den, &[s, -(s - q as f64)]);
        }
        series_division(&num, &den, terms + 1)[1..].to_vec()
    }

    fn d_oracle(a: &[f64], terms: usize) -> Vec<f64> {
        let q = a.len();
        let s: f64 = a.iter().sum();
        let qq = (q as f64).powi(q as i32);
        let mut num = vec![qq, qq];
        for &ai in &a[1..] {
            num = poly_mul(&num, &[1.0, 1.0 - ai]);
        }
        let mut den = vec![1.0];
        for _ in 0..q {
            den = poly_mul(&den, &[q as f64, -(s - q as f64)]);
        }
        series_division(&num, &den, terms + 1)[1..].to_vec()
    }

    #[test]
    fn validate_examples() {
        let p = ParameterVector::validate(1, &[2.0]).unwrap();
        assert!(p.dev1_ok() && p.corollary_ok());
        // Σa < 2q is strict: 2 < 2 fails
        assert!(!p.dev2_ok());
        assert!(ParameterVector::validate(1, &[1.99]).unwrap().dev2_ok());

        let p = ParameterVector::validate(2, &[1e-6, 0.15]).unwrap();
        assert!(!p.dev1_ok());
        assert!(p.dev2_ok());
        assert!(!p.corollary_ok());

        assert!(matches!(
            ParameterVector::validate(2, &[1.0, -0.5]),
            Err(Error::NonPositiveParameter { .. })
        ));
        assert!(matches!(
            ParameterVector::validate(3, &[1.0, 0.5]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
        assert!(ParameterVector::validate(1, &[f64::NAN]).is_err());
        assert!(ParameterVector::new(vec![]).is_err());
    }

    #[test]
    fn g_examples() {
        assert!(close(pv(&[0.5, 0.5]).g(0.5).unwrap(), 2.0 / 3.0, 1e-15));
        assert!(close(pv(&[2.0, 0.5]).g(0.5).unwrap(), 8.0 / 27.0, 1e-15));
        for a in [&[0.3][..], &[2.0, 0.5], &[1.4, 0.9, 0.8], &[1e-6, 0.15]] {
            let p = pv(a);
            assert_eq!(p.g(0.0).unwrap(), 0.0);
            assert_eq!(p.g(1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn g_domain() {
        let p = pv(&[1.5, 0.5]);
        assert_eq!(p.g(-5e-13).unwrap(), 0.0);
        assert_eq!(p.g(1.0 + 5e-13).unwrap(), 1.0);
        assert!(matches!(p.g(1.1), Err(Error::Domain { .. })));
        assert!(p.g(-1e-9).is_err());
        assert!(p.g(f64::NAN).is_err());
        assert!(p.g_prime(2.0).is_err());
    }

    #[test]
    fn g_prime_examples() {
        assert!(close(pv(&[1.4, 0.9, 0.8]).g_prime(1.0).unwrap(), 1.4, 1e-15));
        assert!(close(pv(&[2.0]).g_prime(0.0).unwrap(), 0.5, 1e-15));

        let p = pv(&[2.0, 0.5]);
        let h = 1e-6;
        let fd = (p.g(0.5 + h).unwrap() - p.g(0.5 - h).unwrap()) / (2.0 * h);
        let an = p.g_prime(0.5).unwrap();
        assert!((an - fd).abs() <= 1e-6 * an, "{an} vs {fd}");
    }

    #[test]
    fn printed_two_parameter_density_has_labels_interchanged() {
        // The displayed q = 2 numerator 4(a1a2u + a1²u − a1a2 − a1² − 2a2u)
        // over (a1u + a2u − a1 − a2 − 2u)^3 is g' of the pair (a2, a1).
        let printed = |a1: f64, a2: f64, u: f64| {
            4.0 * (a1 * a2 * u + a1 * a1 * u - a1 * a2 - a1 * a1 - 2.0 * a2 * u)
                / (a1 * u + a2 * u - a1 - a2 - 2.0 * u).powi(3)
        };
        for (a1, a2) in [(1.3, 0.4), (0.2, 3.0), (2.0, 2.5)] {
            let p = pv(&[a1, a2]);
            for u in [0.0, 0.2, 0.5, 0.7, 1.0] {
                let ours = p.g_prime(u).unwrap();
                let theirs = printed(a2, a1, u);
                assert!((ours - theirs).abs() <= 1e-13 * ours.max(1.0));
            }
        }
        // as printed (without swapping) it disagrees unless a1 = a2
        let p = pv(&[1.3, 0.4]);
        assert!((p.g_prime(0.2).unwrap() - printed(1.3, 0.4, 0.2)).abs() > 0.1);
    }

    #[test]
    fn complement_matches_direct_and_tail_is_linear() {
        let p = pv(&[1e-6, 0.15]);
        // 1 − g(1 − s) ≈ a1·s for small s
        let s = 1e-10;
        let c = p.g_complement(1.0 - s).unwrap();
        assert!((c / s - 1e-6).abs() < 1e-9);

        let p = pv(&[1.4, 0.9, 0.8]);
        for u in [0.0, 0.1, 0.5, 0.9, 0.999] {
            let c = p.g_complement(u).unwrap();
            assert!(close(c + p.g(u).unwrap(), 1.0, 1e-15));
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_terms(&[], 2), vec![1.0, 0.0, 0.0]);
        assert_eq!(sigma_terms(&[1.0, -0.5], 3), vec![1.0, 0.5, -0.5, 0.0]);
        assert_eq!(sigma_terms(&[0.7], 1), vec![1.0, 0.7]);
        // brute-force subset enumeration
        let w = [0.3, -1.2, 2.0, 0.5];
        let sig = sigma_terms(&w, 4);
        let mut brute = vec![0.0; 5];
        for mask in 0u32..16 {
            let prod: f64 = (0..4).filter(|i| mask & (1 << i) != 0).map(|i| w[i]).product();
            brute[mask.count_ones() as usize] += prod;
        }
        for (x, y) in sig.iter().zip(&brute) {
            assert!(close(*x, *y, 1e-14));
        }
    }

    #[test]
    fn c_coefficient_examples() {
        let c = c_coefficients(&pv(&[2.0]), 1e-14, DEFAULT_MAX_TERMS).unwrap();
        for (i, v) in c.values().iter().enumerate() {
            let m = i as i32 + 1;
            assert!(close(*v, 0.5f64.powi(m), 1e-13 * 0.5f64.powi(m)));
        }

        let c = c_coefficients(&pv(&[1.0]), 1e-14, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(c.values()[0], 1.0);
        assert!(c.values()[1..].iter().all(|&v| v == 0.0));

        let c = c_coefficients(&pv(&[1.5, 0.5]), 1e-12, DEFAULT_MAX_TERMS).unwrap();
        let total: f64 = c.values().iter().sum();
        assert!(close(total, 1.0, 1e-10));
        assert!(close(c.values()[0], 0.5, 1e-15) && close(c.values()[1], 0.5, 1e-15));
    }

    #[test]
    fn c_coefficients_match_series_division() {
        for a in [&[2.0][..], &[1.5, 0.5], &[0.8, 2.0, 0.3], &[1.0, 1.0, 1.0, 0.2], &[3.0, 0.9, 0.4]] {
            let ours = c_coefficients(&pv(a), 1e-14, DEFAULT_MAX_TERMS).unwrap();
            let n = ours.truncation_index().min(40);
            let oracle = c_oracle(a, n);
            for m in 0..n {
                assert!(
                    close(ours.values()[m], oracle[m], 1e-12 * oracle[m].abs().max(1e-3)),
                    "a={a:?} m={} {} vs {}",
                    m + 1,
                    ours.values()[m],
                    oracle[m]
                );
            }
        }
    }

    #[test]
    fn d_coefficient_examples() {
        let d = d_coefficients(&pv(&[1.0]), 1e-14, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(d.values()[0], 1.0);
        assert!(d.values()[1..].iter().all(|&v| v == 0.0));

        let p = pv(&[1.5]);
        let d = d_coefficients(&p, 1e-14, DEFAULT_MAX_TERMS).unwrap();
        assert!(close(d.evaluate(0.7), p.g(0.7).unwrap(), 1e-10));

        let p = pv(&[1.0, 1.0]);
        let d = d_coefficients(&p, 1e-14, DEFAULT_MAX_TERMS).unwrap();
        assert!(close(d.evaluate(0.3), p.g(0.3).unwrap(), 1e-10));

        for a in [&[1.5][..], &[0.8, 2.0, 0.3], &[3.0, 0.9, 0.4], &[0.1, 0.1]] {
            let ours = d_coefficients(&pv(a), 1e-14, DEFAULT_MAX_TERMS).unwrap();
            let n = ours.truncation_index().min(40);
            let oracle = d_oracle(a, n);
            for m in 0..n {
                assert!(close(ours.values()[m], oracle[m], 1e-12 * oracle[m].abs().max(1e-3)));
            }
        }
    }

    #[test]
    fn series_preconditions() {
        let p = pv(&[1e-6, 0.15]);
        assert!(matches!(
            c_coefficients(&p, 1e-12, 100),
            Err(Error::ConditionViolated { condition: Condition::ExpansionAtZero, .. })
        ));
        let p = pv(&[5.0, 0.5]);
        assert!(matches!(
            d_coefficients(&p, 1e-12, 100),
            Err(Error::ConditionViolated { condition: Condition::ExpansionAtOne, .. })
        ));
        // ratio 0.999: far from converged after 10 terms
        let p = pv(&[1000.0]);
        assert!(matches!(
            c_coefficients(&p, 1e-12, 10),
            Err(Error::Nonconvergence { .. })
        ));
    }

    #[test]
    fn large_q_and_many_terms_do_not_overflow() {
        let mut a = vec![0.9; 20];
        a[0] = 150.0;
        let p = pv(&a);
        let c = c_coefficients(&p, 1e-10, DEFAULT_MAX_TERMS).unwrap();
        assert!(c.values().iter().all(|v| v.is_finite() && *v >= 0.0));
        assert!(close(c.values().iter().sum::<f64>(), 1.0, 1e-8));
        assert!(close(c.evaluate(0.6), p.g(0.6).unwrap(), c.tail_estimate()));
    }

    #[test]
    fn composition_examples() {
        let (l, r) = g_compose_check(&pv(&[1.5, 0.5]), 2.0, 0.4).unwrap();
        assert!(close(l, r, 1e-12));

        let p = pv(&[1.4, 0.9, 0.8]);
        let (l, r) = g_compose_check(&p, 1.0, 0.3).unwrap();
        let g = p.g(0.3).unwrap();
        assert!(close(l, g, 1e-15) && close(r, g, 1e-15));

        let (a, b, u) = (0.7, 3.0, 0.55);
        let (l, r) = g_compose_check(&pv(&[a]), b, u).unwrap();
        let mo = u / (a * b + (1.0 - a * b) * u);
        assert!(close(l, mo, 1e-14) && close(r, mo, 1e-14));
    }

    #[test]
    fn inverse_examples() {
        let p = pv(&[0.5, 0.5]);
        assert!(close(p.g_inverse(2.0 / 3.0).unwrap(), 0.5, 1e-14));
        let p = pv(&[1e-6, 0.15]);
        for t in [1e-12, 1e-6, 0.3, 0.9] {
            let s = p.g_inverse_complement(t).unwrap();
            assert!(close(p.g_complement(1.0 - s).unwrap(), t, 1e-13 * t.max(1e-3)));
            let u = p.g_inverse(t).unwrap();
            assert!(close(p.g(u).unwrap(), t, 1e-14));
        }
    }

    fn arb_pv() -> impl Strategy<Value = ParameterVector> {
        prop::collection::vec(-4.0f64..3.0, 1..7)
            .prop_map(|v| ParameterVector::new(v.into_iter().map(|x| 10f64.powf(x)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn g_is_a_cdf_transform(p in arb_pv(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
            let glo = p.g(lo).unwrap();
            let ghi = p.g(hi).unwrap();
            prop_assert!((0.0..=1.0).contains(&glo));
            prop_assert!(glo <= ghi);
            prop_assert!(p.g_prime(u).unwrap() >= 0.0);
            let gp1 = p.g_prime(1.0).unwrap();
            prop_assert!((gp1 - p.a1()).abs() <= 1e-12 * p.a1());
        }

        #[test]
        fn complement_sums_to_one(p in arb_pv(), u in 0.0f64..1.0) {
            let total = p.g(u).unwrap() + p.g_complement(u).unwrap();
            prop_assert!((total - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn equal_parameters_reduce_to_marshall_olkin(
            q in 1usize..7,
            a in prop::sample::select(vec![0.1, 0.5, 1.0, 2.0, 10.0]),
            u in 0.0f64..1.0,
        ) {
            let p = ParameterVector::uniform(q, a).unwrap();
            let mo = u / (a + (1.0 - a) * u);
            prop_assert!((p.g(u).unwrap() - mo).abs() <= 1e-12);
        }

        #[test]
        fn composition_identity(p in arb_pv(), b in -2.0f64..2.0, u in 0.0f64..1.0) {
            let (l, r) = g_compose_check(&p, 10f64.powf(b), u).unwrap();
            prop_assert!((l - r).abs() <= 1e-12);
        }

        #[test]
        fn c_series_reconstructs_within_tail(p in arb_pv(), u in 0.0f64..1.0) {
            prop_assume!(p.sum() > 0.6 * p.q() as f64 && p.sum() < 50.0 * p.q() as f64);
            let c = c_coefficients(&p, 1e-12, DEFAULT_MAX_TERMS).unwrap();
            let err = (c.evaluate(u) - p.g(u).unwrap()).abs();
            prop_assert!(err <= c.tail_estimate(), "err {} > {}", err, c.tail_estimate());
        }

        #[test]
        fn d_series_reconstructs_within_tail(p in arb_pv(), u in 0.0f64..1.0) {
            prop_assume!(p.sum() < 1.8 * p.q() as f64);
            let d = d_coefficients(&p, 1e-12, DEFAULT_MAX_TERMS).unwrap();
            let err = (d.evaluate(u) - p.g(u).unwrap()).abs();
            prop_assert!(err <= d.tail_estimate(), "err {} > {}", err, d.tail_estimate());
        }
    }
}
