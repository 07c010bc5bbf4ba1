//! Globally adaptive Gauss–Kronrod quadrature on finite and semi-infinite
//! ranges.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Panels are never split more than this many times in total.
pub const MAX_SUBDIVISIONS: usize = 20_000;

// Kronrod 15-point abscissae (descending); odd indices are the 7 Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Stopping rule: estimated error ≤ `max(abs, rel·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(tol: f64) -> Self {
        Tolerance { abs: tol, rel: 0.0 }
    }

    pub fn relative(tol: f64) -> Self {
        Tolerance { abs: 0.0, rel: tol }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss error.
fn kronrod<F: Fn(f64) -> f64>(h: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = h(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = h(center - dx);
        let f2 = h(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    // |K − G| plus a rounding floor on the panel
    let error = ((kronrod - gauss) * half).abs() + 50.0 * f64::EPSILON * abs_sum * half.abs();
    Panel { a, b, value, error }
}

fn adaptive<F: Fn(f64) -> f64>(h: F, starts: &[(f64, f64)], tol: Tolerance) -> Result<QuadratureResult> {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for &(a, b) in starts {
        heap.push(kronrod(&h, a, b));
        evaluations += 15;
    }
    let total = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        let mut v = 0.0;
        let mut e = 0.0;
        for p in heap.iter().chain(frozen) {
            v += p.value;
            e += p.error;
        }
        (v, e)
    };
    let (mut value, mut error) = total(&heap, &frozen);
    let mut splits = 0;
    while error > tol.target(value) && splits < MAX_SUBDIVISIONS {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            frozen.push(worst);
            continue;
        }
        let left = kronrod(&h, worst.a, mid);
        let right = kronrod(&h, mid, worst.b);
        evaluations += 30;
        splits += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if splits % 256 == 0 {
            (value, error) = total(&heap, &frozen);
        }
    }
    (value, error) = total(&heap, &frozen);
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::ToleranceNotMet {
            estimate: f64::INFINITY,
            tol: tol.target(0.0),
        });
    }
    if error > tol.target(value) {
        return Err(Error::ToleranceNotMet {
            estimate: error,
            tol: tol.target(value),
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
    })
}

/// Product of integrand and Jacobian; points mapped to infinity or with a
/// vanishing Jacobian contribute nothing.
fn weighted<F: Fn(f64) -> f64>(f: &F, x: f64, jac: f64) -> f64 {
    if !x.is_finite() || jac == 0.0 || !jac.is_finite() {
        return 0.0;
    }
    let v = f(x) * jac;
    if v.is_finite() {
        v
    } else {
        f64::NAN
    }
}

/// `∫_a^b f(x) dx` on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("interval end", if a.is_finite() { b } else { a }, "finite reals"));
    }
    adaptive(f, &[(a, b)], tol)
}

/// `∫_lo^∞ f(x) dx` with an absolute error target.
pub fn integrate_semiinfinite<F: Fn(f64) -> f64>(f: F, lo: f64, tol: f64) -> Result<QuadratureResult> {
    integrate_semiinfinite_with(f, lo, Tolerance::absolute(tol))
}

/// `∫_lo^∞ f(x) dx`.
///
/// `[lo, lo+1]` is mapped by `x = lo + e^{−y}` so that power-law blow-up at
/// `lo` becomes exponential decay in `y`; `[lo+1, ∞)` is mapped by
/// `x = lo + e^{y}`. Both `y` ranges are then folded onto `[0, 1)` with
/// `y = t/(1−t)`.
pub fn integrate_semiinfinite_with<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    tol: Tolerance,
) -> Result<QuadratureResult> {
    if !lo.is_finite() {
        return Err(Error::domain("lo", lo, "finite reals"));
    }
    // t ∈ [0, 1) is the head, t ∈ [1, 2) the tail
    let h = |t: f64| {
        let (tt, sign) = if t < 1.0 { (t, -1.0) } else { (t - 1.0, 1.0) };
        let s = 1.0 - tt;
        let y = tt / s;
        let e = (sign * y).exp();
        weighted(&f, lo + e, e / (s * s))
    };
    let starts: Vec<(f64, f64)> = (0..16).map(|i| (i as f64 / 8.0, (i + 1) as f64 / 8.0)).collect();
    adaptive(h, &starts, tol)
}
