//! Kolmogorov–Smirnov statistics and asymptotic critical values.

/// `sup |F_n − F|` for sorted `values`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let n = values.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let c = cdf(x);
        d = d.max((i + 1) as f64 / n - c).max(c - i as f64 / n);
    }
    d
}

/// `sup |F_n − G_m|` for two sorted samples; ties are stepped over together.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    // once one sample is exhausted the gap only shrinks toward 0
    d.max((i as f64 / n - j as f64 / m).abs())
}

/// `c(α) = sqrt(−ln(α/2)/2)`, the asymptotic Kolmogorov quantile.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

pub fn ks_critical_one_sample(n: usize, alpha: f64) -> f64 {
    ks_coefficient(alpha) / (n as f64).sqrt()
}

pub fn ks_critical_two_sample(n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_coefficient(alpha) * ((n + m) / (n * m)).sqrt()
}
