#![allow(dead_code)]

use gels_core::GelSParams;

/// `∫ xⁿ f(x) dx` by double-exponential quadrature in `t = ln(x − α)`.
///
/// Every mixture component is a normal in `t` with sd `γ` and centre between
/// `γ²` and `(k + n + 1)γ²`, so ±14 sd around that span holds all the mass.
pub fn quad_moment(p: &GelSParams, n: u32) -> f64 {
    let (alpha, k, gamma) = (p.alpha(), p.k(), p.gamma());
    let lo = gamma * gamma - 14.0 * gamma;
    let hi = f64::from(k + n + 1) * gamma * gamma + 14.0 * gamma;
    let integrand = |t: f64| {
        let x = alpha + t.exp();
        (f64::from(n) * x.ln() + p.log_pdf(x) + t).exp()
    };
    // split into unit-sd panels so each piece is smooth and well resolved
    let panels = ((hi - lo) / gamma).ceil() as usize;
    let width = (hi - lo) / panels as f64;
    (0..panels)
        .map(|i| {
            let a = lo + i as f64 * width;
            quadrature::integrate(integrand, a, a + width, 1e-16).integral
        })
        .sum()
}

/// Kolmogorov–Smirnov distance between a sample and a cdf.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// 1% critical value of the one-sample KS statistic, large-n form.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Fourth-order central difference.
pub fn five_point(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// The seven reference triples `(α, k, γ)`.
pub const REFERENCE_TRIPLES: [(f64, u32, f64); 7] = [
    (0.5, 1, 0.5),
    (1.0, 1, 0.5),
    (1.5, 1, 0.5),
    (0.5, 0, 0.5),
    (0.5, 2, 0.5),
    (0.5, 1, 0.4),
    (0.5, 1, 0.6),
];

/// Published mean, variance, skewness, kurtosis for each reference triple.
pub const PUBLISHED_MOMENTS: [[f64; 4]; 7] = [
    [2.26, 0.92, 1.78, 9.08],
    [2.70, 0.87, 1.80, 9.23],
    [3.16, 0.84, 1.81, 9.33],
    [1.95, 0.60, 1.75, 8.90],
    [2.67, 1.46, 1.80, 9.21],
    [1.93, 0.37, 1.34, 6.33],
    [2.79, 2.41, 2.31, 13.68],
];

pub const PUBLISHED_MODES: [f64; 7] = [1.69, 2.14, 2.61, 1.50, 1.95, 1.62, 1.80];

pub const QUANTILE_LEVELS: [f64; 5] = [0.5, 0.01, 0.05, 0.95, 0.99];

/// Published median, q(0.01), q(0.05), q(0.95), q(0.99).
pub const PUBLISHED_QUANTILES: [[f64; 5]; 7] = [
    [2.05, 0.97, 1.17, 4.08, 5.56],
    [2.49, 1.45, 1.64, 4.47, 5.92],
    [2.95, 1.94, 2.12, 4.89, 6.31],
    [1.78, 0.90, 1.06, 3.42, 4.61],
    [2.40, 1.06, 1.30, 4.96, 6.83],
    [1.87, 1.01, 1.17, 3.07, 3.88],
    [2.40, 0.95, 1.18, 5.72, 8.42],
];
