//! WebAssembly bindings behind the static demo page in `www/`.
//!
//! The computations live in [`demo`] as plain Rust so they can be tested
//! natively; the `#[wasm_bindgen]` wrappers only convert errors.

use wasm_bindgen::prelude::*;

pub mod demo {
    use gels_core::estimation::{fit, InitPolicy};
    use gels_core::{Dataset, GelSParams, Result};

    #[derive(Debug, Clone, PartialEq)]
    pub struct Curve {
        pub xs: Vec<f64>,
        pub ys: Vec<f64>,
    }

    /// Density on `points` equally spaced abscissae over `[lo, hi]`.
    pub fn curve_between(p: &GelSParams, lo: f64, hi: f64, points: usize) -> Curve {
        let points = points.max(2);
        let xs: Vec<f64> = (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect();
        let ys = xs.iter().map(|&x| p.pdf(x)).collect();
        Curve { xs, ys }
    }

    /// Density over `[α, q(0.999)]`.
    pub fn curve(alpha: f64, k: u32, gamma: f64, points: usize) -> Result<Curve> {
        let p = GelSParams::new(alpha, k, gamma)?;
        Ok(curve_between(&p, alpha, p.quantile(0.999)?, points))
    }

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Summary {
        pub mean: f64,
        pub variance: f64,
        pub skewness: f64,
        pub kurtosis: f64,
        pub mode: f64,
        pub median: f64,
        pub q01: f64,
        pub q05: f64,
        pub q95: f64,
        pub q99: f64,
    }

    pub fn summary(alpha: f64, k: u32, gamma: f64) -> Result<Summary> {
        let p = GelSParams::new(alpha, k, gamma)?;
        let s = p.summary()?;
        Ok(Summary {
            mean: s.mean,
            variance: s.variance,
            skewness: s.skewness,
            kurtosis: s.kurtosis,
            mode: s.mode,
            median: s.median,
            q01: p.quantile(0.01)?,
            q05: p.quantile(0.05)?,
            q95: p.quantile(0.95)?,
            q99: p.quantile(0.99)?,
        })
    }

    #[derive(Debug, Clone, PartialEq)]
    pub struct Histogram {
        /// `bins + 1` edges.
        pub edges: Vec<f64>,
        /// Normalized so the bars integrate to 1.
        pub densities: Vec<f64>,
        pub counts: Vec<u32>,
    }

    pub fn histogram(values: &[f64], bins: usize) -> Histogram {
        let bins = bins.max(1);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
        let mut counts = vec![0u32; bins];
        for &v in values {
            counts[(((v - lo) / width) as usize).min(bins - 1)] += 1;
        }
        let n = values.len() as f64;
        Histogram {
            edges: (0..=bins).map(|i| lo + i as f64 * width).collect(),
            densities: counts.iter().map(|&c| f64::from(c) / (n * width)).collect(),
            counts,
        }
    }

    #[derive(Debug, Clone, PartialEq)]
    pub struct SampleView {
        pub histogram: Histogram,
        pub curve: Curve,
        /// Kolmogorov–Smirnov distance to the cdf.
        pub ks: f64,
    }

    pub fn sample(alpha: f64, k: u32, gamma: f64, n: usize, seed: u64, bins: usize) -> Result<SampleView> {
        let p = GelSParams::new(alpha, k, gamma)?;
        let mut xs = p.sample(n.max(1), seed)?;
        let histogram = histogram(&xs, bins);
        let curve = curve_between(&p, alpha, *histogram.edges.last().unwrap_or(&alpha), 300);
        xs.sort_by(f64::total_cmp);
        let m = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = p.cdf(x);
                (f - i as f64 / m).max((i + 1) as f64 / m - f)
            })
            .fold(0.0, f64::max);
        Ok(SampleView { histogram, curve, ks })
    }

    #[derive(Debug, Clone, PartialEq)]
    pub struct FitView {
        pub k: u32,
        pub alpha: f64,
        pub gamma: f64,
        pub neg_loglik: f64,
        pub aic: f64,
        pub sic: f64,
        /// `-l` for each k of the grid, starting at 0.
        pub profile: Vec<f64>,
        pub histogram: Histogram,
        pub curve: Curve,
    }

    /// Fits a bundled data set over `k = 0..=k_max`.
    pub fn fit_bundled(name: &str, k_max: u32, bins: usize) -> Result<FitView> {
        let data = Dataset::bundled(name)
            .ok_or_else(|| gels_core::Error::InvalidData(format!("unknown data set {name:?}")))?;
        let trace = fit(&data, 0, k_max, InitPolicy::Both)?;
        let best = trace.best();
        let histogram = histogram(data.values(), bins);
        let p = best.params();
        let hi = histogram.edges.last().copied().unwrap_or(1.0).max(p.quantile(0.995)?);
        Ok(FitView {
            k: best.k,
            alpha: best.alpha_hat,
            gamma: best.gamma_hat,
            neg_loglik: -best.loglik,
            aic: best.aic,
            sic: best.sic,
            profile: (0..=k_max)
                .map(|k| trace.get(k).map_or(f64::NAN, |f| -f.loglik))
                .collect(),
            histogram,
            curve: curve_between(&p, best.alpha_hat, hi, 300),
        })
    }
}

fn js_err(e: gels_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Curve(demo::Curve);

#[wasm_bindgen]
impl Curve {
    pub fn xs(&self) -> Vec<f64> {
        self.0.xs.clone()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.0.ys.clone()
    }
}

#[wasm_bindgen]
pub struct Summary(demo::Summary);

#[wasm_bindgen]
impl Summary {
    /// `[mean, variance, skewness, kurtosis, mode, median, q01, q05, q95, q99]`
    pub fn values(&self) -> Vec<f64> {
        let s = &self.0;
        vec![
            s.mean, s.variance, s.skewness, s.kurtosis, s.mode, s.median, s.q01, s.q05, s.q95, s.q99,
        ]
    }
}

#[wasm_bindgen]
pub struct SampleView(demo::SampleView);

#[wasm_bindgen]
impl SampleView {
    pub fn edges(&self) -> Vec<f64> {
        self.0.histogram.edges.clone()
    }

    pub fn densities(&self) -> Vec<f64> {
        self.0.histogram.densities.clone()
    }

    pub fn curve_xs(&self) -> Vec<f64> {
        self.0.curve.xs.clone()
    }

    pub fn curve_ys(&self) -> Vec<f64> {
        self.0.curve.ys.clone()
    }

    pub fn ks(&self) -> f64 {
        self.0.ks
    }
}

#[wasm_bindgen]
pub struct FitView(demo::FitView);

#[wasm_bindgen]
impl FitView {
    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn alpha(&self) -> f64 {
        self.0.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.0.gamma
    }

    pub fn neg_loglik(&self) -> f64 {
        self.0.neg_loglik
    }

    pub fn aic(&self) -> f64 {
        self.0.aic
    }

    pub fn sic(&self) -> f64 {
        self.0.sic
    }

    pub fn profile(&self) -> Vec<f64> {
        self.0.profile.clone()
    }

    pub fn edges(&self) -> Vec<f64> {
        self.0.histogram.edges.clone()
    }

    pub fn densities(&self) -> Vec<f64> {
        self.0.histogram.densities.clone()
    }

    pub fn curve_xs(&self) -> Vec<f64> {
        self.0.curve.xs.clone()
    }

    pub fn curve_ys(&self) -> Vec<f64> {
        self.0.curve.ys.clone()
    }
}

#[wasm_bindgen]
pub fn density_curve(alpha: f64, k: u32, gamma: f64, points: usize) -> Result<Curve, JsError> {
    demo::curve(alpha, k, gamma, points).map(Curve).map_err(js_err)
}

#[wasm_bindgen]
pub fn summary(alpha: f64, k: u32, gamma: f64) -> Result<Summary, JsError> {
    demo::summary(alpha, k, gamma).map(Summary).map_err(js_err)
}

#[wasm_bindgen]
pub fn sample_histogram(
    alpha: f64,
    k: u32,
    gamma: f64,
    n: usize,
    seed: u32,
    bins: usize,
) -> Result<SampleView, JsError> {
    demo::sample(alpha, k, gamma, n, u64::from(seed), bins)
        .map(SampleView)
        .map_err(js_err)
}

#[wasm_bindgen]
pub fn fit_dataset(name: &str, k_max: u32, bins: usize) -> Result<FitView, JsError> {
    demo::fit_bundled(name, k_max, bins).map(FitView).map_err(js_err)
}
