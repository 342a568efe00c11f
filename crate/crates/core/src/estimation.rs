//! Maximum-likelihood fitting of GEL-S with `k` held fixed on a grid.
//!
//! For fixed `k` the log-likelihood
//!
//! ```text
//! l(α, γ) = n ln C + k Σ ln xᵢ − Σ (ln(xᵢ − α))² / (2γ²)
//! ```
//!
//! is maximized over `(a, γ)` with `α = a²`, so the optimizer never sees the
//! `α ≥ 0` constraint; `α ≥ min(x)` is a `+∞` barrier. The selected model is
//! the grid point with the largest likelihood. Standard errors come from the
//! inverse of the observed information (negative Hessian of `l`) in `(α, γ)`.

use serde::{Deserialize, Serialize};

pub use crate::datasets::Dataset;
use crate::distribution::GelSParams;
use crate::error::{Error, Result};
use crate::optimize::{
    hessian_from_gradient, minimize, numerical_hessian, spd_inverse, Matrix, MinimizeSettings, Objective,
};
use crate::special::{log_series_sum_partials, std_normal_quantile};

/// Free parameters in the information criteria (`k` is selected, not counted).
pub const GELS_N_PARAMS: u32 = 2;

const BARRIER_MARGIN: f64 = 1e-12;
const INFO_STEP: f64 = 1e-5;

/// `l(θ | x)`; `−∞` when some `xᵢ ≤ α`.
pub fn log_likelihood(params: &GelSParams, data: &Dataset) -> f64 {
    let alpha = params.alpha();
    let gamma = params.gamma();
    let xs = data.values();
    if xs.iter().any(|&x| !(x > alpha)) {
        return f64::NEG_INFINITY;
    }
    let n = xs.len() as f64;
    let k = f64::from(params.k());
    let (sum_ln_x, sum_sq) = xs.iter().fold((0.0, 0.0), |(sl, sq), &x| {
        let lz = (x - alpha).ln();
        (sl + x.ln(), sq + lz * lz)
    });
    let poly = if params.k() == 0 { 0.0 } else { k * sum_ln_x };
    n * params.log_norm_const() + poly - sum_sq / (2.0 * gamma * gamma)
}

/// `(∂l/∂α, ∂l/∂γ)`.
pub fn score(params: &GelSParams, data: &Dataset) -> Result<(f64, f64)> {
    let alpha = params.alpha();
    let gamma = params.gamma();
    let xs = data.values();
    if xs.iter().any(|&x| !(x > alpha)) {
        return Err(Error::Domain(format!(
            "score needs every observation above α = {alpha}; min is {}",
            data.min()
        )));
    }
    let n = xs.len() as f64;
    let (d_alpha_ln_s, d_gamma_ln_s) = log_series_sum_partials(alpha, gamma, params.k());
    let (s1, s2) = xs.iter().fold((0.0, 0.0), |(s1, s2), &x| {
        let z = x - alpha;
        let lz = z.ln();
        (s1 + lz / z, s2 + lz * lz)
    });
    let g2 = gamma * gamma;
    Ok((
        -n * d_alpha_ln_s + s1 / g2,
        -n / gamma - n * d_gamma_ln_s + s2 / (g2 * gamma),
    ))
}

/// Negative Jacobian of a two-component score, by central differences of
/// the score (one-sided where the stencil leaves the domain).
pub fn information_from_score<G>(score: G, point: [f64; 2]) -> Result<Matrix>
where
    G: Fn(&[f64]) -> Option<(f64, f64)>,
{
    let hess = hessian_from_gradient(|p| score(p).map(|(a, b)| vec![a, b]), &point, INFO_STEP)?;
    Ok(negate(hess))
}

/// Observed information in `(α, γ)`: `−∂²l` from differences of the score.
pub fn observed_information(params: &GelSParams, data: &Dataset) -> Result<Matrix> {
    let k = params.k();
    information_from_score(
        |p| {
            let q = GelSParams::new(p[0], k, p[1]).ok()?;
            score(&q, data).ok()
        },
        [params.alpha(), params.gamma()],
    )
}

/// Observed information from second differences of `l` itself; an
/// independent scheme for cross-checking [`observed_information`].
pub fn observed_information_direct(params: &GelSParams, data: &Dataset) -> Result<Matrix> {
    let k = params.k();
    let l = |p: &[f64]| match GelSParams::new(p[0], k, p[1]) {
        Ok(q) => log_likelihood(&q, data),
        Err(_) => f64::NEG_INFINITY,
    };
    Ok(negate(numerical_hessian(l, &[params.alpha(), params.gamma()], 1e-4)?))
}

fn negate(m: Matrix) -> Matrix {
    m.into_iter().map(|r| r.into_iter().map(|v| -v).collect()).collect()
}

/// `(AIC, SIC) = (2n_p − 2l, n_p ln n − 2l)`.
pub fn information_criteria(n_p: u32, loglik: f64, n: usize) -> (f64, f64) {
    let n_p = f64::from(n_p);
    (2.0 * n_p - 2.0 * loglik, n_p * (n as f64).ln() - 2.0 * loglik)
}

/// How a fixed-k fit was started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    /// `a0 = √(min/2)`, `γ0 = sd(ln(x − a0²))`.
    Default,
    /// The neighbouring k's estimate.
    Warm,
    /// Supplied by the caller.
    Given,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub k: u32,
    pub n: usize,
    pub alpha_hat: f64,
    pub gamma_hat: f64,
    /// Optimizer variable, `alpha_hat = raw_a_hat²`.
    pub raw_a_hat: f64,
    pub loglik: f64,
    /// Inverse observed information over `(α, γ)`; `None` when the
    /// information is not positive definite.
    pub cov: Option<[[f64; 2]; 2]>,
    pub se_alpha: Option<f64>,
    pub se_gamma: Option<f64>,
    pub aic: f64,
    pub sic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub start: StartKind,
}

impl FitResult {
    pub fn params(&self) -> GelSParams {
        // alpha_hat and gamma_hat were validated when the fit was built
        GelSParams::new(self.alpha_hat, self.k, self.gamma_hat).expect("fitted parameters are valid")
    }

    pub fn neg_loglik(&self) -> f64 {
        -self.loglik
    }
}

/// `−l` over `(a, γ)` with `α = a²`, plus its analytic gradient.
struct NegLogLik<'a> {
    data: &'a Dataset,
    k: u32,
    alpha_limit: f64,
}

impl NegLogLik<'_> {
    fn params(&self, x: &[f64]) -> Option<GelSParams> {
        let alpha = x[0] * x[0];
        if !(alpha < self.alpha_limit) || !(x[1] > 0.0) {
            return None;
        }
        GelSParams::new(alpha, self.k, x[1]).ok()
    }
}

impl Objective for NegLogLik<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        match self.params(x) {
            Some(p) => -log_likelihood(&p, self.data),
            None => f64::INFINITY,
        }
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let p = self.params(x)?;
        let (da, dg) = score(&p, self.data).ok()?;
        Some(vec![-2.0 * x[0] * da, -dg])
    }
}

fn check_fit_data(data: &Dataset) -> Result<()> {
    if data.len() < 2 {
        return Err(Error::InvalidData(format!(
            "fitting needs at least 2 observations, got {}",
            data.len()
        )));
    }
    if data.min() == data.max() {
        return Err(Error::DegenerateData(format!(
            "all {} observations equal {}",
            data.len(),
            data.min()
        )));
    }
    Ok(())
}

/// Default start `(a0, γ0)`.
pub fn default_start(data: &Dataset) -> Result<(f64, f64)> {
    check_fit_data(data)?;
    let a0 = (0.5 * data.min()).sqrt();
    let shift = a0 * a0;
    let logs: Vec<f64> = data.values().iter().map(|&x| (x - shift).ln()).collect();
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let g0 = var.sqrt();
    if !(g0 > 0.0) || !g0.is_finite() {
        return Err(Error::DegenerateData("log-spread of the data is zero".into()));
    }
    Ok((a0, g0))
}

/// MLE of `(α, γ)` with `k` fixed. `init` is `(a0, γ0)` in optimizer
/// coordinates; `None` uses [`default_start`].
pub fn fit_given_k(data: &Dataset, k: u32, init: Option<(f64, f64)>) -> Result<FitResult> {
    let start = if init.is_some() {
        StartKind::Given
    } else {
        StartKind::Default
    };
    fit_from(data, k, init, start)
}

fn fit_from(data: &Dataset, k: u32, init: Option<(f64, f64)>, start: StartKind) -> Result<FitResult> {
    check_fit_data(data)?;
    let (a0, g0) = match init {
        Some(s) => s,
        None => default_start(data)?,
    };
    let objective = NegLogLik {
        data,
        k,
        alpha_limit: data.min() * (1.0 - BARRIER_MARGIN),
    };
    let run = minimize(&objective, &[a0, g0], &MinimizeSettings::default())?;

    let raw_a_hat = run.x_min[0].abs();
    let params = GelSParams::new(raw_a_hat * raw_a_hat, k, run.x_min[1])?;
    let loglik = log_likelihood(&params, data);
    let cov = observed_information(&params, data)
        .ok()
        .and_then(|info| spd_inverse(&info))
        .map(|c| [[c[0][0], c[0][1]], [c[1][0], c[1][1]]]);
    let (aic, sic) = information_criteria(GELS_N_PARAMS, loglik, data.len());
    Ok(FitResult {
        k,
        n: data.len(),
        alpha_hat: params.alpha(),
        gamma_hat: params.gamma(),
        raw_a_hat,
        loglik,
        cov,
        se_alpha: cov.map(|c| c[0][0].sqrt()),
        se_gamma: cov.map(|c| c[1][1].sqrt()),
        aic,
        sic,
        converged: run.converged,
        iterations: run.iterations,
        gradient_norm: run.gradient_norm,
        start,
    })
}

/// Starting points tried at each k of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitPolicy {
    /// Default start only.
    Default,
    /// Warm start from the previous k (default start at the first k).
    Warm,
    /// Both; the better converged fit is kept.
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFailure {
    pub k: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KGridTrace {
    /// One entry per k that produced a fit, in increasing k.
    pub per_k: Vec<FitResult>,
    /// Index into `per_k` of the largest converged log-likelihood.
    pub selected: usize,
    pub failures: Vec<KFailure>,
}

impl KGridTrace {
    pub fn best(&self) -> &FitResult {
        &self.per_k[self.selected]
    }

    pub fn get(&self, k: u32) -> Option<&FitResult> {
        self.per_k.iter().find(|f| f.k == k)
    }
}

fn better(a: &FitResult, b: &FitResult) -> bool {
    match (a.converged, b.converged) {
        (true, false) => true,
        (false, true) => false,
        _ => a.loglik > b.loglik,
    }
}

/// Fits every `k` in `k_min..=k_max` and selects the maximum-likelihood one;
/// ties go to the smaller `k`.
pub fn fit(data: &Dataset, k_min: u32, k_max: u32, policy: InitPolicy) -> Result<KGridTrace> {
    if k_min > k_max {
        return Err(Error::InvalidParameters(format!("empty k grid {k_min}..{k_max}")));
    }
    check_fit_data(data)?;
    let ks: Vec<u32> = (k_min..=k_max).collect();

    let default_fits: Vec<Option<Result<FitResult>>> = if policy == InitPolicy::Warm {
        ks.iter().map(|_| None).collect()
    } else {
        let run = |&k: &u32| Some(fit_from(data, k, None, StartKind::Default));
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            ks.par_iter().map(run).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            ks.iter().map(run).collect()
        }
    };

    let mut per_k = Vec::with_capacity(ks.len());
    let mut failures = Vec::new();
    let mut previous: Option<(f64, f64)> = None;
    for (&k, default_fit) in ks.iter().zip(default_fits) {
        let mut candidates = Vec::new();
        let mut errors = Vec::new();
        match default_fit {
            Some(Ok(f)) => candidates.push(f),
            Some(Err(e)) => errors.push(e.to_string()),
            None => {}
        }
        if policy != InitPolicy::Default {
            let warm = match previous {
                Some(s) => fit_from(data, k, Some(s), StartKind::Warm),
                None if policy == InitPolicy::Warm => fit_from(data, k, None, StartKind::Default),
                None => Err(Error::InvalidParameters("no warm start".into())),
            };
            match warm {
                Ok(f) => candidates.push(f),
                Err(e) if previous.is_some() || policy == InitPolicy::Warm => errors.push(e.to_string()),
                Err(_) => {}
            }
        }
        let chosen = candidates.into_iter().reduce(|a, b| if better(&b, &a) { b } else { a });
        match chosen {
            Some(f) => {
                if !f.converged {
                    failures.push(KFailure {
                        k,
                        message: format!("did not converge (gradient norm {:.3e})", f.gradient_norm),
                    });
                }
                previous = Some((f.raw_a_hat, f.gamma_hat));
                per_k.push(f);
            }
            None => failures.push(KFailure {
                k,
                message: errors.join("; "),
            }),
        }
    }

    let mut selected: Option<usize> = None;
    for (i, f) in per_k.iter().enumerate() {
        if f.converged && selected.map_or(true, |s| f.loglik > per_k[s].loglik) {
            selected = Some(i);
        }
    }
    match selected {
        Some(selected) => Ok(KGridTrace {
            per_k,
            selected,
            failures,
        }),
        None => Err(Error::AllFitsFailed(
            failures.iter().map(|f| format!("k={}: {}", f.k, f.message)).collect(),
        )),
    }
}

/// Symmetric Wald intervals `θ̂ ± z·se`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceIntervals {
    pub level: f64,
    pub z: f64,
    pub alpha_ci: (f64, f64),
    pub gamma_ci: (f64, f64),
}

impl ConfidenceIntervals {
    pub fn alpha_half_width(&self) -> f64 {
        0.5 * (self.alpha_ci.1 - self.alpha_ci.0)
    }

    pub fn gamma_half_width(&self) -> f64 {
        0.5 * (self.gamma_ci.1 - self.gamma_ci.0)
    }
}

pub fn confidence_intervals(fit: &FitResult, level: f64) -> Result<ConfidenceIntervals> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if !fit.converged {
        return Err(Error::UncertaintyUnavailable(format!(
            "fit at k={} did not converge",
            fit.k
        )));
    }
    let (Some(se_a), Some(se_g)) = (fit.se_alpha, fit.se_gamma) else {
        return Err(Error::UncertaintyUnavailable(format!(
            "observed information at k={} is not positive definite",
            fit.k
        )));
    };
    if !(se_a.is_finite() && se_g.is_finite()) {
        return Err(Error::UncertaintyUnavailable("non-finite standard error".into()));
    }
    let z = std_normal_quantile(0.5 + 0.5 * level);
    Ok(ConfidenceIntervals {
        level,
        z,
        alpha_ci: (fit.alpha_hat - z * se_a, fit.alpha_hat + z * se_a),
        gamma_ci: (fit.gamma_hat - z * se_g, fit.gamma_hat + z * se_g),
    })
}
