//! Two-parameter baselines for model comparison: log-normal, gamma, Weibull
//! and generalized exponential (GE, cdf `(1 − e^{−λx})^a`).
//!
//! The log-normal MLE is closed form; the others are fitted with
//! [`crate::optimize::minimize`] over the logs of their parameters.

use serde::{Deserialize, Serialize};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::estimation::information_criteria;
use crate::optimize::{minimize, MinimizeSettings};
use crate::special::LN_SQRT_2PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `(μ, σ)`
    LogNormal2,
    /// `(shape, rate)`
    Gamma,
    /// `(shape, scale)`
    Weibull,
    /// `(a, λ)`
    GenExponential,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::LogNormal2,
        Family::Gamma,
        Family::Weibull,
        Family::GenExponential,
    ];

    /// Row label used in comparison tables.
    pub fn label(self) -> &'static str {
        match self {
            Family::LogNormal2 => "Log-normal",
            Family::Gamma => "Gamma",
            Family::Weibull => "Weibull",
            Family::GenExponential => "GE",
        }
    }

    pub fn param_names(self) -> [&'static str; 2] {
        match self {
            Family::LogNormal2 => ["mu", "sigma"],
            Family::Gamma => ["shape", "rate"],
            Family::Weibull => ["shape", "scale"],
            Family::GenExponential => ["a", "lambda"],
        }
    }

    pub fn n_params(self) -> u32 {
        2
    }

    /// Log-density; parameters are on their natural scale.
    pub fn log_pdf(self, params: [f64; 2], x: f64) -> f64 {
        let [p, q] = params;
        if !(x > 0.0) {
            return f64::NEG_INFINITY;
        }
        match self {
            Family::LogNormal2 => {
                let z = (x.ln() - p) / q;
                -x.ln() - q.ln() - LN_SQRT_2PI - 0.5 * z * z
            }
            Family::Gamma => p * q.ln() - libm::lgamma(p) + (p - 1.0) * x.ln() - q * x,
            Family::Weibull => {
                let r = x / q;
                p.ln() - q.ln() + (p - 1.0) * r.ln() - r.powf(p)
            }
            Family::GenExponential => {
                let t = q * x;
                p.ln() + q.ln() - t + (p - 1.0) * (-(-t).exp()).ln_1p()
            }
        }
    }

    pub fn log_likelihood(self, params: [f64; 2], data: &Dataset) -> f64 {
        if !params.iter().all(|v| v.is_finite()) || (self != Family::LogNormal2 && params[0] <= 0.0) || params[1] <= 0.0
        {
            return f64::NEG_INFINITY;
        }
        data.values().iter().map(|&x| self.log_pdf(params, x)).sum()
    }

    pub fn fit(self, data: &Dataset) -> Result<CompetitorFit> {
        match self {
            Family::LogNormal2 => fit_lognormal2(data),
            Family::Gamma => fit_gamma(data),
            Family::Weibull => fit_weibull(data),
            Family::GenExponential => fit_gen_exponential(data),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitorFit {
    pub family: Family,
    pub params: [f64; 2],
    pub loglik: f64,
    pub n: usize,
    pub n_p: u32,
    pub aic: f64,
    pub sic: f64,
    pub converged: bool,
}

impl CompetitorFit {
    fn new(family: Family, params: [f64; 2], data: &Dataset, converged: bool) -> Self {
        let loglik = family.log_likelihood(params, data);
        let n_p = family.n_params();
        let (aic, sic) = information_criteria(n_p, loglik, data.len());
        Self {
            family,
            params,
            loglik,
            n: data.len(),
            n_p,
            aic,
            sic,
            converged,
        }
    }

    /// `(AIC, SIC)` with a different parameter count, e.g. a published
    /// table's convention.
    pub fn criteria_with(&self, n_p: u32) -> (f64, f64) {
        information_criteria(n_p, self.loglik, self.n)
    }
}

fn log_moments(data: &Dataset) -> (f64, f64) {
    let n = data.len() as f64;
    let mu = data.values().iter().map(|x| x.ln()).sum::<f64>() / n;
    let var = data.values().iter().map(|x| (x.ln() - mu).powi(2)).sum::<f64>() / n;
    (mu, var)
}

fn moments(data: &Dataset) -> (f64, f64) {
    let n = data.len() as f64;
    let mean = data.values().iter().sum::<f64>() / n;
    let var = data.values().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

fn check(data: &Dataset) -> Result<()> {
    if data.len() < 2 {
        return Err(Error::InvalidData(format!(
            "need at least 2 observations, got {}",
            data.len()
        )));
    }
    if data.min() == data.max() {
        return Err(Error::DegenerateData(format!("all observations equal {}", data.min())));
    }
    Ok(())
}

/// Closed form: `μ̂ = mean(ln x)`, `σ̂² = mean((ln x − μ̂)²)`.
pub fn fit_lognormal2(data: &Dataset) -> Result<CompetitorFit> {
    check(data)?;
    let (mu, var) = log_moments(data);
    if !(var > 0.0) {
        return Err(Error::DegenerateData("log-variance is zero".into()));
    }
    Ok(CompetitorFit::new(Family::LogNormal2, [mu, var.sqrt()], data, true))
}

/// Numerical MLE over `(ln p, ln q)` from each start; best converged wins.
fn fit_numeric(family: Family, data: &Dataset, starts: &[[f64; 2]]) -> Result<CompetitorFit> {
    check(data)?;
    let objective = |z: &[f64]| -family.log_likelihood([z[0].exp(), z[1].exp()], data);
    let mut best: Option<CompetitorFit> = None;
    let mut last_err = None;
    for s in starts {
        let z0 = [s[0].ln(), s[1].ln()];
        match minimize(&objective, &z0, &MinimizeSettings::default()) {
            Ok(run) => {
                let fit = CompetitorFit::new(family, [run.x_min[0].exp(), run.x_min[1].exp()], data, run.converged);
                let replace = match &best {
                    None => true,
                    Some(b) => {
                        (fit.converged && !b.converged) || (fit.converged == b.converged && fit.loglik > b.loglik)
                    }
                };
                if replace {
                    best = Some(fit);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Domain("no start point".into())))
}

pub fn fit_gamma(data: &Dataset) -> Result<CompetitorFit> {
    check(data)?;
    let (mean, var) = moments(data);
    fit_numeric(
        Family::Gamma,
        data,
        &[[mean * mean / var, mean / var], [1.0, 1.0 / mean]],
    )
}

pub fn fit_weibull(data: &Dataset) -> Result<CompetitorFit> {
    check(data)?;
    let (mean, var) = moments(data);
    let cv = var.sqrt() / mean;
    fit_numeric(Family::Weibull, data, &[[cv.powf(-1.086), mean], [1.0, mean]])
}

pub fn fit_gen_exponential(data: &Dataset) -> Result<CompetitorFit> {
    check(data)?;
    let (mean, var) = moments(data);
    fit_numeric(
        Family::GenExponential,
        data,
        &[[mean * mean / var, mean / var], [1.0, 1.0 / mean]],
    )
}

/// Fits all four families; each entry fails independently.
pub fn fit_all(data: &Dataset) -> Vec<(Family, Result<CompetitorFit>)> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Family::ALL.par_iter().map(|&f| (f, f.fit(data))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        Family::ALL.iter().map(|&f| (f, f.fit(data))).collect()
    }
}
