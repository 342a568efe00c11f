//! The GEL-S distribution proper.
//!
//! Substituting `y = x − α` and expanding `(y + α)^k` binomially turns the
//! density into a finite mixture of log-normals: component `i` has
//! `ln(x − α) ~ N((i+1)γ², γ²)` and weight proportional to
//! `C(k,i)·α^{k−i}·exp((i+1)²γ²/2)`. The normalizing constant, the cdf, the
//! survival function and every raw moment follow from that identity, and
//! [`Mixture`] carries the normalized log-weights so repeated cdf evaluations
//! (quantiles, sampling) do not rebuild them.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootfind::{expand_bracket, solve_bracketed, Bracket, SolveOptions};
use crate::special::{
    log_series_sum, log_series_terms, std_normal_cdf, std_normal_quantile, std_normal_sf, LN_SQRT_2PI,
};

/// Parameter triple `(α, k, γ)`: support `(α, ∞)`, polynomial degree `k` and
/// log-scale `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct GelSParams {
    alpha: f64,
    k: u32,
    gamma: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    k: u32,
    gamma: f64,
}

impl TryFrom<RawParams> for GelSParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        GelSParams::new(raw.alpha, raw.k, raw.gamma)
    }
}

/// Mean, variance, skewness, (non-excess) kurtosis, mode and median.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub mode: f64,
    pub median: f64,
}

impl GelSParams {
    pub fn new(alpha: f64, k: u32, gamma: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParameters(format!(
                "alpha must be finite and ≥ 0, got {alpha}"
            )));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "gamma must be finite and > 0, got {gamma}"
            )));
        }
        Ok(Self { alpha, k, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `ln C = −(ln γ + ½ ln 2π + ln S(α, γ, k))`.
    pub fn log_norm_const(&self) -> f64 {
        -(self.gamma.ln() + LN_SQRT_2PI + log_series_sum(self.alpha, self.gamma, self.k).value)
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.log_pdf_with(self.log_norm_const(), x)
    }

    pub(crate) fn log_pdf_with(&self, log_c: f64, x: f64) -> f64 {
        if !(x > self.alpha) {
            return f64::NEG_INFINITY;
        }
        let lz = (x - self.alpha).ln();
        let poly = if self.k == 0 { 0.0 } else { f64::from(self.k) * x.ln() };
        log_c + poly - lz * lz / (2.0 * self.gamma * self.gamma)
    }

    /// Density; exactly 0 for `x ≤ α`.
    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        Mixture::new(self).cdf(x)
    }

    /// Upper tail `P(X > x)`, evaluated directly rather than as `1 − F`.
    pub fn sf(&self, x: f64) -> f64 {
        Mixture::new(self).sf(x)
    }

    /// `ln E[X^n] = ln S(α, γ, n+k) − ln S(α, γ, k)`; always finite.
    pub fn log_moment(&self, n: u32) -> f64 {
        if n == 0 {
            return 0.0;
        }
        log_series_sum(self.alpha, self.gamma, n + self.k).value - log_series_sum(self.alpha, self.gamma, self.k).value
    }

    /// Raw moment `E[X^n]`, or [`Error::MomentOverflow`] when it exceeds `f64::MAX`.
    pub fn moment(&self, n: u32) -> Result<f64> {
        let log_value = self.log_moment(n);
        let value = log_value.exp();
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::MomentOverflow { order: n, log_value })
        }
    }

    pub fn mean(&self) -> Result<f64> {
        self.moment(1)
    }

    /// Moments assembled through the raw-to-central identities, plus mode and median.
    pub fn summary(&self) -> Result<DistributionSummary> {
        let m1 = self.moment(1)?;
        let m2 = self.moment(2)?;
        let m3 = self.moment(3)?;
        let m4 = self.moment(4)?;
        let variance = m2 - m1 * m1;
        if !(variance > 0.0) {
            return Err(Error::MomentOverflow {
                order: 2,
                log_value: self.log_moment(2),
            });
        }
        let sd = variance.sqrt();
        let skewness = (m3 - 3.0 * m1 * variance - m1.powi(3)) / sd.powi(3);
        let kurtosis =
            (m4 - 4.0 * m1 * sd.powi(3) * skewness - 6.0 * m1 * m1 * variance - m1.powi(4)) / (variance * variance);
        Ok(DistributionSummary {
            mean: m1,
            variance,
            skewness,
            kurtosis,
            mode: self.mode()?,
            median: self.quantile(0.5)?,
        })
    }

    /// The unique maximizer of the density, the root of
    /// `x·ln(x − α) = kγ²(x − α)` above `1 + α`.
    pub fn mode(&self) -> Result<f64> {
        if self.k == 0 {
            return Ok(1.0 + self.alpha);
        }
        let (alpha, slope) = (self.alpha, f64::from(self.k) * self.gamma * self.gamma);
        let g = |x: f64| x * (x - alpha).ln() - slope * (x - alpha);
        let lo = 1.0 + alpha;
        let hi0 = alpha + (slope + 1.0).exp();
        let bracket = expand_bracket(g, lo, hi0.max(lo + 1.0), 60)?;
        solve_bracketed(g, bracket, SolveOptions::default())
    }

    /// The `p`-quantile, the unique solution of `F(q) = p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        Mixture::new(self).quantile(p)
    }

    /// `n` draws by inverse-transform sampling, reproducible for a given seed.
    ///
    /// Uniforms come from ChaCha20 seeded with `seed` (see
    /// [`uniform_stream`]); the quantile inversions may run in parallel but
    /// the output order is fixed by the stream.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let mix = Mixture::new(self);
        let uniforms = uniform_stream(seed, n);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            uniforms.par_iter().map(|&u| mix.quantile(u)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            uniforms.iter().map(|&u| mix.quantile(u)).collect()
        }
    }
}

/// `n` uniforms on the open interval `(0, 1)` from ChaCha20 seeded by `seed`.
///
/// Each draw takes the top 53 bits of a `u64`; zeros are redrawn.
pub fn uniform_stream(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u > 0.0 {
            out.push(u);
        }
    }
    out
}

/// Log-normal mixture view of a GEL-S law.
#[derive(Debug, Clone)]
pub(crate) struct Mixture {
    alpha: f64,
    gamma: f64,
    k: u32,
    /// `(weight, centre)` per component with non-zero weight; the weights sum to 1.
    components: Vec<(f64, f64)>,
}

impl Mixture {
    pub(crate) fn new(params: &GelSParams) -> Self {
        let GelSParams { alpha, k, gamma } = *params;
        let terms = log_series_terms(alpha, gamma, k);
        let ln_s = crate::special::log_sum_exp(&terms);
        let g2 = gamma * gamma;
        let components = terms
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > f64::NEG_INFINITY)
            .map(|(i, &t)| ((t - ln_s).exp(), (i + 1) as f64 * g2))
            .filter(|&(w, _)| w > 0.0)
            .collect();
        Self {
            alpha,
            gamma,
            k,
            components,
        }
    }

    fn cdf_log_offset(&self, t: f64) -> f64 {
        let s: f64 = self
            .components
            .iter()
            .map(|&(w, c)| w * std_normal_cdf((t - c) / self.gamma))
            .sum();
        s.min(1.0)
    }

    fn sf_log_offset(&self, t: f64) -> f64 {
        let s: f64 = self
            .components
            .iter()
            .map(|&(w, c)| w * std_normal_sf((t - c) / self.gamma))
            .sum();
        s.min(1.0)
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        if !(x > self.alpha) {
            return 0.0;
        }
        self.cdf_log_offset((x - self.alpha).ln())
    }

    pub(crate) fn sf(&self, x: f64) -> f64 {
        if !(x > self.alpha) {
            return 1.0;
        }
        self.sf_log_offset((x - self.alpha).ln())
    }

    /// Solves for `t = ln(q − α)`.
    ///
    /// Every component cdf is squeezed between those of the first
    /// (`centre γ²`) and last (`centre (k+1)γ²`) components, so
    /// `γ² + γ·Φ⁻¹(p)` and `(k+1)γ² + γ·Φ⁻¹(p)` bracket the root. The upper
    /// half is solved against the survival function to keep tail precision.
    pub(crate) fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {p}")));
        }
        let g = self.gamma;
        let z = std_normal_quantile(p);
        let margin = 1e-6 * (1.0 + z.abs()) * g;
        let lowest = self.components.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let highest = self.components.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        let mut lo = lowest + g * z - margin;
        let hi0 = highest.max((self.k + 1) as f64 * g * g) + g * z + margin;

        let upper = p > 0.5;
        let target = if upper { 1.0 - p } else { p };
        let f = |t: f64| {
            if upper {
                target - self.sf_log_offset(t)
            } else {
                self.cdf_log_offset(t) - target
            }
        };
        let mut step = g.max(1.0);
        while f(lo) > 0.0 {
            lo -= step;
            step *= 2.0;
        }
        let hi = hi0.max(lo + g);
        let bracket = if f(hi) >= 0.0 {
            Bracket::new(lo, hi, f(lo), f(hi))?
        } else {
            expand_bracket(f, lo, hi, 60)?
        };
        let opts = SolveOptions {
            ftol: 1e-12 * target,
            ..SolveOptions::default()
        };
        let t = solve_bracketed(f, bracket, opts)?;
        Ok(self.alpha + t.exp())
    }
}
