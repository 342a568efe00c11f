//! Monte Carlo parameter-recovery studies: sample from known parameters,
//! refit over a k grid, and check whether k is recovered and whether the
//! Wald intervals cover the truth.
//!
//! Replication `i` draws its sample with a sub-seed derived from
//! `(seed, i)`, so a study is reproducible regardless of thread count.

use serde::{Deserialize, Serialize};

use crate::distribution::GelSParams;
use crate::error::{Error, Result};
use crate::estimation::{confidence_intervals, fit, ConfidenceIntervals, Dataset, InitPolicy, KGridTrace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub name: String,
    pub true_params: GelSParams,
    pub n: usize,
    pub k_min: u32,
    pub k_max: u32,
    pub seed: u64,
    pub replications: usize,
    pub level: f64,
}

impl StudyConfig {
    /// Study I: `(α, k, γ) = (1, 2, 1)`, grid 0..6.
    pub fn study_i(n: usize, seed: u64) -> Self {
        Self::preset("I", 1.0, 2, 1.0, n, seed)
    }

    /// Study II: `(α, k, γ) = (2, 4, 0.5)`, grid 0..6.
    pub fn study_ii(n: usize, seed: u64) -> Self {
        Self::preset("II", 2.0, 4, 0.5, n, seed)
    }

    fn preset(name: &str, alpha: f64, k: u32, gamma: f64, n: usize, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            true_params: GelSParams::new(alpha, k, gamma).expect("preset parameters are valid"),
            n,
            k_min: 0,
            k_max: 6,
            seed,
            replications: 1,
            level: 0.95,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameters(format!(
                "sample size must be ≥ 2, got {}",
                self.n
            )));
        }
        if self.k_min > self.k_max {
            return Err(Error::InvalidParameters(format!(
                "empty k grid {}..{}",
                self.k_min, self.k_max
            )));
        }
        if self.replications == 0 {
            return Err(Error::InvalidParameters("replications must be ≥ 1".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidParameters(format!(
                "level must lie in (0, 1), got {}",
                self.level
            )));
        }
        Ok(())
    }

    fn true_k_in_grid(&self) -> bool {
        (self.k_min..=self.k_max).contains(&self.true_params.k())
    }
}

/// Seed for replication `index`.
pub fn sub_seed(seed: u64, index: usize) -> u64 {
    // SplitMix64 finalizer
    let mut z = seed.wrapping_add((index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerKRow {
    pub k: u32,
    pub alpha_hat: f64,
    pub gamma_hat: f64,
    pub loglik: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryFlags {
    pub k_recovered: bool,
    /// True α inside the interval at the true k.
    pub alpha_covered: bool,
    /// True γ inside the interval at the true k.
    pub gamma_covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub index: usize,
    pub seed: u64,
    pub per_k: Vec<PerKRow>,
    pub selected_k: Option<u32>,
    /// Intervals at the selected k.
    pub ci_selected: Option<ConfidenceIntervals>,
    /// Intervals at the true k, when it is in the grid.
    pub ci_true_k: Option<ConfidenceIntervals>,
    pub flags: RecoveryFlags,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub k_recovery_rate: f64,
    pub alpha_coverage: f64,
    pub gamma_coverage: f64,
    /// Mean `|γ̂ − γ|` at the true k.
    pub mean_abs_gamma_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub replications: Vec<ReplicationReport>,
    pub summary: StudySummary,
}

fn run_replication(config: &StudyConfig, index: usize) -> ReplicationReport {
    let seed = sub_seed(config.seed, index);
    let truth = &config.true_params;
    let mut errors = Vec::new();
    let trace: Option<KGridTrace> = truth
        .sample(config.n, seed)
        .and_then(|xs| Dataset::new(xs, format!("{} #{index}", config.name), format!("seed {seed}")))
        .and_then(|d| fit(&d, config.k_min, config.k_max, InitPolicy::Both))
        .map_err(|e| errors.push(e.to_string()))
        .ok();

    let Some(trace) = trace else {
        return ReplicationReport {
            index,
            seed,
            per_k: Vec::new(),
            selected_k: None,
            ci_selected: None,
            ci_true_k: None,
            flags: RecoveryFlags {
                k_recovered: false,
                alpha_covered: false,
                gamma_covered: false,
            },
            errors,
        };
    };
    errors.extend(trace.failures.iter().map(|f| format!("k={}: {}", f.k, f.message)));

    let per_k = trace
        .per_k
        .iter()
        .map(|f| PerKRow {
            k: f.k,
            alpha_hat: f.alpha_hat,
            gamma_hat: f.gamma_hat,
            loglik: f.loglik,
            converged: f.converged,
        })
        .collect();
    let best = trace.best();
    let ci_selected = confidence_intervals(best, config.level).ok();
    let ci_true_k = trace.get(truth.k()).and_then(|f| {
        confidence_intervals(f, config.level)
            .map_err(|e| errors.push(e.to_string()))
            .ok()
    });
    let covers = |ci: (f64, f64), v: f64| ci.0 <= v && v <= ci.1;
    let flags = RecoveryFlags {
        k_recovered: best.k == truth.k(),
        alpha_covered: ci_true_k.is_some_and(|c| covers(c.alpha_ci, truth.alpha())),
        gamma_covered: ci_true_k.is_some_and(|c| covers(c.gamma_ci, truth.gamma())),
    };
    ReplicationReport {
        index,
        seed,
        per_k,
        selected_k: Some(best.k),
        ci_selected,
        ci_true_k,
        flags,
        errors,
    }
}

/// Runs every replication; per-replication failures are recorded, not raised.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let indices: Vec<usize> = (0..config.replications).collect();
    #[cfg(feature = "parallel")]
    let replications: Vec<ReplicationReport> = {
        use rayon::prelude::*;
        indices.par_iter().map(|&i| run_replication(config, i)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let replications: Vec<ReplicationReport> = indices.iter().map(|&i| run_replication(config, i)).collect();

    let reps = replications.len() as f64;
    let rate =
        |pred: &dyn Fn(&ReplicationReport) -> bool| replications.iter().filter(|r| pred(r)).count() as f64 / reps;
    let true_k = config.true_params.k();
    let gamma_errors: Vec<f64> = replications
        .iter()
        .filter_map(|r| r.per_k.iter().find(|row| row.k == true_k))
        .map(|row| (row.gamma_hat - config.true_params.gamma()).abs())
        .collect();
    let summary = StudySummary {
        k_recovery_rate: rate(&|r| r.flags.k_recovered),
        alpha_coverage: rate(&|r| r.flags.alpha_covered),
        gamma_coverage: rate(&|r| r.flags.gamma_covered),
        mean_abs_gamma_error: if config.true_k_in_grid() && !gamma_errors.is_empty() {
            gamma_errors.iter().sum::<f64>() / gamma_errors.len() as f64
        } else {
            f64::NAN
        },
    };
    Ok(StudyReport {
        config: config.clone(),
        replications,
        summary,
    })
}
