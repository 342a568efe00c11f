use std::fmt::Write;

use serde::Serialize;

use gels_core::simulation::StudyReport;

pub trait Render: Serialize {
    fn text(&self) -> String;
    fn csv(&self) -> String;
}

fn csv_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, Serialize)]
pub struct Params {
    pub alpha: f64,
    pub k: u32,
    pub gamma: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub name: String,
    pub n: usize,
    pub min: f64,
    pub max: f64,
}

// ---- fit ----

#[derive(Debug, Clone, Serialize)]
pub struct FitRow {
    pub k: u32,
    pub raw_a_hat: f64,
    pub alpha_hat: f64,
    pub gamma_hat: f64,
    pub se_alpha: Option<f64>,
    pub se_gamma: Option<f64>,
    pub loglik: f64,
    pub neg_loglik: f64,
    pub aic: f64,
    pub sic: f64,
    pub converged: bool,
    pub selected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Intervals {
    pub level: f64,
    pub alpha: Interval,
    pub gamma: Interval,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub command: &'static str,
    pub dataset: DatasetInfo,
    pub k_min: u32,
    pub k_max: u32,
    pub n_p: u32,
    pub per_k: Vec<FitRow>,
    pub selected: FitRow,
    pub intervals: Option<Intervals>,
    pub interval_error: Option<String>,
    pub failures: Vec<String>,
}

impl Render for FitReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let d = &self.dataset;
        let _ = writeln!(s, "data: {} (n = {}, range {} .. {})", d.name, d.n, d.min, d.max);
        let _ = writeln!(
            s,
            "k grid {}..{}, AIC/SIC with n_p = {}",
            self.k_min, self.k_max, self.n_p
        );
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:>4} {:>10} {:>10} {:>9} {:>12} {:>10} {:>10}  conv",
            "k", "a", "alpha", "gamma", "-l", "AIC", "SIC"
        );
        for r in &self.per_k {
            let _ = writeln!(
                s,
                "{:>3}{} {:>10.4} {:>10.4} {:>9.4} {:>12.3} {:>10.2} {:>10.2}  {}",
                r.k,
                if r.selected { "*" } else { " " },
                r.raw_a_hat,
                r.alpha_hat,
                r.gamma_hat,
                r.neg_loglik,
                r.aic,
                r.sic,
                if r.converged { "yes" } else { "no" }
            );
        }
        let b = &self.selected;
        let _ = writeln!(s);
        let _ = writeln!(s, "selected k = {}", b.k);
        let se = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4}"));
        let _ = writeln!(
            s,
            "  alpha = {:.4}  (a = {:.4}, se {})",
            b.alpha_hat,
            b.raw_a_hat,
            se(b.se_alpha)
        );
        let _ = writeln!(s, "  gamma = {:.4}  (se {})", b.gamma_hat, se(b.se_gamma));
        let _ = writeln!(
            s,
            "  -l = {:.3}   AIC = {:.2}   SIC = {:.2}",
            b.neg_loglik, b.aic, b.sic
        );
        match (&self.intervals, &self.interval_error) {
            (Some(ci), _) => {
                let pct = 100.0 * ci.level;
                let _ = writeln!(s, "  {pct}% CI alpha: [{:.4}, {:.4}]", ci.alpha.lo, ci.alpha.hi);
                let _ = writeln!(s, "  {pct}% CI gamma: [{:.4}, {:.4}]", ci.gamma.lo, ci.gamma.hi);
            }
            (None, Some(e)) => {
                let _ = writeln!(s, "  intervals unavailable: {e}");
            }
            _ => {}
        }
        for f in &self.failures {
            let _ = writeln!(s, "  warning: {f}");
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::new();
        s.push_str("k,raw_a_hat,alpha_hat,gamma_hat,se_alpha,se_gamma,loglik,aic,sic,converged,selected\n");
        for r in &self.per_k {
            csv_row(
                &mut s,
                &[
                    r.k.to_string(),
                    r.raw_a_hat.to_string(),
                    r.alpha_hat.to_string(),
                    r.gamma_hat.to_string(),
                    opt(r.se_alpha),
                    opt(r.se_gamma),
                    r.loglik.to_string(),
                    r.aic.to_string(),
                    r.sic.to_string(),
                    r.converged.to_string(),
                    r.selected.to_string(),
                ],
            );
        }
        s
    }
}

// ---- stats ----

#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub command: &'static str,
    pub params: Params,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub mode: f64,
    pub median: f64,
}

impl Render for StatsReport {
    fn text(&self) -> String {
        let p = &self.params;
        let mut s = format!("GEL-S(alpha = {}, k = {}, gamma = {})\n", p.alpha, p.k, p.gamma);
        for (name, v) in [
            ("mean", self.mean),
            ("variance", self.variance),
            ("skewness", self.skewness),
            ("kurtosis", self.kurtosis),
            ("mode", self.mode),
            ("median", self.median),
        ] {
            let _ = writeln!(s, "  {name:<9} {v:.6}");
        }
        s
    }

    fn csv(&self) -> String {
        let p = &self.params;
        let mut s = String::from("alpha,k,gamma,mean,variance,skewness,kurtosis,mode,median\n");
        csv_row(
            &mut s,
            &[
                p.alpha,
                f64::from(p.k),
                p.gamma,
                self.mean,
                self.variance,
                self.skewness,
                self.kurtosis,
                self.mode,
                self.median,
            ]
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>(),
        );
        s
    }
}

// ---- quantile ----

#[derive(Debug, Clone, Serialize)]
pub struct QuantilePoint {
    pub p: f64,
    pub quantile: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantileReport {
    pub command: &'static str,
    pub params: Params,
    pub quantiles: Vec<QuantilePoint>,
}

impl Render for QuantileReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for q in &self.quantiles {
            let _ = writeln!(s, "q({}) = {:.6}", q.p, q.quantile);
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("p,quantile\n");
        for q in &self.quantiles {
            csv_row(&mut s, &[q.p.to_string(), q.quantile.to_string()]);
        }
        s
    }
}

// ---- sample ----

#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub command: &'static str,
    pub params: Params,
    pub seed: u64,
    pub n: usize,
    pub values: Vec<f64>,
}

impl Render for SampleReport {
    /// One value per line, directly readable by `gels fit`.
    fn text(&self) -> String {
        let p = &self.params;
        let mut s = format!(
            "# GEL-S(alpha = {}, k = {}, gamma = {}) seed {}\n# count: {}\n",
            p.alpha, p.k, p.gamma, self.seed, self.n
        );
        for v in &self.values {
            let _ = writeln!(s, "{v}");
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("value\n");
        for v in &self.values {
            let _ = writeln!(s, "{v}");
        }
        s
    }
}

// ---- simulate ----

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub command: &'static str,
    #[serde(flatten)]
    pub study: StudyReport,
}

impl Render for SimulateReport {
    fn text(&self) -> String {
        let c = &self.study.config;
        let t = &c.true_params;
        let mut s = format!(
            "study {}: alpha = {}, k = {}, gamma = {}; n = {}, k grid {}..{}, seed {}, {} replication(s)\n",
            c.name,
            t.alpha(),
            t.k(),
            t.gamma(),
            c.n,
            c.k_min,
            c.k_max,
            c.seed,
            c.replications
        );
        for rep in &self.study.replications {
            let _ = writeln!(s, "\nreplication {} (seed {})", rep.index, rep.seed);
            let _ = writeln!(s, "{:>4} {:>10} {:>10} {:>14}", "k", "alpha", "gamma", "l");
            for row in &rep.per_k {
                let mark = if Some(row.k) == rep.selected_k { "*" } else { " " };
                let _ = writeln!(
                    s,
                    "{:>3}{mark} {:>10.4} {:>10.4} {:>14.2}{}",
                    row.k,
                    row.alpha_hat,
                    row.gamma_hat,
                    row.loglik,
                    if row.converged { "" } else { "  (not converged)" }
                );
            }
            if let Some(ci) = &rep.ci_selected {
                let _ = writeln!(
                    s,
                    "  {}% CI at selected k: alpha {:.4} ± {:.4}, gamma {:.4} ± {:.4}",
                    100.0 * ci.level,
                    0.5 * (ci.alpha_ci.0 + ci.alpha_ci.1),
                    ci.alpha_half_width(),
                    0.5 * (ci.gamma_ci.0 + ci.gamma_ci.1),
                    ci.gamma_half_width()
                );
            }
            let f = rep.flags;
            let _ = writeln!(
                s,
                "  k recovered: {}  alpha covered: {}  gamma covered: {}",
                f.k_recovered, f.alpha_covered, f.gamma_covered
            );
            for e in &rep.errors {
                let _ = writeln!(s, "  warning: {e}");
            }
        }
        let m = &self.study.summary;
        let _ = writeln!(
            s,
            "\nsummary: k recovery {:.1}%, alpha coverage {:.1}%, gamma coverage {:.1}%, mean |gamma error| {:.5}",
            100.0 * m.k_recovery_rate,
            100.0 * m.alpha_coverage,
            100.0 * m.gamma_coverage,
            m.mean_abs_gamma_error
        );
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("replication,seed,k,alpha_hat,gamma_hat,loglik,converged,selected\n");
        for rep in &self.study.replications {
            for row in &rep.per_k {
                csv_row(
                    &mut s,
                    &[
                        rep.index.to_string(),
                        rep.seed.to_string(),
                        row.k.to_string(),
                        row.alpha_hat.to_string(),
                        row.gamma_hat.to_string(),
                        row.loglik.to_string(),
                        row.converged.to_string(),
                        (Some(row.k) == rep.selected_k).to_string(),
                    ],
                );
            }
        }
        s
    }
}

// ---- compare ----

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub model: String,
    /// `fitted` or `published`.
    pub source: &'static str,
    pub params: Vec<f64>,
    pub loglik: Option<f64>,
    /// Parameter count used by the reference table (equals 2 when there is none).
    pub n_p: u32,
    pub aic: f64,
    pub sic: f64,
    pub aic_np2: Option<f64>,
    pub sic_np2: Option<f64>,
    pub best_aic: bool,
    pub best_sic: bool,
    pub best_aic_np2: bool,
    pub best_sic_np2: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub command: &'static str,
    pub dataset: DatasetInfo,
    pub gels_k: u32,
    pub rows: Vec<CompareRow>,
    pub notes: Vec<String>,
}

impl Render for CompareReport {
    fn text(&self) -> String {
        let mut s = format!("data: {} (n = {})\n\n", self.dataset.name, self.dataset.n);
        let _ = writeln!(
            s,
            "{:<28} {:>4} {:>10} {:>10}   {:>10} {:>10}",
            "model", "n_p", "AIC", "SIC", "AIC(n_p=2)", "SIC(n_p=2)"
        );
        let flag = |b: bool| if b { "*" } else { " " };
        for r in &self.rows {
            let label = if r.source == "published" {
                format!("{} (published)", r.model)
            } else {
                r.model.clone()
            };
            let np2 = |v: Option<f64>, b: bool| v.map_or(format!("{:>11}", "-"), |x| format!("{x:>10.2}{}", flag(b)));
            let _ = writeln!(
                s,
                "{label:<28} {:>4} {:>9.2}{} {:>9.2}{}   {} {}",
                r.n_p,
                r.aic,
                flag(r.best_aic),
                r.sic,
                flag(r.best_sic),
                np2(r.aic_np2, r.best_aic_np2),
                np2(r.sic_np2, r.best_sic_np2),
            );
        }
        let _ = writeln!(s, "\n* best (lowest) in its column");
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from(
            "model,source,n_p,loglik,aic,sic,aic_np2,sic_np2,best_aic,best_sic,best_aic_np2,best_sic_np2\n",
        );
        for r in &self.rows {
            csv_row(
                &mut s,
                &[
                    r.model.clone(),
                    r.source.to_string(),
                    r.n_p.to_string(),
                    opt(r.loglik),
                    r.aic.to_string(),
                    r.sic.to_string(),
                    opt(r.aic_np2),
                    opt(r.sic_np2),
                    r.best_aic.to_string(),
                    r.best_sic.to_string(),
                    r.best_aic_np2.to_string(),
                    r.best_sic_np2.to_string(),
                ],
            );
        }
        s
    }
}

// ---- pdf-curve ----

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// `count / (n · width)`, comparable with the density.
    pub density: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveReport {
    pub command: &'static str,
    pub params: Params,
    /// `true` when the parameters were fitted to the input data.
    pub fitted: bool,
    pub curve: Vec<CurvePoint>,
    pub histogram: Option<Vec<HistogramBin>>,
}

impl Render for CurveReport {
    fn text(&self) -> String {
        let p = &self.params;
        let mut s = format!(
            "# GEL-S(alpha = {}, k = {}, gamma = {}){}\n# x density\n",
            p.alpha,
            p.k,
            p.gamma,
            if self.fitted { " fitted" } else { "" }
        );
        for c in &self.curve {
            let _ = writeln!(s, "{:.6} {:.8}", c.x, c.density);
        }
        if let Some(h) = &self.histogram {
            let _ = writeln!(s, "\n# lo hi count density");
            for b in h {
                let _ = writeln!(s, "{:.6} {:.6} {} {:.8}", b.lo, b.hi, b.count, b.density);
            }
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = String::from("kind,x_lo,x_hi,count,density\n");
        for c in &self.curve {
            csv_row(
                &mut s,
                &[
                    "pdf".into(),
                    c.x.to_string(),
                    c.x.to_string(),
                    String::new(),
                    c.density.to_string(),
                ],
            );
        }
        for b in self.histogram.iter().flatten() {
            csv_row(
                &mut s,
                &[
                    "hist".into(),
                    b.lo.to_string(),
                    b.hi.to_string(),
                    b.count.to_string(),
                    b.density.to_string(),
                ],
            );
        }
        s
    }
}
