//! `gels`: fit, summarize, sample and simulate the GEL-S distribution.

mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gels_core::competitors::fit_all;
use gels_core::datasets::reference_rows_for;
use gels_core::estimation::{confidence_intervals, fit, FitResult, GELS_N_PARAMS};
use gels_core::simulation::run_study;
use gels_core::{Dataset, GelSParams, InitPolicy, StudyConfig};

use input::{load, CliError, CliResult};
use report::*;

#[derive(Parser)]
#[command(
    name = "gels",
    version,
    about = "GEL-S distribution: fitting, statistics, sampling and simulation"
)]
struct Cli {
    /// Output format.
    #[arg(long, short, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (0 = all cores).
    #[arg(long, env = "GELS_THREADS", default_value_t = 0, global = true)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Fit GEL-S over a grid of k and report the maximum-likelihood model.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Confidence level for the Wald intervals.
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        /// Starting points tried at each k.
        #[arg(long, value_enum, default_value_t = Init::Both)]
        init: Init,
    },
    /// Mean, variance, skewness, kurtosis, mode and median.
    Stats(ParamArgs),
    /// Quantiles at one or more probabilities.
    Quantile {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated probabilities in (0, 1).
        #[arg(long, short, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        p: Vec<f64>,
    },
    /// Draw a reproducible sample.
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, short)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a parameter-recovery study.
    Simulate {
        #[arg(long, value_enum)]
        study: Study,
        #[arg(long, short, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        replications: usize,
        #[arg(long, default_value_t = 0)]
        kmin: u32,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Compare GEL-S with log-normal, gamma, Weibull and GE by AIC/SIC.
    Compare {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Density curve over [alpha + eps, q(0.999)], optionally with a histogram.
    PdfCurve {
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        /// Data for the histogram; parameters are fitted when not given.
        #[command(flatten)]
        data: OptionalDataArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Histogram bins (needs data).
        #[arg(long)]
        bins: Option<usize>,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long)]
    k: u32,
    #[arg(long, allow_negative_numbers = true)]
    gamma: f64,
}

impl ParamArgs {
    fn build(&self) -> CliResult<GelSParams> {
        Ok(GelSParams::new(self.alpha, self.k, self.gamma)?)
    }
}

#[derive(Args)]
struct DataArgs {
    /// Input file, one value per line (`-` for stdin).
    #[arg(required_unless_present = "dataset", conflicts_with = "dataset")]
    input: Option<PathBuf>,
    /// Use a bundled data set: ball_bearings, leukaemia, strength_10mm.
    #[arg(long)]
    dataset: Option<String>,
    /// Zero-based column of a delimited file.
    #[arg(long)]
    column: Option<usize>,
}

impl DataArgs {
    fn load(&self) -> CliResult<Dataset> {
        load(self.input.as_deref(), self.dataset.as_deref(), self.column)
    }
}

#[derive(Args)]
struct OptionalDataArgs {
    #[arg(conflicts_with = "dataset")]
    input: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    column: Option<usize>,
}

impl OptionalDataArgs {
    fn load(&self) -> CliResult<Option<Dataset>> {
        if self.input.is_none() && self.dataset.is_none() {
            return Ok(None);
        }
        load(self.input.as_deref(), self.dataset.as_deref(), self.column).map(Some)
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0)]
    kmin: u32,
    #[arg(long, default_value_t = 30)]
    kmax: u32,
}

impl GridArgs {
    fn check(&self) -> CliResult<()> {
        if self.kmin > self.kmax {
            return Err(CliError::Usage(format!(
                "--kmin {} exceeds --kmax {}",
                self.kmin, self.kmax
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Default,
    Warm,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Study {
    #[value(name = "I", alias = "i", alias = "1")]
    I,
    #[value(name = "II", alias = "ii", alias = "2")]
    II,
}

fn check_level(level: f64) -> CliResult<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--level must lie in (0, 1), got {level}")))
    }
}

fn params_out(p: &GelSParams) -> Params {
    Params {
        alpha: p.alpha(),
        k: p.k(),
        gamma: p.gamma(),
    }
}

fn dataset_info(d: &Dataset) -> DatasetInfo {
    DatasetInfo {
        name: d.name.clone(),
        n: d.len(),
        min: d.min(),
        max: d.max(),
    }
}

fn fit_row(f: &FitResult, selected: bool) -> FitRow {
    FitRow {
        k: f.k,
        raw_a_hat: f.raw_a_hat,
        alpha_hat: f.alpha_hat,
        gamma_hat: f.gamma_hat,
        se_alpha: f.se_alpha,
        se_gamma: f.se_gamma,
        loglik: f.loglik,
        neg_loglik: -f.loglik,
        aic: f.aic,
        sic: f.sic,
        converged: f.converged,
        selected,
    }
}

fn cmd_fit(data: &DataArgs, grid: &GridArgs, level: f64, init: Init) -> CliResult<FitReport> {
    grid.check()?;
    check_level(level)?;
    let d = data.load()?;
    let policy = match init {
        Init::Default => InitPolicy::Default,
        Init::Warm => InitPolicy::Warm,
        Init::Both => InitPolicy::Both,
    };
    let trace = fit(&d, grid.kmin, grid.kmax, policy)?;
    let best = trace.best();
    let (intervals, interval_error) = match confidence_intervals(best, level) {
        Ok(ci) => (
            Some(Intervals {
                level,
                alpha: Interval {
                    lo: ci.alpha_ci.0,
                    hi: ci.alpha_ci.1,
                },
                gamma: Interval {
                    lo: ci.gamma_ci.0,
                    hi: ci.gamma_ci.1,
                },
            }),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(FitReport {
        command: "fit",
        dataset: dataset_info(&d),
        k_min: grid.kmin,
        k_max: grid.kmax,
        n_p: GELS_N_PARAMS,
        per_k: trace
            .per_k
            .iter()
            .enumerate()
            .map(|(i, f)| fit_row(f, i == trace.selected))
            .collect(),
        selected: fit_row(best, true),
        intervals,
        interval_error,
        failures: trace
            .failures
            .iter()
            .map(|f| format!("k={}: {}", f.k, f.message))
            .collect(),
    })
}

fn cmd_stats(args: &ParamArgs) -> CliResult<StatsReport> {
    let p = args.build()?;
    let s = p.summary()?;
    Ok(StatsReport {
        command: "stats",
        params: params_out(&p),
        mean: s.mean,
        variance: s.variance,
        skewness: s.skewness,
        kurtosis: s.kurtosis,
        mode: s.mode,
        median: s.median,
    })
}

fn cmd_quantile(args: &ParamArgs, probs: &[f64]) -> CliResult<QuantileReport> {
    let p = args.build()?;
    if let Some(bad) = probs.iter().find(|&&v| !(v > 0.0 && v < 1.0)) {
        return Err(CliError::Usage(format!("probabilities must lie in (0, 1), got {bad}")));
    }
    let quantiles = probs
        .iter()
        .map(|&pr| {
            Ok(QuantilePoint {
                p: pr,
                quantile: p.quantile(pr)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(QuantileReport {
        command: "quantile",
        params: params_out(&p),
        quantiles,
    })
}

fn cmd_sample(args: &ParamArgs, n: usize, seed: u64) -> CliResult<SampleReport> {
    let p = args.build()?;
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    Ok(SampleReport {
        command: "sample",
        params: params_out(&p),
        seed,
        n,
        values: p.sample(n, seed)?,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    study: Study,
    n: usize,
    seed: u64,
    replications: usize,
    kmin: u32,
    kmax: u32,
    level: f64,
) -> CliResult<SimulateReport> {
    let mut cfg = match study {
        Study::I => StudyConfig::study_i(n, seed),
        Study::II => StudyConfig::study_ii(n, seed),
    };
    cfg.replications = replications;
    cfg.k_min = kmin;
    cfg.k_max = kmax;
    cfg.level = level;
    Ok(SimulateReport {
        command: "simulate",
        study: run_study(&cfg)?,
    })
}

fn flag_best<F, S>(rows: &mut [CompareRow], get: F, set: S)
where
    F: Fn(&CompareRow) -> Option<f64>,
    S: Fn(&mut CompareRow),
{
    let best = rows.iter().filter_map(&get).fold(f64::INFINITY, f64::min);
    for r in rows.iter_mut() {
        if get(r) == Some(best) {
            set(r);
        }
    }
}

fn cmd_compare(data: &DataArgs, grid: &GridArgs) -> CliResult<CompareReport> {
    grid.check()?;
    let d = data.load()?;
    let trace = fit(&d, grid.kmin, grid.kmax, InitPolicy::Both)?;
    let best = trace.best();
    let published = reference_rows_for(&d.name);
    let published_np = |model: &str| published.iter().find(|r| r.model == model).map(|r| r.n_p);

    let mut rows = vec![CompareRow {
        model: "GEL-S".into(),
        source: "fitted",
        params: vec![best.alpha_hat, f64::from(best.k), best.gamma_hat],
        loglik: Some(best.loglik),
        n_p: GELS_N_PARAMS,
        aic: best.aic,
        sic: best.sic,
        aic_np2: Some(best.aic),
        sic_np2: Some(best.sic),
        best_aic: false,
        best_sic: false,
        best_aic_np2: false,
        best_sic_np2: false,
    }];
    let mut notes = Vec::new();
    for (family, result) in fit_all(&d) {
        match result {
            Ok(f) => {
                let n_p = published_np(family.label()).unwrap_or(f.n_p);
                let (aic, sic) = f.criteria_with(n_p);
                if n_p != f.n_p {
                    notes.push(format!(
                        "{} is a {}-parameter fit; the reference table counts n_p = {n_p}",
                        family.label(),
                        f.n_p
                    ));
                }
                if !f.converged {
                    notes.push(format!("{} fit did not converge", family.label()));
                }
                rows.push(CompareRow {
                    model: family.label().into(),
                    source: "fitted",
                    params: f.params.to_vec(),
                    loglik: Some(f.loglik),
                    n_p,
                    aic,
                    sic,
                    aic_np2: Some(f.aic),
                    sic_np2: Some(f.sic),
                    best_aic: false,
                    best_sic: false,
                    best_aic_np2: false,
                    best_sic_np2: false,
                });
            }
            Err(e) => notes.push(format!("{} fit failed: {e}", family.label())),
        }
    }
    for r in published.iter().filter(|r| r.model != "GEL-S") {
        rows.push(CompareRow {
            model: r.model.clone(),
            source: "published",
            params: Vec::new(),
            loglik: None,
            n_p: r.n_p,
            aic: r.aic,
            sic: r.sic,
            aic_np2: None,
            sic_np2: None,
            best_aic: false,
            best_sic: false,
            best_aic_np2: false,
            best_sic_np2: false,
        });
    }
    flag_best(&mut rows, |r| Some(r.aic), |r| r.best_aic = true);
    flag_best(&mut rows, |r| Some(r.sic), |r| r.best_sic = true);
    flag_best(&mut rows, |r| r.aic_np2, |r| r.best_aic_np2 = true);
    flag_best(&mut rows, |r| r.sic_np2, |r| r.best_sic_np2 = true);
    Ok(CompareReport {
        command: "compare",
        dataset: dataset_info(&d),
        gels_k: best.k,
        rows,
        notes,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_pdf_curve(
    alpha: Option<f64>,
    k: Option<u32>,
    gamma: Option<f64>,
    data: &OptionalDataArgs,
    grid: &GridArgs,
    points: usize,
    bins: Option<usize>,
) -> CliResult<CurveReport> {
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    if bins == Some(0) {
        return Err(CliError::Usage("--bins must be positive".into()));
    }
    let d = data.load()?;
    let (params, fitted) = match (alpha, k, gamma, &d) {
        (Some(a), Some(k), Some(g), _) => (GelSParams::new(a, k, g)?, false),
        (None, None, None, Some(d)) => {
            grid.check()?;
            (fit(d, grid.kmin, grid.kmax, InitPolicy::Both)?.best().params(), true)
        }
        (None, None, None, None) => return Err(CliError::Usage("give --alpha --k --gamma, or data to fit".into())),
        _ => return Err(CliError::Usage("--alpha, --k and --gamma go together".into())),
    };
    if bins.is_some() && d.is_none() {
        return Err(CliError::Usage("--bins needs input data".into()));
    }

    let lo = params.alpha() + 1e-6 * params.alpha().max(1.0);
    let hi = params.quantile(0.999)?;
    let curve = (0..points)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            CurvePoint {
                x,
                density: params.pdf(x),
            }
        })
        .collect();

    let histogram = match (bins, &d) {
        (Some(b), Some(d)) => {
            let (min, max) = (d.min(), d.max());
            let width = (max - min) / b as f64;
            let mut counts = vec![0usize; b];
            for &x in d.values() {
                let i = (((x - min) / width) as usize).min(b - 1);
                counts[i] += 1;
            }
            let n = d.len() as f64;
            Some(
                counts
                    .into_iter()
                    .enumerate()
                    .map(|(i, count)| HistogramBin {
                        lo: min + i as f64 * width,
                        hi: min + (i + 1) as f64 * width,
                        count,
                        density: count as f64 / (n * width),
                    })
                    .collect(),
            )
        }
        _ => None,
    };
    Ok(CurveReport {
        command: "pdf-curve",
        params: params_out(&params),
        fitted,
        curve,
        histogram,
    })
}

fn render<R: Render>(r: &R, format: Format) -> CliResult<String> {
    Ok(match format {
        Format::Text => r.text(),
        Format::Csv => r.csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r)
                .map_err(|e| CliError::Numerical(format!("cannot serialize output: {e}")))?;
            s.push('\n');
            s
        }
    })
}

fn run(cli: &Cli) -> CliResult<String> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure threads: {e}")))?;
    }
    let f = cli.format;
    match &cli.command {
        Command::Fit {
            data,
            grid,
            level,
            init,
        } => render(&cmd_fit(data, grid, *level, *init)?, f),
        Command::Stats(p) => render(&cmd_stats(p)?, f),
        Command::Quantile { params, p } => render(&cmd_quantile(params, p)?, f),
        Command::Sample { params, n, seed } => render(&cmd_sample(params, *n, *seed)?, f),
        Command::Simulate {
            study,
            n,
            seed,
            replications,
            kmin,
            kmax,
            level,
        } => render(
            &cmd_simulate(*study, *n, *seed, *replications, *kmin, *kmax, *level)?,
            f,
        ),
        Command::Compare { data, grid } => render(&cmd_compare(data, grid)?, f),
        Command::PdfCurve {
            alpha,
            k,
            gamma,
            data,
            grid,
            points,
            bins,
        } => render(&cmd_pdf_curve(*alpha, *k, *gamma, data, grid, *points, *bins)?, f),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gels: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
