//! Experiment orchestration: for each player count, sample ρ_v, fit a
//! log-normal, run the KS test, and write CSV/JSON/SVG artifacts.
//! Also the cross-n prediction step driven by a table of fitted estimates.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{run_sample_with, GenConfig, GenError, SampleRun, DEFAULT_MAX_REJECTS};
use crate::par::Execution;
use crate::stats::{
    fit_sample, ks_test, log_regression, moving_average_predict, predict, KsResult, LogNormalFit,
    MovingAverage, Prediction, RegressionFit, SampleFit, StatsError, DEFAULT_BINS,
};
use crate::svg::histogram_svg;

/// Below this sample size statistics are reported but flagged.
pub const LOW_SAMPLE_THRESHOLD: usize = 100;

/// Trailing window for smoothing σ̂ across player counts.
pub const SIGMA_WINDOW: usize = 3;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Generation(#[from] GenError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("cannot build thread pool: {0}")]
    ThreadPool(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_max_rejects() -> u32 {
    DEFAULT_MAX_REJECTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    pub m: usize,
    pub mu_scale: u64,
    pub rng_seed: u64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    pub output_dir: PathBuf,
    /// Consecutive B3 rejections tolerated per sample before giving up.
    #[serde(default = "default_max_rejects")]
    pub max_rejects: u32,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_list.is_empty() {
            return Err(ExperimentError::InvalidConfig("n_list is empty".into()));
        }
        if self.m == 0 || self.mu_scale == 0 || self.bins == 0 || self.max_rejects == 0 {
            return Err(ExperimentError::InvalidConfig(
                "m, mu_scale, bins and max_rejects must be positive".into(),
            ));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 3) {
            return Err(ExperimentError::InvalidConfig(format!(
                "n = {n} (need n >= 3)"
            )));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|e| ExperimentError::Parse(e.to_string()))
    }

    /// Generator config for one player count. Each n gets its own master
    /// seed so runs for different n do not share streams.
    pub fn gen_config(&self, n: usize) -> GenConfig {
        let seed = self
            .rng_seed
            .wrapping_add((n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        GenConfig {
            max_rejects: self.max_rejects,
            ..GenConfig::new(n, self.mu_scale, seed)
        }
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub m: usize,
    pub fit: Option<LogNormalFit>,
    pub mle: Option<LogNormalFit>,
    pub empirical_frac: f64,
    pub ks: Option<KsResult>,
    pub low_sample: bool,
    pub rejected: u64,
    /// Why the fit is missing, when it is.
    pub fit_error: Option<String>,
}

impl SummaryRow {
    fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let fit = self.fit.as_ref();
        vec![
            self.n.to_string(),
            self.m.to_string(),
            opt(fit.map(|f| f.mu_hat)),
            opt(fit.map(|f| f.sigma_hat)),
            opt(fit.map(|f| f.mean_hat)),
            opt(fit.map(|f| f.var_hat)),
            opt(fit.map(|f| f.p_le_1)),
            self.empirical_frac.to_string(),
            opt(self.ks.map(|k| k.d_stat)),
            opt(self.ks.map(|k| k.p_value)),
        ]
    }
}

pub const SUMMARY_HEADER: [&str; 10] = [
    "n",
    "m",
    "mu_hat",
    "sigma_hat",
    "E",
    "V",
    "P_le_1",
    "empirical_frac",
    "ks_d",
    "ks_p",
];

#[derive(Debug, Clone, PartialEq)]
pub struct NOutcome {
    pub run: SampleRun,
    pub fit: Option<SampleFit>,
    pub row: SummaryRow,
}

/// Samples and fits for one player count, without touching the filesystem.
pub fn analyse_n(
    cfg: &ExperimentConfig,
    n: usize,
    exec: Execution,
) -> Result<NOutcome, ExperimentError> {
    let run = run_sample_with(&cfg.gen_config(n), cfg.m, exec)?;
    let (fit, fit_error) = match fit_sample(&run.rhos, cfg.bins) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let ks = match &fit {
        Some(f) => Some(ks_test(&run.rhos, f.lsq.mu_hat, f.lsq.sigma_hat)?),
        None => None,
    };
    let row = SummaryRow {
        n,
        m: cfg.m,
        fit: fit.as_ref().map(|f| f.lsq.clone()),
        mle: fit.as_ref().map(|f| f.mle.clone()),
        empirical_frac: run.fraction_le_one(),
        ks,
        low_sample: cfg.m < LOW_SAMPLE_THRESHOLD,
        rejected: run.rejected,
        fit_error,
    };
    Ok(NOutcome { run, fit, row })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

/// Runs the whole experiment and writes every artifact under
/// `cfg.output_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    exec: Execution,
) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for &n in &cfg.n_list {
        let outcome = analyse_n(cfg, n, exec)?;

        let csv_path = dir.join(format!("samples_n{n}.csv"));
        let file = fs::File::create(&csv_path).map_err(io_err(&csv_path))?;
        outcome.run.write_csv(file)?;
        files.push(csv_path);

        let meta_path = dir.join(format!("samples_n{n}.meta.json"));
        let file = fs::File::create(&meta_path).map_err(io_err(&meta_path))?;
        outcome.run.write_metadata(file)?;
        files.push(meta_path);

        if let Some(fit) = &outcome.fit {
            let svg_path = dir.join(format!("hist_n{n}.svg"));
            let title = format!("n = {n}, m = {}", cfg.m);
            fs::write(
                &svg_path,
                histogram_svg(&title, &fit.histogram, Some(&fit.lsq)),
            )
            .map_err(io_err(&svg_path))?;
            files.push(svg_path);
        }
        rows.push(outcome.row);
    }

    let summary_path = dir.join("summary.csv");
    write_summary_csv(&summary_path, &rows)?;
    files.push(summary_path);

    let json_path = dir.join("summary.json");
    let json =
        serde_json::to_string_pretty(&rows).map_err(|e| ExperimentError::Parse(e.to_string()))?;
    fs::write(&json_path, json).map_err(io_err(&json_path))?;
    files.push(json_path);

    Ok(ExperimentReport { rows, files })
}

/// Runs the experiment inside a dedicated pool of `threads` workers.
#[cfg(feature = "parallel")]
pub fn run_experiment_on_threads(
    cfg: &ExperimentConfig,
    threads: usize,
) -> Result<ExperimentReport, ExperimentError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ExperimentError::ThreadPool(e.to_string()))?;
    pool.install(|| run_experiment(cfg, Execution::Parallel))
}

fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<(), ExperimentError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    write_summary(file, rows).map_err(|e| ExperimentError::Parse(e.to_string()))
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for row in rows {
        w.write_record(row.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// `(n, μ̂, σ̂)` per player count, the input to the prediction step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub n: usize,
    pub mu_hat: f64,
    pub sigma_hat: f64,
}

/// Reads a CSV with at least the columns `n`, `mu_hat`, `sigma_hat` (the
/// summary report qualifies). Rows with an empty fit are skipped.
pub fn read_estimates<R: std::io::Read>(input: R) -> Result<Vec<Estimate>, ExperimentError> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| ExperimentError::Parse(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| ExperimentError::Parse(format!("missing column {name:?}")))
    };
    let (ci, cm, cs) = (col("n")?, col("mu_hat")?, col("sigma_hat")?);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| ExperimentError::Parse(e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        if field(cm).is_empty() || field(cs).is_empty() {
            continue;
        }
        let parse = |i: usize| {
            field(i)
                .parse::<f64>()
                .map_err(|_| ExperimentError::Parse(format!("bad number {:?}", field(i))))
        };
        let n = field(ci)
            .parse::<usize>()
            .map_err(|_| ExperimentError::Parse(format!("bad n {:?}", field(ci))))?;
        out.push(Estimate {
            n,
            mu_hat: parse(cm)?,
            sigma_hat: parse(cs)?,
        });
    }
    out.sort_by_key(|e| e.n);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionModel {
    pub regression: RegressionFit,
    pub sigma: MovingAverage,
}

impl PredictionModel {
    /// Logarithmic regression of μ̂ and trailing moving average of σ̂,
    /// both ordered by n.
    pub fn fit(estimates: &[Estimate]) -> Result<Self, ExperimentError> {
        let mut sorted = estimates.to_vec();
        sorted.sort_by_key(|e| e.n);
        let points: Vec<(usize, f64)> = sorted.iter().map(|e| (e.n, e.mu_hat)).collect();
        let regression = log_regression(&points)?;
        let sigmas: Vec<f64> = sorted.iter().map(|e| e.sigma_hat).collect();
        let sigma = moving_average_predict(&sigmas, SIGMA_WINDOW.min(sigmas.len()))?;
        Ok(PredictionModel { regression, sigma })
    }

    pub fn predict(&self, n: usize) -> Prediction {
        predict(n, &self.regression, self.sigma.predicted)
    }
}
