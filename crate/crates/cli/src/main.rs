//! `bigboss`: validate and solve Big Boss games, run sampling experiments,
//! and extrapolate fitted log-normal parameters to larger games.
//!
//! Exit codes: 0 success, 1 domain failure (invalid game, exhausted
//! generator, too few points), 2 I/O or parse failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bigboss::experiment::{
    read_estimates, run_experiment, ExperimentConfig, ExperimentError, PredictionModel, SummaryRow,
    SIGMA_WINDOW,
};
use bigboss::game::coalition_label;
use bigboss::gamefile::{read_game, FileError};
use bigboss::stats::StatsError;
use bigboss::{psv, Allocation, BigBossReport, Execution, Game};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "bigboss",
    version,
    about = "Projected Shapley allocations for Big Boss games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Big Boss axioms B1-B3 for a game file.
    Validate {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Shapley value, τ-value, τ-diagonal and its projected Shapley point.
    Solve {
        path: PathBuf,
        /// Big Boss label; defaults to the file's `big_boss` or the unique
        /// qualifying player.
        #[arg(long)]
        boss: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also write the machine-readable result to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample ρ_v per player count, fit log-normals, write CSV/JSON/SVG.
    Experiment {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        mu_scale: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Output directory, overriding the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Predict μ̂, σ̂ and P(X ≤ 1) for `n` players from a CSV of estimates
    /// (columns n, mu_hat, sigma_hat; a summary.csv works).
    Predict {
        n: usize,
        estimates: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// A failure mapped onto the documented exit codes.
enum Failure {
    Domain(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Input(m) => m,
        }
    }
}

fn load(path: &Path) -> Result<Game, Failure> {
    // any problem with the file itself, including an ill-formed table, is
    // an input failure; B1-B3 are checked afterwards
    read_game(path).map_err(|e: FileError| Failure::Input(e.to_string()))
}

fn experiment_failure(e: ExperimentError) -> Failure {
    match e {
        ExperimentError::Generation(_) | ExperimentError::Stats(_) => {
            Failure::Domain(e.to_string())
        }
        _ => Failure::Input(e.to_string()),
    }
}

/// Up to six decimals, trailing zeros dropped.
fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn vector(xs: &[f64]) -> String {
    format!(
        "({})",
        xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn report_json(r: &BigBossReport) -> Value {
    json!({
        "is_big_boss": r.is_big_boss,
        "big_boss": r.boss,
        "b1_monotone": r.b1_monotone,
        "b2_veto": r.b2_veto,
        "b3_union": r.b3_union,
        "marginals": r.marginals,
        "violation": r.first_violation.as_ref().map(|v| json!({
            "axiom": v.axiom.to_string(),
            "coalition": coalition_label(v.coalition),
            "message": v.to_string(),
        })),
    })
}

fn cmd_validate(path: &Path, format: Format) -> Result<String, Failure> {
    let g = load(path)?;
    let r = g
        .validate_big_boss()
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let out = match format {
        Format::Machine => format!("{:#}\n", report_json(&r)),
        Format::Text => {
            let boss = match (r.is_big_boss, r.boss) {
                (true, Some(b)) => b.to_string(),
                (false, Some(b)) => format!("none (checked against player {b})"),
                _ => "none".into(),
            };
            let mut s = format!(
                "big boss: {boss}; B1 {}; B2 {}; B3 {}\nM(v) = {}\n",
                verdict(r.b1_monotone),
                verdict(r.b2_veto),
                verdict(r.b3_union),
                vector(&r.marginals)
            );
            if let Some(v) = &r.first_violation {
                let _ = writeln!(s, "{v}");
            }
            s
        }
    };
    if r.is_big_boss {
        Ok(out)
    } else {
        // the report itself is the useful output, so it goes to stdout too
        print!("{out}");
        Err(Failure::Domain("not a Big Boss game".into()))
    }
}

fn resolve_boss(g: &Game, boss: Option<usize>) -> Result<usize, Failure> {
    if let Some(b) = boss.or(g.big_boss()) {
        return Ok(b);
    }
    let r = g
        .validate_big_boss()
        .map_err(|e| Failure::Domain(e.to_string()))?;
    match (r.is_big_boss, r.boss) {
        (true, Some(b)) => Ok(b),
        _ => Err(Failure::Domain(match r.first_violation {
            Some(v) => format!("not a Big Boss game: {v}"),
            None => "not a Big Boss game".into(),
        })),
    }
}

fn cmd_solve(
    path: &Path,
    boss: Option<usize>,
    format: Format,
    out: Option<&Path>,
) -> Result<String, Failure> {
    let g = load(path)?;
    let boss = resolve_boss(&g, boss)?;
    let r = psv(&g, boss).map_err(|e| Failure::Domain(e.to_string()))?;
    let convex = g.is_convex();
    let machine = json!({
        "big_boss": boss,
        "marginals": r.diagonal.marginals(),
        "shapley": r.shapley.payoffs(),
        "tau": r.tau.payoffs(),
        "e0": r.diagonal.e0.payoffs(),
        "e1": r.diagonal.e1.payoffs(),
        "rho": r.rho,
        "alpha": r.alpha,
        "clipped": r.clipped,
        "psv": r.allocation.payoffs(),
        "gap_boss": r.gap_boss,
        "gap_weak_max": finite_or_null(r.gap_weak_max),
        "convex": convex,
    });
    if let Some(p) = out {
        fs::write(p, format!("{machine:#}\n"))
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(match format {
        Format::Machine => format!("{machine:#}\n"),
        Format::Text => {
            let row = |name: &str, a: &Allocation| format!("{name:<8}{}\n", vector(a.payoffs()));
            let mut s = format!("big boss: {boss}\n");
            s += &format!("{:<8}{}\n", "M(v)", vector(r.diagonal.marginals()));
            s += &row("shapley", &r.shapley);
            s += &row("tau", &r.tau);
            s += &row("e0", &r.diagonal.e0);
            s += &row("e1", &r.diagonal.e1);
            s += &format!(
                "rho     {}\nalpha   {}{}\n",
                num(r.rho),
                num(r.alpha),
                if r.clipped { " (clipped)" } else { "" }
            );
            s += &row("psv", &r.allocation);
            s += &format!(
                "gaps    boss {}, weak max {}\n",
                num(r.gap_boss),
                num(r.gap_weak_max)
            );
            s += &format!("convex: {convex}\n");
            s
        }
    })
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn summary_text(rows: &[SummaryRow], dir: &Path) -> String {
    let mut s = format!(
        "{:>3} {:>6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>8} {:>9}\n",
        "n", "m", "mu_hat", "sigma_hat", "E", "V", "P_le_1", "emp_frac", "ks_d", "ks_p"
    );
    for r in rows {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.5}")).unwrap_or_else(|| "-".into());
        let fit = r.fit.as_ref();
        let _ = write!(
            s,
            "{:>3} {:>6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9.5} {:>8} {:>9}",
            r.n,
            r.m,
            f(fit.map(|x| x.mu_hat)),
            f(fit.map(|x| x.sigma_hat)),
            f(fit.map(|x| x.mean_hat)),
            f(fit.map(|x| x.var_hat)),
            f(fit.map(|x| x.p_le_1)),
            r.empirical_frac,
            f(r.ks.map(|k| k.d_stat)),
            r.ks.map(|k| format!("{:.2e}", k.p_value))
                .unwrap_or_else(|| "-".into()),
        );
        if r.low_sample {
            s += "  low-sample";
        }
        if let Some(e) = &r.fit_error {
            let _ = write!(s, "  no fit: {e}");
        }
        s += "\n";
    }
    let _ = writeln!(s, "artifacts written to {}", dir.display());
    s
}

struct Overrides {
    seed: Option<u64>,
    bins: Option<usize>,
    mu_scale: Option<u64>,
    samples: Option<usize>,
    out: Option<PathBuf>,
}

fn cmd_experiment(config: &Path, o: Overrides, format: Format) -> Result<String, Failure> {
    let mut cfg = ExperimentConfig::load(config).map_err(experiment_failure)?;
    cfg.rng_seed = o.seed.unwrap_or(cfg.rng_seed);
    cfg.bins = o.bins.unwrap_or(cfg.bins);
    cfg.mu_scale = o.mu_scale.unwrap_or(cfg.mu_scale);
    cfg.m = o.samples.unwrap_or(cfg.m);
    if let Some(out) = o.out {
        cfg.output_dir = out;
    } else if cfg.output_dir.is_relative() {
        // relative output dirs are resolved against the config's location
        if let Some(parent) = config.parent() {
            cfg.output_dir = parent.join(&cfg.output_dir);
        }
    }
    cfg.validate().map_err(|e| Failure::Input(e.to_string()))?;
    let report = run_experiment(&cfg, Execution::default()).map_err(experiment_failure)?;
    Ok(match format {
        Format::Machine => {
            let rows = serde_json::to_value(&report.rows).expect("summary rows serialize");
            format!("{rows:#}\n")
        }
        Format::Text => summary_text(&report.rows, &cfg.output_dir),
    })
}

fn cmd_predict(n: usize, estimates: &Path, format: Format) -> Result<String, Failure> {
    let file = fs::File::open(estimates)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", estimates.display())))?;
    let rows = read_estimates(file).map_err(experiment_failure)?;
    if n < 3 {
        return Err(Failure::Domain(format!("n = {n} (need n >= 3)")));
    }
    let model = PredictionModel::fit(&rows).map_err(|e| match e {
        ExperimentError::Stats(StatsError::InsufficientPoints(_)) => Failure::Domain(e.to_string()),
        other => experiment_failure(other),
    })?;
    if !(model.sigma.predicted > 0.0) {
        return Err(Failure::Domain("smoothed sigma_hat is not positive".into()));
    }
    let p = model.predict(n);
    let reg = model.regression;
    Ok(match format {
        Format::Machine => format!(
            "{:#}\n",
            json!({
                "n": p.n,
                "mu_hat": p.mu_hat,
                "sigma_hat": p.sigma_hat,
                "p_le_1": p.p_le_1,
                "slope": reg.slope,
                "intercept": reg.intercept,
                "r_squared": reg.r_squared,
            })
        ),
        Format::Text => format!(
            "n = {}\nmu_hat = {:.5}  (mu_hat(n) = {:.5} ln n {} {:.5}, R^2 = {:.4})\nsigma_hat = {:.5}  \
             (trailing mean of the last {} values)\nP(X <= 1) = {:.5}\n",
            p.n,
            p.mu_hat,
            reg.slope,
            if reg.intercept < 0.0 { "-" } else { "+" },
            reg.intercept.abs(),
            reg.r_squared,
            p.sigma_hat,
            SIGMA_WINDOW.min(rows.len()),
            p.p_le_1
        ),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { path, format } => cmd_validate(&path, format),
        Command::Solve {
            path,
            boss,
            format,
            out,
        } => cmd_solve(&path, boss, format, out.as_deref()),
        Command::Experiment {
            config,
            seed,
            bins,
            mu_scale,
            samples,
            out,
            format,
        } => cmd_experiment(
            &config,
            Overrides {
                seed,
                bins,
                mu_scale,
                samples,
                out,
            },
            format,
        ),
        Command::Predict {
            n,
            estimates,
            format,
        } => cmd_predict(n, &estimates, format),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
