//! Random Big Boss games built layer by layer, and Monte-Carlo samples of
//! the projection parameter ρ_v over them.
//!
//! Player 1 is always the boss and every coalition without it is worth 0.
//! For sample element `j` a scale μ is drawn from `[1, mu_scale]`, then
//! `v({1}) ~ U[1, μ]` and each boss coalition of size `k >= 2` is drawn
//! from `U[L, L + μ]`, where `L` is the largest worth among boss coalitions
//! of size `k - 1`. All draws are integers, inclusive at both ends. Draws that
//! fail the union condition (B3) are discarded and redrawn.
//!
//! Each sample element owns a ChaCha8 stream keyed by `(rng_seed, j)`, so a
//! run is reproducible regardless of how elements are spread over threads.

use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Game, GameError};
use crate::par::{try_map_indexed, Execution};
use crate::psv::TauDiagonal;
use crate::solutions::shapley;

pub const DEFAULT_MAX_REJECTS: u32 = 10_000;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("sample {sample_index}: {attempts} consecutive draws failed the union condition")]
    RejectionBudgetExhausted { sample_index: u64, attempts: u32 },
    #[error("sample {sample_index}: generated game failed validation: {reason}")]
    InvalidOutput { sample_index: u64, reason: String },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// How the per-layer increment and the singleton range are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layering {
    /// Draw μ from `[1, mu_scale]` per sample; `v({1}) ~ U[1, μ]`, layers
    /// widen by μ.
    SeedScaled,
    /// `v({1}) ~ U[1, singleton_max]`, layers widen by a fixed `increment`.
    Fixed { singleton_max: u64, increment: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub mu_scale: u64,
    pub rng_seed: u64,
    pub max_rejects: u32,
    pub layering: Layering,
}

impl GenConfig {
    pub fn new(n: usize, mu_scale: u64, rng_seed: u64) -> Self {
        GenConfig {
            n,
            mu_scale,
            rng_seed,
            max_rejects: DEFAULT_MAX_REJECTS,
            layering: Layering::SeedScaled,
        }
    }

    /// Three players, `v({1}) ~ U[1, 100]`, every layer widened by 100.
    pub fn three_player_fixed(rng_seed: u64) -> Self {
        GenConfig {
            n: 3,
            mu_scale: 100,
            rng_seed,
            max_rejects: DEFAULT_MAX_REJECTS,
            layering: Layering::Fixed {
                singleton_max: 100,
                increment: 100,
            },
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n < 3 {
            return Err(GenError::InvalidConfig(format!(
                "n = {} (need n >= 3)",
                self.n
            )));
        }
        if self.n > crate::game::MAX_PLAYERS {
            return Err(GameError::CapacityExceeded(self.n).into());
        }
        if self.mu_scale < 1 {
            return Err(GenError::InvalidConfig("mu_scale must be >= 1".into()));
        }
        if self.max_rejects < 1 {
            return Err(GenError::InvalidConfig("max_rejects must be >= 1".into()));
        }
        if let Layering::Fixed { singleton_max, .. } = self.layering {
            if singleton_max < 1 {
                return Err(GenError::InvalidConfig("singleton_max must be >= 1".into()));
            }
        }
        Ok(())
    }
}

/// Boss coalitions grouped by size; `layers[k]` holds the masks of size
/// `k + 1` that contain player 1, ascending.
#[derive(Debug, Clone)]
pub struct LayerPlan {
    n: usize,
    layers: Vec<Vec<usize>>,
}

impl LayerPlan {
    pub fn new(n: usize) -> Self {
        let mut layers = vec![Vec::new(); n];
        for mask in (1..1usize << n).step_by(2) {
            layers[mask.count_ones() as usize - 1].push(mask);
        }
        LayerPlan { n, layers }
    }
}

fn sample_rng(seed: u64, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    rng
}

fn draw_table(cfg: &GenConfig, plan: &LayerPlan, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (singleton_max, increment) = match cfg.layering {
        Layering::SeedScaled => {
            let mu = rng.random_range(1..=cfg.mu_scale);
            (mu, mu)
        }
        Layering::Fixed {
            singleton_max,
            increment,
        } => (singleton_max, increment),
    };
    let mut values = vec![0.0; 1 << plan.n];
    let mut floor: u64 = rng.random_range(1..=singleton_max);
    values[1] = floor as f64;
    for layer in &plan.layers[1..] {
        let mut top = floor;
        for &mask in layer {
            let w = rng.random_range(floor..=floor + increment);
            values[mask] = w as f64;
            top = top.max(w);
        }
        floor = top;
    }
    values
}

/// Game plus the number of draws discarded before it was accepted.
pub fn generate_counted(
    cfg: &GenConfig,
    plan: &LayerPlan,
    sample_index: u64,
) -> Result<(Game, u32), GenError> {
    let mut rng = sample_rng(cfg.rng_seed, sample_index);
    for attempt in 0..cfg.max_rejects {
        let values = draw_table(cfg, plan, &mut rng);
        let game = Game::from_table(cfg.n, values)?.with_big_boss(1)?;
        let report = game.validate_big_boss()?;
        if report.is_big_boss {
            return Ok((game, attempt));
        }
        if !(report.b1_monotone && report.b2_veto) {
            return Err(GenError::InvalidOutput {
                sample_index,
                reason: report
                    .first_violation
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            });
        }
    }
    Err(GenError::RejectionBudgetExhausted {
        sample_index,
        attempts: cfg.max_rejects,
    })
}

/// Deterministic game for sample element `sample_index`.
pub fn generate_bbg(cfg: &GenConfig, sample_index: u64) -> Result<Game, GenError> {
    cfg.validate()?;
    generate_counted(cfg, &LayerPlan::new(cfg.n), sample_index).map(|(g, _)| g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRun {
    pub config: GenConfig,
    pub m: usize,
    pub rhos: Vec<f64>,
    /// Total draws discarded across the run.
    pub rejected: u64,
    /// RNG stream id used by each sample element.
    pub streams: Vec<u64>,
}

/// Sidecar record written next to a sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMetadata {
    pub n: usize,
    pub m: usize,
    pub mu_scale: u64,
    pub rng_seed: u64,
    pub rejected: u64,
}

impl SampleRun {
    pub fn metadata(&self) -> SampleMetadata {
        SampleMetadata {
            n: self.config.n,
            m: self.m,
            mu_scale: self.config.mu_scale,
            rng_seed: self.config.rng_seed,
            rejected: self.rejected,
        }
    }

    /// `#{ρ <= 1} / m`.
    pub fn fraction_le_one(&self) -> f64 {
        self.rhos.iter().filter(|&&r| r <= 1.0).count() as f64 / self.m as f64
    }

    pub fn mean(&self) -> f64 {
        self.rhos.iter().sum::<f64>() / self.m as f64
    }

    /// `sample_index,rho` CSV, one row per element.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), GenError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["sample_index", "rho"])?;
        for (i, rho) in self.streams.iter().zip(&self.rhos) {
            w.write_record([i.to_string(), rho.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_metadata<W: Write>(&self, out: W) -> Result<(), GenError> {
        serde_json::to_writer_pretty(out, &self.metadata())?;
        Ok(())
    }
}

/// ρ_v of one generated game, plus its rejection count.
fn sample_rho(cfg: &GenConfig, plan: &LayerPlan, index: u64) -> Result<(f64, u32), GenError> {
    let (game, rejected) = generate_counted(cfg, plan, index)?;
    let diagonal = TauDiagonal::new(&game, 1)?;
    let rho = diagonal.projection_parameter(&shapley(&game));
    Ok((rho, rejected))
}

pub fn run_sample(cfg: &GenConfig, m: usize) -> Result<SampleRun, GenError> {
    run_sample_with(cfg, m, Execution::default())
}

pub fn run_sample_with(cfg: &GenConfig, m: usize, exec: Execution) -> Result<SampleRun, GenError> {
    cfg.validate()?;
    if m < 1 {
        return Err(GenError::InvalidConfig("sample size must be >= 1".into()));
    }
    let plan = LayerPlan::new(cfg.n);
    let draws = try_map_indexed(m, exec, |j| sample_rho(cfg, &plan, j as u64))?;
    let rejected = draws.iter().map(|&(_, r)| u64::from(r)).sum();
    Ok(SampleRun {
        config: cfg.clone(),
        m,
        rhos: draws.into_iter().map(|(rho, _)| rho).collect(),
        rejected,
        streams: (0..m as u64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_plan_groups_boss_coalitions() {
        let plan = LayerPlan::new(3);
        assert_eq!(
            plan.layers,
            vec![vec![0b001], vec![0b011, 0b101], vec![0b111]]
        );
    }

    #[test]
    fn unit_scale_forces_singleton() {
        let cfg = GenConfig::new(4, 1, 9);
        for j in 0..20 {
            let g = generate_bbg(&cfg, j).unwrap();
            assert_eq!(g.worth(1), 1.0);
        }
    }

    #[test]
    fn outputs_are_big_boss_games() {
        let cfg = GenConfig::new(5, 100, 3);
        for j in 0..200 {
            let g = generate_bbg(&cfg, j).unwrap();
            assert!(g.validate_big_boss().unwrap().is_big_boss);
            for s in (0..32usize).filter(|s| s & 1 == 0) {
                assert_eq!(g.worth(s), 0.0);
            }
            assert!(g.values().iter().all(|w| w.fract() == 0.0));
        }
    }

    #[test]
    fn layers_respect_floor() {
        let cfg = GenConfig::three_player_fixed(5);
        for j in 0..100 {
            let g = generate_bbg(&cfg, j).unwrap();
            let v1 = g.worth(0b001);
            assert!((1.0..=100.0).contains(&v1));
            for pair in [0b011, 0b101] {
                assert!(g.worth(pair) >= v1 && g.worth(pair) <= v1 + 100.0);
            }
            let top = g.worth(0b011).max(g.worth(0b101));
            assert!(g.worth(0b111) >= top && g.worth(0b111) <= top + 100.0);
        }
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            GenConfig::new(2, 10, 0).validate(),
            Err(GenError::InvalidConfig(_))
        ));
        assert!(matches!(
            GenConfig::new(3, 0, 0).validate(),
            Err(GenError::InvalidConfig(_))
        ));
        let mut cfg = GenConfig::new(3, 10, 0);
        cfg.max_rejects = 0;
        assert!(cfg.validate().is_err());
        assert!(matches!(
            run_sample(&GenConfig::new(3, 10, 0), 0),
            Err(GenError::InvalidConfig(_))
        ));
    }

    #[test]
    fn rejection_budget() {
        // with a budget of one draw some sample element eventually fails B3
        let mut cfg = GenConfig::new(6, 1000, 11);
        cfg.max_rejects = 1;
        let plan = LayerPlan::new(6);
        let failed = (0..2000).find_map(|j| generate_counted(&cfg, &plan, j).err());
        assert!(matches!(
            failed,
            Some(GenError::RejectionBudgetExhausted { attempts: 1, .. })
        ));
    }

    #[test]
    fn deterministic_across_execution_modes() {
        let cfg = GenConfig::new(5, 100, 42);
        let a = run_sample_with(&cfg, 300, Execution::Sequential).unwrap();
        let b = run_sample_with(&cfg, 300, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rhos.len(), 300);
        assert!(a.rhos.iter().all(|&r| r >= 0.5 - 1e-9));
    }

    #[test]
    fn csv_layout() {
        let run = run_sample(&GenConfig::new(3, 100, 1), 3).unwrap();
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "sample_index,rho");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
        let mut meta = Vec::new();
        run.write_metadata(&mut meta).unwrap();
        let parsed: SampleMetadata = serde_json::from_slice(&meta).unwrap();
        assert_eq!(parsed, run.metadata());
    }
}
