//! The τ-diagonal of a Big Boss game and the projection of the Shapley
//! value onto it.
//!
//! The diagonal runs from `e0` (boss takes `v(N)`, weak players nothing) to
//! `e1` (every weak player gets its marginal contribution `M_i`). Its points
//! are `(1-ρ)·e0 + ρ·e1` for `ρ ∈ [0, 1]`; `ρ = ½` is the τ-value. The
//! projected Shapley value (PSV) is the diagonal point closest to φ in the
//! Euclidean norm, parameterised by `α = min(ρ_v, 1)`.

use crate::game::{Game, GameError, TOLERANCE};
use crate::solutions::{diagonal_point, shapley, Allocation};

#[derive(Debug, Clone, PartialEq)]
pub struct TauDiagonal {
    pub e0: Allocation,
    pub e1: Allocation,
    pub boss: usize,
    grand: f64,
    marginals: Vec<f64>,
}

impl TauDiagonal {
    pub fn new(g: &Game, boss: usize) -> Result<Self, GameError> {
        let marginals = g.require_big_boss(boss)?;
        Ok(Self::from_parts(g.grand_worth(), boss, marginals))
    }

    fn from_parts(grand: f64, boss: usize, marginals: Vec<f64>) -> Self {
        TauDiagonal {
            e0: diagonal_point(grand, boss, &marginals, 0.0),
            e1: diagonal_point(grand, boss, &marginals, 1.0),
            boss,
            grand,
            marginals,
        }
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    /// `Σ M_i` over weak players.
    pub fn weak_marginal_sum(&self) -> f64 {
        self.weak().map(|(_, m)| m).sum()
    }

    fn weak(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let boss = self.boss;
        self.marginals
            .iter()
            .enumerate()
            .filter(move |&(i, _)| i + 1 != boss)
            .map(|(i, &m)| (i, m))
    }

    /// Point of the segment at parameter `rho`.
    pub fn point(&self, rho: f64) -> Result<Allocation, GameError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(GameError::RhoOutOfRange(rho));
        }
        Ok(self.point_unchecked(rho))
    }

    /// Point on the line through the segment; `rho` may lie outside `[0, 1]`.
    pub fn point_unchecked(&self, rho: f64) -> Allocation {
        diagonal_point(self.grand, self.boss, &self.marginals, rho)
    }

    /// Closed-form minimiser of `‖τ^ρ − φ‖²` over the whole line, or 1 when
    /// the weak marginals are all zero.
    pub fn projection_parameter(&self, phi: &Allocation) -> f64 {
        let sum_m = self.weak_marginal_sum();
        if sum_m <= 0.0 {
            return 1.0;
        }
        let sum_m2: f64 = self.weak().map(|(_, m)| m * m).sum();
        let cross: f64 = self.weak().map(|(i, m)| phi[i] * m).sum();
        let boss_share = self.grand - phi.player(self.boss);
        (boss_share * sum_m + cross) / (sum_m * sum_m + sum_m2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsvResult {
    /// Unclipped projection parameter.
    pub rho: f64,
    /// `min(rho, 1)`.
    pub alpha: f64,
    pub allocation: Allocation,
    /// Set when `rho > 1` or the diagonal collapses to a point.
    pub clipped: bool,
    /// `τ_b − φ_b`.
    pub gap_boss: f64,
    /// `max_{i ≠ b} (τ_i − φ_i)`; `-∞` for a one-player game.
    pub gap_weak_max: f64,
    pub shapley: Allocation,
    pub tau: Allocation,
    pub diagonal: TauDiagonal,
}

pub fn rho_v(g: &Game, boss: usize) -> Result<f64, GameError> {
    let d = TauDiagonal::new(g, boss)?;
    Ok(d.projection_parameter(&shapley(g)))
}

pub fn psv(g: &Game, boss: usize) -> Result<PsvResult, GameError> {
    let diagonal = TauDiagonal::new(g, boss)?;
    let phi = shapley(g);
    Ok(assemble(diagonal, phi))
}

fn assemble(diagonal: TauDiagonal, phi: Allocation) -> PsvResult {
    let degenerate = diagonal.weak_marginal_sum() <= 0.0;
    let rho = diagonal.projection_parameter(&phi);
    let alpha = rho.min(1.0);
    let allocation = diagonal.point_unchecked(alpha);
    let tau = diagonal.point_unchecked(0.5);
    let (gap_boss, gap_weak_max) = gaps(&tau, &phi, diagonal.boss);
    PsvResult {
        rho,
        alpha,
        allocation,
        clipped: degenerate || rho > 1.0,
        gap_boss,
        gap_weak_max,
        shapley: phi,
        tau,
        diagonal,
    }
}

fn gaps(tau: &Allocation, phi: &Allocation, boss: usize) -> (f64, f64) {
    let gap_boss = tau.player(boss) - phi.player(boss);
    let gap_weak_max = (1..=tau.len())
        .filter(|&i| i != boss)
        .map(|i| tau.player(i) - phi.player(i))
        .fold(f64::NEG_INFINITY, f64::max);
    (gap_boss, gap_weak_max)
}

/// `(τ_b − φ_b, max_{i≠b} τ_i − φ_i)`.
pub fn tau_shapley_gaps(g: &Game, boss: usize) -> Result<(f64, f64), GameError> {
    let diagonal = TauDiagonal::new(g, boss)?;
    let tau = diagonal.point_unchecked(0.5);
    Ok(gaps(&tau, &shapley(g), boss))
}

/// Convexity test through the projection: `|α − ½| <= 1e-9`. Requires every
/// weak player to have a positive marginal contribution.
pub fn convexity_via_alpha(g: &Game, boss: usize) -> Result<bool, GameError> {
    let diagonal = TauDiagonal::new(g, boss)?;
    if let Some((i, _)) = diagonal.weak().find(|&(_, m)| m <= 0.0) {
        return Err(GameError::ZeroMarginalPrecondition(i + 1));
    }
    let alpha = diagonal.projection_parameter(&shapley(g)).min(1.0);
    Ok((alpha - 0.5).abs() <= TOLERANCE)
}
