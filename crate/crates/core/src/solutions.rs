//! Point solutions: the Shapley value, the closed-form τ-value of Big Boss
//! games, and core membership.

use std::ops::Index;

use crate::game::{bit, Game, GameError, TOLERANCE};

/// Efficient payoff vector, one entry per player in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation(pub Vec<f64>);

impl Allocation {
    pub fn payoffs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Payoff of a 1-based player label.
    pub fn player(&self, label: usize) -> f64 {
        self.0[label - 1]
    }

    pub fn max_abs_diff(&self, other: &Allocation) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Allocation) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<usize> for Allocation {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for Allocation {
    fn from(v: Vec<f64>) -> Self {
        Allocation(v)
    }
}

/// `w_s = s!(n-s-1)!/n!` for `s = 0..n`, built from a running product.
pub fn shapley_weights(n: usize) -> Vec<f64> {
    // w_0 = 1/n, w_{s+1} = w_s * (s+1)/(n-s-1)
    let mut w = Vec::with_capacity(n);
    let mut cur = 1.0 / n as f64;
    for s in 0..n {
        w.push(cur);
        if s + 1 < n {
            cur *= (s + 1) as f64 / (n - s - 1) as f64;
        }
    }
    w
}

/// Exact Shapley value via the subset formula, `O(n·2^n)`.
pub fn shapley(g: &Game) -> Allocation {
    let n = g.n();
    let w = shapley_weights(n);
    let values = g.values();
    let full = g.grand_coalition();
    let phi = (1..=n)
        .map(|i| {
            let bi = bit(i);
            let rest = full & !bi;
            let mut acc = 0.0;
            let mut s = rest;
            loop {
                acc += w[s.count_ones() as usize] * (values[s | bi] - values[s]);
                if s == 0 {
                    break;
                }
                s = (s - 1) & rest;
            }
            acc
        })
        .collect();
    Allocation(phi)
}

/// Shapley values for a batch of games. Output order matches input order.
pub fn shapley_batch(games: &[Game]) -> Vec<Allocation> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        games.par_iter().map(shapley).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        games.iter().map(shapley).collect()
    }
}

/// τ-value of a Big Boss game: weak players get half their marginal
/// contribution, the boss keeps the remainder.
pub fn tau_bbg(g: &Game, boss: usize) -> Result<Allocation, GameError> {
    let marginals = g.require_big_boss(boss)?;
    Ok(tau_from_marginals(g.grand_worth(), boss, &marginals))
}

pub(crate) fn tau_from_marginals(grand: f64, boss: usize, marginals: &[f64]) -> Allocation {
    diagonal_point(grand, boss, marginals, 0.5)
}

/// `ρ·M_i` for weak players and `v(N) - ρ·Σ M_i` for the boss.
pub(crate) fn diagonal_point(grand: f64, boss: usize, marginals: &[f64], rho: f64) -> Allocation {
    let mut x: Vec<f64> = marginals.iter().map(|m| rho * m).collect();
    let weak: f64 = x
        .iter()
        .enumerate()
        .filter(|&(i, _)| i + 1 != boss)
        .map(|(_, v)| v)
        .sum();
    x[boss - 1] = grand - weak;
    Allocation(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreMode {
    /// All `2^n` coalition constraints plus efficiency.
    General,
    /// Efficiency plus `0 <= x_i <= M_i(v)` for every weak player.
    BigBoss(usize),
}

pub fn core_contains(g: &Game, x: &Allocation, mode: CoreMode) -> Result<bool, GameError> {
    let n = g.n();
    if x.len() != n {
        return Err(GameError::DimensionMismatch {
            got: x.len(),
            expected: n,
        });
    }
    if (x.total() - g.grand_worth()).abs() > TOLERANCE {
        return Ok(false);
    }
    match mode {
        CoreMode::General => {
            let values = g.values();
            // subset sums of x, built incrementally
            let mut sums = vec![0.0; values.len()];
            for s in 1..values.len() {
                let low = s & s.wrapping_neg();
                sums[s] = sums[s ^ low] + x[low.trailing_zeros() as usize];
                if sums[s] + TOLERANCE < values[s] {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        CoreMode::BigBoss(boss) => {
            if boss == 0 || boss > n {
                return Err(GameError::PlayerOutOfRange { player: boss, n });
            }
            let marginals = g.marginal_contributions();
            Ok((1..=n).filter(|&i| i != boss).all(|i| {
                let xi = x.player(i);
                xi >= -TOLERANCE && xi <= marginals[i - 1] + TOLERANCE
            }))
        }
    }
}
