//! Test-only oracles and game builders shared by the integration tests.
//! Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use bigboss::generator::{generate_bbg, GenConfig};
use bigboss::psv::TauDiagonal;
use bigboss::Game;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn example_one() -> Game {
    Game::from_entries(
        3,
        [
            (vec![1], 56.0),
            (vec![1, 2], 111.0),
            (vec![1, 3], 136.0),
            (vec![1, 2, 3], 140.0),
        ],
    )
    .unwrap()
    .with_big_boss(1)
    .unwrap()
}

/// `v(S) = 0` unless the boss is in `S`, then `v({1}) = 0`, pairs 1, `v(N) = 2`.
pub fn small_convex_bbg() -> Game {
    Game::from_entries(
        3,
        [(vec![1, 2], 1.0), (vec![1, 3], 1.0), (vec![1, 2, 3], 2.0)],
    )
    .unwrap()
}

/// Marginal vector average over all `n!` orderings (Heap's algorithm).
pub fn shapley_by_permutations(g: &Game) -> Vec<f64> {
    let n = g.n();
    assert!(n <= 8, "permutation oracle capped at 8 players");
    let mut perm: Vec<usize> = (0..n).collect();
    let mut totals = vec![0.0; n];
    let mut count = 0usize;
    let mut visit = |p: &[usize]| {
        let mut mask = 0usize;
        for &i in p {
            let before = g.worth(mask);
            mask |= 1 << i;
            totals[i] += g.worth(mask) - before;
        }
        count += 1;
    };
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    totals.iter().map(|t| t / count as f64).collect()
}

/// Supermodularity over every pair `S ⊆ T ⊆ N \ {i}`.
pub fn convex_brute_force(g: &Game) -> bool {
    let full = g.grand_coalition();
    for i in 0..g.n() {
        let bi = 1usize << i;
        let rest = full & !bi;
        for t in 0..=full {
            if t & bi != 0 {
                continue;
            }
            let gain_t = g.worth(t | bi) - g.worth(t);
            let mut s = t;
            loop {
                let gain_s = g.worth(s | bi) - g.worth(s);
                if gain_s > gain_t + 1e-9 {
                    return false;
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & t;
            }
            let _ = rest;
        }
    }
    true
}

/// Golden-section search for the diagonal parameter closest to `phi` on
/// `[lo, hi]`. Points are compared through the difference of squared
/// distances, `(r1−r2) Σ dᵢ(aᵢ+bᵢ−2φᵢ)` with `d = e1 − e0`, which avoids
/// cancelling two large sums and rounding in `a − b`.
pub fn golden_section_projection(d: &TauDiagonal, phi: &[f64], lo: f64, hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let dir: Vec<f64> = (0..phi.len()).map(|i| d.e1[i] - d.e0[i]).collect();
    let closer = |r1: f64, r2: f64| {
        let a = d.point_unchecked(r1);
        let b = d.point_unchecked(r2);
        let slope: f64 = (0..phi.len())
            .map(|i| dir[i] * (a[i] + b[i] - 2.0 * phi[i]))
            .sum();
        (r1 - r2) * slope < 0.0
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut e = a + ratio * (b - a);
    while b - a > 1e-12 {
        if closer(c, e) {
            b = e;
        } else {
            a = c;
        }
        c = b - ratio * (b - a);
        e = a + ratio * (b - a);
    }
    0.5 * (a + b)
}

/// Monotone game with player 1 as veto player. Boss coalitions get the
/// maximum worth of their immediate subcoalitions plus a random increment,
/// so B1 and B2 hold while B3 may or may not.
pub fn random_veto_game(n: usize, rng: &mut ChaCha8Rng, max_step: u32) -> Game {
    let mut values = vec![0.0; 1 << n];
    for s in (1..1usize << n).filter(|s| s & 1 == 1) {
        let floor = (0..n)
            .filter(|&k| s >> k & 1 == 1 && (s ^ (1 << k)) & 1 == 1)
            .map(|k| values[s ^ (1 << k)])
            .fold(0.0f64, f64::max);
        values[s] = floor + rng.random_range(0..=max_step) as f64;
    }
    Game::from_table(n, values).unwrap()
}

/// Arbitrary table with integer worths in `[-range, range]`.
pub fn random_table_game(n: usize, rng: &mut ChaCha8Rng, range: i32) -> Game {
    let mut values: Vec<f64> = (0..1usize << n)
        .map(|_| rng.random_range(-range..=range) as f64)
        .collect();
    values[0] = 0.0;
    Game::from_table(n, values).unwrap()
}

/// Convex Big Boss game: `v(S) = c + Σ_{i ∈ S \ {1}} a_i` for `S ∋ 1`, with
/// every `a_i > 0`. Convexity plus the union condition force this additive
/// form on boss coalitions.
pub fn convex_bbg(n: usize, rng: &mut ChaCha8Rng) -> Game {
    let c = rng.random_range(0..=50) as f64;
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(1..=40) as f64).collect();
    let values = (0..1usize << n)
        .map(|s| {
            if s & 1 == 0 {
                0.0
            } else {
                c + (1..n)
                    .filter(|k| s >> k & 1 == 1)
                    .map(|k| a[k])
                    .sum::<f64>()
            }
        })
        .collect();
    Game::from_table(n, values)
        .unwrap()
        .with_big_boss(1)
        .unwrap()
}

/// `count` generated Big Boss games spread evenly over `ns`.
pub fn generated_population(ns: &[usize], count: usize, mu_scale: u64, seed: u64) -> Vec<Game> {
    let per = count.div_ceil(ns.len());
    ns.iter()
        .flat_map(|&n| {
            let cfg = GenConfig::new(n, mu_scale, seed ^ n as u64);
            (0..per as u64).map(move |j| generate_bbg(&cfg, j).unwrap())
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The nine `(n, μ̂, σ̂, E, V, P(X̂<=1))` rows of the reference estimate table.
pub const REFERENCE_ESTIMATES: [(usize, f64, f64, f64, f64, f64); 9] = [
    (3, -0.63945, 0.12035, 0.53142, 0.0041203, 1.0),
    (4, -0.36859, 0.22352, 0.70921, 0.025768, 0.95043),
    (5, -0.20314, 0.26217, 0.8447, 0.050766, 0.78079),
    (6, -0.080581, 0.24528, 0.95076, 0.056054, 0.62874),
    (7, 0.019859, 0.2414, 1.0502, 0.066182, 0.46722),
    (8, 0.095919, 0.22983, 1.1301, 0.069274, 0.33821),
    (9, 0.16789, 0.23043, 1.2146, 0.080455, 0.23312),
    (10, 0.20518, 0.21246, 1.2558, 0.072813, 0.16709),
    (11, 0.24039, 0.20261, 1.2981, 0.070612, 0.11771),
];

/// `(n, μ̂, P(X̂<=1))` predictions for 12..15 players.
pub const REFERENCE_PREDICTIONS: [(usize, f64, f64); 4] = [
    (12, 0.35189, 0.05098),
    (13, 0.40552, 0.02974),
    (14, 0.45517, 0.01720),
    (15, 0.50139, 0.00990),
];
