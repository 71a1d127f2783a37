mod common;

use bigboss::psv::TauDiagonal;
use bigboss::{core_contains, shapley, shapley_batch, tau_bbg, Allocation, CoreMode, Game};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn sum_games(a: &Game, b: &Game) -> Game {
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x + y)
        .collect();
    Game::from_table(a.n(), values).unwrap()
}

#[test]
fn subset_formula_matches_permutations() {
    let mut r = rng(0x5E);
    for n in 1..=7 {
        for _ in 0..40 {
            let g = random_table_game(n, &mut r, 100);
            let fast = shapley(&g);
            let slow = shapley_by_permutations(&g);
            for (a, b) in fast.payoffs().iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-9, "n={n}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn tau_is_diagonal_midpoint_and_core_modes_agree() {
    let mut r = rng(0xC02E);
    let games = generated_population(&[3, 4, 5, 6], 40, 100, 5);
    for g in &games {
        let d = TauDiagonal::new(g, 1).unwrap();
        let tau = tau_bbg(g, 1).unwrap();
        let mid: Vec<f64> = (0..g.n()).map(|i| (d.e0[i] + d.e1[i]) / 2.0).collect();
        assert_eq!(tau.payoffs(), &mid[..]);

        let m = g.marginal_contributions();
        let vn = g.grand_worth();
        for k in 0..1000 {
            // half the draws inside the box, half spilling out of it
            let spill = if k % 2 == 0 { 0.0 } else { 0.2 };
            let mut x: Vec<f64> = m
                .iter()
                .map(|&mi| {
                    let lo = -spill * mi;
                    let hi = (1.0 + spill) * mi;
                    if hi > lo {
                        r.random_range(lo..=hi).round()
                    } else {
                        0.0
                    }
                })
                .collect();
            x[0] = vn - x[1..].iter().sum::<f64>();
            let x = Allocation(x);
            assert_eq!(
                core_contains(g, &x, CoreMode::General).unwrap(),
                core_contains(g, &x, CoreMode::BigBoss(1)).unwrap(),
                "{g:?} {x:?}"
            );
        }
    }
}

#[test]
fn convex_big_boss_games_have_shapley_equal_tau() {
    let mut r = rng(0x7E1);
    for k in 0..300 {
        let g = convex_bbg(3 + k % 5, &mut r);
        assert!(g.is_convex());
        let phi = shapley(&g);
        let tau = tau_bbg(&g, 1).unwrap();
        assert!(phi.max_abs_diff(&tau) <= 1e-9);
    }
}

#[test]
fn batch_matches_single() {
    let games = generated_population(&[4, 5], 50, 100, 8);
    let batch = shapley_batch(&games);
    for (g, phi) in games.iter().zip(&batch) {
        assert_eq!(&shapley(g), phi);
    }
}

proptest! {
    #[test]
    fn efficiency(seed in any::<u64>(), n in 1usize..9) {
        let g = random_table_game(n, &mut rng(seed), 1000);
        let phi = shapley(&g);
        prop_assert!((phi.total() - g.grand_worth()).abs() <= 1e-9);
    }

    #[test]
    fn linearity(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let a = random_table_game(n, &mut r, 1000);
        let b = random_table_game(n, &mut r, 1000);
        let sum = shapley(&sum_games(&a, &b));
        let (pa, pb) = (shapley(&a), shapley(&b));
        for i in 0..n {
            prop_assert!((sum[i] - pa[i] - pb[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn symmetric_players_share_equally(seed in any::<u64>(), n in 2usize..7) {
        // worth depends only on coalition size, plus whether player 1 is in
        let mut r = rng(seed);
        let by_size: Vec<f64> = (0..=n).map(|_| r.random_range(0..100) as f64).collect();
        let bonus = r.random_range(0..100) as f64;
        let values = (0..1usize << n)
            .map(|s| if s == 0 { 0.0 } else { by_size[s.count_ones() as usize] + if s & 1 == 1 { bonus } else { 0.0 } })
            .collect();
        let g = Game::from_table(n, values).unwrap();
        let phi = shapley(&g);
        for i in 2..n {
            prop_assert!((phi[i] - phi[1]).abs() <= 1e-9);
        }
    }

    #[test]
    fn dummy_player_gets_nothing(seed in any::<u64>(), n in 2usize..7) {
        // player n never changes any worth
        let mut r = rng(seed);
        let base = random_table_game(n - 1, &mut r, 100);
        let half = 1usize << (n - 1);
        let values = (0..1usize << n).map(|s| base.worth(s & (half - 1))).collect();
        let g = Game::from_table(n, values).unwrap();
        prop_assert!(shapley(&g)[n - 1].abs() <= 1e-9);
    }
}
