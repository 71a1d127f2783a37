//! Stable allocations for Big Boss cooperative games.
//!
//! A Big Boss game is a monotone TU-game with a veto player (the boss) in
//! which weak players gain by joining forces. Its core is a box, and the
//! segment from the boss-optimal corner `e0` to the weak-optimal corner `e1`
//! (the τ-diagonal) passes through the τ-value. This crate computes the
//! Shapley value, the τ-value and the projection of the Shapley value onto
//! the τ-diagonal, and provides the Monte-Carlo tooling used to study where
//! that projection falls as the number of players grows.
//!
//! ```
//! use bigboss::{psv, Game};
//!
//! let g = Game::from_entries(3, [
//!     (vec![1], 56.0),
//!     (vec![1, 2], 111.0),
//!     (vec![1, 3], 136.0),
//!     (vec![1, 2, 3], 140.0),
//! ]).unwrap();
//! let r = psv(&g, 1).unwrap();
//! assert!((r.rho - 0.9324).abs() < 5e-4);
//! ```

pub mod experiment;
pub mod game;
pub mod gamefile;
pub mod generator;
pub mod par;
pub mod psv;
pub mod solutions;
pub mod stats;
pub mod svg;

pub use game::{Axiom, BigBossReport, Game, GameError, Violation};
pub use generator::{generate_bbg, run_sample, run_sample_with, GenConfig, GenError, SampleRun};
pub use par::Execution;
pub use psv::{convexity_via_alpha, psv, rho_v, tau_shapley_gaps, PsvResult, TauDiagonal};
pub use solutions::{core_contains, shapley, shapley_batch, tau_bbg, Allocation, CoreMode};
