//! TU-games stored as dense coalition tables, plus the structural checks
//! used throughout the crate (monotonicity, superadditivity, convexity and
//! the Big Boss axioms).
//!
//! Coalitions are bitmasks: bit `k - 1` is set iff player `k` belongs to the
//! coalition. Player labels exposed by the API are 1-based.

use std::fmt;

use thiserror::Error;

/// Largest supported player count. A table for 26 players holds 2^26 worths.
pub const MAX_PLAYERS: usize = 26;

/// Absolute slack applied to every validator inequality.
pub const TOLERANCE: f64 = 1e-9;

/// Coalition bitmask.
pub type Coalition = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("player count must be at least 1")]
    NoPlayers,
    #[error("player count {0} exceeds the supported maximum of {MAX_PLAYERS}")]
    CapacityExceeded(usize),
    #[error("coalition {0} listed more than once")]
    DuplicateCoalition(String),
    #[error("player {player} is outside 1..={n}")]
    PlayerOutOfRange { player: usize, n: usize },
    #[error("the empty coalition must have worth 0, got {0}")]
    NonzeroEmptyCoalition(f64),
    #[error("worth of coalition {0} is not finite")]
    NonFiniteWorth(String),
    #[error("value table has {got} entries, expected {expected}")]
    TableLength { got: usize, expected: usize },
    #[error("more than one player qualifies as Big Boss: {0} and {1}")]
    AmbiguousBoss(usize, usize),
    #[error("game is not a Big Boss game{}", .0.as_ref().map(|b| format!(" with boss {b}")).unwrap_or_default())]
    NotBigBoss(Option<usize>),
    #[error("allocation has {got} entries, game has {expected} players")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("diagonal parameter {0} is outside [0, 1]")]
    RhoOutOfRange(f64),
    #[error("player {0} has zero marginal contribution")]
    ZeroMarginalPrecondition(usize),
}

/// Formats a coalition mask as `{1,3}`.
pub fn coalition_label(mask: Coalition) -> String {
    let members: Vec<String> = players_of(mask).map(|p| p.to_string()).collect();
    format!("{{{}}}", members.join(","))
}

/// 1-based player labels contained in `mask`, ascending.
pub fn players_of(mask: Coalition) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize)
        .filter(move |&k| mask >> k & 1 == 1)
        .map(|k| k + 1)
}

#[inline]
pub fn bit(player: usize) -> Coalition {
    1 << (player - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    n: usize,
    values: Vec<f64>,
    big_boss: Option<usize>,
}

impl Game {
    /// Builds a game from explicit coalition entries; unlisted coalitions are
    /// worth zero.
    pub fn from_entries<I, S>(n: usize, entries: I) -> Result<Self, GameError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<[usize]>,
    {
        check_size(n)?;
        let mut values = vec![0.0; 1 << n];
        let mut seen = vec![false; 1 << n];
        for (members, worth) in entries {
            let mut mask = 0;
            for &p in members.as_ref() {
                if p == 0 || p > n {
                    return Err(GameError::PlayerOutOfRange { player: p, n });
                }
                mask |= bit(p);
            }
            if seen[mask] {
                return Err(GameError::DuplicateCoalition(coalition_label(mask)));
            }
            seen[mask] = true;
            if !worth.is_finite() {
                return Err(GameError::NonFiniteWorth(coalition_label(mask)));
            }
            if mask == 0 && worth != 0.0 {
                return Err(GameError::NonzeroEmptyCoalition(worth));
            }
            values[mask] = worth;
        }
        Ok(Game {
            n,
            values,
            big_boss: None,
        })
    }

    /// Wraps a dense table indexed by coalition bitmask.
    pub fn from_table(n: usize, values: Vec<f64>) -> Result<Self, GameError> {
        check_size(n)?;
        if values.len() != 1 << n {
            return Err(GameError::TableLength {
                got: values.len(),
                expected: 1 << n,
            });
        }
        if let Some(mask) = values.iter().position(|w| !w.is_finite()) {
            return Err(GameError::NonFiniteWorth(coalition_label(mask)));
        }
        if values[0] != 0.0 {
            return Err(GameError::NonzeroEmptyCoalition(values[0]));
        }
        Ok(Game {
            n,
            values,
            big_boss: None,
        })
    }

    /// Designates the Big Boss player.
    pub fn with_big_boss(mut self, boss: usize) -> Result<Self, GameError> {
        if boss == 0 || boss > self.n {
            return Err(GameError::PlayerOutOfRange {
                player: boss,
                n: self.n,
            });
        }
        self.big_boss = Some(boss);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn big_boss(&self) -> Option<usize> {
        self.big_boss
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn worth(&self, mask: Coalition) -> f64 {
        self.values[mask]
    }

    #[inline]
    pub fn grand_coalition(&self) -> Coalition {
        (1 << self.n) - 1
    }

    /// `v(N)`.
    pub fn grand_worth(&self) -> f64 {
        self.values[self.grand_coalition()]
    }

    /// Applies `f` to every worth, keeping `v(∅) = 0`.
    pub fn map_worths(&self, f: impl Fn(f64) -> f64) -> Result<Self, GameError> {
        let mut values: Vec<f64> = self.values.iter().map(|&w| f(w)).collect();
        values[0] = 0.0;
        let mut g = Game::from_table(self.n, values)?;
        g.big_boss = self.big_boss;
        Ok(g)
    }

    /// `M_i(v) = v(N) - v(N \ {i})` for every player, in label order.
    pub fn marginal_contributions(&self) -> Vec<f64> {
        let full = self.grand_coalition();
        let vn = self.values[full];
        (1..=self.n)
            .map(|i| vn - self.values[full ^ bit(i)])
            .collect()
    }

    /// Checks `v(S \ {i}) <= v(S)` for every coalition and member, which
    /// implies monotonicity by transitivity. On failure returns the first
    /// violating pair `(S \ {i}, S)`.
    pub fn monotonicity_witness(&self) -> Option<(Coalition, Coalition)> {
        for s in 1..self.values.len() {
            let mut rest = s;
            while rest != 0 {
                let low = rest & rest.wrapping_neg();
                rest ^= low;
                let sub = s ^ low;
                if self.values[sub] > self.values[s] + TOLERANCE {
                    return Some((sub, s));
                }
            }
        }
        None
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_witness().is_none()
    }

    /// First disjoint pair `(S, T)` with `v(S ∪ T) < v(S) + v(T)`.
    pub fn superadditivity_witness(&self) -> Option<(Coalition, Coalition)> {
        let full = self.grand_coalition();
        for s in 1..=full {
            let comp = full & !s;
            // nonempty submasks of the complement
            let mut t = comp;
            while t != 0 {
                if self.values[s | t] + TOLERANCE < self.values[s] + self.values[t] {
                    return Some((s, t));
                }
                t = (t - 1) & comp;
            }
        }
        None
    }

    pub fn is_superadditive(&self) -> bool {
        self.superadditivity_witness().is_none()
    }

    /// Supermodularity via the local condition
    /// `v(S∪i) + v(S∪j) <= v(S∪{i,j}) + v(S)` for all `S` and `i ≠ j ∉ S`.
    pub fn is_convex(&self) -> bool {
        let full = self.grand_coalition();
        for s in 0..=full {
            let out = full & !s;
            let mut a = out;
            while a != 0 {
                let bi = a & a.wrapping_neg();
                a ^= bi;
                let mut b = a;
                while b != 0 {
                    let bj = b & b.wrapping_neg();
                    b ^= bj;
                    let lhs = self.values[s | bi] + self.values[s | bj];
                    let rhs = self.values[s | bi | bj] + self.values[s];
                    if lhs > rhs + TOLERANCE {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// First coalition without `boss` that has nonzero worth.
    fn veto_witness(&self, boss: usize) -> Option<Coalition> {
        let b = bit(boss);
        (1..self.values.len()).find(|&s| s & b == 0 && self.values[s].abs() > TOLERANCE)
    }

    /// First `S ∋ boss` with `v(N) - v(S) < Σ_{i ∉ S} M_i(v)`.
    fn union_witness(&self, boss: usize, marginals: &[f64]) -> Option<Coalition> {
        let full = self.grand_coalition();
        let b = bit(boss);
        let vn = self.values[full];
        (0..=full).filter(|s| s & b != 0).find(|&s| {
            let outside: f64 = players_of(full & !s).map(|i| marginals[i - 1]).sum();
            vn - self.values[s] + TOLERANCE < outside
        })
    }

    fn report_for(&self, boss: usize, marginals: &[f64]) -> BigBossReport {
        let mono = self.monotonicity_witness();
        let veto = self.veto_witness(boss);
        let union = self.union_witness(boss, marginals);
        let full = self.grand_coalition();
        let first_violation = if let Some((s, t)) = mono {
            Some(Violation {
                axiom: Axiom::Monotone,
                coalition: t,
                related: Some(s),
            })
        } else if let Some(s) = veto {
            Some(Violation {
                axiom: Axiom::Veto,
                coalition: s,
                related: None,
            })
        } else {
            union.map(|s| Violation {
                axiom: Axiom::Union,
                coalition: s,
                related: Some(full & !s),
            })
        };
        BigBossReport {
            is_big_boss: mono.is_none() && veto.is_none() && union.is_none(),
            boss: Some(boss),
            b1_monotone: mono.is_none(),
            b2_veto: veto.is_none(),
            b3_union: union.is_none(),
            marginals: marginals.to_vec(),
            first_violation,
        }
    }

    /// Checks the Big Boss axioms. With a designated boss only that player is
    /// tested; otherwise every player is scanned and a second qualifying
    /// player is reported as [`GameError::AmbiguousBoss`].
    pub fn validate_big_boss(&self) -> Result<BigBossReport, GameError> {
        let marginals = self.marginal_contributions();
        if let Some(boss) = self.big_boss {
            return Ok(self.report_for(boss, &marginals));
        }
        let mut accepted: Option<BigBossReport> = None;
        let mut fallback: Option<BigBossReport> = None;
        for p in 1..=self.n {
            let report = self.report_for(p, &marginals);
            if report.is_big_boss {
                if let Some(prev) = &accepted {
                    return Err(GameError::AmbiguousBoss(prev.boss.unwrap_or(0), p));
                }
                accepted = Some(report);
            } else if fallback.is_none() && report.b2_veto {
                fallback = Some(report);
            }
        }
        Ok(accepted.or(fallback).unwrap_or_else(|| {
            // no veto candidate at all: report against player 1
            let mut r = self.report_for(1, &marginals);
            r.boss = None;
            r
        }))
    }

    /// Validates with `boss` as the designated Big Boss.
    pub fn validate_with_boss(&self, boss: usize) -> Result<BigBossReport, GameError> {
        if boss == 0 || boss > self.n {
            return Err(GameError::PlayerOutOfRange {
                player: boss,
                n: self.n,
            });
        }
        Ok(self.report_for(boss, &self.marginal_contributions()))
    }

    /// Resolves the boss and fails unless the game is a Big Boss game for it.
    pub fn require_big_boss(&self, boss: usize) -> Result<Vec<f64>, GameError> {
        let report = self.validate_with_boss(boss)?;
        if report.is_big_boss {
            Ok(report.marginals)
        } else {
            Err(GameError::NotBigBoss(Some(boss)))
        }
    }

    /// The rewritten union condition
    /// `(n - s - 1) v(N) + v(S) <= Σ_{i ∉ S} v(N \ {i})` for every `S ∋ boss`.
    pub fn check_union_rewritten(&self, boss: usize) -> bool {
        let full = self.grand_coalition();
        let b = bit(boss);
        let vn = self.values[full];
        (0..=full).filter(|s| s & b != 0).all(|s| {
            let size = s.count_ones() as f64;
            let lhs = (self.n as f64 - size - 1.0) * vn + self.values[s];
            let rhs: f64 = players_of(full & !s)
                .map(|i| self.values[full ^ bit(i)])
                .sum();
            lhs <= rhs + TOLERANCE
        })
    }
}

fn check_size(n: usize) -> Result<(), GameError> {
    if n == 0 {
        Err(GameError::NoPlayers)
    } else if n > MAX_PLAYERS {
        Err(GameError::CapacityExceeded(n))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Monotone,
    Veto,
    Union,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Monotone => "B1",
            Axiom::Veto => "B2",
            Axiom::Union => "B3",
        })
    }
}

/// A failed axiom with its witness. For B1 `related` is the smaller
/// coalition of the violating pair; for B3 it is `N \ S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub coalition: Coalition,
    pub related: Option<Coalition>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.axiom, self.related) {
            (Axiom::Monotone, Some(s)) => write!(
                f,
                "B1 violated: v({}) > v({})",
                coalition_label(s),
                coalition_label(self.coalition)
            ),
            (Axiom::Union, _) => {
                write!(f, "B3 violated at S = {}", coalition_label(self.coalition))
            }
            _ => write!(
                f,
                "{} violated at {}",
                self.axiom,
                coalition_label(self.coalition)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BigBossReport {
    pub is_big_boss: bool,
    pub boss: Option<usize>,
    pub b1_monotone: bool,
    pub b2_veto: bool,
    pub b3_union: bool,
    pub marginals: Vec<f64>,
    pub first_violation: Option<Violation>,
}
