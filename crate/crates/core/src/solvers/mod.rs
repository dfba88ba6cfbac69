//! Classical QUBO minimizers.
//!
//! Every stochastic solver draws from [`SolverRng`], ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`, so a `(model, config, seed)` triple produces the
//! same result on every platform.

mod anneal;
mod brute;
mod local;
mod tabu;

pub use anneal::simulated_annealing;
pub use brute::{brute_force, BruteForce, BRUTE_FORCE_LIMIT};
pub use local::FlipState;
pub use tabu::tabu_search;
pub(crate) use tabu::tabu_search_with;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qubo::{Assignment, Qubo};

pub type SolverRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tolerance used when comparing energies produced by incremental updates.
pub(crate) const ENERGY_EPS: f64 = 1e-9;

/// Parameters for annealing and tabu search. `None` fields take size-dependent
/// defaults when a solver resolves the config against a model.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Full sweeps over all variables (default 1000).
    pub sa_sweeps: Option<usize>,
    /// Default `10 * max |coefficient|`.
    pub sa_temp_initial: Option<f64>,
    pub sa_temp_final: f64,
    /// Default `min(20, n / 4)`.
    pub tabu_tenure: Option<usize>,
    /// Default `100 * n`, never below the stall limit.
    pub tabu_max_iterations: Option<usize>,
    /// Non-improving iterations before tabu stops. Default `50 * n`.
    pub stall_limit: Option<usize>,
    pub target_energy: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            sa_sweeps: None,
            sa_temp_initial: None,
            sa_temp_final: 0.1,
            tabu_tenure: None,
            tabu_max_iterations: None,
            stall_limit: None,
            target_energy: None,
        }
    }
}

/// A [`SolverConfig`] with every default filled in for one model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedConfig {
    pub sa_sweeps: usize,
    pub sa_temp_initial: f64,
    pub sa_temp_final: f64,
    pub tabu_tenure: usize,
    pub tabu_max_iterations: usize,
    pub stall_limit: usize,
    pub target_energy: Option<f64>,
}

impl SolverConfig {
    pub fn with_target(mut self, target: f64) -> Self {
        self.target_energy = Some(target);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.sa_temp_final > 0.0 && self.sa_temp_final.is_finite()) {
            return bad(format!("final temperature must be positive, got {}", self.sa_temp_final));
        }
        if let Some(t0) = self.sa_temp_initial {
            if !(t0 > 0.0 && t0.is_finite()) {
                return bad(format!("initial temperature must be positive, got {t0}"));
            }
            if t0 < self.sa_temp_final {
                return bad(format!(
                    "initial temperature {t0} below final temperature {}",
                    self.sa_temp_final
                ));
            }
        }
        if self.sa_sweeps == Some(0) {
            return bad("sa_sweeps must be at least 1".into());
        }
        Ok(())
    }

    pub fn resolve(&self, q: &Qubo) -> Result<ResolvedConfig> {
        self.validate()?;
        let n = q.n();
        let stall_limit = self.stall_limit.unwrap_or(50 * n).max(1);
        let t0 = self
            .sa_temp_initial
            .unwrap_or_else(|| (10.0 * q.max_abs_coefficient()).max(self.sa_temp_final));
        Ok(ResolvedConfig {
            sa_sweeps: self.sa_sweeps.unwrap_or(1000),
            sa_temp_initial: t0,
            sa_temp_final: self.sa_temp_final,
            tabu_tenure: self.tabu_tenure.unwrap_or((n / 4).min(20)),
            tabu_max_iterations: self
                .tabu_max_iterations
                .unwrap_or_else(|| (100 * n).max(stall_limit)),
            stall_limit,
            target_energy: self.target_energy,
        })
    }
}

/// One decomposition round, as emitted in a run trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub subset_size: usize,
    pub energy_before: f64,
    pub energy_after: f64,
    pub accepted: bool,
    pub subproblem_solves: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub best_assignment: Assignment,
    /// Always `energy(qubo, best_assignment)` evaluated from scratch.
    pub best_energy: f64,
    pub iterations: usize,
    /// 0 for monolithic solvers.
    pub subproblem_solves: usize,
    pub seed: u64,
    pub reached_target: bool,
    /// Per-round records; empty for monolithic solvers.
    pub trace: Vec<RoundRecord>,
}

impl SolveResult {
    pub(crate) fn finish(q: &Qubo, best: Assignment, iterations: usize, seed: u64, target: Option<f64>) -> Self {
        let best_energy = q.energy(&best);
        SolveResult {
            reached_target: target.is_some_and(|t| best_energy <= t + ENERGY_EPS),
            best_assignment: best,
            best_energy,
            iterations,
            subproblem_solves: 0,
            seed,
            trace: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_defaults() {
        let q = Qubo::from_parts(vec![-2.0; 40], [((0, 1), 3.0)], 0.0).unwrap();
        let r = SolverConfig::default().resolve(&q).unwrap();
        assert_eq!(r.sa_sweeps, 1000);
        assert_eq!(r.sa_temp_initial, 30.0);
        assert_eq!(r.tabu_tenure, 10);
        assert_eq!(r.stall_limit, 2000);
        assert_eq!(r.tabu_max_iterations, 4000);
        let big = Qubo::new(400);
        assert_eq!(SolverConfig::default().resolve(&big).unwrap().tabu_tenure, 20);
    }

    #[test]
    fn invalid_temperatures() {
        let cfg = SolverConfig {
            sa_temp_initial: Some(0.01),
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig {
            sa_temp_final: 0.0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig {
            sa_sweeps: Some(0),
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
