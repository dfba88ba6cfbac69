use rand::Rng;

use crate::error::{Error, Result};
use crate::qubo::{Assignment, Qubo};

use super::{seeded_rng, FlipState, SolveResult, SolverConfig, ENERGY_EPS};

/// Steepest-descent single-flip tabu search.
///
/// Every iteration flips the non-tabu variable with the smallest energy delta
/// (uphill moves included). A flipped variable stays tabu for `tenure`
/// iterations unless flipping it would beat the best energy seen so far.
/// Candidates are scanned in index order and equal-delta ties are resolved
/// uniformly at random. The run stops after `stall_limit` iterations without a
/// new best, after `tabu_max_iterations`, or at `target_energy`.
pub fn tabu_search(q: &Qubo, cfg: &SolverConfig, start: Assignment, seed: u64) -> Result<SolveResult> {
    tabu_search_with(q, cfg, start, seed, false)
}

/// With `latest_tie`, a state that matches the best energy replaces the stored
/// best, so the result is the most recent optimum visited rather than the
/// first. The trajectory is unchanged.
pub(crate) fn tabu_search_with(
    q: &Qubo,
    cfg: &SolverConfig,
    start: Assignment,
    seed: u64,
    latest_tie: bool,
) -> Result<SolveResult> {
    if start.len() != q.n() {
        return Err(Error::LengthMismatch {
            expected: q.n(),
            actual: start.len(),
        });
    }
    let cfg = cfg.resolve(q)?;
    let mut rng = seeded_rng(seed);
    let n = q.n();
    let adjacency = q.adjacency();
    let mut state = FlipState::new(q, &adjacency, start);
    let mut best = state.assignment().clone();
    let mut best_energy = state.energy();
    let target = cfg.target_energy;
    let hit = |e: f64| target.is_some_and(|t| e <= t + ENERGY_EPS);

    let mut tabu_until = vec![0usize; n];
    let mut stall = 0;
    let mut iterations = 0;
    while n > 0 && iterations < cfg.tabu_max_iterations && stall < cfg.stall_limit && !hit(best_energy) {
        iterations += 1;
        let it = iterations;
        let mut chosen: Option<usize> = None;
        let mut chosen_delta = f64::INFINITY;
        let mut ties = 0u32;
        for (i, &until) in tabu_until.iter().enumerate() {
            let d = state.delta(i);
            let aspirated = state.energy() + d < best_energy - ENERGY_EPS;
            if until >= it && !aspirated {
                continue;
            }
            if d < chosen_delta - ENERGY_EPS {
                chosen = Some(i);
                chosen_delta = d;
                ties = 1;
            } else if d <= chosen_delta + ENERGY_EPS {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    chosen = Some(i);
                }
            }
        }
        // Everything tabu (tenure >= n): fall back to the oldest tabu entry.
        let i = chosen.unwrap_or_else(|| {
            (0..n).min_by_key(|&i| tabu_until[i]).expect("n > 0")
        });
        state.flip(i);
        tabu_until[i] = it + cfg.tabu_tenure;
        if state.energy() < best_energy - ENERGY_EPS {
            best_energy = state.energy();
            best.clone_from(state.assignment());
            stall = 0;
        } else if latest_tie && state.energy() <= best_energy + ENERGY_EPS {
            best.clone_from(state.assignment());
            stall += 1;
        } else {
            stall += 1;
        }
    }
    Ok(SolveResult::finish(q, best, iterations, seed, target))
}
