use rand::Rng;

use crate::error::Result;
use crate::qubo::{Assignment, Qubo};

use super::{seeded_rng, FlipState, SolveResult, SolverConfig, ENERGY_EPS};

/// Single-bit-flip Metropolis annealing over a geometric temperature ladder,
/// starting from a uniformly random assignment.
///
/// Each sweep visits the variables in index order; the temperature for sweep `s`
/// of `S` is `T0 * (T_end / T0)^(s / (S - 1))`.
pub fn simulated_annealing(q: &Qubo, cfg: &SolverConfig, seed: u64) -> Result<SolveResult> {
    let cfg = cfg.resolve(q)?;
    let mut rng = seeded_rng(seed);
    let n = q.n();
    let adjacency = q.adjacency();
    let start = Assignment::from_bits((0..n).map(|_| u8::from(rng.random::<bool>())));
    let mut state = FlipState::new(q, &adjacency, start);
    let mut best = state.assignment().clone();
    let mut best_energy = state.energy();
    let target = cfg.target_energy;
    let hit = |e: f64| target.is_some_and(|t| e <= t + ENERGY_EPS);

    let ratio = cfg.sa_temp_final / cfg.sa_temp_initial;
    let mut iterations = 0;
    'sweeps: for s in 0..cfg.sa_sweeps {
        if hit(best_energy) {
            break;
        }
        let frac = if cfg.sa_sweeps > 1 {
            s as f64 / (cfg.sa_sweeps - 1) as f64
        } else {
            1.0
        };
        let temp = cfg.sa_temp_initial * ratio.powf(frac);
        for i in 0..n {
            iterations += 1;
            let d = state.delta(i);
            if d <= 0.0 || rng.random::<f64>() < (-d / temp).exp() {
                state.flip(i);
                if state.energy() < best_energy - ENERGY_EPS {
                    best_energy = state.energy();
                    best.clone_from(state.assignment());
                    if hit(best_energy) {
                        break 'sweeps;
                    }
                }
            }
        }
    }
    Ok(SolveResult::finish(q, best, iterations, seed, target))
}
