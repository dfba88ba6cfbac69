//! End-to-end pipeline for one puzzle: build the penalty model, solve it with a
//! chosen method, and run seeded batches.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::{solve_decomposed, DecomposeConfig};
use crate::error::{Error, Result};
use crate::exact::{build_cover_problem, enumerate_exact};
use crate::penalty::{build_qubo, PenaltyWeights};
use crate::puzzle::{PlacementCatalog, PuzzleInstance};
use crate::qubo::{Assignment, Qubo};
use crate::solution::{decode, validate, ValidationReport};
use crate::solvers::{simulated_annealing, tabu_search, SolveResult, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Sa,
    Tabu,
    Decompose,
    Exact,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sa" => Ok(Method::Sa),
            "tabu" => Ok(Method::Tabu),
            "decompose" => Ok(Method::Decompose),
            "exact" => Ok(Method::Exact),
            _ => Err(Error::InvalidConfig(format!(
                "unknown method {s:?} (expected sa, tabu, decompose or exact)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sa => "sa",
            Method::Tabu => "tabu",
            Method::Decompose => "decompose",
            Method::Exact => "exact",
        })
    }
}

/// A puzzle with its catalog and penalty model, built once and shared by runs.
#[derive(Clone, Debug)]
pub struct TilingProblem {
    pub instance: PuzzleInstance,
    pub catalog: PlacementCatalog,
    pub weights: PenaltyWeights,
    pub qubo: Qubo,
}

impl TilingProblem {
    pub fn new(instance: PuzzleInstance, weights: PenaltyWeights) -> Self {
        let catalog = instance.catalog();
        let qubo = build_qubo(&catalog, &instance.counts(), weights);
        TilingProblem {
            instance,
            catalog,
            weights,
            qubo,
        }
    }

    pub fn report(&self, x: &Assignment) -> ValidationReport {
        validate(&decode(x, &self.catalog), &self.instance)
    }

    /// One solve. Annealing, tabu and decomposition stop early at energy 0,
    /// which certifies a valid tiling. `exact` returns the first tiling the
    /// exact-cover search finds (or all zeros if there is none).
    pub fn solve(
        &self,
        method: Method,
        solver_cfg: &SolverConfig,
        decompose_cfg: &DecomposeConfig,
        seed: u64,
    ) -> Result<SolveResult> {
        let cfg = SolverConfig {
            target_energy: solver_cfg.target_energy.or(Some(0.0)),
            ..solver_cfg.clone()
        };
        let n = self.qubo.n();
        match method {
            Method::Sa => simulated_annealing(&self.qubo, &cfg, seed),
            Method::Tabu => tabu_search(&self.qubo, &cfg, Assignment::zeros(n), seed),
            Method::Decompose => solve_decomposed(&self.qubo, decompose_cfg, &cfg, seed),
            Method::Exact => {
                let cover = build_cover_problem(&self.catalog, &self.instance.counts());
                let found = enumerate_exact(&cover, Some(1));
                let x = found
                    .solutions
                    .first()
                    .map_or_else(|| Assignment::zeros(n), |s| Assignment::from_ones(n, &s.0));
                let best_energy = self.qubo.energy(&x);
                Ok(SolveResult {
                    best_assignment: x,
                    best_energy,
                    iterations: 0,
                    subproblem_solves: 0,
                    seed,
                    reached_target: best_energy == 0.0,
                    trace: Vec::new(),
                })
            }
        }
    }
}

/// Outcome of one seeded run, validated independently of the solver.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunOutcome {
    pub seed: u64,
    pub energy: f64,
    pub valid: bool,
    pub defects: usize,
    pub subproblem_solves: usize,
    pub placements: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentStats {
    pub runs: usize,
    pub valid_count: usize,
    pub invalid_count: usize,
    /// `(energy, count)` ascending by energy.
    pub energy_histogram: Vec<(f64, usize)>,
    /// Defective cells (overlaps plus gaps) per run.
    pub defect_histogram: BTreeMap<usize, usize>,
    pub distinct_valid_solutions: usize,
    pub mean_subproblem_solves: f64,
    /// Mean over runs that ended in a valid tiling; 0 when there are none.
    pub mean_subproblem_solves_valid: f64,
}

impl ExperimentStats {
    pub fn from_outcomes(outcomes: &[RunOutcome]) -> Self {
        let runs = outcomes.len();
        let valid: Vec<&RunOutcome> = outcomes.iter().filter(|o| o.valid).collect();
        let mut energies: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
        for o in outcomes {
            // Order-preserving key for finite, non-negative and negative floats alike.
            let bits = o.energy.to_bits();
            let key = if o.energy.is_sign_negative() { !bits } else { bits | (1 << 63) };
            energies.entry(key).or_insert((o.energy, 0)).1 += 1;
        }
        let mut defect_histogram = BTreeMap::new();
        for o in outcomes {
            *defect_histogram.entry(o.defects).or_insert(0) += 1;
        }
        let distinct: BTreeSet<&Vec<usize>> = valid.iter().map(|o| &o.placements).collect();
        let mean = |xs: &[&RunOutcome]| {
            if xs.is_empty() {
                0.0
            } else {
                xs.iter().map(|o| o.subproblem_solves as f64).sum::<f64>() / xs.len() as f64
            }
        };
        let all: Vec<&RunOutcome> = outcomes.iter().collect();
        ExperimentStats {
            runs,
            valid_count: valid.len(),
            invalid_count: runs - valid.len(),
            energy_histogram: energies.into_values().collect(),
            defect_histogram,
            distinct_valid_solutions: distinct.len(),
            mean_subproblem_solves: mean(&all),
            mean_subproblem_solves_valid: mean(&valid),
        }
    }
}

/// Seeds `base_seed .. base_seed + runs`, or `base_seed` for every run when
/// `same_seed` is set.
pub fn experiment_seeds(base_seed: u64, runs: usize, same_seed: bool) -> Vec<u64> {
    (0..runs as u64)
        .map(|k| if same_seed { base_seed } else { base_seed + k })
        .collect()
}

/// Runs every seed on up to `jobs` threads. Outcomes come back in seed order.
pub fn run_experiment(
    problem: &TilingProblem,
    method: Method,
    solver_cfg: &SolverConfig,
    decompose_cfg: &DecomposeConfig,
    seeds: &[u64],
    jobs: usize,
) -> Result<(ExperimentStats, Vec<RunOutcome>)> {
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("an experiment needs at least one run".into()));
    }
    let one = |seed: u64| -> Result<RunOutcome> {
        let r = problem.solve(method, solver_cfg, decompose_cfg, seed)?;
        let report = problem.report(&r.best_assignment);
        Ok(RunOutcome {
            seed,
            energy: r.best_energy,
            valid: report.is_valid,
            defects: report.defects(),
            subproblem_solves: r.subproblem_solves,
            placements: r.best_assignment.ones(),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let outcomes: Vec<RunOutcome> = pool.install(|| seeds.par_iter().map(|&s| one(s)).collect::<Result<_>>())?;
    Ok((ExperimentStats::from_outcomes(&outcomes), outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::Board;

    fn tiny() -> TilingProblem {
        let inst = PuzzleInstance::tetrominoes(Board::new(4, 2).unwrap(), &[("O", 2)]).unwrap();
        TilingProblem::new(inst, PenaltyWeights::default())
    }

    #[test]
    fn methods_parse() {
        assert_eq!("decompose".parse::<Method>().unwrap(), Method::Decompose);
        assert!("qpu".parse::<Method>().is_err());
    }

    #[test]
    fn single_run_experiment() {
        let p = tiny();
        let (stats, outcomes) = run_experiment(
            &p,
            Method::Sa,
            &SolverConfig::default(),
            &DecomposeConfig::default(),
            &[3],
            1,
        )
        .unwrap();
        assert_eq!(stats.runs, 1);
        assert_eq!(stats.valid_count, 1);
        assert_eq!(stats.energy_histogram, vec![(0.0, 1)]);
        assert_eq!(stats.distinct_valid_solutions, 1);
        assert_eq!(outcomes[0].placements, vec![0, 2]);
    }

    #[test]
    fn same_seed_runs_agree() {
        let p = TilingProblem::new(
            PuzzleInstance::tetrominoes(Board::new(4, 4).unwrap(), &[("I", 2), ("O", 2)]).unwrap(),
            PenaltyWeights::default(),
        );
        let seeds = experiment_seeds(5, 4, true);
        let (stats, outcomes) =
            run_experiment(&p, Method::Tabu, &SolverConfig::default(), &DecomposeConfig::default(), &seeds, 2).unwrap();
        assert!(outcomes.windows(2).all(|w| w[0] == w[1]));
        assert!(stats.distinct_valid_solutions <= 1);
        assert_eq!(stats.valid_count + stats.invalid_count, 4);
    }

    #[test]
    fn histogram_orders_negative_energies() {
        let mk = |e: f64| RunOutcome {
            seed: 0,
            energy: e,
            valid: false,
            defects: 1,
            subproblem_solves: 2,
            placements: vec![],
        };
        let stats = ExperimentStats::from_outcomes(&[mk(2.0), mk(-1.0), mk(0.0), mk(2.0)]);
        assert_eq!(stats.energy_histogram, vec![(-1.0, 1), (0.0, 1), (2.0, 2)]);
        assert_eq!(stats.mean_subproblem_solves, 2.0);
        assert_eq!(stats.mean_subproblem_solves_valid, 0.0);
    }

    #[test]
    fn empty_seed_list_rejected() {
        let p = tiny();
        assert!(run_experiment(&p, Method::Sa, &SolverConfig::default(), &DecomposeConfig::default(), &[], 1).is_err());
    }
}
