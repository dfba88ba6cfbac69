//! Polyomino tiling puzzles as QUBO/Ising penalty models.
//!
//! Each placement of a piece on the board is one binary variable. The penalty
//! `A * sum_j (c_j - sum_{i in I_j} q_i)^2 + B * sum_k (1 - sum_{i in I_k} q_i)^2`
//! is zero exactly on valid tilings, so any sampler that reaches energy 0 has
//! found a solution. The crate ships the model builder, annealing, tabu and
//! decomposition samplers, and an exact-cover enumerator used as ground truth.

pub mod decompose;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod format;
pub mod ising;
pub mod penalty;
pub mod puzzle;
pub mod qubo;
pub mod shape;
pub mod solution;
pub mod solvers;

pub use decompose::{clamp, select_perturbed, select_subproblem, solve_decomposed, DecomposeConfig, SubProblem, Subsolver};
pub use error::{Error, Result};
pub use exact::{build_cover_problem, enumerate_exact, enumerate_exact_with, symmetry_breakdown, BoardSymmetry, CoverProblem, Enumeration, SymmetryBreakdown, TieBreak, TilingSolution};
pub use experiment::{run_experiment, ExperimentStats, Method, RunOutcome, TilingProblem};
pub use ising::{from_ising, to_ising, IsingModel};
pub use penalty::{build_qubo, hamiltonian_terms, PenaltyWeights};
pub use puzzle::{combination_count, enumerate_placements, Board, PieceSpec, Placement, PlacementCatalog, PuzzleInstance};
pub use qubo::{Assignment, Qubo};
pub use shape::{base_shapes, Orientation, Shape, ShapeId};
pub use solution::{decode, parse_solution, render, validate, Tiling, ValidationReport};
pub use solvers::{brute_force, simulated_annealing, tabu_search, SolveResult, SolverConfig};
