//! qbsolv-style decomposition: repeatedly pick a bounded variable subset, clamp
//! everything else to the incumbent, solve the reduced model and keep the
//! result when it lowers the total energy.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::qubo::{Adjacency, Assignment, Qubo};
use crate::solvers::{
    brute_force, seeded_rng, simulated_annealing, tabu_search_with, FlipState, RoundRecord, SolveResult, SolverConfig,
    SolverRng, BRUTE_FORCE_LIMIT, ENERGY_EPS,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Subsolver {
    #[default]
    Tabu,
    SimulatedAnnealing,
    BruteForce,
}

impl FromStr for Subsolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tabu" => Ok(Subsolver::Tabu),
            "sa" | "simulated-annealing" => Ok(Subsolver::SimulatedAnnealing),
            "brute" | "brute-force" => Ok(Subsolver::BruteForce),
            _ => Err(Error::InvalidConfig(format!("unknown subsolver {s:?}"))),
        }
    }
}

impl fmt::Display for Subsolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subsolver::Tabu => "tabu",
            Subsolver::SimulatedAnnealing => "simulated-annealing",
            Subsolver::BruteForce => "brute-force",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecomposeConfig {
    pub sub_size: usize,
    pub max_rounds: usize,
    /// Consecutive rounds without a strict energy decrease before stopping.
    pub stall_rounds: usize,
    pub subsolver: Subsolver,
    /// Start from a uniformly random assignment instead of all zeros.
    pub random_start: bool,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            sub_size: 50,
            max_rounds: 5000,
            stall_rounds: 300,
            subsolver: Subsolver::Tabu,
            random_start: false,
        }
    }
}

impl DecomposeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sub_size == 0 {
            return Err(Error::InvalidConfig("sub_size must be at least 1".into()));
        }
        if self.stall_rounds == 0 {
            return Err(Error::InvalidConfig("stall_rounds must be at least 1".into()));
        }
        if self.subsolver == Subsolver::BruteForce && self.sub_size > BRUTE_FORCE_LIMIT {
            return Err(Error::InvalidConfig(format!(
                "brute-force subsolver needs sub_size <= {BRUTE_FORCE_LIMIT}, got {}",
                self.sub_size
            )));
        }
        Ok(())
    }
}

/// A reduced model over `variables`, every other variable clamped.
#[derive(Clone, Debug, PartialEq)]
pub struct SubProblem {
    pub variables: Vec<usize>,
    pub reduced: Qubo,
}

impl SubProblem {
    /// Writes a sub-assignment back into a copy of the incumbent.
    pub fn merge(&self, incumbent: &Assignment, sub: &Assignment) -> Assignment {
        let mut x = incumbent.clone();
        for (k, &v) in self.variables.iter().enumerate() {
            x.set(v, sub.get(k));
        }
        x
    }

    /// The incumbent's values on the subset.
    pub fn restrict(&self, incumbent: &Assignment) -> Assignment {
        Assignment::from_bits(self.variables.iter().map(|&v| incumbent.bits()[v]))
    }
}

/// Builds the reduced model. Couplers to clamped ones fold into linear terms;
/// terms among clamped variables fold into the offset.
pub fn clamp(q: &Qubo, incumbent: &Assignment, subset: &[usize]) -> SubProblem {
    assert_eq!(incumbent.len(), q.n(), "incumbent length does not match model");
    let mut pos = vec![usize::MAX; q.n()];
    for (k, &v) in subset.iter().enumerate() {
        assert!(v < q.n(), "subset index {v} out of range");
        assert!(pos[v] == usize::MAX, "subset index {v} repeated");
        pos[v] = k;
    }
    let mut linear: Vec<f64> = subset.iter().map(|&v| q.linear()[v]).collect();
    let mut offset = q.offset();
    for (i, &a) in q.linear().iter().enumerate() {
        if pos[i] == usize::MAX && incumbent.get(i) {
            offset += a;
        }
    }
    let mut quadratic = Vec::new();
    for (&(i, j), &b) in q.quadratic() {
        match (pos[i] != usize::MAX, pos[j] != usize::MAX) {
            (true, true) => quadratic.push(((pos[i], pos[j]), b)),
            (true, false) => {
                if incumbent.get(j) {
                    linear[pos[i]] += b;
                }
            }
            (false, true) => {
                if incumbent.get(i) {
                    linear[pos[j]] += b;
                }
            }
            (false, false) => {
                if incumbent.get(i) && incumbent.get(j) {
                    offset += b;
                }
            }
        }
    }
    SubProblem {
        variables: subset.to_vec(),
        reduced: Qubo::from_parts(linear, quadratic, offset).expect("subset indices are distinct"),
    }
}

/// The `size` variables whose single flip would change the energy the most,
/// largest impact first; ties go to the lower index.
pub fn select_subproblem(q: &Qubo, incumbent: &Assignment, size: usize) -> Vec<usize> {
    rank_by_impact(&local_fields(q, incumbent), size)
}

// |flip delta| equals |local field|.
fn rank_by_impact(field: &[f64], size: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..field.len()).collect();
    order.sort_by(|&a, &b| field[b].abs().total_cmp(&field[a].abs()).then(a.cmp(&b)));
    order.truncate(size.min(field.len()));
    order
}

/// Selection used after a non-improving round. Set bits of the incumbent take
/// up to half the budget (a random sample when there are more); the remaining
/// slots go to unset bits ranked by flip delta plus uniform noise in
/// `[0, max |coefficient|)`, so cheap insertions are favored but vary between
/// rounds.
pub fn select_perturbed(q: &Qubo, incumbent: &Assignment, size: usize, rng: &mut impl Rng) -> Vec<usize> {
    assert_eq!(incumbent.len(), q.n(), "incumbent length does not match model");
    let n = q.n();
    let size = size.min(n);
    if size == n {
        return (0..n).collect();
    }
    let field = local_fields(q, incumbent);
    perturbed_from_fields(incumbent, &field, q.max_abs_coefficient(), size, rng)
}

fn local_fields(q: &Qubo, x: &Assignment) -> Vec<f64> {
    let mut field = q.linear().to_vec();
    for (&(i, j), &b) in q.quadratic() {
        if x.get(j) {
            field[i] += b;
        }
        if x.get(i) {
            field[j] += b;
        }
    }
    field
}

fn perturbed_from_fields(x: &Assignment, field: &[f64], noise: f64, size: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut ones = x.ones();
    ones.shuffle(rng);
    let mut zeros: Vec<(f64, usize)> = (0..x.len())
        .filter(|&i| !x.get(i))
        .map(|i| (field[i] + noise * rng.random::<f64>(), i))
        .collect();
    zeros.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    // Too few unset bits: give the spare room back to set ones.
    let take_ones = (size / 2).max(size.saturating_sub(zeros.len())).min(ones.len());
    let mut subset: Vec<usize> = ones[..take_ones].to_vec();
    let room = size - subset.len();
    subset.extend(zeros.into_iter().take(room).map(|(_, i)| i));
    subset.sort_unstable();
    subset
}

fn run_subsolver(
    sub: &SubProblem,
    start: Assignment,
    kind: Subsolver,
    cfg: &SolverConfig,
    rng: &mut SolverRng,
    seed: u64,
) -> Result<Assignment> {
    let q = &sub.reduced;
    Ok(match kind {
        Subsolver::Tabu => tabu_search_with(q, cfg, start, seed, true)?.best_assignment,
        Subsolver::SimulatedAnnealing => simulated_annealing(q, cfg, seed)?.best_assignment,
        Subsolver::BruteForce => {
            // Any minimizer other than the start lets the driver walk plateaus.
            let mut argmins = brute_force(q)?.argmins;
            argmins.retain(|a| *a != start);
            if argmins.is_empty() {
                start
            } else {
                argmins.swap_remove(rng.random_range(0..argmins.len()))
            }
        }
    })
}

/// Runs the decomposition loop.
///
/// The first round takes the highest-impact variables; after a round that
/// fails to lower the energy, the next subset comes from [`select_perturbed`].
/// A sub-solution is merged when it does not raise the total energy, so the
/// incumbent can drift across equal-energy plateaus, but only a strict
/// decrease resets the stall counter. Stops at the target energy, after
/// `stall_rounds` consecutive rounds without a strict decrease, or at
/// `max_rounds`. When `sub_size >= n` the single subproblem is the whole
/// model and the run is one subsolver call.
pub fn solve_decomposed(q: &Qubo, cfg: &DecomposeConfig, solver_cfg: &SolverConfig, seed: u64) -> Result<SolveResult> {
    cfg.validate()?;
    solver_cfg.validate()?;
    let mut rng: SolverRng = seeded_rng(seed);
    let n = q.n();
    let adjacency = q.adjacency();
    let start = if cfg.random_start {
        Assignment::from_bits((0..n).map(|_| u8::from(rng.random::<bool>())))
    } else {
        Assignment::zeros(n)
    };
    let mut state = FlipState::new(q, &adjacency, start);
    let target = solver_cfg.target_energy;
    let hit = |e: f64| target.is_some_and(|t| e <= t + ENERGY_EPS);
    let noise = q.max_abs_coefficient();

    let mut trace = Vec::new();
    let mut stall = 0;
    let mut solves = 0;
    while n > 0 && solves < cfg.max_rounds && stall < cfg.stall_rounds && !hit(state.energy()) {
        let field: Vec<f64> = (0..n).map(|i| state.field(i)).collect();
        let mut subset = if stall == 0 {
            rank_by_impact(&field, cfg.sub_size)
        } else {
            perturbed_from_fields(state.assignment(), &field, noise, cfg.sub_size.min(n), &mut rng)
        };
        subset.sort_unstable();
        let sub = clamp_with(q, &adjacency, &state, &subset);
        debug_assert!(clamp_spot_check(q, state.assignment(), &sub));
        let sub_seed = if solves == 0 { seed } else { rng.next_u64() };
        let begin = sub.restrict(state.assignment());
        let sub_best = run_subsolver(&sub, begin, cfg.subsolver, solver_cfg, &mut rng, sub_seed)?;
        solves += 1;

        let before = state.energy();
        let after = sub.reduced.energy(&sub_best);
        let accepted = after <= before + ENERGY_EPS;
        if accepted {
            for (k, &v) in subset.iter().enumerate() {
                if state.assignment().get(v) != sub_best.get(k) {
                    state.flip(v);
                }
            }
        }
        if after < before - ENERGY_EPS {
            stall = 0;
        } else {
            stall += 1;
        }
        trace.push(RoundRecord {
            round: solves,
            subset_size: subset.len(),
            energy_before: before,
            energy_after: state.energy(),
            accepted,
            subproblem_solves: solves,
        });
        if subset.len() == n {
            break;
        }
    }

    let mut result = SolveResult::finish(q, state.into_assignment(), solves, seed, target);
    result.subproblem_solves = solves;
    result.trace = trace;
    Ok(result)
}

/// [`clamp`] driven by the incumbent's maintained local fields: O(size + edges
/// inside the subset) instead of a scan over every coupler.
fn clamp_with(q: &Qubo, adjacency: &Adjacency, state: &FlipState<'_>, subset: &[usize]) -> SubProblem {
    let x = state.assignment();
    let mut pos = vec![usize::MAX; q.n()];
    for (k, &v) in subset.iter().enumerate() {
        pos[v] = k;
    }
    // field_v = a_v + sum_{u on} b_uv; the clamped part drops couplers to
    // subset members that are on.
    let mut linear = Vec::with_capacity(subset.len());
    let mut quadratic = Vec::new();
    let mut inside = 0.0; // energy carried by subset variables in the incumbent
    for (k, &v) in subset.iter().enumerate() {
        let mut lin = state.field(v);
        for &(u, b) in adjacency.neighbors(v) {
            let pu = pos[u];
            if pu != usize::MAX {
                if x.get(u) {
                    lin -= b;
                }
                if pu > k {
                    quadratic.push(((k, pu), b));
                    if x.get(u) && x.get(v) {
                        inside += b;
                    }
                }
            }
        }
        if x.get(v) {
            inside += lin;
        }
        linear.push(lin);
    }
    let offset = state.energy() - inside;
    SubProblem {
        variables: subset.to_vec(),
        reduced: Qubo::from_parts(linear, quadratic, offset).expect("subset indices are distinct"),
    }
}

fn clamp_spot_check(q: &Qubo, x: &Assignment, sub: &SubProblem) -> bool {
    let y = sub.restrict(x);
    (sub.reduced.energy(&y) - q.energy(x)).abs() < 1e-6
}
