//! Energy-zero certificates versus independent validation on the 5x8 instance.

use rand::Rng;
use tilequbo::solvers::seeded_rng;
use tilequbo::*;

fn standard() -> (PuzzleInstance, PlacementCatalog, Qubo) {
    let inst = PuzzleInstance::standard();
    let cat = inst.catalog();
    let q = build_qubo(&cat, &inst.counts(), PenaltyWeights::default());
    (inst, cat, q)
}

#[test]
fn random_assignments_positive_energy_means_invalid() {
    let (inst, cat, q) = standard();
    let mut rng = seeded_rng(31);
    for k in 0..10_000 {
        // Sparse draws land near ten placements, where near-misses live.
        let p = [0.5, 0.05, 0.023][k % 3];
        let x = Assignment::from_bits((0..q.n()).map(|_| u8::from(rng.random::<f64>() < p)));
        let e = q.energy(&x);
        let t = decode(&x, &cat);
        let r = validate(&t, &inst);
        assert!(e >= 0.0);
        assert_eq!(e == 0.0, r.is_valid, "assignment {:?}", x.ones());
        let covered: usize = t.coverage(inst.board()).iter().sum();
        assert_eq!(covered, 4 * t.chosen.len());
        let grid = render(&t, inst.board());
        assert_eq!(grid.contains('#'), !r.overlap_cells.is_empty());
        assert_eq!(grid.contains('.'), !r.gap_cells.is_empty());
    }
}

#[test]
fn swapped_placement_breaks_a_tiling() {
    let (inst, cat, q) = standard();
    let sol = enumerate_exact(&build_cover_problem(&cat, &inst.counts()), Some(1)).solutions.remove(0);
    let x = Assignment::from_ones(q.n(), &sol.0);
    assert_eq!(decode(&x, &cat).chosen.len(), 10);
    let ones = x.ones();
    // Replace the first chosen placement with a same-shape one that overlaps
    // another chosen piece.
    let old = cat.placement(ones[0]);
    let range = cat.shape_range(&old.shape).unwrap();
    let replacement = range
        .filter(|&i| !x.get(i))
        .find(|&i| {
            let cells = &cat.placement(i).cells;
            ones[1..].iter().any(|&j| cat.placement(j).cells.iter().any(|c| cells.contains(c)))
        })
        .unwrap();
    let mut y = x.clone();
    y.set(ones[0], false);
    y.set(replacement, true);
    let r = validate(&decode(&y, &cat), &inst);
    assert!(!r.is_valid);
    assert!(!r.overlap_cells.is_empty());
    assert!(!r.gap_cells.is_empty());
    assert!(q.energy(&y) > 0.0);
}

#[test]
fn empty_tiling_energy_is_offset() {
    let (inst, cat, q) = standard();
    let x = Assignment::zeros(q.n());
    assert_eq!(q.energy(&x), 60.0);
    let r = validate(&decode(&x, &cat), &inst);
    assert_eq!(r.gap_cells.len(), 40);
    assert!(!r.is_valid);
}

#[test]
fn solver_outputs_agree_with_validator() {
    let problem = TilingProblem::new(PuzzleInstance::standard(), PenaltyWeights::default());
    for seed in 0..5 {
        for method in [Method::Tabu, Method::Decompose] {
            let r = problem
                .solve(method, &SolverConfig::default(), &DecomposeConfig::default(), seed)
                .unwrap();
            assert_eq!(r.best_energy, problem.qubo.energy(&r.best_assignment));
            assert_eq!(r.best_energy == 0.0, problem.report(&r.best_assignment).is_valid);
        }
    }
}
