use crate::error::{Error, Result};
use crate::qubo::{Assignment, Qubo};

use super::ENERGY_EPS;

/// Largest model [`brute_force`] will scan.
pub const BRUTE_FORCE_LIMIT: usize = 25;

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForce {
    pub min_energy: f64,
    /// Every global minimizer, in ascending order of the bit string `x_0 x_1 ...`.
    pub argmins: Vec<Assignment>,
}

/// Exhaustive scan of all `2^n` assignments in Gray-code order.
pub fn brute_force(q: &Qubo) -> Result<BruteForce> {
    let n = q.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let adjacency = q.adjacency();
    let mut field = q.linear().to_vec();
    let mut bits = vec![false; n];
    let mut energy = q.offset();
    let mut best = energy;
    let mut candidates: Vec<u32> = vec![0];
    let mut pattern: u32 = 0;

    for k in 1u64..(1u64 << n) {
        let i = k.trailing_zeros() as usize;
        let (delta, sign) = if bits[i] { (-field[i], -1.0) } else { (field[i], 1.0) };
        energy += delta;
        bits[i] = !bits[i];
        pattern ^= 1 << i;
        for &(j, b) in adjacency.neighbors(i) {
            field[j] += sign * b;
        }
        if energy < best - ENERGY_EPS {
            best = energy;
            candidates.clear();
            candidates.push(pattern);
        } else if energy <= best + ENERGY_EPS {
            best = best.min(energy);
            candidates.push(pattern);
        }
    }

    // Re-evaluate survivors from scratch so the reported minimum carries no
    // accumulated rounding.
    let mut scored: Vec<(Assignment, f64)> = candidates
        .into_iter()
        .map(|p| {
            let x = Assignment::from_pattern(u64::from(p), n);
            let e = q.energy(&x);
            (x, e)
        })
        .collect();
    let min_energy = scored.iter().map(|(_, e)| *e).fold(f64::INFINITY, f64::min);
    scored.retain(|(_, e)| *e <= min_energy + ENERGY_EPS);
    let mut argmins: Vec<Assignment> = scored.into_iter().map(|(x, _)| x).collect();
    argmins.sort();
    Ok(BruteForce { min_energy, argmins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::{build_qubo, PenaltyWeights};
    use crate::puzzle::{Board, PuzzleInstance};

    #[test]
    fn single_positive_variable() {
        let q = Qubo::from_parts(vec![2.0], [], 0.0).unwrap();
        let r = brute_force(&q).unwrap();
        assert_eq!(r.min_energy, 0.0);
        assert_eq!(r.argmins, vec![Assignment::from_bits([0])]);
    }

    #[test]
    fn two_o_pieces_on_two_by_four() {
        let inst = PuzzleInstance::tetrominoes(Board::new(4, 2).unwrap(), &[("O", 2)]).unwrap();
        let q = build_qubo(&inst.catalog(), &inst.counts(), PenaltyWeights::default());
        let r = brute_force(&q).unwrap();
        assert_eq!(r.min_energy, 0.0);
        assert_eq!(r.argmins, vec![Assignment::from_bits([1, 0, 1])]);
    }

    #[test]
    fn ties_listed_in_order() {
        let q = Qubo::new(2);
        let r = brute_force(&q).unwrap();
        let strings: Vec<String> = r.argmins.iter().map(ToString::to_string).collect();
        assert_eq!(strings, vec!["00", "01", "10", "11"]);
    }

    #[test]
    fn refuses_large_models() {
        assert!(matches!(
            brute_force(&Qubo::new(26)),
            Err(Error::TooLarge { n: 26, limit: 25 })
        ));
    }

    #[test]
    fn matches_direct_enumeration() {
        let q = Qubo::from_parts(
            vec![1.0, -3.0, 2.0, -1.0, 0.5],
            [((0, 1), 2.0), ((1, 2), -1.5), ((2, 3), 4.0), ((0, 4), -2.0), ((3, 4), 1.0)],
            1.0,
        )
        .unwrap();
        let direct = (0..32u64)
            .map(|p| q.energy(&Assignment::from_pattern(p, 5)))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(brute_force(&q).unwrap().min_energy, direct);
    }
}
