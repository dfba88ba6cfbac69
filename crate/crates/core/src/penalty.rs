//! Penalty Hamiltonian for tiling: `H = A * H1 + B * H2` where
//! `H1 = sum_j (c_j - sum_{i in I_j} q_i)^2` fixes the piece counts and
//! `H2 = sum_k (1 - sum_{i in I_k} q_i)^2` asks for every cell to be covered once.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::puzzle::PlacementCatalog;
use crate::qubo::{Assignment, Qubo};
use crate::shape::ShapeId;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub a: f64,
    pub b: f64,
}

impl PenaltyWeights {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "penalty weights must be positive, got A={a}, B={b}"
            )));
        }
        Ok(PenaltyWeights { a, b })
    }

    /// Parses `A,B`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::InvalidConfig(format!("penalty weights must be given as A,B, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("bad weight {t:?}")))
        };
        Self::new(parse(a)?, parse(b)?)
    }
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        PenaltyWeights { a: 1.0, b: 1.0 }
    }
}

/// Expands the penalty into canonical QUBO form using `q^2 = q`.
///
/// A squared constraint `(c - sum_{i in S} q_i)^2` contributes `1 - 2c` to each
/// linear term in `S`, `2` to each pair in `S` and `c^2` to the offset.
pub fn build_qubo(catalog: &PlacementCatalog, counts: &BTreeMap<ShapeId, usize>, weights: PenaltyWeights) -> Qubo {
    let mut q = Qubo::new(catalog.len());
    for (id, range) in catalog.shape_ranges() {
        let c = counts.get(id).copied().unwrap_or(0) as f64;
        add_squared_constraint(&mut q, range.clone(), c, weights.a);
    }
    for incidence in catalog.cell_incidence() {
        add_squared_constraint(&mut q, incidence.iter().copied(), 1.0, weights.b);
    }
    q
}

fn add_squared_constraint(q: &mut Qubo, vars: impl IntoIterator<Item = usize>, target: f64, weight: f64) {
    let vars: Vec<usize> = vars.into_iter().collect();
    q.add_offset(weight * target * target);
    for (k, &i) in vars.iter().enumerate() {
        q.add_linear(i, weight * (1.0 - 2.0 * target));
        for &j in &vars[k + 1..] {
            q.add_quadratic(i, j, 2.0 * weight);
        }
    }
}

/// Direct, unexpanded evaluation of the two penalty families.
pub fn hamiltonian_terms(catalog: &PlacementCatalog, counts: &BTreeMap<ShapeId, usize>, x: &Assignment) -> (f64, f64) {
    assert_eq!(x.len(), catalog.len(), "assignment length does not match catalog");
    let h1 = catalog
        .shape_ranges()
        .iter()
        .map(|(id, range)| {
            let chosen = range.clone().filter(|&i| x.get(i)).count() as f64;
            let c = counts.get(id).copied().unwrap_or(0) as f64;
            (c - chosen).powi(2)
        })
        .sum();
    let h2 = catalog
        .cell_incidence()
        .iter()
        .map(|inc| {
            let covered = inc.iter().filter(|&&i| x.get(i)).count() as f64;
            (1.0 - covered).powi(2)
        })
        .sum();
    (h1, h2)
}
