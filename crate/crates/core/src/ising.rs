//! Ising form `E(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i + offset` and its
//! exact correspondence with QUBO under `q = (s + 1) / 2`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qubo::Qubo;

#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    n: usize,
    fields: Vec<f64>,
    couplings: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl IsingModel {
    pub fn from_parts(
        fields: Vec<f64>,
        couplings: impl IntoIterator<Item = ((usize, usize), f64)>,
        offset: f64,
    ) -> Result<Self> {
        let n = fields.len();
        let mut map = BTreeMap::new();
        for ((i, j), v) in couplings {
            if i == j || i >= n || j >= n {
                return Err(Error::Format(format!("coupling ({i}, {j}) invalid for {n} spins")));
            }
            let key = if i < j { (i, j) } else { (j, i) };
            let e = map.entry(key).or_insert(0.0);
            *e += v;
            if *e == 0.0 {
                map.remove(&key);
            }
        }
        Ok(IsingModel {
            n,
            fields,
            couplings: map,
            offset,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Energy of a spin vector with entries in {-1, +1}.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        assert_eq!(spins.len(), self.n, "spin vector length does not match model");
        let mut e = self.offset;
        for (i, &h) in self.fields.iter().enumerate() {
            e -= h * f64::from(spins[i]);
        }
        for (&(i, j), &jij) in &self.couplings {
            e -= jij * f64::from(spins[i]) * f64::from(spins[j]);
        }
        e
    }
}

/// Substitutes `q = (s + 1) / 2`:
/// `J_ij = -b_ij / 4`, `h_i = -(a_i / 2 + sum_j b_ij / 4)`,
/// `offset = c + sum_i a_i / 2 + sum_{i<j} b_ij / 4`.
pub fn to_ising(q: &Qubo) -> IsingModel {
    let mut fields: Vec<f64> = q.linear().iter().map(|a| -a / 2.0).collect();
    let mut offset = q.offset() + q.linear().iter().map(|a| a / 2.0).sum::<f64>();
    let mut couplings = BTreeMap::new();
    for (&(i, j), &b) in q.quadratic() {
        couplings.insert((i, j), -b / 4.0);
        fields[i] -= b / 4.0;
        fields[j] -= b / 4.0;
        offset += b / 4.0;
    }
    IsingModel {
        n: q.n(),
        fields,
        couplings,
        offset,
    }
}

/// Substitutes `s = 2q - 1`:
/// `b_ij = -4 J_ij`, `a_i = -2 h_i + 2 sum_j J_ij`,
/// `c = offset + sum_i h_i - sum_{i<j} J_ij`.
pub fn from_ising(m: &IsingModel) -> Qubo {
    let mut linear: Vec<f64> = m.fields().iter().map(|h| -2.0 * h).collect();
    let mut offset = m.offset() + m.fields().iter().sum::<f64>();
    let mut quadratic = Vec::with_capacity(m.couplings().len());
    for (&(i, j), &jij) in m.couplings() {
        quadratic.push(((i, j), -4.0 * jij));
        linear[i] += 2.0 * jij;
        linear[j] += 2.0 * jij;
        offset -= jij;
    }
    Qubo::from_parts(linear, quadratic, offset).expect("couplings already validated")
}
