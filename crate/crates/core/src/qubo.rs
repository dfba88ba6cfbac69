//! Sparse QUBO models and binary assignments.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A 0/1 vector, one bit per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment(vec![0; n])
    }

    /// Builds from arbitrary bytes; anything nonzero counts as 1.
    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Self {
        Assignment(bits.into_iter().map(|b| u8::from(b != 0)).collect())
    }

    /// Bits of `pattern`, least significant bit first.
    pub fn from_pattern(pattern: u64, n: usize) -> Self {
        Assignment((0..n).map(|i| ((pattern >> i) & 1) as u8).collect())
    }

    /// Indices set to 1, ascending.
    pub fn from_ones(n: usize, ones: &[usize]) -> Self {
        let mut bits = vec![0; n];
        for &i in ones {
            bits[i] = 1;
        }
        Assignment(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i] != 0
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = u8::from(value);
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] ^= 1;
    }

    pub fn ones(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] != 0).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b != 0).count()
    }

    /// Ising spins under the map 1 -> +1, 0 -> -1.
    pub fn spins(&self) -> Vec<i8> {
        self.0.iter().map(|&b| if b != 0 { 1 } else { -1 }).collect()
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b != 0 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `E(x) = sum_i linear_i x_i + sum_{i<j} quadratic_ij x_i x_j + offset`.
///
/// Quadratic keys always satisfy `i < j < n` and zero entries are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Qubo {
    n: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl Qubo {
    pub fn new(n: usize) -> Self {
        Qubo {
            n,
            linear: vec![0.0; n],
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    /// Builds a model from raw parts, validating indices and dropping zero couplers.
    pub fn from_parts(
        linear: Vec<f64>,
        quadratic: impl IntoIterator<Item = ((usize, usize), f64)>,
        offset: f64,
    ) -> Result<Self> {
        let mut q = Qubo {
            n: linear.len(),
            linear,
            quadratic: BTreeMap::new(),
            offset,
        };
        for ((i, j), v) in quadratic {
            if i == j || i >= q.n || j >= q.n {
                return Err(Error::Format(format!(
                    "coupler ({i}, {j}) invalid for {} variables",
                    q.n
                )));
            }
            q.add_quadratic(i, j, v);
        }
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn coupler(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    pub fn add_linear(&mut self, i: usize, v: f64) {
        self.linear[i] += v;
    }

    /// Adds to the `(i, j)` coupler; `i == j` folds into the linear term since `x^2 = x`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.n && j < self.n, "coupler index out of range");
        if i == j {
            self.linear[i] += v;
            return;
        }
        let key = if i < j { (i, j) } else { (j, i) };
        let entry = self.quadratic.entry(key).or_insert(0.0);
        *entry += v;
        if *entry == 0.0 {
            self.quadratic.remove(&key);
        }
    }

    pub fn add_offset(&mut self, v: f64) {
        self.offset += v;
    }

    /// Energy of an assignment. Panics on length mismatch.
    pub fn energy(&self, x: &Assignment) -> f64 {
        assert_eq!(x.len(), self.n, "assignment length does not match model");
        let bits = x.bits();
        let mut e = self.offset;
        for (i, &a) in self.linear.iter().enumerate() {
            if bits[i] != 0 {
                e += a;
            }
        }
        for (&(i, j), &b) in &self.quadratic {
            if bits[i] != 0 && bits[j] != 0 {
                e += b;
            }
        }
        e
    }

    pub fn try_energy(&self, x: &Assignment) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(self.energy(x))
    }

    /// Largest absolute linear or quadratic coefficient.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.linear
            .iter()
            .chain(self.quadratic.values())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }
}

/// Per-variable neighbor lists for fast local-field updates.
#[derive(Clone, Debug)]
pub struct Adjacency {
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl Adjacency {
    pub fn new(q: &Qubo) -> Self {
        let mut neighbors = vec![Vec::new(); q.n()];
        for (&(i, j), &b) in q.quadratic() {
            neighbors[i].push((j, b));
            neighbors[j].push((i, b));
        }
        Adjacency { neighbors }
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }
}
