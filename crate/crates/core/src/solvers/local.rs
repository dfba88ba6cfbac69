use crate::qubo::{Adjacency, Assignment, Qubo};

/// Assignment plus incrementally maintained local fields.
///
/// `field[i] = linear_i + sum_j quadratic_ij x_j`, so flipping `i` changes the
/// energy by `(1 - 2 x_i) * field[i]`. A flip touches only the neighbors of `i`.
#[derive(Clone, Debug)]
pub struct FlipState<'a> {
    adjacency: &'a Adjacency,
    x: Assignment,
    field: Vec<f64>,
    energy: f64,
}

impl<'a> FlipState<'a> {
    pub fn new(q: &Qubo, adjacency: &'a Adjacency, x: Assignment) -> Self {
        assert_eq!(x.len(), q.n(), "assignment length does not match model");
        let mut field = q.linear().to_vec();
        for (&(i, j), &b) in q.quadratic() {
            if x.get(j) {
                field[i] += b;
            }
            if x.get(i) {
                field[j] += b;
            }
        }
        let energy = q.energy(&x);
        FlipState {
            adjacency,
            x,
            field,
            energy,
        }
    }

    pub fn delta(&self, i: usize) -> f64 {
        if self.x.get(i) {
            -self.field[i]
        } else {
            self.field[i]
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.energy += self.delta(i);
        let sign = if self.x.get(i) { -1.0 } else { 1.0 };
        self.x.flip(i);
        for &(j, b) in self.adjacency.neighbors(i) {
            self.field[j] += sign * b;
        }
    }

    /// `linear_i + sum_j quadratic_ij x_j`.
    pub fn field(&self, i: usize) -> f64 {
        self.field[i]
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn assignment(&self) -> &Assignment {
        &self.x
    }

    pub fn into_assignment(self) -> Assignment {
        self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}
