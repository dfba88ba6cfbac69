//! Polyomino shapes and their orientations under the dihedral group of the square.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A cell offset `(row, col)`.
pub type Cell = (i32, i32);

/// Label of a shape within a puzzle instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ShapeId(String);

impl ShapeId {
    pub fn new(label: impl Into<String>) -> Self {
        ShapeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Glyph used when rendering a board: the first character of the label.
    pub fn glyph(&self) -> char {
        self.0.chars().next().unwrap_or('?')
    }
}

impl fmt::Display for ShapeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ShapeId {
    fn from(s: &str) -> Self {
        ShapeId::new(s)
    }
}

/// The built-in tetromino labels, in catalog order.
pub const TETROMINO_LABELS: [&str; 5] = ["I", "O", "L", "T", "S"];

/// A polyomino with normalized, edge-connected cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    id: ShapeId,
    cells: Vec<Cell>,
}

impl Shape {
    /// Builds a shape from arbitrary offsets. The cells are normalized so that the
    /// minimum row and column are both zero.
    pub fn new(id: impl Into<ShapeId>, cells: &[Cell]) -> Result<Self, Error> {
        let id = id.into();
        if id.as_str().is_empty() {
            return Err(Error::InvalidShape {
                shape: id.to_string(),
                reason: "empty label".into(),
            });
        }
        if cells.is_empty() {
            return Err(Error::InvalidShape {
                shape: id.to_string(),
                reason: "no cells".into(),
            });
        }
        let unique: BTreeSet<Cell> = cells.iter().copied().collect();
        if unique.len() != cells.len() {
            return Err(Error::InvalidShape {
                shape: id.to_string(),
                reason: "duplicate cells".into(),
            });
        }
        let cells = normalize(cells.iter().copied());
        if !is_connected(&cells) {
            return Err(Error::InvalidShape {
                shape: id.to_string(),
                reason: "cells are not edge-connected".into(),
            });
        }
        Ok(Shape { id, cells })
    }

    /// One of the five built-in tetrominoes by label.
    pub fn tetromino(label: &str) -> Option<Shape> {
        let cells: &[Cell] = match label {
            "I" => &[(0, 0), (0, 1), (0, 2), (0, 3)],
            "O" => &[(0, 0), (0, 1), (1, 0), (1, 1)],
            "L" => &[(0, 0), (1, 0), (2, 0), (2, 1)],
            "T" => &[(0, 0), (0, 1), (0, 2), (1, 1)],
            "S" => &[(0, 1), (0, 2), (1, 0), (1, 1)],
            _ => return None,
        };
        Some(Shape::new(label, cells).expect("built-in tetromino is well formed"))
    }

    pub fn id(&self) -> &ShapeId {
        &self.id
    }

    /// Normalized cells in ascending `(row, col)` order.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    /// Distinct orientations under the 8 rotations/reflections, sorted
    /// lexicographically by their cell lists.
    pub fn orientations(&self) -> Vec<Orientation> {
        let set: BTreeSet<Vec<Cell>> = SYMMETRIES
            .iter()
            .map(|t| normalize(self.cells.iter().map(|&c| t(c))))
            .collect();
        set.into_iter().map(|cells| Orientation { cells }).collect()
    }
}

/// The five tetrominoes I, O, L, T, S.
pub fn base_shapes() -> Vec<Shape> {
    TETROMINO_LABELS
        .iter()
        .map(|l| Shape::tetromino(l).expect("known label"))
        .collect()
}

/// One fixed orientation of a shape, normalized to the origin.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Orientation {
    cells: Vec<Cell>,
}

impl Orientation {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// `(rows, cols)` of the bounding box.
    pub fn extent(&self) -> (usize, usize) {
        let rows = self.cells.iter().map(|c| c.0).max().unwrap_or(-1) + 1;
        let cols = self.cells.iter().map(|c| c.1).max().unwrap_or(-1) + 1;
        (rows as usize, cols as usize)
    }
}

type Transform = fn(Cell) -> Cell;

const SYMMETRIES: [Transform; 8] = [
    |(r, c)| (r, c),
    |(r, c)| (c, -r),
    |(r, c)| (-r, -c),
    |(r, c)| (-c, r),
    |(r, c)| (r, -c),
    |(r, c)| (c, r),
    |(r, c)| (-r, c),
    |(r, c)| (-c, -r),
];

fn normalize(cells: impl Iterator<Item = Cell>) -> Vec<Cell> {
    let cells: Vec<Cell> = cells.collect();
    let min_r = cells.iter().map(|c| c.0).min().unwrap_or(0);
    let min_c = cells.iter().map(|c| c.1).min().unwrap_or(0);
    let mut out: Vec<Cell> = cells.iter().map(|&(r, c)| (r - min_r, c - min_c)).collect();
    out.sort_unstable();
    out
}

fn is_connected(cells: &[Cell]) -> bool {
    let all: BTreeSet<Cell> = cells.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([cells[0]]);
    seen.insert(cells[0]);
    while let Some((r, c)) = queue.pop_front() {
        for n in [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)] {
            if all.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == all.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_tetrominoes_of_four_cells() {
        let shapes = base_shapes();
        assert_eq!(shapes.len(), 5);
        for s in &shapes {
            assert_eq!(s.size(), 4);
            assert_eq!(s.cells().iter().map(|c| c.0).min(), Some(0));
            assert_eq!(s.cells().iter().map(|c| c.1).min(), Some(0));
            assert!(is_connected(s.cells()));
        }
    }

    #[test]
    fn orientation_counts() {
        let counts: Vec<usize> = base_shapes().iter().map(|s| s.orientations().len()).collect();
        assert_eq!(counts, vec![2, 1, 8, 4, 4]);
    }

    #[test]
    fn horizontal_i_comes_first() {
        let o = Shape::tetromino("I").unwrap().orientations();
        assert_eq!(o[0].cells(), &[(0, 0), (0, 1), (0, 2), (0, 3)]);
        assert_eq!(o[1].extent(), (4, 1));
    }

    #[test]
    fn rejects_disconnected_and_duplicate_cells() {
        assert!(Shape::new("X", &[(0, 0), (0, 2)]).is_err());
        assert!(Shape::new("X", &[(0, 0), (0, 0)]).is_err());
        assert!(Shape::new("X", &[]).is_err());
        assert!(Shape::new("", &[(0, 0)]).is_err());
    }

    #[test]
    fn normalizes_offsets() {
        let s = Shape::new("D", &[(3, 5), (3, 6)]).unwrap();
        assert_eq!(s.cells(), &[(0, 0), (0, 1)]);
    }

    #[test]
    fn pentomino_f_has_eight_orientations() {
        let f = Shape::new("F", &[(0, 1), (0, 2), (1, 0), (1, 1), (2, 1)]).unwrap();
        assert_eq!(f.orientations().len(), 8);
        let x = Shape::new("X", &[(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)]).unwrap();
        assert_eq!(x.orientations().len(), 1);
    }
}
