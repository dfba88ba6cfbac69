//! Decoding assignments into tilings, validating them and drawing boards.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::puzzle::{Board, Placement, PlacementCatalog, PuzzleInstance};
use crate::qubo::Assignment;
use crate::shape::ShapeId;

/// The placements switched on by an assignment, sorted by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiling {
    pub chosen: Vec<Placement>,
}

impl Tiling {
    pub fn indices(&self) -> Vec<usize> {
        self.chosen.iter().map(|p| p.index).collect()
    }

    /// Re-encodes the tiling as an assignment over `n` variables.
    pub fn to_assignment(&self, n: usize) -> Assignment {
        Assignment::from_ones(n, &self.indices())
    }

    /// How many chosen placements cover each cell.
    pub fn coverage(&self, board: Board) -> Vec<usize> {
        let mut cov = vec![0; board.area()];
        for p in &self.chosen {
            for &c in &p.cells {
                cov[c] += 1;
            }
        }
        cov
    }
}

pub fn decode(x: &Assignment, catalog: &PlacementCatalog) -> Tiling {
    assert_eq!(x.len(), catalog.len(), "assignment length does not match catalog");
    Tiling {
        chosen: x.ones().into_iter().map(|i| catalog.placement(i).clone()).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Chosen count per shape, for every shape of the instance.
    pub shape_counts: BTreeMap<ShapeId, usize>,
    /// `(cell, coverage)` for cells covered two or more times.
    pub overlap_cells: Vec<(usize, usize)>,
    pub gap_cells: Vec<usize>,
    pub is_valid: bool,
}

impl ValidationReport {
    /// Number of defective cells (overlaps plus gaps).
    pub fn defects(&self) -> usize {
        self.overlap_cells.len() + self.gap_cells.len()
    }

    /// `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "valid={}", self.is_valid);
        let counts: Vec<String> = self.shape_counts.iter().map(|(s, c)| format!("{s}:{c}")).collect();
        let _ = writeln!(out, "shape_counts={}", counts.join(","));
        let overlaps: Vec<String> = self.overlap_cells.iter().map(|(c, k)| format!("{c}x{k}")).collect();
        let _ = writeln!(out, "overlap_cells={}", overlaps.join(","));
        let gaps: Vec<String> = self.gap_cells.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "gap_cells={}", gaps.join(","));
        out
    }
}

pub fn validate(t: &Tiling, instance: &PuzzleInstance) -> ValidationReport {
    let mut shape_counts: BTreeMap<ShapeId, usize> =
        instance.pieces().iter().map(|p| (p.shape.id().clone(), 0)).collect();
    for p in &t.chosen {
        *shape_counts.entry(p.shape.clone()).or_insert(0) += 1;
    }
    let coverage = t.coverage(instance.board());
    let overlap_cells: Vec<(usize, usize)> = coverage
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c >= 2)
        .map(|(k, &c)| (k, c))
        .collect();
    let gap_cells: Vec<usize> = coverage
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c == 0)
        .map(|(k, _)| k)
        .collect();
    let counts_ok = shape_counts
        .iter()
        .all(|(id, &c)| c == instance.count_of(id));
    let is_valid = counts_ok && overlap_cells.is_empty() && gap_cells.is_empty();
    ValidationReport {
        shape_counts,
        overlap_cells,
        gap_cells,
        is_valid,
    }
}

/// Reads a solution file for a model with `n` variables.
///
/// Accepted forms, with `#` comments and blank lines ignored:
/// a single token of `0`/`1` characters of length `n` (bit `i` is variable
/// `i`), or placement indices separated by whitespace or commas. The
/// `placements=...` line printed by `solve` is accepted as is.
pub fn parse_solution(text: &str, n: usize) -> Result<Assignment> {
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let line = line.strip_prefix("placements=").unwrap_or(line);
        tokens.extend(
            line.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| (k + 1, t)),
        );
    }
    if let [(_, t)] = tokens.as_slice() {
        if n >= 2 && t.len() == n && t.bytes().all(|b| b == b'0' || b == b'1') {
            return Ok(Assignment::from_bits(t.bytes().map(|b| b - b'0')));
        }
    }
    let mut x = Assignment::zeros(n);
    for (line, t) in tokens {
        let i: usize = t.parse().map_err(|_| Error::Parse {
            line,
            message: format!("expected a placement index, got {t:?}"),
        })?;
        if i >= n {
            return Err(Error::Parse {
                line,
                message: format!("placement {i} out of range (model has {n} variables)"),
            });
        }
        if x.get(i) {
            return Err(Error::Parse {
                line,
                message: format!("placement {i} listed twice"),
            });
        }
        x.set(i, true);
    }
    Ok(x)
}

/// One line per board row: the shape glyph on singly covered cells, `.` on
/// uncovered cells and `#` on cells covered more than once.
pub fn render(t: &Tiling, board: Board) -> String {
    let mut glyphs = vec!['.'; board.area()];
    let coverage = t.coverage(board);
    for p in &t.chosen {
        for &c in &p.cells {
            glyphs[c] = if coverage[c] > 1 { '#' } else { p.shape.glyph() };
        }
    }
    let mut out = String::with_capacity(board.area() + board.height());
    for row in glyphs.chunks(board.width()) {
        out.extend(row);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two_o() -> (PuzzleInstance, PlacementCatalog) {
        let inst = PuzzleInstance::tetrominoes(Board::new(2, 2).unwrap(), &[("O", 1)]).unwrap();
        let cat = inst.catalog();
        (inst, cat)
    }

    #[test]
    fn render_small_boards() {
        let (inst, cat) = two_by_two_o();
        assert_eq!(render(&decode(&Assignment::zeros(1), &cat), inst.board()), "..\n..\n");
        assert_eq!(render(&decode(&Assignment::from_bits([1]), &cat), inst.board()), "OO\nOO\n");
    }

    #[test]
    fn empty_tiling_on_standard_board() {
        let inst = PuzzleInstance::standard();
        let cat = inst.catalog();
        let report = validate(&decode(&Assignment::zeros(cat.len()), &cat), &inst);
        assert_eq!(report.gap_cells.len(), 40);
        assert!(report.overlap_cells.is_empty());
        assert!(report.shape_counts.values().all(|&c| c == 0));
        assert_eq!(report.shape_counts.len(), 5);
        assert!(!report.is_valid);
    }

    #[test]
    fn overlap_renders_hash() {
        let inst = PuzzleInstance::tetrominoes(Board::new(4, 2).unwrap(), &[("O", 2)]).unwrap();
        let cat = inst.catalog();
        let t = decode(&Assignment::from_bits([1, 1, 0]), &cat);
        assert_eq!(render(&t, inst.board()), "O#O.\nO#O.\n");
        let r = validate(&t, &inst);
        assert_eq!(r.overlap_cells, vec![(1, 2), (5, 2)]);
        assert_eq!(r.gap_cells, vec![3, 7]);
        assert_eq!(r.defects(), 4);
        assert!(!r.is_valid);
    }

    #[test]
    fn wrong_count_is_invalid_even_when_covered() {
        // 4x2 board covered by two O pieces, but the instance asks for one O and one I.
        let inst = PuzzleInstance::tetrominoes(Board::new(4, 2).unwrap(), &[("I", 1), ("O", 1)]).unwrap();
        let cat = inst.catalog();
        let o_range = cat.shape_range(&ShapeId::new("O")).unwrap();
        let ones = [o_range.start, o_range.start + 2];
        let t = decode(&Assignment::from_ones(cat.len(), &ones), &cat);
        let r = validate(&t, &inst);
        assert!(r.overlap_cells.is_empty() && r.gap_cells.is_empty());
        assert!(!r.is_valid);
    }

    #[test]
    fn decode_round_trip() {
        let (_, cat) = two_by_two_o();
        let x = Assignment::from_bits([1]);
        assert_eq!(decode(&x, &cat).to_assignment(cat.len()), x);
    }

    #[test]
    fn solution_text_forms() {
        assert_eq!(parse_solution("101\n", 3).unwrap(), Assignment::from_bits([1, 0, 1]));
        assert_eq!(parse_solution("# tiling\n0, 2\n", 3).unwrap(), Assignment::from_bits([1, 0, 1]));
        assert_eq!(parse_solution("placements=0,2\n", 3).unwrap(), Assignment::from_bits([1, 0, 1]));
        assert_eq!(parse_solution("", 3).unwrap(), Assignment::zeros(3));
        assert!(matches!(parse_solution("0\n7\n", 3), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_solution("1 1", 3), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_solution("x", 3), Err(Error::Parse { .. })));
    }

    #[test]
    fn key_value_report() {
        let inst = PuzzleInstance::tetrominoes(Board::new(4, 2).unwrap(), &[("O", 2)]).unwrap();
        let cat = inst.catalog();
        let r = validate(&decode(&Assignment::from_bits([1, 0, 1]), &cat), &inst);
        assert_eq!(r.to_key_values(), "valid=true\nshape_counts=O:2\noverlap_cells=\ngap_cells=\n");
    }
}
