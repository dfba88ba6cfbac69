//! Exact enumeration of tilings as a generalized exact-cover problem.
//!
//! Columns are board cells (covered exactly once) followed by shapes (used
//! exactly `c_j` times). Rows are placements. The search branches on the
//! column with the fewest options. Whichever column it branches on, the
//! branches enumerate the lowest-index row that will cover that column, and a
//! row is banned within the node once its branch is exhausted. Each solution
//! set is therefore produced exactly once, including when a shape has several
//! identical copies.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::puzzle::{Board, PlacementCatalog};
use crate::shape::ShapeId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverProblem {
    /// Required multiplicity per column.
    multiplicity: Vec<usize>,
    /// Columns linked by each row.
    rows: Vec<Vec<usize>>,
    cell_columns: usize,
}

impl CoverProblem {
    pub fn columns(&self) -> usize {
        self.multiplicity.len()
    }

    pub fn cell_columns(&self) -> usize {
        self.cell_columns
    }

    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }
}

pub fn build_cover_problem(catalog: &PlacementCatalog, counts: &BTreeMap<ShapeId, usize>) -> CoverProblem {
    let cells = catalog.board().area();
    let mut multiplicity = vec![1; cells];
    multiplicity.extend(
        catalog
            .shape_ranges()
            .iter()
            .map(|(id, _)| counts.get(id).copied().unwrap_or(0)),
    );
    let rows = catalog
        .placements()
        .iter()
        .map(|p| {
            let mut cols = p.cells.clone();
            cols.push(cells + p.shape_slot);
            cols
        })
        .collect();
    CoverProblem {
        multiplicity,
        rows,
        cell_columns: cells,
    }
}

/// An unordered set of placement indices, stored ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TilingSolution(pub Vec<usize>);

/// Order in which equally constrained columns are preferred.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    LowestColumn,
    HighestColumn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub solutions: Vec<TilingSolution>,
    /// False when the search stopped at the limit.
    pub complete: bool,
}

pub fn enumerate_exact(p: &CoverProblem, limit: Option<usize>) -> Enumeration {
    enumerate_exact_with(p, limit, TieBreak::default())
}

pub fn enumerate_exact_with(p: &CoverProblem, limit: Option<usize>, tie_break: TieBreak) -> Enumeration {
    let mut search = Search::new(p, limit, tie_break);
    let complete = search.run();
    Enumeration {
        solutions: search.solutions,
        complete,
    }
}

/// A rigid motion of the board: rotations and reflections that map the
/// rectangle onto itself (4 for non-square boards, 8 for square ones).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoardSymmetry {
    Identity,
    Rotate180,
    MirrorRows,
    MirrorCols,
    Transpose,
    AntiTranspose,
    Rotate90,
    Rotate270,
}

impl BoardSymmetry {
    pub fn all_for(board: Board) -> Vec<BoardSymmetry> {
        use BoardSymmetry::*;
        let mut out = vec![Identity, Rotate180, MirrorRows, MirrorCols];
        if board.width() == board.height() {
            out.extend([Transpose, AntiTranspose, Rotate90, Rotate270]);
        }
        out
    }

    pub fn name(self) -> &'static str {
        use BoardSymmetry::*;
        match self {
            Identity => "identity",
            Rotate180 => "rotate-180",
            MirrorRows => "mirror-rows",
            MirrorCols => "mirror-cols",
            Transpose => "transpose",
            AntiTranspose => "anti-transpose",
            Rotate90 => "rotate-90",
            Rotate270 => "rotate-270",
        }
    }

    /// Image of a cell. Square-only motions panic on rectangular boards.
    pub fn apply(self, board: Board, cell: usize) -> usize {
        use BoardSymmetry::*;
        let (r, c) = board.position(cell);
        let (h, w) = (board.height() - 1, board.width() - 1);
        let (nr, nc) = match self {
            Identity => (r, c),
            Rotate180 => (h - r, w - c),
            MirrorRows => (h - r, c),
            MirrorCols => (r, w - c),
            Transpose => (c, r),
            AntiTranspose => (w - c, h - r),
            Rotate90 => (c, h - r),
            Rotate270 => (w - c, r),
        };
        assert!(
            matches!(self, Identity | Rotate180 | MirrorRows | MirrorCols) || h == w,
            "{} needs a square board",
            self.name()
        );
        board.cell_index(nr, nc)
    }
}

/// How a set of tilings splits under the board's symmetries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryBreakdown {
    /// Tilings mapped to themselves, per symmetry (identity first).
    pub fixed: Vec<(BoardSymmetry, usize)>,
    /// Number of distinct orbits among the given tilings.
    pub orbits: usize,
    /// False if some image was missing from the input, i.e. the set was not
    /// closed under the symmetries (an incomplete enumeration).
    pub closed: bool,
}

/// Maps each placement to its image under `sym`; `None` when the image shape
/// orientation is not in the catalog.
pub fn placement_image(catalog: &PlacementCatalog, sym: BoardSymmetry) -> Vec<Option<usize>> {
    let board = catalog.board();
    let lookup: HashMap<(usize, &[usize]), usize> = catalog
        .placements()
        .iter()
        .map(|p| ((p.shape_slot, p.cells.as_slice()), p.index))
        .collect();
    catalog
        .placements()
        .iter()
        .map(|p| {
            let mut cells: Vec<usize> = p.cells.iter().map(|&c| sym.apply(board, c)).collect();
            cells.sort_unstable();
            lookup.get(&(p.shape_slot, cells.as_slice())).copied()
        })
        .collect()
}

pub fn symmetry_breakdown(catalog: &PlacementCatalog, solutions: &[TilingSolution]) -> SymmetryBreakdown {
    let syms = BoardSymmetry::all_for(catalog.board());
    let images: Vec<Vec<Option<usize>>> = syms.iter().map(|&s| placement_image(catalog, s)).collect();
    let known: HashSet<&TilingSolution> = solutions.iter().collect();
    let mut fixed = vec![0; syms.len()];
    let mut seen: HashSet<TilingSolution> = HashSet::new();
    let mut orbits = 0;
    let mut closed = true;
    for sol in solutions {
        let mut orbit = Vec::with_capacity(syms.len());
        for (k, map) in images.iter().enumerate() {
            let mapped: Option<Vec<usize>> = sol.0.iter().map(|&i| map[i]).collect();
            let Some(mut mapped) = mapped else {
                closed = false;
                continue;
            };
            mapped.sort_unstable();
            let image = TilingSolution(mapped);
            if image == *sol {
                fixed[k] += 1;
            }
            if !known.contains(&image) {
                closed = false;
            }
            orbit.push(image);
        }
        if !seen.contains(sol) {
            orbits += 1;
            seen.extend(orbit);
            seen.insert(sol.clone());
        }
    }
    SymmetryBreakdown {
        fixed: syms.into_iter().zip(fixed).collect(),
        orbits,
        closed,
    }
}

struct Search<'a> {
    problem: &'a CoverProblem,
    col_rows: Vec<Vec<usize>>,
    remaining: Vec<usize>,
    /// Reasons a row cannot be chosen: saturated columns, chosen, banned.
    blockers: Vec<usize>,
    available: Vec<usize>,
    chosen: Vec<usize>,
    solutions: Vec<TilingSolution>,
    limit: Option<usize>,
    tie_break: TieBreak,
}

impl<'a> Search<'a> {
    fn new(problem: &'a CoverProblem, limit: Option<usize>, tie_break: TieBreak) -> Self {
        let cols = problem.columns();
        let mut col_rows = vec![Vec::new(); cols];
        for (r, row) in problem.rows.iter().enumerate() {
            for &c in row {
                col_rows[c].push(r);
            }
        }
        let mut s = Search {
            problem,
            available: col_rows.iter().map(Vec::len).collect(),
            col_rows,
            remaining: problem.multiplicity.clone(),
            blockers: vec![0; problem.rows.len()],
            chosen: Vec::new(),
            solutions: Vec::new(),
            limit,
            tie_break,
        };
        for c in 0..cols {
            if s.remaining[c] == 0 {
                s.saturate(c);
            }
        }
        s
    }

    fn block(&mut self, r: usize) {
        self.blockers[r] += 1;
        if self.blockers[r] == 1 {
            for &c in &self.problem.rows[r] {
                self.available[c] -= 1;
            }
        }
    }

    fn unblock(&mut self, r: usize) {
        self.blockers[r] -= 1;
        if self.blockers[r] == 0 {
            for &c in &self.problem.rows[r] {
                self.available[c] += 1;
            }
        }
    }

    fn saturate(&mut self, c: usize) {
        for k in 0..self.col_rows[c].len() {
            let r = self.col_rows[c][k];
            self.block(r);
        }
    }

    fn unsaturate(&mut self, c: usize) {
        for k in 0..self.col_rows[c].len() {
            let r = self.col_rows[c][k];
            self.unblock(r);
        }
    }

    fn choose(&mut self, r: usize) {
        self.block(r);
        self.chosen.push(r);
        for k in 0..self.problem.rows[r].len() {
            let c = self.problem.rows[r][k];
            self.remaining[c] -= 1;
            if self.remaining[c] == 0 {
                self.saturate(c);
            }
        }
    }

    fn unchoose(&mut self, r: usize) {
        for k in (0..self.problem.rows[r].len()).rev() {
            let c = self.problem.rows[r][k];
            if self.remaining[c] == 0 {
                self.unsaturate(c);
            }
            self.remaining[c] += 1;
        }
        self.chosen.pop();
        self.unblock(r);
    }

    /// Most constrained open column, `Err(())` on a dead end, `Ok(None)` when solved.
    fn pick_column(&self) -> Result<Option<usize>, ()> {
        let mut best: Option<(usize, usize)> = None;
        let cols = self.problem.columns();
        for k in 0..cols {
            let c = match self.tie_break {
                TieBreak::LowestColumn => k,
                TieBreak::HighestColumn => cols - 1 - k,
            };
            let need = self.remaining[c];
            if need == 0 {
                continue;
            }
            let avail = self.available[c];
            if avail < need {
                return Err(());
            }
            let options = avail - need + 1;
            if best.is_none_or(|(_, o)| options < o) {
                best = Some((c, options));
            }
        }
        Ok(best.map(|(c, _)| c))
    }

    fn limit_reached(&self) -> bool {
        self.limit.is_some_and(|l| self.solutions.len() >= l)
    }

    /// Returns false if the search stopped early at the limit.
    fn run(&mut self) -> bool {
        if self.limit_reached() {
            return false;
        }
        let col = match self.pick_column() {
            Err(()) => return true,
            Ok(None) => {
                let mut rows = self.chosen.clone();
                rows.sort_unstable();
                self.solutions.push(TilingSolution(rows));
                return !self.limit_reached();
            }
            Ok(Some(c)) => c,
        };
        let candidates: Vec<usize> = self.col_rows[col]
            .iter()
            .copied()
            .filter(|&r| self.blockers[r] == 0)
            .collect();
        let mut banned = Vec::new();
        let mut complete = true;
        for r in candidates {
            if self.available[col] < self.remaining[col] {
                break;
            }
            self.choose(r);
            let finished = self.run();
            self.unchoose(r);
            if !finished {
                complete = false;
                break;
            }
            self.block(r);
            banned.push(r);
        }
        for r in banned {
            self.unblock(r);
        }
        complete
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::{Board, PuzzleInstance};

    fn count(board: (usize, usize), pieces: &[(&str, usize)]) -> usize {
        let inst = PuzzleInstance::tetrominoes(Board::new(board.0, board.1).unwrap(), pieces).unwrap();
        let p = build_cover_problem(&inst.catalog(), &inst.counts());
        enumerate_exact(&p, None).solutions.len()
    }

    #[test]
    fn tiny_counts() {
        assert_eq!(count((4, 1), &[("I", 1)]), 1);
        assert_eq!(count((2, 2), &[("O", 1)]), 1);
        assert_eq!(count((4, 2), &[("O", 2)]), 1);
        assert_eq!(count((4, 2), &[("O", 1), ("S", 1)]), 0);
        // Two horizontal or two vertical... only horizontal fits a 4x2 board.
        assert_eq!(count((4, 2), &[("I", 2)]), 1);
        assert_eq!(count((4, 4), &[("I", 4)]), 2);
        assert_eq!(count((4, 4), &[("O", 4)]), 1);
    }

    #[test]
    fn cover_problem_shape() {
        let inst = PuzzleInstance::tetrominoes(Board::new(2, 2).unwrap(), &[("O", 1)]).unwrap();
        let p = build_cover_problem(&inst.catalog(), &inst.counts());
        assert_eq!(p.columns(), 5);
        assert_eq!(p.cell_columns(), 4);
        assert_eq!(p.rows(), &[vec![0, 1, 2, 3, 4]]);
        assert_eq!(p.multiplicity(), &[1, 1, 1, 1, 1]);
    }

    #[test]
    fn limit_stops_early() {
        let inst = PuzzleInstance::tetrominoes(Board::new(4, 4).unwrap(), &[("I", 4)]).unwrap();
        let p = build_cover_problem(&inst.catalog(), &inst.counts());
        let e = enumerate_exact(&p, Some(1));
        assert_eq!(e.solutions.len(), 1);
        assert!(!e.complete);
        let e = enumerate_exact(&p, Some(5));
        assert_eq!(e.solutions.len(), 2);
        assert!(e.complete);
    }

    #[test]
    fn identical_copies_counted_once() {
        // Branching on a shape column with multiplicity 2 must not emit both orders.
        let p = CoverProblem {
            multiplicity: vec![2],
            rows: vec![vec![0], vec![0], vec![0]],
            cell_columns: 0,
        };
        let e = enumerate_exact(&p, None);
        let sets: Vec<Vec<usize>> = e.solutions.into_iter().map(|s| s.0).collect();
        assert_eq!(sets, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn square_board_orbits() {
        // Two tilings of a 4x4 board by four I pieces; transposition swaps them.
        let inst = PuzzleInstance::tetrominoes(Board::new(4, 4).unwrap(), &[("I", 4)]).unwrap();
        let cat = inst.catalog();
        let sols = enumerate_exact(&build_cover_problem(&cat, &inst.counts()), None).solutions;
        let b = symmetry_breakdown(&cat, &sols);
        assert_eq!(b.orbits, 1);
        assert!(b.closed);
        assert_eq!(b.fixed.len(), 8);
        // Burnside: orbits = mean number of fixed tilings.
        let total: usize = b.fixed.iter().map(|(_, f)| f).sum();
        assert_eq!(total, b.orbits * 8);
    }

    #[test]
    fn symmetry_maps_cells_onto_board() {
        let board = Board::new(5, 8).unwrap();
        for sym in BoardSymmetry::all_for(board) {
            let mut img: Vec<usize> = (0..40).map(|c| sym.apply(board, c)).collect();
            img.sort_unstable();
            assert_eq!(img, (0..40).collect::<Vec<_>>(), "{}", sym.name());
        }
        assert_eq!(BoardSymmetry::Rotate180.apply(board, 0), 39);
        assert_eq!(BoardSymmetry::MirrorCols.apply(board, 0), 4);
    }

    #[test]
    fn empty_problem_has_one_solution() {
        let p = CoverProblem {
            multiplicity: vec![],
            rows: vec![],
            cell_columns: 0,
        };
        assert_eq!(enumerate_exact(&p, None).solutions, vec![TilingSolution(vec![])]);
    }
}
