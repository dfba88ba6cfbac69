//! Boards, puzzle instances and placement enumeration.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::ops::Range;

use num_bigint::BigUint;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::shape::{Cell, Shape, ShapeId, TETROMINO_LABELS};

/// A rectangular board. Cell `k` sits at row `k / width`, column `k % width`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Board {
    width: usize,
    height: usize,
}

impl Board {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidBoard(format!("{width}x{height} has no cells")));
        }
        Ok(Board { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn cell_index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    /// `(row, col)` of a 0-based cell index.
    pub fn position(&self, cell: usize) -> (usize, usize) {
        (cell / self.width, cell % self.width)
    }

    /// 1-based row-major label used for display.
    pub fn display_number(&self, cell: usize) -> usize {
        cell + 1
    }
}

/// A shape together with the number of copies the puzzle requires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceSpec {
    pub shape: Shape,
    pub count: usize,
}

/// Board plus piece multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuzzleInstance {
    board: Board,
    pieces: Vec<PieceSpec>,
}

impl PuzzleInstance {
    /// Builds an instance. Built-in tetrominoes are reordered to I, O, L, T, S;
    /// custom shapes follow in the given order.
    pub fn new(board: Board, pieces: Vec<PieceSpec>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInstance("no pieces".into()));
        }
        let mut seen = HashSet::new();
        for p in &pieces {
            if !seen.insert(p.shape.id().clone()) {
                return Err(Error::InvalidInstance(format!(
                    "shape {} declared twice",
                    p.shape.id()
                )));
            }
            if p.count == 0 {
                return Err(Error::InvalidInstance(format!(
                    "shape {} has count 0",
                    p.shape.id()
                )));
            }
        }
        let rank = |p: &PieceSpec| {
            TETROMINO_LABELS
                .iter()
                .position(|l| *l == p.shape.id().as_str() && Shape::tetromino(l).as_ref() == Some(&p.shape))
                .unwrap_or(TETROMINO_LABELS.len())
        };
        let mut pieces = pieces;
        pieces.sort_by_key(rank);
        Ok(PuzzleInstance { board, pieces })
    }

    /// The 5x8 board with two copies of each tetromino.
    pub fn standard() -> Self {
        Self::tetrominoes(Board::new(5, 8).unwrap(), &[("I", 2), ("O", 2), ("L", 2), ("T", 2), ("S", 2)])
            .expect("default instance is valid")
    }

    /// Convenience constructor for built-in tetromino sets.
    pub fn tetrominoes(board: Board, counts: &[(&str, usize)]) -> Result<Self> {
        let pieces = counts
            .iter()
            .map(|&(label, count)| {
                Shape::tetromino(label)
                    .map(|shape| PieceSpec { shape, count })
                    .ok_or_else(|| Error::UnknownShape(label.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(board, pieces)
    }

    pub fn board(&self) -> Board {
        self.board
    }

    pub fn pieces(&self) -> &[PieceSpec] {
        &self.pieces
    }

    pub fn shapes(&self) -> Vec<Shape> {
        self.pieces.iter().map(|p| p.shape.clone()).collect()
    }

    pub fn counts(&self) -> BTreeMap<ShapeId, usize> {
        self.pieces
            .iter()
            .map(|p| (p.shape.id().clone(), p.count))
            .collect()
    }

    pub fn count_of(&self, id: &ShapeId) -> usize {
        self.pieces
            .iter()
            .find(|p| p.shape.id() == id)
            .map_or(0, |p| p.count)
    }

    /// Total cells the piece multiset covers.
    pub fn piece_area(&self) -> usize {
        self.pieces.iter().map(|p| p.count * p.shape.size()).sum()
    }

    /// `Some((piece_area, board_area))` when no exact tiling can exist.
    pub fn area_mismatch(&self) -> Option<(usize, usize)> {
        let need = self.piece_area();
        (need != self.board.area()).then_some((need, self.board.area()))
    }

    /// Canonical one-line description, stable across runs.
    pub fn canonical_description(&self) -> String {
        let mut s = format!("board {}x{}", self.board.width, self.board.height);
        for p in &self.pieces {
            let _ = write!(s, "; {}x{} [", p.shape.id(), p.count);
            let cells: Vec<String> = p
                .shape
                .cells()
                .iter()
                .map(|(r, c)| format!("{r},{c}"))
                .collect();
            s.push_str(&cells.join(" "));
            s.push(']');
        }
        s
    }

    /// SHA-256 of the canonical description, hex encoded.
    pub fn instance_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_description().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Parses the TOML instance format:
    ///
    /// ```toml
    /// [board]
    /// width = 5
    /// height = 8
    ///
    /// [[pieces]]
    /// shape = "I"
    /// count = 2
    ///
    /// [[pieces]]
    /// shape = "F"
    /// cells = [[0, 1], [0, 2], [1, 0], [1, 1], [2, 1]]
    /// count = 1
    /// ```
    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Config {
            board: BoardConfig,
            pieces: Vec<PieceConfig>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct BoardConfig {
            width: usize,
            height: usize,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct PieceConfig {
            shape: String,
            count: usize,
            cells: Option<Vec<(i32, i32)>>,
        }

        let cfg: Config = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let board = Board::new(cfg.board.width, cfg.board.height)?;
        let pieces = cfg
            .pieces
            .into_iter()
            .map(|p| {
                let shape = match p.cells {
                    Some(cells) => Shape::new(p.shape.as_str(), &cells)?,
                    None => Shape::tetromino(&p.shape).ok_or(Error::UnknownShape(p.shape))?,
                };
                Ok(PieceSpec { shape, count: p.count })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(board, pieces)
    }

    /// Parses a compact piece list such as `I=2,O=2,L=2,T=2,S=2` (built-ins only).
    pub fn from_piece_list(board: Board, spec: &str) -> Result<Self> {
        let mut counts = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (label, count) = match item.split_once('=') {
                Some((l, c)) => {
                    let c = c
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidInstance(format!("bad count in {item:?}")))?;
                    (l.trim(), c)
                }
                None => (item, 1),
            };
            counts.push((label, count));
        }
        Self::tetrominoes(board, &counts)
    }
}

/// One concrete positioning of a shape orientation; one binary variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub index: usize,
    pub shape: ShapeId,
    /// Position of the shape in the catalog's shape order.
    pub shape_slot: usize,
    /// Sorted 0-based board cell indices.
    pub cells: Vec<usize>,
}

/// All placements of an instance, with per-shape index ranges and per-cell incidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacementCatalog {
    board: Board,
    placements: Vec<Placement>,
    shape_ranges: Vec<(ShapeId, Range<usize>)>,
    cell_incidence: Vec<Vec<usize>>,
}

impl PlacementCatalog {
    pub fn board(&self) -> Board {
        self.board
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn placement(&self, index: usize) -> &Placement {
        &self.placements[index]
    }

    /// Contiguous index range per shape, in catalog order.
    pub fn shape_ranges(&self) -> &[(ShapeId, Range<usize>)] {
        &self.shape_ranges
    }

    pub fn shape_range(&self, id: &ShapeId) -> Option<Range<usize>> {
        self.shape_ranges
            .iter()
            .find(|(s, _)| s == id)
            .map(|(_, r)| r.clone())
    }

    /// Placement indices covering each cell.
    pub fn cell_incidence(&self) -> &[Vec<usize>] {
        &self.cell_incidence
    }

    /// One line per placement: `index shape cell,cell,...` with 0-based cells.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for p in &self.placements {
            let cells: Vec<String> = p.cells.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{} {} {}", p.index, p.shape, cells.join(","));
        }
        out
    }
}

/// Enumerates every placement of every shape: orientations in canonical order,
/// anchors in row-major order, indices contiguous in shape order.
pub fn enumerate_placements(board: Board, shapes: &[Shape]) -> PlacementCatalog {
    let mut placements = Vec::new();
    let mut shape_ranges = Vec::with_capacity(shapes.len());
    for (slot, shape) in shapes.iter().enumerate() {
        let start = placements.len();
        for orientation in shape.orientations() {
            let (rows, cols) = orientation.extent();
            if rows > board.height() || cols > board.width() {
                continue;
            }
            for r0 in 0..=board.height() - rows {
                for c0 in 0..=board.width() - cols {
                    let mut cells: Vec<usize> = orientation
                        .cells()
                        .iter()
                        .map(|&(r, c): &Cell| board.cell_index(r0 + r as usize, c0 + c as usize))
                        .collect();
                    cells.sort_unstable();
                    placements.push(Placement {
                        index: placements.len(),
                        shape: shape.id().clone(),
                        shape_slot: slot,
                        cells,
                    });
                }
            }
        }
        shape_ranges.push((shape.id().clone(), start..placements.len()));
    }
    let mut cell_incidence = vec![Vec::new(); board.area()];
    for p in &placements {
        for &c in &p.cells {
            cell_incidence[c].push(p.index);
        }
    }
    PlacementCatalog {
        board,
        placements,
        shape_ranges,
        cell_incidence,
    }
}

impl PuzzleInstance {
    pub fn catalog(&self) -> PlacementCatalog {
        enumerate_placements(self.board, &self.shapes())
    }
}

/// Product of binomial coefficients C(P_j, c_j) over shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinationCount {
    pub value: BigUint,
    /// Shapes whose required count exceeds their placement count.
    pub infeasible: Vec<ShapeId>,
}

pub fn combination_count(catalog: &PlacementCatalog, counts: &BTreeMap<ShapeId, usize>) -> CombinationCount {
    let mut value = BigUint::from(1u32);
    let mut infeasible = Vec::new();
    for (id, range) in catalog.shape_ranges() {
        let c = counts.get(id).copied().unwrap_or(0);
        let p = range.len();
        if c > p {
            infeasible.push(id.clone());
            continue;
        }
        value *= binomial(p, c);
    }
    if !infeasible.is_empty() {
        value = BigUint::from(0u32);
    }
    CombinationCount { value, infeasible }
}

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Formats an integer in scientific notation with `digits` significant figures,
/// e.g. `8.01e16`. Rounds half up.
pub fn scientific(value: &BigUint, digits: usize) -> String {
    let s = value.to_string();
    let digits = digits.max(1);
    if s.len() <= digits {
        let mantissa = format!("{}.{}", &s[..1], &s[1..]);
        return format!("{}e{}", mantissa.trim_end_matches('.'), s.len() - 1);
    }
    let head: u64 = s[..digits].parse().unwrap();
    let next = s.as_bytes()[digits] - b'0';
    let mut head = head + u64::from(next >= 5);
    let mut exp = s.len() - 1;
    if head.to_string().len() > digits {
        head /= 10;
        exp += 1;
    }
    let h = head.to_string();
    if digits == 1 {
        format!("{h}e{exp}")
    } else {
        format!("{}.{}e{}", &h[..1], &h[1..], exp)
    }
}
