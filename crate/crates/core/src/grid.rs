//! The 2.5D assembly board.
//!
//! A [`Board`] is an 8x8 grid whose cells hold bottom-to-top stacks of
//! components. The only way to change a board is [`Board::put`], which
//! enforces every placement rule, so any `Board` value in circulation is
//! valid. Cell `(0, 0)` is the top-left corner; the first index is the row.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::ErrorCategory;

pub const ROWS: usize = 8;
pub const COLS: usize = 8;

/// Glyph used for empty cells in textual renders.
pub const DEFAULT_EMPTY_SYMBOL: &str = "□";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Shape {
    #[serde(rename = "washer")]
    Washer,
    #[serde(rename = "nut")]
    Nut,
    #[serde(rename = "screw")]
    Screw,
    #[serde(rename = "bridge-h")]
    BridgeH,
    #[serde(rename = "bridge-v")]
    BridgeV,
}

impl Shape {
    pub const ALL: [Shape; 5] = [Shape::Washer, Shape::Nut, Shape::Screw, Shape::BridgeH, Shape::BridgeV];

    /// Shapes that occupy exactly one cell.
    pub const SINGLE_CELL: [Shape; 3] = [Shape::Washer, Shape::Nut, Shape::Screw];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Washer => "washer",
            Shape::Nut => "nut",
            Shape::Screw => "screw",
            Shape::BridgeH => "bridge-h",
            Shape::BridgeV => "bridge-v",
        }
    }

    pub fn from_name(name: &str) -> Option<Shape> {
        Shape::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn is_bridge(self) -> bool {
        matches!(self, Shape::BridgeH | Shape::BridgeV)
    }

    /// Offset of the second occupied cell, if the shape spans two.
    pub fn second_cell_offset(self) -> Option<(usize, usize)> {
        match self {
            Shape::BridgeH => Some((0, 1)),
            Shape::BridgeV => Some((1, 0)),
            _ => None,
        }
    }

    /// Letter used when composing object names ("ws" = washer + screw).
    pub fn initial(self) -> &'static str {
        match self {
            Shape::Washer => "w",
            Shape::Nut => "n",
            Shape::Screw => "s",
            Shape::BridgeH => "bh",
            Shape::BridgeV => "bv",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
    Yellow,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::Red, Color::Green, Color::Blue, Color::Yellow];

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Yellow => "yellow",
        }
    }

    pub fn from_name(name: &str) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One stack entry. Bridges appear in both cells they span with the same
/// `bridge_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub shape: Shape,
    pub color: Color,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge_id: Option<u32>,
}

impl Component {
    fn same_kind(&self, other: &Component) -> bool {
        self.shape == other.shape && self.color == other.color
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{category}: {detail}")]
pub struct PlacementError {
    pub category: ErrorCategory,
    pub detail: String,
    pub location: Option<(usize, usize)>,
}

impl PlacementError {
    fn new(category: ErrorCategory, detail: impl Into<String>, location: Option<(usize, usize)>) -> Self {
        PlacementError { category, detail: detail.into(), location }
    }
}

/// Raised when a board read from JSON does not describe a reachable state.
#[derive(Debug, Error)]
pub enum BoardDecodeError {
    #[error("board must have {ROWS} rows of {COLS} cells")]
    Dimensions,
    #[error("bridge {id} at ({row}, {col}) has no matching partner cell")]
    BrokenBridge { id: u32, row: usize, col: usize },
    #[error("stacks are not reachable by put: {0}")]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

type Stack = Vec<Component>;

/// Board state. Equality ignores bridge identity tokens.
#[derive(Clone, Default)]
pub struct Board {
    cells: [[Stack; COLS]; ROWS],
    next_bridge_id: u32,
}

impl Board {
    pub fn new() -> Board {
        Board::default()
    }

    pub fn stack(&self, row: usize, col: usize) -> &[Component] {
        &self.cells[row][col]
    }

    pub fn height(&self, row: usize, col: usize) -> usize {
        self.cells[row][col].len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().flatten().all(Vec::is_empty)
    }

    /// Total number of stack entries; a bridge counts once per cell it spans.
    pub fn entry_count(&self) -> usize {
        self.cells.iter().flatten().map(Vec::len).sum()
    }

    /// Iterates non-empty cells in row-major order.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize, &[Component])> {
        self.cells.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(move |(c, s)| (r, c, s.as_slice()))
        })
    }

    /// Places a component by name. On error the board is left untouched.
    ///
    /// Checks run in a fixed order and the first failure wins: unknown
    /// names, out-of-grid coordinates, bridges over the edge, anything on a
    /// screw, uneven bridge supports, bridges at the third level or above,
    /// same shape directly below, same color directly below, and same shape
    /// two levels below across a bridge.
    pub fn put(&mut self, shape: &str, color: &str, row: i64, col: i64) -> Result<(), PlacementError> {
        let parsed_shape = Shape::from_name(shape)
            .ok_or_else(|| PlacementError::new(ErrorCategory::Key, format!("unsupported shape '{shape}'"), None))?;
        let parsed_color = Color::from_name(color)
            .ok_or_else(|| PlacementError::new(ErrorCategory::Key, format!("unsupported color '{color}'"), None))?;
        self.place(parsed_shape, parsed_color, row, col)
    }

    /// Typed variant of [`Board::put`].
    pub fn place(&mut self, shape: Shape, color: Color, row: i64, col: i64) -> Result<(), PlacementError> {
        let id = if shape.is_bridge() { Some(self.next_bridge_id) } else { None };
        self.place_with_id(shape, color, row, col, id)?;
        if id.is_some() {
            self.next_bridge_id += 1;
        }
        Ok(())
    }

    fn place_with_id(
        &mut self,
        shape: Shape,
        color: Color,
        row: i64,
        col: i64,
        bridge_id: Option<u32>,
    ) -> Result<(), PlacementError> {
        let supports = Self::check_supports(shape, row, col)?;
        let support_cells: Vec<(usize, usize)> = supports.into_iter().flatten().collect();
        let at = |rc: (usize, usize)| Some(rc);

        for &(r, c) in &support_cells {
            if let Some(top) = self.cells[r][c].last() {
                if top.shape == Shape::Screw {
                    return Err(PlacementError::new(
                        ErrorCategory::NotOnTopOfScrew,
                        format!("cannot place {shape} on top of a screw at ({r}, {c})"),
                        at((r, c)),
                    ));
                }
            }
        }

        let level = self.cells[support_cells[0].0][support_cells[0].1].len();
        if shape.is_bridge() {
            let (r2, c2) = support_cells[1];
            let other = self.cells[r2][c2].len();
            if other != level {
                return Err(PlacementError::new(
                    ErrorCategory::DepthMismatch,
                    format!("{shape} supports have heights {level} and {other}"),
                    at(support_cells[0]),
                ));
            }
            if level >= 2 {
                return Err(PlacementError::new(
                    ErrorCategory::BridgePlacement,
                    format!("{shape} would rest at level {}", level + 1),
                    at(support_cells[0]),
                ));
            }
        }

        for &(r, c) in &support_cells {
            if let Some(top) = self.cells[r][c].last() {
                if top.shape == shape {
                    return Err(PlacementError::new(
                        ErrorCategory::SameShapeStacking,
                        format!("{shape} directly on {shape} at ({r}, {c})"),
                        at((r, c)),
                    ));
                }
            }
        }
        for &(r, c) in &support_cells {
            if let Some(top) = self.cells[r][c].last() {
                if top.color == color {
                    return Err(PlacementError::new(
                        ErrorCategory::SameColorStacking,
                        format!("{color} {shape} directly on {color} {} at ({r}, {c})", top.shape),
                        at((r, c)),
                    ));
                }
            }
        }
        for &(r, c) in &support_cells {
            let stack = &self.cells[r][c];
            if stack.len() >= 2 {
                let below = stack[stack.len() - 1];
                let two_below = stack[stack.len() - 2];
                if below.shape.is_bridge() && two_below.shape == shape {
                    return Err(PlacementError::new(
                        ErrorCategory::SameShapeAlternateLevels,
                        format!("{shape} on both sides of a {} at ({r}, {c})", below.shape),
                        at((r, c)),
                    ));
                }
            }
        }

        let component = Component { shape, color, bridge_id };
        for (r, c) in support_cells {
            self.cells[r][c].push(component);
        }
        Ok(())
    }

    /// Validates coordinates and returns the cells the shape would occupy.
    fn check_supports(shape: Shape, row: i64, col: i64) -> Result<[Option<(usize, usize)>; 2], PlacementError> {
        let in_grid = |v: i64, n: usize| v >= 0 && (v as u64) < n as u64;
        if !in_grid(row, ROWS) || !in_grid(col, COLS) {
            return Err(PlacementError::new(
                ErrorCategory::DimensionsMismatch,
                format!("location ({row}, {col}) is outside the {ROWS}x{COLS} grid"),
                None,
            ));
        }
        let (r, c) = (row as usize, col as usize);
        match shape.second_cell_offset() {
            None => Ok([Some((r, c)), None]),
            Some((dr, dc)) => {
                let (r2, c2) = (r + dr, c + dc);
                if r2 >= ROWS || c2 >= COLS {
                    return Err(PlacementError::new(
                        ErrorCategory::Value,
                        format!("{shape} at ({r}, {c}) would extend past the grid edge"),
                        Some((r, c)),
                    ));
                }
                Ok([Some((r, c)), Some((r2, c2))])
            }
        }
    }

    /// Rebuilds a board from raw stacks, replaying them level by level
    /// through the placement rules.
    pub fn from_stacks(stacks: &[Vec<Vec<Component>>]) -> Result<Board, BoardDecodeError> {
        if stacks.len() != ROWS || stacks.iter().any(|r| r.len() != COLS) {
            return Err(BoardDecodeError::Dimensions);
        }
        let mut board = Board::new();
        let max_level = stacks.iter().flatten().map(Vec::len).max().unwrap_or(0);
        for level in 0..max_level {
            for r in 0..ROWS {
                for c in 0..COLS {
                    let Some(comp) = stacks[r][c].get(level) else { continue };
                    if board.cells[r][c].len() > level {
                        // second cell of a bridge already replayed from its partner
                        continue;
                    }
                    if let Some((dr, dc)) = comp.shape.second_cell_offset() {
                        let partner = stacks.get(r + dr).and_then(|row| row.get(c + dc)).and_then(|s| s.get(level));
                        let matched = partner.is_some_and(|o| o.same_kind(comp) && o.bridge_id == comp.bridge_id);
                        if !matched {
                            return Err(BoardDecodeError::BrokenBridge {
                                id: comp.bridge_id.unwrap_or(u32::MAX),
                                row: r,
                                col: c,
                            });
                        }
                        let id = comp.bridge_id.unwrap_or(board.next_bridge_id);
                        board.place_with_id(comp.shape, comp.color, r as i64, c as i64, Some(id))?;
                        board.next_bridge_id = board.next_bridge_id.max(id + 1);
                    } else {
                        board.place_with_id(comp.shape, comp.color, r as i64, c as i64, None)?;
                    }
                }
            }
        }
        Ok(board)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("board serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Board, BoardDecodeError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Cell-by-cell comparison of `(shape, color)` sequences.
pub fn boards_equal(a: &Board, b: &Board) -> bool {
    a.cells
        .iter()
        .flatten()
        .zip(b.cells.iter().flatten())
        .all(|(x, y)| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.same_kind(q)))
}

impl PartialEq for Board {
    fn eq(&self, other: &Board) -> bool {
        boards_equal(self, other)
    }
}

impl Eq for Board {}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_ascii(self))
    }
}

#[derive(Serialize, Deserialize)]
struct BoardJson {
    cells: Vec<Vec<Vec<Component>>>,
}

impl Serialize for Board {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let cells = self.cells.iter().map(|row| row.to_vec()).collect();
        BoardJson { cells }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Board {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Board, D::Error> {
        let raw = BoardJson::deserialize(deserializer)?;
        Board::from_stacks(&raw.cells).map_err(serde::de::Error::custom)
    }
}

/// Renders the board as eight Python-style rows, using [`DEFAULT_EMPTY_SYMBOL`].
pub fn render_ascii(board: &Board) -> String {
    render_ascii_with(board, DEFAULT_EMPTY_SYMBOL)
}

pub fn render_ascii_with(board: &Board, empty: &str) -> String {
    let mut out = String::new();
    for (r, row) in board.cells.iter().enumerate() {
        if r > 0 {
            out.push('\n');
        }
        out.push('[');
        for (c, stack) in row.iter().enumerate() {
            if c > 0 {
                out.push_str(", ");
            }
            if stack.is_empty() {
                let _ = write!(out, "'{empty}'");
            } else {
                out.push('[');
                for (i, comp) in stack.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "('{}', '{}')", comp.shape, comp.color);
                }
                out.push(']');
            }
        }
        out.push(']');
    }
    out
}

/// One sentence per occupied cell, row-major, 1-based coordinates.
pub fn describe_grid(board: &Board) -> String {
    board
        .occupied()
        .map(|(r, c, stack)| {
            let parts: Vec<String> = stack.iter().map(|k| format!("{} {}", k.color, k.shape)).collect();
            format!("Row({}), Col({}) contains {}.", r + 1, c + 1, parts.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}
