//! Built-in seed catalog.

use serde::{Deserialize, Serialize};

use crate::grid::Shape;

/// Side length of the square window a regular board is laid out in. The
/// window is one quadrant of the grid.
pub const WINDOW: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    SimpleObject,
    RegularSimple,
    RegularComplex,
}

/// One shape position in an object template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    /// Filled with washer, nut or screw.
    Free,
    Fixed(Shape),
}

impl Slot {
    pub fn candidates(self) -> Vec<Shape> {
        match self {
            Slot::Free => Shape::SINGLE_CELL.to_vec(),
            Slot::Fixed(s) => vec![s],
        }
    }
}

/// Placement pattern for regular boards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrangement {
    /// Every row, columns 0 and 3 of the window.
    Columns,
    /// Rows 0 and 3, every column.
    Rows,
    Diagonal,
    Corners,
    /// Rows and columns 0 and 2.
    Cross,
    /// Objects along the diagonal, stepping by the footprint.
    StridedDiagonal,
    /// Every other slot in both directions.
    Alternating,
    /// Rows packed, columns skipping one slot.
    AlternateColumns,
    /// One column filled top to bottom.
    SingleColumn,
}

impl Arrangement {
    /// Window-relative origins of the repeated object.
    pub fn positions(self, footprint: (usize, usize)) -> Vec<(usize, usize)> {
        let n = WINDOW;
        let (r, c) = footprint;
        let (row_bound, col_bound) = (n - r + 1, n - c + 1);
        let grid = |rows: Vec<usize>, cols: Vec<usize>| {
            rows.iter().flat_map(|&a| cols.iter().map(move |&b| (a, b))).collect::<Vec<_>>()
        };
        let stepped = |bound: usize, step: usize| (0..bound).step_by(step).collect::<Vec<_>>();
        match self {
            Arrangement::Columns => grid((0..n).collect(), vec![0, n - 1]),
            Arrangement::Rows => grid(vec![0, n - 1], (0..n).collect()),
            Arrangement::Diagonal => (0..n).map(|i| (i, i)).collect(),
            Arrangement::Corners => vec![(0, 0), (0, n - 1), (n - 1, 0), (n - 1, n - 1)],
            Arrangement::Cross => grid(vec![0, n / 2], vec![0, n / 2]),
            Arrangement::StridedDiagonal => stepped(row_bound, r).into_iter().zip(stepped(col_bound, c)).collect(),
            Arrangement::Alternating => grid(stepped(row_bound, r + 1), stepped(col_bound, c + 1)),
            Arrangement::AlternateColumns => grid(stepped(row_bound, r), stepped(col_bound, c + 1)),
            Arrangement::SingleColumn => stepped(row_bound, r).into_iter().map(|a| (a, single_column(c))).collect(),
        }
    }

    /// Loop nest with `{{call}}` where the object is placed.
    pub fn code_template(self, footprint: (usize, usize)) -> String {
        let n = WINDOW;
        let (r, c) = footprint;
        let (row_bound, col_bound) = (n - r + 1, n - c + 1);
        match self {
            Arrangement::Columns => {
                format!("for row in range({n}):\n    for col in [0, {}]:\n        {{{{call}}}}", n - 1)
            }
            Arrangement::Rows => {
                format!("for row in [0, {}]:\n    for col in range({n}):\n        {{{{call}}}}", n - 1)
            }
            Arrangement::Diagonal => format!(
                "for row in range({n}):\n    for col in range({n}):\n        if row == col:\n            {{{{call}}}}"
            ),
            Arrangement::Corners => {
                let m = n - 1;
                format!("for row, col in [[0, 0], [0, {m}], [{m}, 0], [{m}, {m}]]:\n    {{{{call}}}}")
            }
            Arrangement::Cross => {
                let h = n / 2;
                format!("for row in [0, {h}]:\n    for col in [0, {h}]:\n        {{{{call}}}}")
            }
            Arrangement::StridedDiagonal => format!(
                "for row, col in zip(range(0, {row_bound}, {r}), range(0, {col_bound}, {c})):\n    {{{{call}}}}"
            ),
            Arrangement::Alternating => format!(
                "for row in range(0, {row_bound}, {}):\n    for col in range(0, {col_bound}, {}):\n        {{{{call}}}}",
                r + 1,
                c + 1
            ),
            Arrangement::AlternateColumns => format!(
                "for row in range(0, {row_bound}, {r}):\n    for col in range(0, {col_bound}, {}):\n        {{{{call}}}}",
                c + 1
            ),
            Arrangement::SingleColumn => format!("for row in range(0, {row_bound}, {r}):\n    {{{{call}}}}"),
        }
    }

    /// True when the template binds `col`; otherwise the column is fixed.
    pub fn binds_col(self) -> bool {
        self != Arrangement::SingleColumn
    }
}

/// Column used by [`Arrangement::SingleColumn`]: the fourth, or the last
/// one that still fits the footprint.
pub fn single_column(footprint_cols: usize) -> usize {
    (WINDOW - 1).min(WINDOW - footprint_cols)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub id: String,
    pub kind: SeedKind,
    pub description: String,
    /// Object slots. Empty for regular seeds, which draw objects from the
    /// simple-object seeds with a matching footprint.
    pub shape_slots: Vec<Slot>,
    /// Per-slot cell offsets from the object origin. `None` stacks every
    /// slot in one cell.
    pub offsets: Option<(Vec<i64>, Vec<i64>)>,
    /// occupied rows x occupied columns.
    pub footprint: (usize, usize),
    pub arrangement: Option<Arrangement>,
    /// Program text with `{{combo_name}}` and `{{shapes}}` placeholders
    /// (object seeds) or a `{{call}}` placeholder (regular seeds).
    pub code_template: String,
}

const F: Slot = Slot::Free;
const BH: Slot = Slot::Fixed(Shape::BridgeH);
const BV: Slot = Slot::Fixed(Shape::BridgeV);

type ObjectRow = (&'static str, &'static str, &'static [Slot], Option<(&'static [i64], &'static [i64])>);

const OBJECTS: [ObjectRow; 18] = [
    ("stack-2", "two shapes in one cell", &[F, F], None),
    ("stack-3", "three shapes in one cell", &[F, F, F], None),
    ("pair-row-bridge-h", "two shapes on a row under a horizontal bridge", &[F, F, BH], Some((&[0, 0, 0], &[0, 1, 0]))),
    (
        "pair-col-bridge-v",
        "two shapes in a column under a vertical bridge",
        &[F, F, BV],
        Some((&[0, 1, 0], &[0, 0, 0])),
    ),
    (
        "bridge-h-right-stack",
        "horizontal bridge with two shapes on its right end",
        &[BH, F, F],
        Some((&[0, 0, 0], &[0, 1, 1])),
    ),
    (
        "bridge-v-bottom-stack",
        "vertical bridge with two shapes on its lower end",
        &[BV, F, F],
        Some((&[0, 1, 1], &[0, 0, 0])),
    ),
    ("stack-4", "four shapes in one cell", &[F, F, F, F], None),
    (
        "pair-row-bridge-h-left",
        "horizontal bridge on a pair, one shape on its left end",
        &[F, F, BH, F],
        Some((&[0, 0, 0, 0], &[0, 1, 0, 0])),
    ),
    (
        "pair-row-bridge-h-right",
        "horizontal bridge on a pair, one shape on its right end",
        &[F, F, BH, F],
        Some((&[0, 0, 0, 0], &[0, 1, 0, 1])),
    ),
    (
        "pair-col-bridge-v-top",
        "vertical bridge on a pair, one shape on its upper end",
        &[F, F, BV, F],
        Some((&[0, 1, 0, 0], &[0, 0, 0, 0])),
    ),
    (
        "pair-col-bridge-v-bottom",
        "vertical bridge on a pair, one shape on its lower end",
        &[F, F, BV, F],
        Some((&[0, 1, 0, 1], &[0, 0, 0, 0])),
    ),
    (
        "bridge-h-then-bridge-v",
        "horizontal bridge, shape, vertical bridge, shape",
        &[BH, F, BV, F],
        Some((&[0, 1, 0, 0], &[0, 1, 1, 1])),
    ),
    (
        "bridge-v-then-bridge-h",
        "vertical bridge, shape, horizontal bridge, shape",
        &[BV, F, BH, F],
        Some((&[0, 1, 1, 1], &[0, 1, 0, 0])),
    ),
    (
        "bridges-h-under-v",
        "two horizontal bridges under two vertical bridges",
        &[BH, BH, BV, BV],
        Some((&[0, 1, 0, 0], &[0, 0, 0, 1])),
    ),
    (
        "bridges-v-under-h",
        "two vertical bridges under two horizontal bridges",
        &[BV, BV, BH, BH],
        Some((&[0, 0, 0, 1], &[0, 1, 0, 0])),
    ),
    (
        "bridge-h-bridge-v-pair",
        "horizontal and vertical bridges with two shapes on top",
        &[BH, F, BV, F, F],
        Some((&[0, 1, 0, 0, 0], &[0, 1, 1, 1, 1])),
    ),
    (
        "pair-row-bridge-h-pair",
        "horizontal bridge on a pair with two shapes on its left end",
        &[F, F, BH, F, F],
        Some((&[0, 0, 0, 0, 0], &[0, 1, 0, 0, 0])),
    ),
    (
        "pair-col-bridge-v-pair",
        "vertical bridge on a pair with two shapes on its upper end",
        &[F, F, BV, F, F],
        Some((&[0, 1, 0, 0, 0], &[0, 0, 0, 0, 0])),
    ),
];

fn footprint_of(offsets: Option<(&[i64], &[i64])>, slots: &[Slot]) -> (usize, usize) {
    let Some((dx, dy)) = offsets else { return (1, 1) };
    let mut rows = 1;
    let mut cols = 1;
    for (i, slot) in slots.iter().enumerate() {
        let (mut r, mut c) = (dx[i] as usize + 1, dy[i] as usize + 1);
        if let Slot::Fixed(s) = slot {
            if let Some((er, ec)) = s.second_cell_offset() {
                r += er;
                c += ec;
            }
        }
        rows = rows.max(r);
        cols = cols.max(c);
    }
    (rows, cols)
}

fn list_literal(values: &[i64]) -> String {
    let parts: Vec<String> = values.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn object_template(offsets: Option<(&[i64], &[i64])>) -> String {
    match offsets {
        None => "def {{combo_name}}(board, colors, x, y):\n    shapes = {{shapes}}\n    for shape, color in zip(shapes, colors):\n        put(board, shape, color, x, y)".to_string(),
        Some((dx, dy)) => format!(
            "def {{{{combo_name}}}}(board, colors, x, y):\n    shapes = {{{{shapes}}}}\n    for shape, color, dx, dy in zip(shapes, colors, {}, {}):\n        put(board, shape, color, x + dx, y + dy)",
            list_literal(dx),
            list_literal(dy)
        ),
    }
}

const REGULAR_SIMPLE: [(Arrangement, &str); 5] = [
    (Arrangement::Columns, "first and last columns of every row"),
    (Arrangement::Rows, "first and last rows of every column"),
    (Arrangement::Diagonal, "main diagonal"),
    (Arrangement::Corners, "four corners"),
    (Arrangement::Cross, "first and middle rows crossed with first and middle columns"),
];

const REGULAR_COMPLEX: [(Arrangement, (usize, usize), &str); 10] = [
    (Arrangement::StridedDiagonal, (1, 2), "diagonal stepping by the footprint"),
    (Arrangement::StridedDiagonal, (2, 1), "diagonal stepping by the footprint"),
    (Arrangement::StridedDiagonal, (2, 2), "diagonal stepping by the footprint"),
    (Arrangement::Alternating, (1, 2), "alternating rows and columns"),
    (Arrangement::Alternating, (2, 1), "alternating rows and columns"),
    (Arrangement::AlternateColumns, (1, 2), "packed rows in alternating columns"),
    (Arrangement::AlternateColumns, (2, 1), "packed rows in alternating columns"),
    (Arrangement::AlternateColumns, (2, 2), "packed rows in alternating columns"),
    (Arrangement::SingleColumn, (1, 2), "one column filled"),
    (Arrangement::SingleColumn, (2, 1), "one column filled"),
];

/// The full seed list: 18 object seeds, 5 regular-simple arrangements and
/// 10 regular-complex arrangement/footprint pairs.
pub fn catalog() -> Vec<Seed> {
    let mut seeds = Vec::with_capacity(33);
    for (i, (name, description, slots, offsets)) in OBJECTS.iter().enumerate() {
        seeds.push(Seed {
            id: format!("so{:02}-{name}", i + 1),
            kind: SeedKind::SimpleObject,
            description: description.to_string(),
            shape_slots: slots.to_vec(),
            offsets: offsets.map(|(dx, dy)| (dx.to_vec(), dy.to_vec())),
            footprint: footprint_of(*offsets, slots),
            arrangement: None,
            code_template: object_template(*offsets),
        });
    }
    for (i, (arrangement, description)) in REGULAR_SIMPLE.iter().enumerate() {
        seeds.push(Seed {
            id: format!("rs{:02}-{}", i + 1, arrangement_slug(*arrangement)),
            kind: SeedKind::RegularSimple,
            description: description.to_string(),
            shape_slots: Vec::new(),
            offsets: None,
            footprint: (1, 1),
            arrangement: Some(*arrangement),
            code_template: arrangement.code_template((1, 1)),
        });
    }
    for (i, (arrangement, fp, description)) in REGULAR_COMPLEX.iter().enumerate() {
        seeds.push(Seed {
            id: format!("rc{:02}-{}-{}x{}", i + 1, arrangement_slug(*arrangement), fp.0, fp.1),
            kind: SeedKind::RegularComplex,
            description: description.to_string(),
            shape_slots: Vec::new(),
            offsets: None,
            footprint: *fp,
            arrangement: Some(*arrangement),
            code_template: arrangement.code_template(*fp),
        });
    }
    seeds
}

fn arrangement_slug(a: Arrangement) -> &'static str {
    match a {
        Arrangement::Columns => "columns",
        Arrangement::Rows => "rows",
        Arrangement::Diagonal => "diagonal",
        Arrangement::Corners => "corners",
        Arrangement::Cross => "cross",
        Arrangement::StridedDiagonal => "strided-diagonal",
        Arrangement::Alternating => "alternating",
        Arrangement::AlternateColumns => "alternate-columns",
        Arrangement::SingleColumn => "single-column",
    }
}

pub fn find_seed(id: &str) -> Option<Seed> {
    catalog().into_iter().find(|s| s.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_counts() {
        let c = catalog();
        let count = |k| c.iter().filter(|s| s.kind == k).count();
        assert_eq!(count(SeedKind::SimpleObject), 18);
        assert_eq!(count(SeedKind::RegularSimple), 5);
        assert_eq!(count(SeedKind::RegularComplex), 10);
    }

    #[test]
    fn object_seed_limits() {
        for s in catalog().iter().filter(|s| s.kind == SeedKind::SimpleObject) {
            assert!(s.shape_slots.len() <= 5, "{}", s.id);
            assert!(s.footprint.0 * s.footprint.1 <= 4, "{}", s.id);
        }
    }

    #[test]
    fn footprints() {
        let c = catalog();
        let fp = |prefix: &str| c.iter().find(|s| s.id.starts_with(prefix)).unwrap().footprint;
        assert_eq!(fp("so01"), (1, 1));
        assert_eq!(fp("so03"), (1, 2));
        assert_eq!(fp("so04"), (2, 1));
        assert_eq!(fp("so12"), (2, 2));
        assert_eq!(fp("so14"), (2, 2));
        assert_eq!(fp("so18"), (2, 1));
    }

    #[test]
    fn arrangement_positions_fit_and_do_not_overlap() {
        for s in catalog().iter().filter(|s| s.arrangement.is_some()) {
            let a = s.arrangement.unwrap();
            let (r, c) = s.footprint;
            let pos = a.positions(s.footprint);
            assert!(pos.len() >= 2, "{}", s.id);
            let mut cells = std::collections::HashSet::new();
            for (pr, pc) in pos {
                for dr in 0..r {
                    for dc in 0..c {
                        assert!(pr + dr < WINDOW && pc + dc < WINDOW, "{}", s.id);
                        assert!(cells.insert((pr + dr, pc + dc)), "{} overlaps", s.id);
                    }
                }
            }
        }
    }

    #[test]
    fn strided_positions() {
        assert_eq!(Arrangement::StridedDiagonal.positions((2, 2)), vec![(0, 0), (2, 2)]);
        assert_eq!(Arrangement::Alternating.positions((1, 2)), vec![(0, 0), (2, 0)]);
        assert_eq!(Arrangement::SingleColumn.positions((1, 2)), vec![(0, 2), (1, 2), (2, 2), (3, 2)]);
        assert_eq!(Arrangement::SingleColumn.positions((2, 1)), vec![(0, 3), (2, 3)]);
        assert_eq!(Arrangement::Columns.positions((1, 1)).len(), 8);
    }
}
