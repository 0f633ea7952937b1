//! Target boards and their gold programs.
//!
//! Boards are extrapolated from a fixed catalog of seeds. Object seeds
//! describe one object (a few components stacked or bridged together);
//! regular seeds repeat an object in a pattern across a 4x4 quadrant.
//! Every record carries three gold programs that rebuild its target:
//! a flat list of `put` calls, that list wrapped in a function, and the
//! template-level program with loops.

pub mod catalog;
mod splits;

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{run_source, ExecEnv};
use crate::grid::{Board, Color, PlacementError, Shape};

pub use catalog::{catalog, Arrangement, Seed, SeedKind, Slot, WINDOW};
pub use splits::{candidate_count, make_splits, read_jsonl, write_jsonl, Category, SplitConfig, SplitCounts, SplitSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoardType {
    Simple,
    Regular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectType {
    Simple,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    /// Origins of the quadrants the split draws from.
    pub fn quadrants(self) -> &'static [(usize, usize)] {
        match self {
            Split::Train => &[(0, 0)],
            Split::Val => &[(0, 4)],
            Split::Test => &[(4, 0), (4, 4)],
        }
    }

    pub fn of_quadrant(origin: (usize, usize)) -> Split {
        match origin {
            (0, 0) => Split::Train,
            (0, _) => Split::Val,
            _ => Split::Test,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    /// Whether a cell lies inside one of this split's quadrants.
    pub fn contains(self, row: usize, col: usize) -> bool {
        self.quadrants().contains(&quadrant_of(row, col))
    }
}

pub fn quadrant_of(row: usize, col: usize) -> (usize, usize) {
    (row / WINDOW * WINDOW, col / WINDOW * WINDOW)
}

/// A distinct object: an object seed with its free slots filled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub seed_id: String,
    pub shapes: Vec<Shape>,
    pub combo_name: String,
    pub footprint: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Combo {
    /// Object seed that lays the shapes out.
    pub object_seed: String,
    pub shapes: Vec<Shape>,
    pub colors: Vec<Color>,
    /// Object origin for simple boards, quadrant origin for regular ones.
    pub anchor: (usize, usize),
    pub combo_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldCode {
    pub first_order: String,
    pub higher_order: String,
    pub optimal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed_id: String,
    pub combo: Combo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardRecord {
    pub id: String,
    pub board_type: BoardType,
    pub object_type: ObjectType,
    pub split: Split,
    pub target: Board,
    pub gold: GoldCode,
    pub provenance: Provenance,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid combo: {0}")]
    InvalidCombo(String),
    #[error("unknown seed '{0}'")]
    UnknownSeed(String),
    #[error("infeasible split config: {0}")]
    Infeasible(String),
}

static CATALOG: OnceLock<Vec<Seed>> = OnceLock::new();

/// Shared copy of [`catalog`].
pub fn seeds() -> &'static [Seed] {
    CATALOG.get_or_init(catalog)
}

pub fn seed_by_id(id: &str) -> Option<&'static Seed> {
    seeds().iter().find(|s| s.id == id)
}

pub fn combo_name(shapes: &[Shape]) -> String {
    shapes.iter().map(|s| s.initial()).collect()
}

pub fn py_str_list<T: AsRef<str>>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|s| format!("'{}'", s.as_ref())).collect();
    format!("[{}]", parts.join(", "))
}

fn color_list(colors: &[Color]) -> String {
    py_str_list(&colors.iter().map(|c| c.name()).collect::<Vec<_>>())
}

/// Places an object directly through the grid API, bypassing the DSL.
pub fn place_object(
    board: &mut Board,
    seed: &Seed,
    shapes: &[Shape],
    colors: &[Color],
    row: usize,
    col: usize,
) -> Result<(), PlacementError> {
    for (i, (shape, color)) in shapes.iter().zip(colors).enumerate() {
        let (dx, dy) = match &seed.offsets {
            Some((dx, dy)) => (dx[i], dy[i]),
            None => (0, 0),
        };
        board.place(*shape, *color, row as i64 + dx, col as i64 + dy)?;
    }
    Ok(())
}

/// Every color assignment under which the object can be built.
pub fn colorings(seed: &Seed, shapes: &[Shape]) -> Vec<Vec<Color>> {
    fn go(seed: &Seed, shapes: &[Shape], board: &Board, prefix: &mut Vec<Color>, out: &mut Vec<Vec<Color>>) {
        let i = prefix.len();
        if i == shapes.len() {
            out.push(prefix.clone());
            return;
        }
        let (dx, dy) = match &seed.offsets {
            Some((dx, dy)) => (dx[i], dy[i]),
            None => (0, 0),
        };
        for color in Color::ALL {
            let mut next = board.clone();
            if next.place(shapes[i], color, dx, dy).is_ok() {
                prefix.push(color);
                go(seed, shapes, &next, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(seed, shapes, &Board::new(), &mut Vec::new(), &mut out);
    out
}

fn layout_key(seed: &Seed, shapes: &[Shape]) -> Vec<(i64, i64, Shape)> {
    let mut key: Vec<_> = shapes
        .iter()
        .enumerate()
        .map(|(i, s)| match &seed.offsets {
            Some((dx, dy)) => (dx[i], dy[i], *s),
            None => (0, 0, *s),
        })
        .collect();
    // order within a cell matters, order across cells does not
    key.sort_by_key(|&(r, c, _)| (r, c));
    key
}

/// All buildable objects of the given object seeds, first occurrence kept
/// when two seeds produce the same layout.
pub fn enumerate_objects(seeds: &[Seed]) -> Vec<ObjectSpec> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for seed in seeds.iter().filter(|s| s.kind == SeedKind::SimpleObject) {
        let mut assignments: Vec<Vec<Shape>> = vec![Vec::new()];
        for slot in &seed.shape_slots {
            assignments = assignments
                .into_iter()
                .flat_map(|prefix| {
                    slot.candidates().into_iter().map(move |s| {
                        let mut v = prefix.clone();
                        v.push(s);
                        v
                    })
                })
                .collect();
        }
        for shapes in assignments {
            if colorings(seed, &shapes).is_empty() {
                continue;
            }
            if !seen.insert(layout_key(seed, &shapes)) {
                continue;
            }
            out.push(ObjectSpec {
                seed_id: seed.id.clone(),
                combo_name: combo_name(&shapes),
                shapes,
                footprint: seed.footprint,
            });
        }
    }
    out
}

/// Objects a seed can use: the object itself for object seeds, every
/// object with a matching footprint for regular seeds.
pub fn objects_for_seed<'a>(seed: &Seed, objects: &'a [ObjectSpec]) -> Vec<&'a ObjectSpec> {
    match seed.kind {
        SeedKind::SimpleObject => objects.iter().filter(|o| o.seed_id == seed.id).collect(),
        _ => objects.iter().filter(|o| o.footprint == seed.footprint).collect(),
    }
}

/// Anchors inside a quadrant at which a seed's footprint fits.
pub fn anchors(seed: &Seed, quadrant: (usize, usize)) -> Vec<(usize, usize)> {
    match seed.kind {
        SeedKind::SimpleObject => {
            let (fr, fc) = seed.footprint;
            let mut out = Vec::new();
            for r in quadrant.0..=quadrant.0 + WINDOW - fr {
                for c in quadrant.1..=quadrant.1 + WINDOW - fc {
                    out.push((r, c));
                }
            }
            out
        }
        _ => vec![quadrant],
    }
}

fn object_definition(object_seed: &Seed, combo: &Combo) -> String {
    let shape_names: Vec<&str> = combo.shapes.iter().map(|s| s.name()).collect();
    object_seed
        .code_template
        .replace("{{combo_name}}", &combo.combo_name)
        .replace("{{shapes}}", &py_str_list(&shape_names))
}

fn offset_expr(var: &str, offset: usize) -> String {
    if offset == 0 {
        var.to_string()
    } else {
        format!("{var} + {offset}")
    }
}

/// Template-level program for a combo.
pub fn optimal_code(seed: &Seed, combo: &Combo) -> Result<String, GenError> {
    let object_seed = seed_by_id(&combo.object_seed).ok_or_else(|| GenError::UnknownSeed(combo.object_seed.clone()))?;
    let def = object_definition(object_seed, combo);
    let colors = color_list(&combo.colors);
    let (ar, ac) = combo.anchor;
    let body = match seed.arrangement {
        None => format!("{}(board, colors={colors}, x={ar}, y={ac})", combo.combo_name),
        Some(arrangement) => {
            let y = if arrangement.binds_col() {
                offset_expr("col", ac)
            } else {
                (ac + catalog::single_column(seed.footprint.1)).to_string()
            };
            let call = format!("{}(board, colors={colors}, x={}, y={y})", combo.combo_name, offset_expr("row", ar));
            seed.code_template.replace("{{call}}", &call)
        }
    };
    Ok(format!("{def}\n\n{body}"))
}

fn check_combo(seed: &Seed, combo: &Combo) -> Result<&'static Seed, GenError> {
    let invalid = |m: String| Err(GenError::InvalidCombo(m));
    let object_seed = seed_by_id(&combo.object_seed).ok_or_else(|| GenError::UnknownSeed(combo.object_seed.clone()))?;
    if object_seed.kind != SeedKind::SimpleObject {
        return invalid(format!("'{}' is not an object seed", object_seed.id));
    }
    match seed.kind {
        SeedKind::SimpleObject if object_seed.id != seed.id => {
            return invalid(format!("object seed '{}' does not match '{}'", object_seed.id, seed.id));
        }
        SeedKind::RegularSimple | SeedKind::RegularComplex if object_seed.footprint != seed.footprint => {
            return invalid(format!(
                "object footprint {:?} does not match {:?}",
                object_seed.footprint, seed.footprint
            ));
        }
        _ => {}
    }
    let slots = &object_seed.shape_slots;
    if combo.shapes.len() != slots.len() || combo.colors.len() != slots.len() {
        return invalid(format!("expected {} shapes and colors", slots.len()));
    }
    for (slot, shape) in slots.iter().zip(&combo.shapes) {
        if !slot.candidates().contains(shape) {
            return invalid(format!("shape {shape} does not fit slot {slot:?}"));
        }
    }
    if combo.combo_name != combo_name(&combo.shapes) {
        return invalid(format!("combo name '{}' does not match shapes", combo.combo_name));
    }
    let (ar, ac) = combo.anchor;
    let quadrant = quadrant_of(ar, ac);
    match seed.kind {
        SeedKind::SimpleObject => {
            let (fr, fc) = seed.footprint;
            if ar + fr > quadrant.0 + WINDOW || ac + fc > quadrant.1 + WINDOW {
                return invalid(format!("object at {:?} leaves its quadrant", combo.anchor));
            }
        }
        _ => {
            if combo.anchor != quadrant {
                return invalid(format!("regular anchor {:?} is not a quadrant origin", combo.anchor));
            }
        }
    }
    Ok(object_seed)
}

/// Instantiates a seed. The target is whatever the optimal program builds,
/// and the first-order program is read off the execution trace.
pub fn generate_board(seed: &Seed, combo: &Combo) -> Result<BoardRecord, GenError> {
    check_combo(seed, combo)?;
    let optimal = optimal_code(seed, combo)?;
    let outcome = run_source(&optimal, &ExecEnv::tracing());
    if let Some(f) = &outcome.failure {
        return Err(GenError::InvalidCombo(f.to_string()));
    }
    let quadrant = quadrant_of(combo.anchor.0, combo.anchor.1);
    if outcome.board.occupied().any(|(r, c, _)| quadrant_of(r, c) != quadrant) {
        return Err(GenError::InvalidCombo("placement leaves the quadrant".into()));
    }
    let lines: Vec<String> = outcome.trace.iter().map(|t| t.to_code()).collect();
    let first_order = lines.join("\n");
    let indented: Vec<String> = lines.iter().map(|l| format!("    {l}")).collect();
    let higher_order = format!("def {name}(board):\n{}\n\n{name}(board)", indented.join("\n"), name = combo.combo_name);
    let (board_type, object_type) = match seed.kind {
        SeedKind::SimpleObject => (BoardType::Simple, ObjectType::Simple),
        SeedKind::RegularSimple => (BoardType::Regular, ObjectType::Simple),
        SeedKind::RegularComplex => (BoardType::Regular, ObjectType::Complex),
    };
    let color_initials: String = combo.colors.iter().map(|c| &c.name()[..1]).collect();
    let object_tag = combo.object_seed.split('-').next().unwrap_or_default();
    Ok(BoardRecord {
        id: format!(
            "{}/{object_tag}-{}/{color_initials}/{}-{}",
            seed.id, combo.combo_name, combo.anchor.0, combo.anchor.1
        ),
        board_type,
        object_type,
        split: Split::of_quadrant(quadrant),
        target: outcome.board,
        gold: GoldCode { first_order, higher_order, optimal },
        provenance: Provenance { seed_id: seed.id.clone(), combo: combo.clone() },
    })
}

/// Grid origins of every object instance on a record's board.
pub fn object_origins(record: &BoardRecord) -> Vec<(usize, usize)> {
    let combo = &record.provenance.combo;
    let (ar, ac) = combo.anchor;
    match seed_by_id(&record.provenance.seed_id).and_then(|s| s.arrangement.map(|a| (a, s.footprint))) {
        Some((arrangement, footprint)) => {
            arrangement.positions(footprint).into_iter().map(|(r, c)| (ar + r, ac + c)).collect()
        }
        None => vec![combo.anchor],
    }
}

/// Combo for an object at an anchor.
pub fn make_combo(object: &ObjectSpec, colors: Vec<Color>, anchor: (usize, usize)) -> Combo {
    Combo {
        object_seed: object.seed_id.clone(),
        shapes: object.shapes.clone(),
        colors,
        anchor,
        combo_name: object.combo_name.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Color::*;
    use Shape::*;

    fn seed(prefix: &str) -> &'static Seed {
        seeds().iter().find(|s| s.id.starts_with(prefix)).unwrap()
    }

    fn combo(object_seed: &str, shapes: &[Shape], colors: &[Color], anchor: (usize, usize)) -> Combo {
        Combo {
            object_seed: seed(object_seed).id.clone(),
            shapes: shapes.to_vec(),
            colors: colors.to_vec(),
            anchor,
            combo_name: combo_name(shapes),
        }
    }

    #[test]
    fn stack_two_record() {
        let s = seed("so01");
        let rec = generate_board(s, &combo("so01", &[Washer, Nut], &[Red, Blue], (0, 0))).unwrap();
        assert_eq!(rec.gold.first_order, "put(board, 'washer', 'red', 0, 0)\nput(board, 'nut', 'blue', 0, 0)");
        assert_eq!(rec.target.height(0, 0), 2);
        assert_eq!(rec.split, Split::Train);
        assert_eq!(
            rec.gold.optimal,
            "def wn(board, colors, x, y):\n    shapes = ['washer', 'nut']\n    for shape, color in zip(shapes, colors):\n        put(board, shape, color, x, y)\n\nwn(board, colors=['red', 'blue'], x=0, y=0)"
        );
        assert_eq!(
            rec.gold.higher_order,
            "def wn(board):\n    put(board, 'washer', 'red', 0, 0)\n    put(board, 'nut', 'blue', 0, 0)\n\nwn(board)"
        );
    }

    #[test]
    fn stack_two_rule_exclusion() {
        let objs = enumerate_objects(seeds());
        let stack2: Vec<_> = objs.iter().filter(|o| o.seed_id.starts_with("so01")).collect();
        assert!(stack2.iter().any(|o| o.shapes == [Washer, Nut]));
        assert!(!stack2.iter().any(|o| o.shapes == [Washer, Washer]));
    }

    #[test]
    fn regular_corners_in_quadrant() {
        let s = seed("rs04");
        let rec = generate_board(s, &combo("so01", &[Washer, Screw], &[Red, Blue], (4, 4))).unwrap();
        let cells: Vec<_> = rec.target.occupied().map(|(r, c, _)| (r, c)).collect();
        assert_eq!(cells, vec![(4, 4), (4, 7), (7, 4), (7, 7)]);
        assert!(rec.gold.optimal.contains("x=row + 4, y=col + 4"));
        assert_eq!(rec.split, Split::Test);
    }

    #[test]
    fn overflowing_anchor_is_invalid() {
        let s = seed("so12");
        let objs = enumerate_objects(seeds());
        let o = objs.iter().find(|o| o.seed_id == s.id).unwrap();
        let colors = colorings(s, &o.shapes)[0].clone();
        assert!(matches!(generate_board(s, &make_combo(o, colors.clone(), (3, 3))), Err(GenError::InvalidCombo(_))));
        assert!(generate_board(s, &make_combo(o, colors, (2, 2))).is_ok());
    }

    #[test]
    fn rule_violating_colors_are_invalid() {
        let s = seed("so01");
        assert!(generate_board(s, &combo("so01", &[Washer, Nut], &[Red, Red], (0, 0))).is_err());
        assert!(generate_board(s, &combo("so01", &[Screw, Nut], &[Red, Blue], (0, 0))).is_err());
    }

    #[test]
    fn enumeration_is_deterministic() {
        assert_eq!(enumerate_objects(seeds()), enumerate_objects(seeds()));
    }

    #[test]
    fn stack_two_colorings() {
        assert_eq!(colorings(seed("so01"), &[Washer, Nut]).len(), 12);
    }
}
