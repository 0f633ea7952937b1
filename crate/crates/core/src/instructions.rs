//! Natural-language instructions for board records.
//!
//! Template instructions use absolute grid coordinates only. Simple boards
//! get one sentence per placed component; regular boards get a single
//! arrangement sentence naming the rows and columns involved.

use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board_gen::catalog::single_column;
use crate::board_gen::{object_origins, py_str_list, seed_by_id, Arrangement, BoardRecord, BoardType, WINDOW};
use crate::dsl::{run_source, ExecEnv, TracedPut};
use crate::grid::{describe_grid, render_ascii, ROWS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstructionStyle {
    TemplateSingle,
    TemplateMulti,
    ModelGenerated,
    HumanWritten,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionSet {
    pub record_id: String,
    pub style: InstructionStyle,
    /// Opening line of a multi-turn dialogue, kept apart from the turns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preamble: Option<String>,
    pub turns: Vec<String>,
}

impl InstructionSet {
    /// All text as one message: preamble and turns separated by newlines.
    pub fn joined(&self) -> String {
        let mut parts: Vec<&str> = Vec::with_capacity(self.turns.len() + 1);
        if let Some(p) = &self.preamble {
            parts.push(p);
        }
        parts.extend(self.turns.iter().map(String::as_str));
        parts.join("\n")
    }
}

#[derive(Debug, Error)]
pub enum InstructionError {
    #[error("{0:?} instructions cannot be rendered from a template")]
    UnsupportedStyle(InstructionStyle),
    #[error("record {0} has unknown seed")]
    UnknownSeed(String),
    #[error("gold program of record {id} does not run: {message}")]
    BrokenGold { id: String, message: String },
    #[error("line {line}: {source}")]
    Import { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const ORDINALS: [&str; 8] = ["first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth"];

fn ordinal(index: usize) -> &'static str {
    ORDINALS[index]
}

/// "first", "first and fourth", "first, second, and third".
fn ordinal_list(indices: &[usize]) -> String {
    let words: Vec<&str> = indices.iter().map(|&i| ordinal(i)).collect();
    match words.as_slice() {
        [] => String::new(),
        [one] => one.to_string(),
        [a, b] => format!("{a} and {b}"),
        [init @ .., last] => format!("{}, and {last}", init.join(", ")),
    }
}

fn placement_phrase(p: &TracedPut) -> String {
    let (name, orientation) = match p.shape.as_str() {
        "bridge-h" => ("bridge", Some("horizontal")),
        "bridge-v" => ("bridge", Some("vertical")),
        other => (other, None),
    };
    let mut s = format!("{} {}", p.color, name);
    if let Some(o) = orientation {
        let _ = write!(s, " {o}ly");
    }
    let _ = write!(s, " in the {} row, {} column", p.x + 1, p.y + 1);
    s
}

fn placements(record: &BoardRecord) -> Result<Vec<TracedPut>, InstructionError> {
    let out = run_source(&record.gold.first_order, &ExecEnv::tracing());
    match out.failure {
        None => Ok(out.trace),
        Some(f) => Err(InstructionError::BrokenGold { id: record.id.clone(), message: f.to_string() }),
    }
}

/// Renders template instructions. Human-written and model-generated
/// instructions come from outside and cannot be rendered here.
pub fn render_template(record: &BoardRecord, style: InstructionStyle) -> Result<InstructionSet, InstructionError> {
    if !matches!(style, InstructionStyle::TemplateSingle | InstructionStyle::TemplateMulti) {
        return Err(InstructionError::UnsupportedStyle(style));
    }
    let name = &record.provenance.combo.combo_name;
    let (preamble, turns) = match (record.board_type, style) {
        (BoardType::Regular, _) => (None, vec![regular_sentence(record)?]),
        (BoardType::Simple, InstructionStyle::TemplateMulti) => {
            let turns = placements(record)?.iter().map(|p| format!("place a {}", placement_phrase(p))).collect();
            (Some(format!("These are the step-by-step instructions to build {name}.")), turns)
        }
        (BoardType::Simple, _) => {
            let phrases: Vec<String> = placements(record)?.iter().map(placement_phrase).collect();
            let text = format!("These are the instructions to build {name}. Place a {}.", phrases.join(", then a "));
            (None, vec![text])
        }
    };
    Ok(InstructionSet { record_id: record.id.clone(), style, preamble, turns })
}

fn regular_sentence(record: &BoardRecord) -> Result<String, InstructionError> {
    let seed =
        seed_by_id(&record.provenance.seed_id).ok_or_else(|| InstructionError::UnknownSeed(record.id.clone()))?;
    let arrangement = seed.arrangement.ok_or_else(|| InstructionError::UnknownSeed(record.id.clone()))?;
    let combo = &record.provenance.combo;
    let name = &combo.combo_name;
    let (r0, c0) = combo.anchor;
    let last = WINDOW - 1;
    let (fr, fc) = seed.footprint;
    let rows = |v: &[usize]| ordinal_list(&v.iter().map(|i| r0 + i).collect::<Vec<_>>());
    let cols = |v: &[usize]| ordinal_list(&v.iter().map(|i| c0 + i).collect::<Vec<_>>());
    let rest: Vec<usize> = (1..WINDOW).collect();
    let body = match arrangement {
        Arrangement::Columns => format!(
            "Place a '{name}' object in the {} columns of the {} row. Then, repeat this pattern of placement in the {} rows.",
            cols(&[0, last]),
            rows(&[0]),
            rows(&rest)
        ),
        Arrangement::Rows => format!(
            "Place a '{name}' object in the {} rows of the {} column. Then, repeat this placement pattern in the {} columns.",
            rows(&[0, last]),
            cols(&[0]),
            cols(&rest)
        ),
        Arrangement::Diagonal => format!(
            "Starting from the {} row and {} column, fill the quadrant with '{name}' objects diagonally, ending at the {} row and {} column.",
            rows(&[0]),
            cols(&[0]),
            rows(&[last]),
            cols(&[last])
        ),
        Arrangement::Corners => format!(
            "Place a '{name}' object at all the corners of the quadrant spanning the {} to {} rows and the {} to {} columns.",
            rows(&[0]),
            rows(&[last]),
            cols(&[0]),
            cols(&[last])
        ),
        Arrangement::Cross => {
            let h = WINDOW / 2;
            format!(
                "Place a '{name}' object in the {} columns of the {} row. Then, repeat this placement pattern in the {} row.",
                cols(&[0, h]),
                rows(&[0]),
                rows(&[h])
            )
        }
        Arrangement::StridedDiagonal => format!(
            "Start from the {} row and {} column and diagonally place '{name}' objects, each taking a {fr}x{fc} space. Continue until there's insufficient space before the {} row or {} column ends for a full object.",
            rows(&[0]),
            cols(&[0]),
            rows(&[last]),
            cols(&[last])
        ),
        Arrangement::Alternating => format!(
            "Starting from the {} row and {} column, place the '{name}' object in alternating columns of that row, each occupying a {fr}x{fc} space, up to the {} column. Then, repeat this pattern in alternating rows up to the {} row.",
            rows(&[0]),
            cols(&[0]),
            cols(&[last]),
            rows(&[last])
        ),
        Arrangement::AlternateColumns => format!(
            "Fill the {} column with the '{name}' object, each occupying a {fr}x{fc} space, from the {} row down to the {} row. Then repeat this action in every alternate column up to the {} column.",
            cols(&[0]),
            rows(&[0]),
            rows(&[last]),
            cols(&[last])
        ),
        Arrangement::SingleColumn => format!(
            "Fill the {} column with the '{name}' object, each occupying a {fr}x{fc} space, from the {} row down to the {} row.",
            cols(&[single_column(fc)]),
            rows(&[0]),
            rows(&[last])
        ),
    };
    let colors: Vec<&str> = combo.colors.iter().map(|c| c.name()).collect();
    Ok(format!("{body} Use only these colors: {} for the '{name}' object.", py_str_list(&colors)))
}

const DESCRIBE_SYSTEM: &str =
    "You are an expert annotator who generates sequential instructions for populating a grid with the given shapes.";

const DESCRIBE_ENVIRONMENT: &str = "The environment is an 8x8 grid allowing shape placement and stacking. A shape can be placed in any cell, while stacking involves adding multiple shapes to the same cell, increasing its depth. Shapes typically occupy a single cell, except for the \"bridge,\" which spans two cells and requires two other shapes for stacking. Horizontal bridges span adjacent columns (left and right), and vertical ones span consecutive rows (top and bottom). Stacking is only possible if the shapes have matching depths.

In the grid, columns align with the x-axis and rows with the y-axis. The cell in the top-left corner is the first row and first column, corresponding to row and column values of 1, 1. Similarly, the top-right corner cell is the first row and eighth column, with row and column values of 1, 8.";

const DESCRIBE_GRID_SIMPLE: &str = "Some of the cells in the grid are filled with shapes, and the current status of the grid is labeled under `Current Grid Status'. If multiple shapes are placed in the same cell, they are mentioned in the order from bottom to top. All the shapes combined are referred to as an `object', and the name of the object is labeled under `Object Name'. Each filled cell in the grid contains a list of tuples, where each tuple indicates the name of the shape and its color. Empty cells are indicated by `□'.

The elaboration about the grid is labeled under 'Grid Explanation'.";

const DESCRIBE_GRID_REGULAR: &str = "Some of the cells in the grid are filled with objects, and the current status of the grid is labeled under `Current Grid Status'. Each filled cell in the grid contains a list of tuples, where each tuple indicates the name of the object and its colors. Empty cells are indicated by `□'.

The elaboration about the grid is labeled under 'Grid Explanation'.";

const DESCRIBE_TASK_SIMPLE: &str = "Your task is to respond with the sequential instructions under the label Instruction followed by a newline.

Generate the instructions to fill the grid with given shapes, listing all steps in a continuous format without numbering or bullet points. Also ensure to mention the object name in the instructions. Assume the grid starts empty and only describe actions for placing shapes. The order of colors, x, y matters, as these are assigned to the shapes in the same sequence.";

const DESCRIBE_TASK_REGULAR: &str = "Your task is to respond with the sequential instructions under the label Instruction followed by a newline.

Generate the instructions to fill the grid with the given object, in a continuous format without numbering or bullet points. Assume the grid starts empty and only describe actions for placing the object. The order of colors, x, y matters, as these are assigned to the object in the same sequence.";

const DESCRIBE_OTHER: &str = "Do not generate any other text/explanations.\n\nLets begin";

/// Zero-shot prompt asking a model to write instructions for a board.
pub fn build_describe_prompt(record: &BoardRecord) -> String {
    let regular = record.board_type == BoardType::Regular;
    let (grid_info, task, status, explanation) = if regular {
        let (status, explanation) = regular_grid_views(record);
        (DESCRIBE_GRID_REGULAR, DESCRIBE_TASK_REGULAR, status, explanation)
    } else {
        (DESCRIBE_GRID_SIMPLE, DESCRIBE_TASK_SIMPLE, render_ascii(&record.target), describe_grid(&record.target))
    };
    let mut out = String::new();
    let _ = write!(
        out,
        "System Info\n\n{DESCRIBE_SYSTEM}\n\nEnvironment Info\n\n{DESCRIBE_ENVIRONMENT}\n\n{grid_info}\n\nTask Info\n\n{task}\n\nOther Info\n\n{DESCRIBE_OTHER}\n\nCurrent Grid Status\n\n{status}\n\n"
    );
    if !regular {
        let _ = write!(out, "Object Name\n\n'{}'.\n\n", record.provenance.combo.combo_name);
    }
    let _ = write!(out, "Grid Explanation\n\n{explanation}\n");
    out
}

/// Grid status and explanation listing whole objects at their origins.
fn regular_grid_views(record: &BoardRecord) -> (String, String) {
    let combo = &record.provenance.combo;
    let colors: Vec<&str> = combo.colors.iter().map(|c| c.name()).collect();
    let cell = format!("[('{}', {})]", combo.combo_name, py_str_list(&colors));
    let origins = object_origins(record);
    let rows: Vec<String> = (0..ROWS)
        .map(|r| {
            let cells: Vec<String> =
                (0..ROWS).map(|c| if origins.contains(&(r, c)) { cell.clone() } else { "'□'".to_string() }).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    let explanation: Vec<String> = origins
        .iter()
        .map(|(r, c)| {
            format!(
                "Row({}), Col({}) contains a '{}' object with colors {}.",
                r + 1,
                c + 1,
                combo.combo_name,
                colors.join(", ")
            )
        })
        .collect();
    (rows.join("\n"), explanation.join("\n"))
}

#[derive(Deserialize)]
struct HumanLine {
    record_id: String,
    text: String,
}

/// Reads human-written instructions: JSONL with `record_id` and `text`.
pub fn import_human<R: BufRead>(input: R) -> Result<Vec<InstructionSet>, InstructionError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let h: HumanLine =
            serde_json::from_str(&line).map_err(|source| InstructionError::Import { line: i + 1, source })?;
        out.push(InstructionSet {
            record_id: h.record_id,
            style: InstructionStyle::HumanWritten,
            preamble: None,
            turns: vec![h.text],
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board_gen::{combo_name, generate_board, seeds, Combo};
    use crate::grid::Color::*;
    use crate::grid::Shape::{self, *};

    fn record(
        seed_prefix: &str,
        object_prefix: &str,
        shapes: &[Shape],
        colors: &[crate::grid::Color],
        anchor: (usize, usize),
    ) -> BoardRecord {
        let find = |p: &str| seeds().iter().find(|s| s.id.starts_with(p)).unwrap();
        let combo = Combo {
            object_seed: find(object_prefix).id.clone(),
            shapes: shapes.to_vec(),
            colors: colors.to_vec(),
            anchor,
            combo_name: combo_name(shapes),
        };
        generate_board(find(seed_prefix), &combo).unwrap()
    }

    #[test]
    fn multi_turn_simple() {
        let rec = record("so01", "so01", &[Washer, Screw], &[Red, Blue], (6, 2));
        let set = render_template(&rec, InstructionStyle::TemplateMulti).unwrap();
        assert_eq!(set.preamble.as_deref(), Some("These are the step-by-step instructions to build ws."));
        assert_eq!(
            set.turns,
            vec!["place a red washer in the 7 row, 3 column", "place a blue screw in the 7 row, 3 column"]
        );
    }

    #[test]
    fn bridges_carry_orientation() {
        let rec = record("so03", "so03", &[Nut, Washer, BridgeH], &[Red, Blue, Green], (0, 0));
        let set = render_template(&rec, InstructionStyle::TemplateMulti).unwrap();
        assert_eq!(set.turns[2], "place a green bridge horizontally in the 1 row, 1 column");
    }

    #[test]
    fn single_turn_simple() {
        let rec = record("so01", "so01", &[Washer, Screw], &[Red, Blue], (6, 2));
        let set = render_template(&rec, InstructionStyle::TemplateSingle).unwrap();
        assert_eq!(
            set.turns,
            vec!["These are the instructions to build ws. Place a red washer in the 7 row, 3 column, then a blue screw in the 7 row, 3 column."]
        );
        assert_eq!(set, render_template(&rec, InstructionStyle::TemplateSingle).unwrap());
    }

    #[test]
    fn regular_corners_sentence() {
        let rec = record("rs04", "so01", &[Washer, Screw], &[Red, Blue], (4, 0));
        let set = render_template(&rec, InstructionStyle::TemplateMulti).unwrap();
        assert_eq!(
            set.turns,
            vec!["Place a 'ws' object at all the corners of the quadrant spanning the fifth to eighth rows and the first to fourth columns. Use only these colors: ['red', 'blue'] for the 'ws' object."]
        );
    }

    #[test]
    fn regular_columns_sentence() {
        let rec = record("rs01", "so01", &[Washer, Screw], &[Red, Blue], (0, 4));
        let text = &render_template(&rec, InstructionStyle::TemplateSingle).unwrap().turns[0];
        assert!(text.starts_with(
            "Place a 'ws' object in the fifth and eighth columns of the first row. Then, repeat this pattern of placement in the second, third, and fourth rows."
        ));
    }

    #[test]
    fn complex_footprint_clause() {
        let rec = record("rc01", "so03", &[Nut, Washer, BridgeH], &[Red, Blue, Green], (0, 0));
        let text = &render_template(&rec, InstructionStyle::TemplateSingle).unwrap().turns[0];
        assert!(text.contains("each taking a 1x2 space"), "{text}");
    }

    #[test]
    fn human_style_is_import_only() {
        let rec = record("so01", "so01", &[Washer, Screw], &[Red, Blue], (6, 2));
        assert!(matches!(
            render_template(&rec, InstructionStyle::HumanWritten),
            Err(InstructionError::UnsupportedStyle(_))
        ));
        let sets = import_human("{\"record_id\": \"a\", \"text\": \"build it\"}\n\n".as_bytes()).unwrap();
        assert_eq!(sets[0].turns, vec!["build it"]);
        assert!(import_human("{\"record_id\": \"a\"}".as_bytes()).is_err());
    }

    #[test]
    fn describe_prompt_simple() {
        let rec = record("so01", "so01", &[Washer, Screw], &[Red, Blue], (6, 2));
        let p = build_describe_prompt(&rec);
        assert!(p.contains("Row(7), Col(3) contains red washer, blue screw."));
        assert!(p.contains("Object Name\n\n'ws'."));
        assert!(p.contains("[('washer', 'red'), ('screw', 'blue')]"));
    }

    #[test]
    fn describe_prompt_regular() {
        let rec = record("rs04", "so01", &[Washer, Screw], &[Red, Blue], (0, 0));
        let p = build_describe_prompt(&rec);
        assert!(p.contains("filled with objects"));
        assert!(!p.contains("Object Name"));
        assert!(p.contains("[('ws', ['red', 'blue'])]"));
        assert_eq!(p.matches("contains a 'ws' object").count(), 4);
    }
}
