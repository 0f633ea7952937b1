//! Few-shot code generation prompts.

use std::fmt::Write as _;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board_gen::BoardRecord;
use crate::grid::Shape;
use crate::task::TaskKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    System,
    Environment,
    Context,
    Task,
    InContext,
    Other,
}

impl Section {
    pub const ORDER: [Section; 6] =
        [Section::System, Section::Environment, Section::Context, Section::Task, Section::InContext, Section::Other];

    pub fn letter(self) -> &'static str {
        match self {
            Section::System => "S",
            Section::Environment => "E",
            Section::Context => "C",
            Section::Task => "T",
            Section::InContext => "I",
            Section::Other => "O",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    /// Included sections; always rendered in [`Section::ORDER`].
    pub sections: Vec<Section>,
    pub task: TaskKind,
    pub k_examples: usize,
    pub instruction_label: String,
    pub output_label: String,
}

impl PromptSpec {
    pub fn full(task: TaskKind, k_examples: usize) -> PromptSpec {
        PromptSpec {
            sections: Section::ORDER.to_vec(),
            task,
            k_examples,
            instruction_label: "Instruction".into(),
            output_label: "Output".into(),
        }
    }

    pub fn without(mut self, section: Section) -> PromptSpec {
        self.sections.retain(|s| *s != section);
        self
    }

    pub fn has(&self, section: Section) -> bool {
        self.sections.contains(&section)
    }

    /// Label such as "S + E + C + T + O + I*". In-context samples go last
    /// and carry a star when there are five of them.
    pub fn structure_label(&self) -> String {
        let mut parts: Vec<String> = Section::ORDER
            .iter()
            .filter(|s| **s != Section::InContext && self.has(**s))
            .map(|s| s.letter().to_string())
            .collect();
        if self.has(Section::InContext) && self.k_examples > 0 {
            parts.push(if self.k_examples == 5 { "I*".into() } else { format!("I{}", self.k_examples) });
        }
        parts.join(" + ")
    }
}

/// The six prompt structures compared in the ablation: the full prompt and
/// each variant with one of S, E, C, T or O removed.
pub fn ablation_specs(task: TaskKind, k_examples: usize) -> Vec<PromptSpec> {
    let full = PromptSpec::full(task, k_examples);
    let mut out = vec![full.clone()];
    for s in [Section::System, Section::Environment, Section::Context, Section::Task, Section::Other] {
        out.push(full.clone().without(s));
    }
    out
}

const SYSTEM: &str = "You are a helpful assistant who is designed to interpret and translate natural language instructions into python executable code snippets.";

const ENVIRONMENT: &str = "The environment is an 8x8 grid allowing shape placement and stacking. A shape can be placed in any cell, while stacking involves adding multiple shapes to the same cell, increasing its depth. Shapes typically occupy a single cell, except for the \"bridge,\" which spans two cells and requires two other shapes for stacking. Horizontal bridges span adjacent columns (left and right), and vertical ones span consecutive rows (top and bottom). Stacking is only possible if the shapes have matching depths.

In the grid, columns align with the x-axis and rows with the y-axis. Python indexing is used to identify each cell. The cell in the top-left corner is in the first row and first column, corresponding to x and y values of 0, 0. Similarly, the top-right corner cell is in the first row and eighth column, with x and y values of 0, 7.

- Use the shape name 'bridge-h' if a bridge is placed horizontally
- Use the shape name 'bridge-v' if a bridge is placed vertically";

const CONTEXT: &str = "The following functions are already defined; therefore, do not generate additional code for it

- Use `put(board: np.ndarray, shape: string, color: string, x: int, y: int) to place a shape on the board";

const OTHER: &str = "Do not generate any other text/explanations.

Ensure the response can be executed by Python `exec()`, e.g.: no trailing commas, no periods, etc.

Lets begin";

fn task_text(spec: &PromptSpec) -> String {
    let mut s = format!(
        "For each instruction labeled {} please respond with code under the label {} followed by a newline.",
        spec.instruction_label, spec.output_label
    );
    match spec.task {
        TaskKind::PropertyComp => {}
        TaskKind::FuncCompSequences | TaskKind::FuncCompOptimal => {
            s.push_str("\n\nDefine a function named after the object that builds it, then call the function.");
        }
        TaskKind::FuncRepeat => {
            s.push_str("\n\nDefine a function named after the object, then call it in loops to repeat the object.");
        }
    }
    s
}

/// An in-context pair: instruction text and the gold program for the task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub record_id: String,
    pub instruction: String,
    pub code: String,
}

/// Renders the prompt. The test instruction always closes the prompt,
/// followed by the output label on its own line.
pub fn build_prompt(spec: &PromptSpec, examples: &[Example], test_instruction: &str) -> String {
    let mut out = String::new();
    for section in Section::ORDER.into_iter().filter(|s| spec.has(*s)) {
        let (title, body) = match section {
            Section::System => ("System Info", SYSTEM.to_string()),
            Section::Environment => ("Environment Info", ENVIRONMENT.to_string()),
            Section::Context => ("Context Info", CONTEXT.to_string()),
            Section::Task => ("Task Info", task_text(spec)),
            Section::InContext => {
                if examples.is_empty() {
                    continue;
                }
                let mut body = String::new();
                for (i, e) in examples.iter().enumerate() {
                    if i > 0 {
                        body.push_str("\n\n");
                    }
                    let _ = write!(
                        body,
                        "{}:\n{}\n{}:\n{}",
                        spec.instruction_label, e.instruction, spec.output_label, e.code
                    );
                }
                ("In-context Samples", body)
            }
            Section::Other => ("Other Info", OTHER.to_string()),
        };
        let _ = write!(out, "{title}\n\n{body}\n\n");
    }
    let _ = write!(out, "{}:\n{}\n{}:\n", spec.instruction_label, test_instruction, spec.output_label);
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SelectionError {
    #[error("only {available} in-context candidates for {record_id}, {wanted} requested")]
    InsufficientPool { record_id: String, available: usize, wanted: usize },
}

/// Sorted shape names of a record's object.
pub fn shape_multiset(record: &BoardRecord) -> Vec<Shape> {
    let mut shapes = record.provenance.combo.shapes.clone();
    shapes.sort();
    shapes
}

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Draws `k` training records for a test record, skipping any built from
/// the same multiset of shapes and any of a different board or object
/// type. The draw depends only on `rng_seed` and the test record's id.
pub fn select_in_context<'a>(
    train: &[&'a BoardRecord],
    test: &BoardRecord,
    k: usize,
    rng_seed: u64,
) -> Result<Vec<&'a BoardRecord>, SelectionError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let banned = shape_multiset(test);
    let pool: Vec<&BoardRecord> = train
        .iter()
        .copied()
        .filter(|r| r.board_type == test.board_type && r.object_type == test.object_type)
        .filter(|r| shape_multiset(r) != banned)
        .collect();
    if pool.len() < k {
        return Err(SelectionError::InsufficientPool { record_id: test.id.clone(), available: pool.len(), wanted: k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed ^ fnv1a(&test.id));
    Ok(index::sample(&mut rng, pool.len(), k).into_iter().map(|i| pool[i]).collect())
}

/// Code under the output label, with one surrounding code fence removed.
/// When the label is missing the whole reply is used and the flag is false.
pub fn parse_response(raw: &str, output_label: &str, instruction_label: &str) -> (String, bool) {
    let marker = format!("{output_label}:");
    let lines: Vec<&str> = raw.lines().collect();
    let start = lines.iter().position(|l| l.trim_start().starts_with(&marker));
    let (body, found) = match start {
        Some(i) => {
            let first = lines[i].trim_start()[marker.len()..].trim();
            let next_markers = [marker.as_str(), &format!("{instruction_label}:")].map(str::to_string);
            let rest = lines[i + 1..]
                .iter()
                .take_while(|l| !next_markers.iter().any(|m| l.trim_start().starts_with(m.as_str())));
            let mut collected: Vec<&str> = Vec::new();
            if !first.is_empty() {
                collected.push(first);
            }
            collected.extend(rest);
            (collected.join("\n"), true)
        }
        None => (raw.to_string(), false),
    };
    (strip_fence(&body), found)
}

fn strip_fence(text: &str) -> String {
    let trimmed = text.trim_matches(|c| c == '\n' || c == '\r');
    let mut lines: Vec<&str> = trimmed.lines().collect();
    if lines.first().is_some_and(|l| l.trim_start().starts_with("```")) {
        lines.remove(0);
        if lines.last().is_some_and(|l| l.trim() == "```") {
            lines.pop();
        }
    }
    let joined = lines.join("\n");
    joined.trim_end().to_string()
}
