//! Scoring of generated programs against board records.

pub mod codebleu;
mod report;

use serde::{Deserialize, Serialize};

use crate::board_gen::{BoardRecord, BoardType, ObjectType};
use crate::dsl::{run_source, ExecEnv};
use crate::grid::{boards_equal, Board, Component};
use crate::task::TaskKind;
use crate::taxonomy::ErrorCategory;

pub use codebleu::{codebleu, CodeBleu, CodeBleuWeights};
pub use report::{aggregate, AggregateError, ErrorRow, ReportRow, ReportTable};

fn normalize(text: &str) -> String {
    let unified = text.replace("\r\n", "\n").replace('\r', "\n");
    let lines: Vec<&str> = unified.split('\n').map(str::trim_end).collect();
    lines.join("\n").trim_end_matches('\n').to_string()
}

/// 1 when the texts agree after unifying line endings and dropping
/// trailing whitespace on each line.
pub fn exact_match(generated: &str, gold: &str) -> u8 {
    u8::from(normalize(generated) == normalize(gold))
}

/// Number of placed components. A bridge spans two cells but counts once.
fn component_count(board: &Board) -> usize {
    board.occupied().flat_map(|(_, _, s)| s.iter()).map(|c| if c.shape.is_bridge() { 1 } else { 2 }).sum::<usize>() / 2
}

/// Names the first difference between two boards. Checks run in order:
/// component count, then a row-major cell scan where an empty cell on
/// either side is a location error and a differing stack entry is a shape
/// or color error. Stacks that differ only in height are location errors.
pub fn classify_error(executed: &Board, target: &Board) -> ErrorCategory {
    if component_count(executed) != component_count(target) {
        return ErrorCategory::MismatchCount;
    }
    for row in 0..crate::grid::ROWS {
        for col in 0..crate::grid::COLS {
            let (a, b) = (executed.stack(row, col), target.stack(row, col));
            if a.is_empty() != b.is_empty() {
                return ErrorCategory::MismatchLocation;
            }
            let differing =
                a.iter().zip(b).find(|(p, q): &(&Component, &Component)| p.shape != q.shape || p.color != q.color);
            match differing {
                Some((p, q)) if p.shape != q.shape => return ErrorCategory::MismatchShape,
                Some(_) => return ErrorCategory::MismatchColor,
                None if a.len() != b.len() => return ErrorCategory::MismatchLocation,
                None => {}
            }
        }
    }
    // unreachable for unequal boards; kept total for callers that skip the check
    ErrorCategory::MismatchLocation
}

/// Runs `generated` on an empty board and compares with `target`.
pub fn execution_success(generated: &str, target: &Board) -> (u8, Board, Option<ErrorCategory>) {
    let out = run_source(generated, &ExecEnv::default());
    if let Some(f) = out.failure {
        return (0, out.board, Some(f.category));
    }
    if boards_equal(&out.board, target) {
        (1, out.board, None)
    } else {
        let category = classify_error(&out.board, target);
        (0, out.board, Some(category))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub record_id: String,
    pub board_type: BoardType,
    pub object_type: ObjectType,
    pub task: TaskKind,
    pub model: String,
    pub em: u8,
    pub codebleu: CodeBleu,
    pub es: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorCategory>,
    pub executed_board: Board,
    pub generated: String,
    /// Set when the response had no output label and was taken whole.
    #[serde(default)]
    pub label_missing: bool,
}

/// Scores one generated program for a record under a task.
pub fn score(record: &BoardRecord, task: TaskKind, model: &str, generated: &str) -> EvalOutcome {
    let gold = task.gold(record);
    let (es, executed_board, error) = execution_success(generated, &record.target);
    EvalOutcome {
        record_id: record.id.clone(),
        board_type: record.board_type,
        object_type: record.object_type,
        task,
        model: model.to_string(),
        em: exact_match(generated, gold),
        codebleu: codebleu(generated, gold, CodeBleuWeights::default()),
        es,
        error,
        executed_board,
        generated: generated.to_string(),
        label_missing: false,
    }
}

/// Outcome for a record whose model request failed outright.
pub fn transport_failure(record: &BoardRecord, task: TaskKind, model: &str) -> EvalOutcome {
    let mut out = score(record, task, model, "");
    out.error = Some(ErrorCategory::Transport);
    out
}
