use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::EvalOutcome;
use crate::board_gen::{BoardType, ObjectType};
use crate::task::TaskKind;
use crate::taxonomy::ErrorCategory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub board_type: BoardType,
    pub object_type: ObjectType,
    pub task: TaskKind,
    pub model: String,
    pub n: usize,
    pub em: f64,
    pub cb: f64,
    pub es: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub board_type: BoardType,
    pub object_type: ObjectType,
    pub task: TaskKind,
    pub category: ErrorCategory,
    pub model: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub rows: Vec<ReportRow>,
    pub errors: Vec<ErrorRow>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AggregateError {
    #[error("no outcomes to aggregate")]
    Empty,
}

type CellKey = (BoardType, ObjectType, TaskKind, String);

#[derive(Default)]
struct Sums {
    n: usize,
    em: f64,
    cb: f64,
    es: f64,
}

/// Means per (board type, object type, task, model) and failure counts per
/// error category, both in a fixed order.
pub fn aggregate(outcomes: &[EvalOutcome]) -> Result<ReportTable, AggregateError> {
    if outcomes.is_empty() {
        return Err(AggregateError::Empty);
    }
    let mut cells: BTreeMap<CellKey, Sums> = BTreeMap::new();
    let mut errors: BTreeMap<(BoardType, ObjectType, TaskKind, ErrorCategory, String), usize> = BTreeMap::new();
    for o in outcomes {
        let key = (o.board_type, o.object_type, o.task, o.model.clone());
        let s = cells.entry(key).or_default();
        s.n += 1;
        s.em += f64::from(o.em);
        s.cb += o.codebleu.score;
        s.es += f64::from(o.es);
        if let Some(cat) = o.error {
            *errors.entry((o.board_type, o.object_type, o.task, cat, o.model.clone())).or_default() += 1;
        }
    }
    let rows = cells
        .into_iter()
        .map(|((board_type, object_type, task, model), s)| {
            let n = s.n as f64;
            ReportRow { board_type, object_type, task, model, n: s.n, em: s.em / n, cb: s.cb / n, es: s.es / n }
        })
        .collect();
    let errors = errors
        .into_iter()
        .map(|((board_type, object_type, task, category, model), count)| ErrorRow {
            board_type,
            object_type,
            task,
            category,
            model,
            count,
        })
        .collect();
    Ok(ReportTable { rows, errors })
}

fn board_label(b: BoardType) -> &'static str {
    match b {
        BoardType::Simple => "Simple",
        BoardType::Regular => "Regular",
    }
}

fn object_label(o: ObjectType) -> &'static str {
    match o {
        ObjectType::Simple => "Simple",
        ObjectType::Complex => "Complex",
    }
}

fn render_aligned(header: &[&str], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join(" | ").trim_end().to_string()
    };
    let mut out = String::new();
    let _ = writeln!(out, "{}", line(header.to_vec()));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{}", rule.join("-+-"));
    for row in body {
        let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
    }
    out
}

impl ReportTable {
    /// Score table followed by the error breakdown.
    pub fn to_text(&self) -> String {
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    board_label(r.board_type).to_string(),
                    object_label(r.object_type).to_string(),
                    r.task.display_name().to_string(),
                    r.model.clone(),
                    format!("{:.2}", r.em),
                    format!("{:.2}", r.cb),
                    format!("{:.2}", r.es),
                ]
            })
            .collect();
        let mut out = render_aligned(&["Board Type", "Object Type", "Task", "Model", "EM", "CB", "ES"], &body);
        if !self.errors.is_empty() {
            let body: Vec<Vec<String>> = self
                .errors
                .iter()
                .map(|e| {
                    vec![
                        board_label(e.board_type).to_string(),
                        object_label(e.object_type).to_string(),
                        e.task.display_name().to_string(),
                        e.category.display_name().to_string(),
                        e.model.clone(),
                        e.count.to_string(),
                    ]
                })
                .collect();
            out.push('\n');
            out.push_str(&render_aligned(
                &["Board Type", "Object Type", "Task", "Error Category", "Model", "Count"],
                &body,
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Failed records per (board type, object type, task, model).
    pub fn failures_per_cell(&self) -> BTreeMap<CellKey, usize> {
        let mut m = BTreeMap::new();
        for e in &self.errors {
            *m.entry((e.board_type, e.object_type, e.task, e.model.clone())).or_default() += e.count;
        }
        m
    }
}
