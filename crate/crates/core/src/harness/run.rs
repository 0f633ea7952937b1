//! Run orchestration: one pass over a split for a task, and the prompt
//! structure ablation built on top of it.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::client::{Client, Message, ModelConfig};
use super::prompt::{
    ablation_specs, build_prompt, parse_response, select_in_context, Example, PromptSpec, Section, SelectionError,
};
use crate::board_gen::{read_jsonl, BoardRecord, Split};
use crate::instructions::{render_template, InstructionError, InstructionSet, InstructionStyle};
use crate::metrics::{aggregate, score, transport_failure, AggregateError, EvalOutcome, ReportTable};
use crate::task::TaskKind;

/// How a multi-turn instruction reaches the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnMode {
    /// All turns in the single prompt message.
    #[default]
    Joined,
    /// One user message per turn.
    Separate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub dataset: PathBuf,
    /// Pre-rendered instructions (human or model written). Template
    /// instructions are rendered on the fly when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instructions: Option<PathBuf>,
    pub style: InstructionStyle,
    pub turn_mode: TurnMode,
    pub split: Split,
    pub task: TaskKind,
    pub k_examples: usize,
    pub rng_seed: u64,
    pub model: ModelConfig,
    pub sections: Vec<Section>,
    pub concurrency: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunManifest {
    pub fn new(dataset: impl Into<PathBuf>, task: TaskKind, model: ModelConfig) -> RunManifest {
        RunManifest {
            dataset: dataset.into(),
            instructions: None,
            style: InstructionStyle::TemplateMulti,
            turn_mode: TurnMode::Joined,
            split: Split::Test,
            task,
            k_examples: 5,
            rng_seed: 0,
            model,
            sections: Section::ORDER.to_vec(),
            concurrency: 4,
            limit: None,
            output_dir: None,
        }
    }

    fn spec(&self) -> PromptSpec {
        PromptSpec { sections: self.sections.clone(), ..PromptSpec::full(self.task, self.k_examples) }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad dataset {path}: {message}")]
    Dataset { path: PathBuf, message: String },
    #[error("no {task} records in the {split} split")]
    NoRecords { task: TaskKind, split: &'static str },
    #[error("no instruction for record {0}")]
    MissingInstruction(String),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Instruction(#[from] InstructionError),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
}

/// What was sent for one record, kept for auditing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub record_id: String,
    pub structure: String,
    pub example_ids: Vec<String>,
    pub messages: Vec<Message>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcomes: Vec<EvalOutcome>,
    pub prompts: Vec<PromptRecord>,
    pub report: ReportTable,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

pub fn load_records(path: &Path) -> Result<Vec<BoardRecord>, RunError> {
    let file = File::open(path).map_err(io_err(path))?;
    read_jsonl(BufReader::new(file)).map_err(|e| RunError::Dataset { path: path.to_path_buf(), message: e.to_string() })
}

pub fn load_instructions(path: &Path) -> Result<Vec<InstructionSet>, RunError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufRead::lines(BufReader::new(file)).enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let set = serde_json::from_str(&line)
            .map_err(|e| RunError::Dataset { path: path.to_path_buf(), message: format!("line {}: {e}", i + 1) })?;
        out.push(set);
    }
    Ok(out)
}

fn template_style(style: InstructionStyle) -> InstructionStyle {
    match style {
        InstructionStyle::TemplateSingle => InstructionStyle::TemplateSingle,
        _ => InstructionStyle::TemplateMulti,
    }
}

/// Chat messages for a prompt; with [`TurnMode::Separate`] each turn after
/// the first becomes its own user message.
pub fn build_messages(spec: &PromptSpec, examples: &[Example], set: &InstructionSet, mode: TurnMode) -> Vec<Message> {
    let mut parts: Vec<&str> = set.preamble.iter().map(String::as_str).collect();
    parts.extend(set.turns.iter().map(String::as_str));
    if mode == TurnMode::Joined || parts.len() < 2 {
        return vec![Message::user(build_prompt(spec, examples, &set.joined()))];
    }
    let label_line = format!("{}:\n", spec.output_label);
    let head = build_prompt(spec, examples, parts[0]);
    let mut messages = vec![Message::user(head.strip_suffix(&label_line).unwrap_or(&head).to_string())];
    let last = parts.len() - 1;
    for (i, part) in parts.iter().enumerate().skip(1) {
        let text = if i == last { format!("{part}\n{label_line}") } else { part.to_string() };
        messages.push(Message::user(text));
    }
    messages
}

struct Job<'a> {
    record: &'a BoardRecord,
    prompt: PromptRecord,
}

fn prepare<'a>(manifest: &RunManifest, records: &'a [BoardRecord]) -> Result<Vec<Job<'a>>, RunError> {
    let spec = manifest.spec();
    let train: Vec<&BoardRecord> = records.iter().filter(|r| r.split == Split::Train).collect();
    let mut tests: Vec<&BoardRecord> =
        records.iter().filter(|r| r.split == manifest.split && manifest.task.applies_to(r)).collect();
    tests.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(n) = manifest.limit {
        tests.truncate(n);
    }
    if tests.is_empty() {
        return Err(RunError::NoRecords { task: manifest.task, split: manifest.split.name() });
    }
    let provided: HashMap<String, InstructionSet> = match &manifest.instructions {
        Some(p) => load_instructions(p)?.into_iter().map(|s| (s.record_id.clone(), s)).collect(),
        None => HashMap::new(),
    };
    let example_style = template_style(manifest.style);
    let k = if spec.has(Section::InContext) { manifest.k_examples } else { 0 };
    let mut jobs = Vec::with_capacity(tests.len());
    for record in tests {
        let set = match provided.get(&record.id) {
            Some(s) => s.clone(),
            None if manifest.instructions.is_some() => return Err(RunError::MissingInstruction(record.id.clone())),
            None => render_template(record, template_style(manifest.style))?,
        };
        let examples = select_in_context(&train, record, k, manifest.rng_seed)?
            .into_iter()
            .map(|ex| {
                Ok(Example {
                    record_id: ex.id.clone(),
                    instruction: render_template(ex, example_style)?.joined(),
                    code: manifest.task.gold(ex).to_string(),
                })
            })
            .collect::<Result<Vec<_>, InstructionError>>()?;
        let messages = build_messages(&spec, &examples, &set, manifest.turn_mode);
        jobs.push(Job {
            record,
            prompt: PromptRecord {
                record_id: record.id.clone(),
                structure: spec.structure_label(),
                example_ids: examples.into_iter().map(|e| e.record_id).collect(),
                messages,
            },
        });
    }
    Ok(jobs)
}

fn evaluate(job: &Job<'_>, client: &Client, task: TaskKind, spec: &PromptSpec) -> EvalOutcome {
    let model = &client.config().model;
    match client.complete(&job.prompt.messages, task.gold(job.record)) {
        Ok(raw) => {
            let (code, found) = parse_response(&raw, &spec.output_label, &spec.instruction_label);
            let mut out = score(job.record, task, model, &code);
            out.label_missing = !found;
            out
        }
        Err(_) => transport_failure(job.record, task, model),
    }
}

/// Evaluates every record of the manifest's split that fits its task.
/// Output order follows record ids whatever the concurrency.
pub fn run_eval(manifest: &RunManifest) -> Result<RunResult, RunError> {
    let records = load_records(&manifest.dataset)?;
    let jobs = prepare(manifest, &records)?;
    let client = Client::new(manifest.model.clone());
    let spec = manifest.spec();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, EvalOutcome)>> = Mutex::new(Vec::with_capacity(jobs.len()));
    std::thread::scope(|scope| {
        for _ in 0..manifest.concurrency.max(1).min(jobs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(job) = jobs.get(i) else { break };
                let outcome = evaluate(job, &client, manifest.task, &spec);
                results.lock().expect("no worker panics while holding the lock").push((i, outcome));
            });
        }
    });
    let mut results = results.into_inner().expect("workers finished");
    results.sort_by_key(|(i, _)| *i);
    let outcomes: Vec<EvalOutcome> = results.into_iter().map(|(_, o)| o).collect();
    let report = aggregate(&outcomes)?;
    let prompts = jobs.into_iter().map(|j| j.prompt).collect();
    let result = RunResult { outcomes, prompts, report };
    if let Some(dir) = &manifest.output_dir {
        write_run(dir, manifest, &result)?;
    }
    Ok(result)
}

/// Runs several tasks under one manifest and reports them together. The
/// manifest's own task field is replaced for each run.
pub fn run_tasks(manifest: &RunManifest, tasks: &[TaskKind]) -> Result<RunResult, RunError> {
    let mut outcomes = Vec::new();
    let mut prompts = Vec::new();
    for &task in tasks {
        let m = RunManifest { task, output_dir: None, ..manifest.clone() };
        let r = run_eval(&m)?;
        outcomes.extend(r.outcomes);
        prompts.extend(r.prompts);
    }
    let report = aggregate(&outcomes)?;
    let result = RunResult { outcomes, prompts, report };
    if let Some(dir) = &manifest.output_dir {
        write_run(dir, manifest, &result)?;
    }
    Ok(result)
}

fn write_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<(), RunError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| io_err(path)(e.into()))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(io_err(path))
}

/// Writes manifest.json, outcomes.jsonl, prompts.jsonl, report.json and
/// report.txt into `dir`.
pub fn write_run(dir: &Path, manifest: &RunManifest, result: &RunResult) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let manifest_json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    write_text(&dir.join("manifest.json"), &manifest_json)?;
    write_lines(&dir.join("outcomes.jsonl"), &result.outcomes)?;
    write_lines(&dir.join("prompts.jsonl"), &result.prompts)?;
    write_text(&dir.join("report.json"), &result.report.to_json())?;
    write_text(&dir.join("report.txt"), &result.report.to_text())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub structure: String,
    pub n: usize,
    pub em: f64,
    pub cb: f64,
    pub es: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationTable {
    pub task: TaskKind,
    pub model: String,
    pub rows: Vec<AblationRow>,
}

impl AblationTable {
    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.structure.len()).max().unwrap_or(0).max("Prompt Structure".len());
        let mut out = format!("{:<width$} | EM   | CB   | ES\n", "Prompt Structure");
        out.push_str(&format!("{}-+------+------+-----\n", "-".repeat(width)));
        for r in &self.rows {
            out.push_str(&format!("{:<width$} | {:.2} | {:.2} | {:.2}\n", r.structure, r.em, r.cb, r.es));
        }
        out
    }
}

/// Runs the manifest once per ablation structure. The manifest's own
/// section list is ignored.
pub fn ablate(manifest: &RunManifest) -> Result<AblationTable, RunError> {
    let mut rows = Vec::new();
    for spec in ablation_specs(manifest.task, manifest.k_examples) {
        let m = RunManifest { sections: spec.sections.clone(), output_dir: None, ..manifest.clone() };
        let result = run_eval(&m)?;
        let n = result.outcomes.len() as f64;
        let mean = |f: &dyn Fn(&EvalOutcome) -> f64| result.outcomes.iter().map(f).sum::<f64>() / n;
        rows.push(AblationRow {
            structure: spec.structure_label(),
            n: result.outcomes.len(),
            em: mean(&|o| f64::from(o.em)),
            cb: mean(&|o| o.codebleu.score),
            es: mean(&|o| f64::from(o.es)),
        });
    }
    let table = AblationTable { task: manifest.task, model: manifest.model.model.clone(), rows };
    if let Some(dir) = &manifest.output_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        write_text(&dir.join("ablation.json"), &serde_json::to_string_pretty(&table).expect("table serializes"))?;
        write_text(&dir.join("ablation.txt"), &table.to_text())?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::client::MockMode;

    fn set(preamble: Option<&str>, turns: &[&str]) -> InstructionSet {
        InstructionSet {
            record_id: "r".into(),
            style: InstructionStyle::TemplateMulti,
            preamble: preamble.map(str::to_string),
            turns: turns.iter().map(|t| t.to_string()).collect(),
        }
    }

    #[test]
    fn joined_and_separate_messages() {
        let spec = PromptSpec::full(TaskKind::PropertyComp, 0);
        let s = set(Some("These are the steps."), &["place a", "place b"]);
        let joined = build_messages(&spec, &[], &s, TurnMode::Joined);
        assert_eq!(joined.len(), 1);
        assert!(joined[0].content.ends_with("Instruction:\nThese are the steps.\nplace a\nplace b\nOutput:\n"));
        let sep = build_messages(&spec, &[], &s, TurnMode::Separate);
        assert_eq!(sep.len(), 3);
        assert!(sep[0].content.ends_with("Instruction:\nThese are the steps.\n"));
        assert_eq!(sep[2].content, "place b\nOutput:\n");
    }

    #[test]
    fn manifest_round_trips_without_key() {
        let mut m = RunManifest::new(
            "d.jsonl",
            TaskKind::FuncRepeat,
            ModelConfig {
                mock: MockMode::FixedText("hello".into()),
                api_key: Some("secret".into()),
                ..ModelConfig::default()
            },
        );
        m.limit = Some(3);
        let text = serde_json::to_string(&m).unwrap();
        assert!(!text.contains("secret"));
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back.model.mock, MockMode::FixedText("hello".into()));
        assert_eq!(back.limit, Some(3));
    }
}
