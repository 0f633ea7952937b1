//! Prompting models and scoring what they return.

pub mod client;
pub mod prompt;
pub mod run;

pub use client::{Client, ClientError, Message, MockMode, ModelConfig};
pub use prompt::{ablation_specs, build_prompt, parse_response, select_in_context, Example, PromptSpec, Section};
pub use run::{
    ablate, run_eval, run_tasks, AblationRow, AblationTable, PromptRecord, RunError, RunManifest, RunResult, TurnMode,
};
