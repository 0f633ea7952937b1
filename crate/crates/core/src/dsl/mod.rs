//! The restricted put-program language.
//!
//! Gold programs and model output are both written in a small subset of
//! Python: function definitions, `for` loops over lists, `range` and `zip`,
//! `if a == b`, integer addition, literals and calls. [`parse`] accepts
//! exactly that subset and [`execute`] runs it against a [`Board`] in a
//! closed sandbox with a step budget.
//!
//! [`Board`]: crate::grid::Board

pub mod ast;
pub mod dataflow;
pub mod interp;
mod lexer;
mod parser;

use thiserror::Error;

pub use ast::{Pos, Program};
pub use dataflow::{extract_dataflow, DataflowEdge, DefSite};
pub use interp::{execute, run_source, ExecEnv, ExecFailure, ExecOutcome, TracedPut, Value};
pub use parser::parse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {}, column {}: {message}", pos.line, pos.col)]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}
