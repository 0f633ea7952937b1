//! Benchmark engine for natural-language-to-code synthesis on a 2.5D
//! assembly grid.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid`]: the board simulator and its placement rules.
//! - [`dsl`]: lexer, parser and sandboxed interpreter for put-programs.
//! - [`board_gen`]: seed catalog, board extrapolation and dataset splits.
//! - [`instructions`]: template instructions and description prompts.
//! - [`metrics`]: exact match, CodeBLEU, execution success, error classes.
//! - [`harness`]: prompt assembly, model client and run orchestration.

pub mod board_gen;
pub mod dsl;
pub mod grid;
pub mod harness;
pub mod instructions;
pub mod metrics;
pub mod task;
pub mod taxonomy;

pub use grid::{boards_equal, describe_grid, render_ascii, Board, Color, Component, PlacementError, Shape};
pub use task::TaskKind;
pub use taxonomy::ErrorCategory;
