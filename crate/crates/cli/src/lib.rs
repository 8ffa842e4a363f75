//! Library half of the `ostrowski` binary: argument types, command
//! dispatch and report rendering.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod json;
pub mod report;

pub use args::Cli;
pub use commands::{exit_code_for, run, Outcome, EXIT_INVALID, EXIT_OK, EXIT_UNSUPPORTED};
pub use report::Report;
