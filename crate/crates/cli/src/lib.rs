//! Batch front-end for the nbhd jet calculus: job files, reports and dispatch.

pub mod job;
pub mod report;
pub mod run;

pub use run::{run_args, Cli, Outcome};
