//! Command-line orchestration for `wsqaoa`: instance generation, single
//! solves, fidelity sweeps, theory curves and the QAOA+WS pipeline, with
//! results written as CSV tables next to a `config.json` that reproduces them.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use commands::run;
pub use config::{
    GenConfig, GraphSource, MethodChoice, QaoaWsConfig, RunConfig, SolveConfig, SweepRunConfig,
    TheoryConfig,
};
pub use error::{CliError, Result};
