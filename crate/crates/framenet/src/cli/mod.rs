//! Config-driven experiment runner behind the `framenet` binary.
//!
//! Each command reads its blocks from one JSON [`ExperimentConfig`], writes
//! CSV/JSON artifacts into an output directory and returns a short textual
//! report.

mod config;
mod commands;
mod verify;

pub use commands::{run, Command};
pub use config::{
    load_config, parse_config, DataConfig, DeltaConfig, ExperimentConfig, RateCase, RatesConfig, SolveConfig,
    SolveInput, TrainBlock,
};
pub use verify::{certificate_suite, CertificateCheck};
