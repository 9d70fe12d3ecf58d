//! Config-driven experiment harness for sigma-delta compressed sensing:
//! seeded parallel trial sweeps written to CSV, per-cell summaries, log-log
//! slope fits and gnuplot scripts.

pub mod config;
pub mod error;
pub mod experiments;
pub mod record;
pub mod report;
pub mod runner;
pub mod tables;

pub use config::{ExperimentConfig, ExperimentKind, ShaperFamily};
pub use error::{HarnessError, Result};
pub use record::TrialRecord;
pub use runner::{run_sweep, RunOutcome};
