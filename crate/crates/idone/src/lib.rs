//! Experiment harness around `idone-core`: TSPLIB and CSV formats, experiment
//! specs, parallel replications, summaries and model dumps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clock;
pub mod dump;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod spec;
pub mod trace;
pub mod tsplib;

pub use clock::WallClock;
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, summarize, ExperimentReport, SummaryReport, SummaryRow};
pub use spec::{ExperimentSpec, ProblemKind};
