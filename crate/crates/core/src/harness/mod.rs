//! Scenarios, experiment drivers and run reports.

pub mod report;
pub mod run;
pub mod scenario;

pub use crate::signal::{compare_traces, make_wavelet};
pub use report::{ComparisonReport, ConvergencePoint, RunMetadata, Timings};
pub use run::{convergence_study, prepare, run_scenario, Prepared, RunOptions, RunOutput};
pub use scenario::{Band, Discretization, ReferenceKind, Removal, Scenario, Shape, Solvers, SourceSpec, Units};
