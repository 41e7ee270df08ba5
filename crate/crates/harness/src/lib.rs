//! Synthetic-data harness around the `robust-mean` estimator: inlier
//! generators, contamination, baseline estimators, seeded trial runs and
//! reports, plus the command-line front end.

pub mod baselines;
pub mod cli;
pub mod config;
pub mod contaminate;
mod error;
pub mod generate;
pub mod io;
pub mod report;
pub mod trials;

pub use baselines::{
    baselines, coordinate_median, empirical_mean, geometric_median, GeometricMedian,
};
pub use config::{BenchmarkConfig, EstimatorKind, TrialConfig};
pub use contaminate::{contaminate, ContaminationSpec, Corruption};
pub use error::{HarnessError, Result};
pub use generate::{generate, GeneratorSpec, Law};
pub use trials::{run_trials, TrialResult};
