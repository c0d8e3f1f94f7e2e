//! Monte Carlo harness: trend shapes, data-generating processes, rejection
//! rate experiments, grid files and result tables.

pub mod config;
pub mod dgp;
pub mod experiment;
pub mod figures;
pub mod table;
pub mod trend;

pub use config::{parse_config, Experiment};
pub use dgp::{local_rho, simulate_dgp, DgpSpec, ErrorModel, VarianceFn};
pub use experiment::{collect_statistics, run_experiment, ExperimentResult, RunOptions, TestId};
pub use trend::{trend_value, TrendKind, TrendSpec};
