//! Pooled overlapping-block unit root tests for series with unknown, slowly
//! varying deterministic trends.
//!
//! The pooled estimator regresses each increment on the level within
//! overlapping blocks of length `B`, demeaning each block by its first
//! observation. Any trend that is locally constant drops out of the block
//! deviations, so no trend model has to be specified.
//!
//! - [`testkit::tau_sb`]: small-b statistic with a standard normal limit.
//! - [`testkit::tau_fb`]: fixed-b statistic, robust to time-varying variance
//!   through a variance-profile time transformation.
//! - [`testkit::run_test`]: either of the above after pre-whitening.
//! - [`baselines`]: ADF, DF-GLS and Fourier comparison tests.
//! - [`mc`]: the Monte Carlo harness for size and power experiments.
//!
//! ```
//! use urblock::{run_test, CritTable, Series, TestSpec};
//!
//! let y: Vec<f64> = (0..200).map(|t| (t as f64 * 0.37).sin() + t as f64 * 0.01).collect();
//! let series = Series::new(y).unwrap();
//! let out = run_test(&series, &TestSpec::small_b(0.7), &CritTable::embedded()).unwrap();
//! assert_eq!(out.reject, out.statistic < out.critical_value);
//! ```

pub mod baselines;
pub mod cli;
pub mod error;
pub mod limits;
pub mod mc;
pub mod nuisance;
pub mod ols;
pub mod pooled;
pub mod prewhiten;
pub mod rng;
pub mod series;
pub mod testkit;

pub use error::{Result, UrError};
pub use limits::CritTable;
pub use series::{resolve_blocklength, BlockScheme, Series};
pub use testkit::{run_test, tau_fb, tau_sb, LagRule, TestOutcome, TestSpec, Variant};
