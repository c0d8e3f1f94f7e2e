//! Rejection-rate experiments over replicated draws of a data-generating process.
//!
//! Replication `r` draws its series from stream `r` of the experiment seed and
//! runs every requested test on that same series. Outcomes are integer counts,
//! so the totals do not depend on how replications are spread over threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{self, BaseLag, BaselineKind, BaselineSpec};
use crate::error::{Result, UrError};
use crate::limits::CritTable;
use crate::rng::{splitmix64, RngStream};
use crate::series::{BlockScheme, Series};
use crate::testkit::{run_test, LagRule, TestSpec, Variant};

use super::dgp::{simulate_values, DgpSpec};

/// Share of failed replications above which an experiment is aborted.
pub const MAX_FAILURE_SHARE: f64 = 0.01;

/// A test in an experiment: one of the pooled tests or a baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TestId {
    Pooled(TestSpec),
    Baseline(BaselineSpec),
}

impl TestId {
    pub fn tau_sb(gamma: f64, lag: LagRule) -> Self {
        TestId::Pooled(TestSpec::small_b(gamma).with_lag(lag))
    }

    pub fn tau_fb(b: f64, lag: LagRule) -> Self {
        TestId::Pooled(TestSpec::fixed_b(b).with_lag(lag))
    }

    pub fn baseline(kind: BaselineKind, lag: BaseLag) -> Self {
        TestId::Baseline(BaselineSpec::new(kind, lag))
    }

    /// Statistic and rejection decision at level `alpha`.
    pub fn evaluate(&self, series: &Series, alpha: f64, table: &CritTable) -> Result<(f64, bool)> {
        match self {
            TestId::Pooled(spec) => {
                let out = run_test(series, &spec.with_alpha(alpha), table)?;
                Ok((out.statistic, out.reject))
            }
            TestId::Baseline(spec) => {
                let out = baselines::baseline_test(series, spec, alpha)?;
                Ok((out.statistic, out.reject))
            }
        }
    }

    /// Just the statistic.
    pub fn statistic(&self, series: &Series, table: &CritTable) -> Result<f64> {
        match self {
            TestId::Pooled(spec) => Ok(run_test(series, spec, table)?.statistic),
            TestId::Baseline(spec) => Ok(baselines::baseline_statistic(series, spec)?.0),
        }
    }

    /// Precomputes baseline critical values, which must not be simulated from
    /// inside a parallel loop.
    pub fn warm_up(&self, len: usize, alpha: f64) -> Result<()> {
        if let TestId::Baseline(spec) = self {
            baselines::critical_value(spec.kind, len, spec.lag, alpha)?;
        }
        Ok(())
    }
}

fn fmt_lag(rule: LagRule) -> String {
    match rule {
        LagRule::Fixed(p) => p.to_string(),
        LagRule::Bic(p) => format!("bic{p}"),
        LagRule::Schwert => "schwert".into(),
    }
}

/// Ids look like `tau-sb[0.7]`, `tau-fb[0.4]@bic5`, `tau-sb[0.7]@1`, `adf`,
/// `df-gls@bic5`, `el`. A scheme that does not match the variant is written
/// out: `tau-sb[b=0.2]`, `tau-fb[g=0.7]`, or an explicit `[B=20]`.
impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestId::Pooled(spec) => {
                let name = match spec.variant {
                    Variant::SmallB => "tau-sb",
                    Variant::FixedB => "tau-fb",
                };
                let scheme = match (spec.variant, spec.scheme) {
                    (Variant::SmallB, BlockScheme::PowerRule(g)) => g.to_string(),
                    (Variant::FixedB, BlockScheme::FixedFraction(b)) => b.to_string(),
                    (_, BlockScheme::PowerRule(g)) => format!("g={g}"),
                    (_, BlockScheme::FixedFraction(b)) => format!("b={b}"),
                    (_, BlockScheme::Explicit(b)) => format!("B={b}"),
                };
                write!(f, "{name}[{scheme}]")?;
                if spec.lag != LagRule::Fixed(0) {
                    write!(f, "@{}", fmt_lag(spec.lag))?;
                }
                Ok(())
            }
            TestId::Baseline(spec) => {
                f.write_str(spec.kind.id())?;
                if spec.lag != BaseLag::Fixed(0) {
                    match spec.lag {
                        BaseLag::Fixed(p) => write!(f, "@{p}")?,
                        BaseLag::Bic(p) => write!(f, "@bic{p}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// Parses a lag suffix: `N`, `bicN`, `bic` (= `bic5`) or `schwert`.
pub fn parse_lag(s: &str) -> Option<LagRule> {
    match s {
        "schwert" => Some(LagRule::Schwert),
        "bic" => Some(LagRule::Bic(5)),
        _ => match s.strip_prefix("bic") {
            Some(p) => p.parse().ok().map(LagRule::Bic),
            None => s.parse().ok().map(LagRule::Fixed),
        },
    }
}

impl FromStr for TestId {
    type Err = UrError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || UrError::InvalidArgument(format!("unknown test id `{s}`"));
        let s = s.trim();
        let (head, lag) = match s.split_once('@') {
            Some((h, l)) => (h, Some(parse_lag(l).ok_or_else(bad)?)),
            None => (s, None),
        };
        if let Some(kind) = BaselineKind::from_id(head) {
            let lag = match lag {
                None | Some(LagRule::Fixed(0)) => BaseLag::Fixed(0),
                Some(LagRule::Fixed(p)) => BaseLag::Fixed(p),
                Some(LagRule::Bic(p)) => BaseLag::Bic(p),
                Some(LagRule::Schwert) => return Err(bad()),
            };
            return Ok(TestId::baseline(kind, lag));
        }
        let (name, arg) = head
            .strip_suffix(']')
            .and_then(|h| h.split_once('['))
            .ok_or_else(bad)?;
        let variant = match name {
            "tau-sb" => Variant::SmallB,
            "tau-fb" => Variant::FixedB,
            _ => return Err(bad()),
        };
        let scheme = match arg.split_once('=') {
            Some(("g", v)) => BlockScheme::PowerRule(v.parse().map_err(|_| bad())?),
            Some(("b", v)) => BlockScheme::FixedFraction(v.parse().map_err(|_| bad())?),
            Some(("B", v)) => BlockScheme::Explicit(v.parse().map_err(|_| bad())?),
            Some(_) => return Err(bad()),
            None => {
                let v: f64 = arg.parse().map_err(|_| bad())?;
                match variant {
                    Variant::SmallB => BlockScheme::PowerRule(v),
                    Variant::FixedB => BlockScheme::FixedFraction(v),
                }
            }
        };
        Ok(TestId::Pooled(TestSpec {
            variant,
            scheme,
            lag: lag.unwrap_or(LagRule::Fixed(0)),
            alpha: 0.05,
        }))
    }
}

/// One cell: a test's rejection rate under one DGP.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub dgp: DgpSpec,
    pub test: String,
    pub alpha: f64,
    pub reps: usize,
    pub failures: usize,
    pub rejections: usize,
    /// Rejections over successful replications.
    pub rate: f64,
    /// `√(rate (1 - rate) / reps)`.
    pub se: f64,
    pub seed: u64,
    /// Order-independent digest of every simulated series; equal across the
    /// tests of one experiment.
    pub checksum: u64,
}

/// Settings shared by every cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn new(reps: usize, seed: u64) -> Self {
        RunOptions {
            reps,
            alpha: 0.05,
            seed,
            threads: None,
        }
    }
}

/// Bitwise digest of a series.
pub fn series_checksum(values: &[f64]) -> u64 {
    values
        .iter()
        .fold(0x243f_6a88_85a3_08d3u64, |h, v| splitmix64(h ^ v.to_bits()))
}

#[derive(Debug, Clone, Default)]
struct Tally {
    rejections: Vec<usize>,
    failures: Vec<usize>,
    /// Earliest failing replication per test and its error.
    first_error: Vec<Option<(u64, String)>>,
    checksum: u64,
}

impl Tally {
    fn new(k: usize) -> Self {
        Tally {
            rejections: vec![0; k],
            failures: vec![0; k],
            first_error: vec![None; k],
            checksum: 0,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for i in 0..self.rejections.len() {
            self.rejections[i] += other.rejections[i];
            self.failures[i] += other.failures[i];
            self.first_error[i] = match (self.first_error[i].take(), other.first_error[i].clone()) {
                (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
                (a, b) => a.or(b),
            };
        }
        self.checksum = self.checksum.wrapping_add(other.checksum);
        self
    }
}

pub fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| UrError::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every test on `reps` common draws from `dgp`.
///
/// A test that fails on more than 1% of replications aborts the experiment.
pub fn run_experiment(
    dgp: &DgpSpec,
    tests: &[TestId],
    opts: &RunOptions,
    table: &CritTable,
) -> Result<Vec<ExperimentResult>> {
    dgp.validate()?;
    if opts.reps < 100 {
        return Err(UrError::InvalidArgument(format!("reps must be >= 100, got {}", opts.reps)));
    }
    for t in tests {
        t.warm_up(dgp.len, opts.alpha)?;
    }
    let k = tests.len();
    let tally = in_pool(opts.threads, || {
        (0..opts.reps as u64)
            .into_par_iter()
            .fold(
                || Tally::new(k),
                |mut acc, r| {
                    let values = simulate_values(dgp, RngStream::new(opts.seed, r));
                    acc.checksum = acc.checksum.wrapping_add(series_checksum(&values));
                    let series = Series::new(values).expect("simulated values are finite");
                    for (i, t) in tests.iter().enumerate() {
                        match t.evaluate(&series, opts.alpha, table) {
                            Ok((_, rej)) => acc.rejections[i] += usize::from(rej),
                            Err(e) => {
                                acc.failures[i] += 1;
                                if acc.first_error[i].as_ref().is_none_or(|(q, _)| r < *q) {
                                    acc.first_error[i] = Some((r, e.to_string()));
                                }
                            }
                        }
                    }
                    acc
                },
            )
            .reduce(|| Tally::new(k), Tally::merge)
    })?;

    let mut out = Vec::with_capacity(k);
    for (i, t) in tests.iter().enumerate() {
        let failures = tally.failures[i];
        if failures as f64 > MAX_FAILURE_SHARE * opts.reps as f64 {
            return Err(UrError::ExperimentAborted {
                test: t.to_string(),
                failures,
                reps: opts.reps,
                first: tally.first_error[i].clone().map(|e| e.1).unwrap_or_default(),
            });
        }
        if failures > 0 {
            log::warn!("{t}: {failures} of {} replications failed", opts.reps);
        }
        let ok = opts.reps - failures;
        let rate = tally.rejections[i] as f64 / ok as f64;
        out.push(ExperimentResult {
            dgp: *dgp,
            test: t.to_string(),
            alpha: opts.alpha,
            reps: opts.reps,
            failures,
            rejections: tally.rejections[i],
            rate,
            se: (rate * (1.0 - rate) / opts.reps as f64).sqrt(),
            seed: opts.seed,
            checksum: tally.checksum,
        });
    }
    Ok(out)
}

/// Raw statistics of one test over `reps` draws, in replication order.
/// Failed replications are dropped.
pub fn collect_statistics(
    dgp: &DgpSpec,
    test: &TestId,
    reps: usize,
    seed: u64,
    table: &CritTable,
) -> Result<Vec<f64>> {
    dgp.validate()?;
    let stats: Vec<Option<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let values = simulate_values(dgp, RngStream::new(seed, r));
            let series = Series::new(values).ok()?;
            test.statistic(&series, table).ok()
        })
        .collect();
    let failures = stats.iter().filter(|s| s.is_none()).count();
    if failures as f64 > MAX_FAILURE_SHARE * reps as f64 {
        return Err(UrError::ExperimentAborted {
            test: test.to_string(),
            failures,
            reps,
            first: "statistic could not be computed".into(),
        });
    }
    Ok(stats.into_iter().flatten().collect())
}
