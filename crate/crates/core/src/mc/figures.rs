//! Plot-ready numbers: trend shapes and size-adjusted power against the
//! spread of the initial condition.

use std::fmt::Write as _;

use crate::error::Result;
use crate::limits::{lower_quantile, CritTable};
use crate::rng::RngStream;

use super::dgp::DgpSpec;
use super::experiment::{collect_statistics, TestId};
use super::trend::{trend_value, TrendKind, TrendSpec};

/// CSV with a column `r` on `points` equidistant values in `[0, 1]` and one
/// column per trend shape at size `lambda`.
pub fn trend_curves(lambda: f64, points: usize) -> String {
    let kinds: Vec<TrendKind> = TrendKind::ALL
        .into_iter()
        .filter(|k| *k != TrendKind::Zero)
        .collect();
    let mut out = String::from("r");
    for k in &kinds {
        let _ = write!(out, ",{k}");
    }
    out.push('\n');
    let last = points.max(2) - 1;
    for i in 0..=last {
        let r = i as f64 / last as f64;
        let _ = write!(out, "{r:.6}");
        for k in &kinds {
            let _ = write!(out, ",{:.6}", trend_value(&TrendSpec::new(*k, lambda), r) + 0.0);
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPoint {
    pub test: String,
    pub init_sd: f64,
    /// Rejection rate against the empirical null quantile.
    pub power: f64,
    pub null_quantile: f64,
}

/// Size-adjusted power of each test at `alt.rho` for every initial-condition
/// spread in `init_sds`.
///
/// The null quantile comes from the same DGP with `ρ = 1` and `σ_0 = 0`, drawn
/// from a seed derived from `seed`; the alternatives reuse `seed` itself.
pub fn size_adjusted_power(
    alt: &DgpSpec,
    tests: &[TestId],
    init_sds: &[f64],
    alpha: f64,
    reps: usize,
    seed: u64,
    table: &CritTable,
) -> Result<Vec<PowerPoint>> {
    let null = alt.with_rho(1.0).with_init_sd(0.0);
    let null_seed = RngStream::new(seed, 0).derive(0x6e75_6c6c).seed;
    let mut out = Vec::new();
    for test in tests {
        let mut stats = collect_statistics(&null, test, reps, null_seed, table)?;
        stats.sort_by(f64::total_cmp);
        let q = lower_quantile(&stats, alpha);
        for &sd in init_sds {
            let s = collect_statistics(&alt.with_init_sd(sd), test, reps, seed, table)?;
            let power = s.iter().filter(|v| **v < q).count() as f64 / s.len() as f64;
            out.push(PowerPoint {
                test: test.to_string(),
                init_sd: sd,
                power,
                null_quantile: q,
            });
        }
    }
    Ok(out)
}

pub fn power_points_csv(points: &[PowerPoint], provenance: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(p) = provenance {
        let _ = writeln!(out, "# {p}");
    }
    out.push_str("test,init_sd,power,null_quantile\n");
    for p in points {
        let _ = writeln!(out, "{},{},{:.6},{:.6}", p.test, p.init_sd, p.power, p.null_quantile);
    }
    out
}
