//! Pooled-block unit root tests: the small-b statistic `τ-SB`, the
//! heteroskedasticity-robust fixed-b statistic `τ-FB`, and their pre-whitened
//! versions.
//!
//! ```text
//! τ-SB = Y1 / (κ̂ v_T √Y2)          reject if τ-SB < Φ⁻¹(α)
//! τ-FB = Ỹ1 / (σ̂ √Ỹ2)              reject if τ-FB < fixed-b quantile at b = B/T
//! ```
//!
//! `Ỹ1, Ỹ2` are computed on the series re-indexed by the inverse variance
//! profile. When the re-indexed series is extended to `T̃ = kT` points the
//! blocklength becomes `kB` and `σ̂` is scaled by `√(T/T̃)`, the per-step
//! innovation scale of the extended series.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, UrError};
use crate::limits::CritTable;
use crate::nuisance::{kappa2_hat, sigma2_hat, time_transform, variance_profile};
use crate::pooled::{block_stats, pooled_fit};
use crate::prewhiten::{fit_prewhiten, schwert_pmax, select_lag_bic};
use crate::series::{BlockScheme, Series};

/// Effective lengths below this draw a warning.
pub const SHORT_SERIES_WARN: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    SmallB,
    FixedB,
}

/// Lag order for pre-whitening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LagRule {
    Fixed(usize),
    /// BIC over `0..=p_max`.
    Bic(usize),
    /// BIC with `p_max` from Schwert's rule.
    Schwert,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestSpec {
    pub variant: Variant,
    pub scheme: BlockScheme,
    pub lag: LagRule,
    pub alpha: f64,
}

impl TestSpec {
    pub fn small_b(gamma: f64) -> Self {
        TestSpec {
            variant: Variant::SmallB,
            scheme: BlockScheme::PowerRule(gamma),
            lag: LagRule::Fixed(0),
            alpha: 0.05,
        }
    }

    pub fn fixed_b(b: f64) -> Self {
        TestSpec {
            variant: Variant::FixedB,
            scheme: BlockScheme::FixedFraction(b),
            lag: LagRule::Fixed(0),
            alpha: 0.05,
        }
    }

    pub fn with_lag(self, lag: LagRule) -> Self {
        TestSpec { lag, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        TestSpec { alpha, ..self }
    }
}

/// Intermediate quantities reported with every outcome.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Length the statistic was computed on (after pre-whitening).
    pub len: usize,
    pub blocklength: usize,
    pub lag: usize,
    /// Auxiliary length of the re-indexed series (fixed-b only).
    pub aux_len: Option<usize>,
    pub sigma2_hat: Option<f64>,
    pub kappa2_hat: Option<f64>,
    pub v_t: Option<f64>,
    pub rho_hat: Option<f64>,
    /// `B/T` used for the fixed-b critical value.
    pub relative_b: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: Option<f64>,
    pub reject: bool,
    pub diagnostics: Diagnostics,
}

/// `v_T = √( ((T-B)(2B-1) - 2(B-2)) / (3B(T-B)) )`.
pub fn v_factor(blocklength: usize, len: usize) -> f64 {
    let (b, t) = (blocklength as f64, len as f64);
    (((t - b) * (2.0 * b - 1.0) - 2.0 * (b - 2.0)) / (3.0 * b * (t - b))).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(UrError::InvalidArgument(format!("alpha must be in (0, 1), got {alpha}")))
    }
}

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(UrError::NonFinite(what))
    }
}

/// The small-b statistic and its diagnostics.
pub fn tau_sb_statistic(series: &Series, blocklength: usize) -> Result<(f64, Diagnostics)> {
    let fit = pooled_fit(series, blocklength)?;
    let k2 = kappa2_hat(&fit.residuals, blocklength)?;
    let v = v_factor(blocklength, series.len());
    let stat = finite(fit.stats.y1 / (k2.sqrt() * v * fit.stats.y2.sqrt()), "tau-SB")?;
    let diag = Diagnostics {
        len: series.len(),
        blocklength,
        kappa2_hat: Some(k2),
        v_t: Some(v),
        rho_hat: Some(fit.rho_hat),
        ..Default::default()
    };
    Ok((stat, diag))
}

/// The fixed-b statistic and its diagnostics. `σ̂` comes from the residuals of
/// the original series; the block statistics from the re-indexed one.
pub fn tau_fb_statistic(series: &Series, blocklength: usize) -> Result<(f64, Diagnostics)> {
    let n = series.len();
    let fit = pooled_fit(series, blocklength)?;
    let s2 = sigma2_hat(&fit.residuals)?;
    let profile = variance_profile(&fit.residuals)?;
    let transformed = time_transform(series, &profile)?;
    let k = transformed.factor;
    let aux_len = transformed.series.len();
    let stats = block_stats(&transformed.series, k * blocklength)?;
    if stats.y2 <= 0.0 {
        return Err(UrError::DegenerateSeries);
    }
    let sigma = (s2 / k as f64).sqrt();
    let stat = finite(stats.y1 / (sigma * stats.y2.sqrt()), "tau-FB")?;
    let diag = Diagnostics {
        len: n,
        blocklength,
        aux_len: Some(aux_len),
        sigma2_hat: Some(s2),
        rho_hat: Some(fit.rho_hat),
        relative_b: Some(blocklength as f64 / n as f64),
        ..Default::default()
    };
    Ok((stat, diag))
}

/// `τ-SB` with the standard normal critical value and p-value.
pub fn tau_sb(series: &Series, blocklength: usize, alpha: f64) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    let (statistic, diagnostics) = tau_sb_statistic(series, blocklength)?;
    let normal = Normal::standard();
    let critical_value = normal.inverse_cdf(alpha);
    Ok(TestOutcome {
        statistic,
        critical_value,
        p_value: Some(normal.cdf(statistic)),
        reject: statistic < critical_value,
        diagnostics,
    })
}

/// `τ-FB` with the critical value interpolated from `table` at `b = B/T`.
pub fn tau_fb(
    series: &Series,
    blocklength: usize,
    alpha: f64,
    table: &CritTable,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    let critical_value = table.lookup(blocklength as f64 / series.len() as f64, alpha)?;
    let (statistic, diagnostics) = tau_fb_statistic(series, blocklength)?;
    Ok(TestOutcome {
        statistic,
        critical_value,
        p_value: None,
        reject: statistic < critical_value,
        diagnostics,
    })
}

/// Resolves the lag order for `series` under `rule`.
pub fn resolve_lag(series: &Series, rule: LagRule) -> Result<usize> {
    match rule {
        LagRule::Fixed(p) => Ok(p),
        LagRule::Bic(p_max) => select_lag_bic(series, p_max),
        LagRule::Schwert => select_lag_bic(series, schwert_pmax(series.len())),
    }
}

/// Pre-whitens with the lag from `spec.lag`, re-resolves the blocklength on
/// the effective length and dispatches to the small-b or fixed-b test.
pub fn run_test(series: &Series, spec: &TestSpec, table: &CritTable) -> Result<TestOutcome> {
    check_alpha(spec.alpha)?;
    if series.is_constant() {
        return Err(UrError::DegenerateSeries);
    }
    let lag = resolve_lag(series, spec.lag)?;
    let whitened = fit_prewhiten(series, lag)?.whitened;
    let blocklength = spec.scheme.resolve(whitened.len())?;
    let mut outcome = match spec.variant {
        Variant::SmallB => tau_sb(&whitened, blocklength, spec.alpha)?,
        Variant::FixedB => tau_fb(&whitened, blocklength, spec.alpha, table)?,
    };
    let d = &mut outcome.diagnostics;
    d.lag = lag;
    match (spec.variant, spec.scheme) {
        (Variant::SmallB, BlockScheme::FixedFraction(_)) => d
            .warnings
            .push("small-b test used with a fixed-fraction blocklength".into()),
        (Variant::FixedB, BlockScheme::PowerRule(_)) => d
            .warnings
            .push("fixed-b test used with a power-rule blocklength".into()),
        _ => {}
    }
    if whitened.len() < SHORT_SERIES_WARN {
        d.warnings.push(format!(
            "effective length {} is below {SHORT_SERIES_WARN}",
            whitened.len()
        ));
    }
    Ok(outcome)
}
