//! Pre-whitening against short-run serial correlation.
//!
//! The augmented regression is `Δy_t` on `y_{t-1}, Δy_{t-1}, ..., Δy_{t-p}`
//! without an intercept. The lag coefficients `θ̂` filter the levels,
//! `ŷ*_t = y_t - Σ θ̂_i y_{t-i}`, and the filtered series is re-indexed to
//! start at one with effective length `T - p`.

use crate::error::{Result, UrError};
use crate::ols::{design_from_columns, ols, OlsFit};
use crate::series::Series;

/// Minimum number of whitened observations.
pub const MIN_EFFECTIVE_LEN: usize = 10;
/// Residual degrees of freedom required of the augmented regression.
const MIN_DOF: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct PrewhitenFit {
    pub lag: usize,
    pub theta_hat: Vec<f64>,
    /// Coefficient on `y_{t-1}`; `None` for `p = 0` where no regression is run.
    pub varphi_hat: Option<f64>,
    pub whitened: Series,
    /// Residuals of the augmented regression (empty for `p = 0`).
    pub residuals: Vec<f64>,
}

/// Runs the augmented regression with lag order `p` on the sample
/// `t = start..T` (1-based), where `start >= p + 2`.
fn augmented_regression(y: &[f64], p: usize, start: usize) -> Result<OlsFit> {
    let n = y.len();
    debug_assert!(start >= p + 2);
    let dy = |t: usize| y[t - 1] - y[t - 2]; // Δy_t, 1-based t >= 2
    let rows: Vec<usize> = (start..=n).collect();
    let response: Vec<f64> = rows.iter().map(|&t| dy(t)).collect();
    let level: Vec<f64> = rows.iter().map(|&t| y[t - 2]).collect();
    let lags: Vec<Vec<f64>> = (1..=p)
        .map(|i| rows.iter().map(|&t| dy(t - i)).collect())
        .collect();
    let mut cols: Vec<&[f64]> = vec![&level];
    cols.extend(lags.iter().map(|c| c.as_slice()));
    ols(&design_from_columns(&cols), &response)
}

/// Fits the augmented regression of order `p` over `t = p+2..T` and returns
/// the pre-whitened series.
pub fn fit_prewhiten(series: &Series, p: usize) -> Result<PrewhitenFit> {
    let n = series.len();
    if p + MIN_EFFECTIVE_LEN > n || n < 2 * p + 2 + MIN_DOF {
        return Err(UrError::LagTooLarge { lag: p, len: n });
    }
    if p == 0 {
        return Ok(PrewhitenFit {
            lag: 0,
            theta_hat: Vec::new(),
            varphi_hat: None,
            whitened: series.clone(),
            residuals: Vec::new(),
        });
    }
    let y = series.values();
    let fit = augmented_regression(y, p, p + 2)?;
    let theta_hat = fit.coefficients[1..].to_vec();
    let whitened: Vec<f64> = (p..n)
        .map(|t| y[t] - (1..=p).map(|i| theta_hat[i - 1] * y[t - i]).sum::<f64>())
        .collect();
    Ok(PrewhitenFit {
        lag: p,
        theta_hat,
        varphi_hat: Some(fit.coefficients[0]),
        whitened: Series::new(whitened)?,
        residuals: fit.residuals,
    })
}

/// BIC for each candidate lag `0..=p_max`, all on the common sample
/// `t = p_max+2..T`.
pub fn bic_values(series: &Series, p_max: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n < p_max + 20 {
        return Err(UrError::LagTooLarge { lag: p_max, len: n });
    }
    let y = series.values();
    let start = p_max + 2;
    let nobs = (n + 1 - start) as f64;
    (0..=p_max)
        .map(|p| {
            let fit = augmented_regression(y, p, start)?;
            Ok(nobs * (fit.ssr / nobs).ln() + (p + 1) as f64 * nobs.ln())
        })
        .collect()
}

/// Lag order minimizing BIC over `0..=p_max`; ties go to the smaller lag.
pub fn select_lag_bic(series: &Series, p_max: usize) -> Result<usize> {
    if p_max == 0 {
        return Ok(0);
    }
    let bic = bic_values(series, p_max)?;
    let mut best = 0;
    for (p, v) in bic.iter().enumerate() {
        if *v < bic[best] {
            best = p;
        }
    }
    Ok(best)
}

/// Schwert's rule of thumb `⌊12 (T/100)^{1/4}⌋`.
pub fn schwert_pmax(len: usize) -> usize {
    (12.0 * (len as f64 / 100.0).powf(0.25) + 1e-9).floor() as usize
}
