//! Heteroskedasticity nuisance estimates from pooled residuals: the residual
//! variance, the fourth-moment ratio used by the small-b statistic, the
//! cumulative variance profile, and the variance-profile time transformation.
//!
//! All functions take the residual vector with the `û_1 = 0` convention, so
//! index 0 is never used as data.

use crate::error::{Result, UrError};
use crate::series::Series;

/// Relative padding that makes an estimated profile strictly increasing.
pub const PROFILE_PAD: f64 = 1e-9;

/// Segments whose slope (relative to the average slope of one) falls below
/// this are considered flat.
pub const FLAT_SLOPE: f64 = 1e-6;

/// A profile flat over a larger share of the sample is rejected.
pub const MAX_FLAT_SHARE: f64 = 0.10;

/// Largest auxiliary length multiplier used by [`time_transform`].
pub const MAX_AUX_FACTOR: usize = 10;

fn check_residuals(residuals: &[f64]) -> Result<()> {
    if residuals.len() < 4 {
        return Err(UrError::SeriesTooShort {
            len: residuals.len(),
            min: 4,
        });
    }
    if residuals.iter().any(|v| !v.is_finite()) {
        return Err(UrError::NonFinite("residuals"));
    }
    Ok(())
}

fn residual_mean(residuals: &[f64]) -> f64 {
    let tail = &residuals[1..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// `σ̂² = Σ_{j=2}^T (û_j - ū)² / (T - 2)` with `ū` the mean over `j = 2..T`.
pub fn sigma2_hat(residuals: &[f64]) -> Result<f64> {
    check_residuals(residuals)?;
    let mean = residual_mean(residuals);
    let ss: f64 = residuals[1..].iter().map(|u| (u - mean).powi(2)).sum();
    if ss <= 0.0 {
        return Err(UrError::DegenerateResiduals);
    }
    Ok(ss / (residuals.len() - 2) as f64)
}

/// Ratio estimator of `∫σ⁴ / ∫σ²`:
///
/// ```text
/// κ̂² = Σ_j (û_{j+1} - ū)² D_j / Σ_j D_j,   D_j = Σ_{t=1}^{B} (û_{j+t} - m_j)²
/// ```
///
/// with `m_j` the mean of block `j` and `j = 1..T-B`. Block sums of squares come
/// from prefix sums, so the cost is `O(T)`.
pub fn kappa2_hat(residuals: &[f64], blocklength: usize) -> Result<f64> {
    check_residuals(residuals)?;
    let n = residuals.len();
    if blocklength < 2 || blocklength >= n {
        return Err(UrError::SchemeInfeasible {
            blocklength,
            len: n,
        });
    }
    let mean = residual_mean(residuals);
    // centered copy keeps the prefix-sum expansion well conditioned
    let c: Vec<f64> = residuals.iter().map(|u| u - mean).collect();
    let mut p1 = vec![0.0; n + 1];
    let mut p2 = vec![0.0; n + 1];
    for i in 0..n {
        p1[i + 1] = p1[i] + c[i];
        p2[i + 1] = p2[i] + c[i] * c[i];
    }
    let b = blocklength as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    // block j (1-based) covers 0-based indices j..j+B-1; its weight is c[j]²
    for j in 1..=n - blocklength {
        let s1 = p1[j + blocklength] - p1[j];
        let s2 = p2[j + blocklength] - p2[j];
        let d = (s2 - s1 * s1 / b).max(0.0);
        num += c[j] * c[j] * d;
        den += d;
    }
    if den <= 0.0 {
        return Err(UrError::DegenerateResiduals);
    }
    let k = num / den;
    if !k.is_finite() {
        return Err(UrError::NonFinite("kappa2_hat"));
    }
    Ok(k)
}

/// Estimated cumulative variance share on the grid `s = i/T`, `i = 0..T`,
/// linearly interpolated between grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    grid: Vec<f64>,
}

impl VarianceProfile {
    /// Validates a grid of values for `s = 0, 1/T, ..., 1`.
    pub fn from_grid(grid: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(UrError::InvalidArgument("profile grid needs >= 2 points".into()));
        }
        if grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 {
            return Err(UrError::InvalidArgument("profile must run from 0 to 1".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(UrError::InvalidArgument("profile must be strictly increasing".into()));
        }
        Ok(Self { grid })
    }

    /// `η(s) = s` on a grid of `len` intervals.
    pub fn identity(len: usize) -> Self {
        let grid = (0..=len).map(|i| i as f64 / len as f64).collect();
        Self { grid }
    }

    /// Number of grid intervals (the sample size `T`).
    pub fn len(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn eval(&self, s: f64) -> f64 {
        let n = self.len();
        let x = s.clamp(0.0, 1.0) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let frac = x - i as f64;
        self.grid[i] + frac * (self.grid[i + 1] - self.grid[i])
    }

    /// Unique `s` with `η̂(s) = u`.
    pub fn invert(&self, u: f64) -> f64 {
        if !(-1e-9..=1.0 + 1e-9).contains(&u) {
            log::warn!("variance profile inverse evaluated at {u}, clamped to [0,1]");
        }
        let u = u.clamp(0.0, 1.0);
        let n = self.len();
        // last index with grid[i] <= u, capped so that i + 1 exists
        let i = self.grid.partition_point(|&g| g <= u).saturating_sub(1).min(n - 1);
        self.invert_in_segment(i, u)
    }

    fn invert_in_segment(&self, i: usize, u: f64) -> f64 {
        let (g0, g1) = (self.grid[i], self.grid[i + 1]);
        let frac = ((u - g0) / (g1 - g0)).clamp(0.0, 1.0);
        (i as f64 + frac) / self.len() as f64
    }

    /// Segment slopes `dη/ds`; identically one for the identity profile.
    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.len() as f64;
        self.grid.windows(2).map(move |w| (w[1] - w[0]) * n)
    }

    /// Share of the unit interval on which the profile is flat, ignoring the
    /// first two segments (the estimated profile is zero up to `s = 2/T`).
    pub fn flat_share(&self) -> f64 {
        let n = self.len();
        self.slopes().skip(2).filter(|s| *s < FLAT_SLOPE).count() as f64 / n as f64
    }

    /// Largest deviation from the identity over the grid points.
    pub fn sup_distance_to_identity(&self) -> f64 {
        let n = self.len() as f64;
        self.grid
            .iter()
            .enumerate()
            .map(|(i, g)| (g - i as f64 / n).abs())
            .fold(0.0, f64::max)
    }
}

/// Estimated variance profile from pooled residuals.
///
/// At `s = t/T` the value is `Σ_{j=2}^{t} (û_j - m_t)² / Σ_{j=2}^{T} (û_j - ū)²`,
/// where `m_t` is the running mean of `û_2..û_t`; the value is zero for
/// `t < 2`. The grid is padded by `PROFILE_PAD · i/T` and renormalized so it
/// is strictly increasing.
pub fn variance_profile(residuals: &[f64]) -> Result<VarianceProfile> {
    check_residuals(residuals)?;
    let n = residuals.len();
    // Welford running sums of squares over û_2..û_t
    let mut ss = vec![0.0; n + 1];
    let mut mean = 0.0;
    let mut acc = 0.0;
    for t in 2..=n {
        let u = residuals[t - 1];
        let k = (t - 1) as f64;
        let delta = u - mean;
        mean += delta / k;
        acc += delta * (u - mean);
        ss[t] = acc;
    }
    let total = ss[n];
    if !(total > 0.0) {
        return Err(UrError::DegenerateResiduals);
    }
    let nf = n as f64;
    let norm = 1.0 + PROFILE_PAD;
    let mut grid: Vec<f64> = ss
        .iter()
        .enumerate()
        .map(|(i, v)| (v / total + PROFILE_PAD * i as f64 / nf) / norm)
        .collect();
    grid[0] = 0.0;
    grid[n] = 1.0;
    // rounding in the Welford recursion can still tie neighbours
    for i in 1..n {
        if grid[i] <= grid[i - 1] {
            grid[i] = f64::from_bits(grid[i - 1].to_bits() + 1);
        }
    }
    if grid[n - 1] >= 1.0 {
        return Err(UrError::DegenerateResiduals);
    }
    Ok(VarianceProfile { grid })
}

/// Output of [`time_transform`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTransformed {
    pub series: Series,
    /// Auxiliary length multiplier `k`, so the output has `k·T` points.
    pub factor: usize,
}

/// Smallest `k <= MAX_AUX_FACTOR` for which inverse-profile increments on the
/// grid `1/(kT)` never exceed `1/T`, so every observation is visited.
fn aux_factor(profile: &VarianceProfile) -> usize {
    let min_slope = profile.slopes().fold(f64::INFINITY, f64::min);
    if min_slope <= 0.0 {
        return MAX_AUX_FACTOR;
    }
    let needed = (1.0 / min_slope - 1e-9).ceil();
    if needed <= 1.0 {
        1
    } else if needed >= MAX_AUX_FACTOR as f64 {
        MAX_AUX_FACTOR
    } else {
        needed as usize
    }
}

/// Re-indexes a series by the inverse of its variance profile,
/// `ỹ_t = y_{⌊η̂⁻¹(t/T̃)·T⌋}` for `t = 1..T̃`, indices clamped to `[1, T]`.
pub fn time_transform(series: &Series, profile: &VarianceProfile) -> Result<TimeTransformed> {
    let n = series.len();
    if profile.len() != n {
        return Err(UrError::InvalidArgument(format!(
            "profile has {} intervals, series has {n} points",
            profile.len()
        )));
    }
    let flat = profile.flat_share();
    if flat > MAX_FLAT_SHARE {
        return Err(UrError::ProfileDegenerate {
            fraction: 100.0 * flat,
        });
    }
    let factor = aux_factor(profile);
    let aux = factor * n;
    let y = series.values();
    let grid = profile.grid();
    let nf = n as f64;
    let mut out = Vec::with_capacity(aux);
    let mut seg = 0usize;
    for t in 1..=aux {
        let u = t as f64 / aux as f64;
        while seg + 1 < n && grid[seg + 1] <= u {
            seg += 1;
        }
        let s = profile.invert_in_segment(seg, u);
        let idx = ((s * nf + 1e-9).floor() as usize).clamp(1, n);
        out.push(y[idx - 1]);
    }
    Ok(TimeTransformed {
        series: Series::new(out)?,
        factor,
    })
}
