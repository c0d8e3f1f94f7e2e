//! Pooled OLS over the `T - B` overlapping blocks.
//!
//! Block `j` (1-based, `j = 1..T-B`) regresses `Δy_{t+j}` on `y_{t+j-1} - y_j`
//! for `t = 2..B`, i.e. it is demeaned by its first observation. The pooled
//! numerator and denominator sums are
//!
//! ```text
//! N = Σ_j Σ_t Δy_{t+j} (y_{t+j-1} - y_j)
//! D = Σ_j Σ_t (y_{t+j-1} - y_j)²
//! ```
//!
//! and the normalized statistics are `Y1 = N / (B^{3/2} T^{1/2})`,
//! `Y2 = D / (B² T)`.
//!
//! Both sums are evaluated in `O(T)`. Within a block the numerator telescopes,
//!
//! ```text
//! Σ_{t=2}^{B} Δy_{t+j}(y_{t+j-1} - y_j) = ½ [ (y_{j+B} - y_j)² - Σ_{k=j+1}^{j+B} (Δy_k)² ],
//! ```
//!
//! and the denominator expands into window sums of `y` and `y²`.

use crate::error::{Result, UrError};
use crate::series::Series;

/// Normalized pooled numerator and denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockStats {
    pub y1: f64,
    pub y2: f64,
    pub blocklength: usize,
    pub len: usize,
}

impl BlockStats {
    /// Unnormalized numerator sum `N`.
    pub fn numerator_sum(&self) -> f64 {
        let (b, t) = (self.blocklength as f64, self.len as f64);
        self.y1 * b.powf(1.5) * t.sqrt()
    }

    /// Unnormalized denominator sum `D`.
    pub fn denominator_sum(&self) -> f64 {
        let (b, t) = (self.blocklength as f64, self.len as f64);
        self.y2 * b * b * t
    }
}

/// Pooled estimator with its residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledFit {
    pub rho_hat: f64,
    pub phi_hat: f64,
    pub stats: BlockStats,
    /// `û_1 = 0`, `û_t = y_t - ρ̂ y_{t-1}` for `t >= 2`.
    pub residuals: Vec<f64>,
}

fn check_blocklength(len: usize, b: usize) -> Result<()> {
    if b < 2 || b >= len {
        return Err(UrError::SchemeInfeasible {
            blocklength: b,
            len,
        });
    }
    Ok(())
}

/// Raw sums `(N, D)` on a slice; the caller has validated `2 <= B < T`.
pub(crate) fn block_sums(y: &[f64], b: usize) -> (f64, f64) {
    let n = y.len();
    let anchor = y[0];
    let z: Vec<f64> = y.iter().map(|v| v - anchor).collect();

    // prefix sums: p1[i] = Σ_{k<i} z_k, p2[i] = Σ_{k<i} z_k², pd[i] = Σ_{1<=k<i} (Δz_k)²
    let mut p1 = Vec::with_capacity(n + 1);
    let mut p2 = Vec::with_capacity(n + 1);
    let mut pd = Vec::with_capacity(n + 1);
    let (mut s1, mut s2, mut sd) = (0.0, 0.0, 0.0);
    p1.push(0.0);
    p2.push(0.0);
    pd.push(0.0);
    for i in 0..n {
        s1 += z[i];
        s2 += z[i] * z[i];
        if i > 0 {
            let d = z[i] - z[i - 1];
            sd += d * d;
        }
        p1.push(s1);
        p2.push(s2);
        pd.push(sd);
    }

    let bm1 = (b - 1) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    // 0-based block anchor a = j - 1 for j = 1..T-B
    for a in 0..n - b {
        let range = z[a + b] - z[a];
        let sq_incr = pd[a + b + 1] - pd[a + 1];
        num += 0.5 * (range * range - sq_incr);

        let w1 = p1[a + b] - p1[a + 1];
        let w2 = p2[a + b] - p2[a + 1];
        let block = w2 - 2.0 * z[a] * w1 + bm1 * z[a] * z[a];
        den += block.max(0.0);
    }
    (num, den)
}

/// Pooled numerator and denominator statistics `Y1`, `Y2`.
pub fn block_stats(series: &Series, blocklength: usize) -> Result<BlockStats> {
    let len = series.len();
    check_blocklength(len, blocklength)?;
    let (num, den) = block_sums(series.values(), blocklength);
    if !num.is_finite() || !den.is_finite() {
        return Err(UrError::NonFinite("block statistics"));
    }
    let (b, t) = (blocklength as f64, len as f64);
    Ok(BlockStats {
        y1: num / (b.powf(1.5) * t.sqrt()),
        y2: den / (b * b * t),
        blocklength,
        len,
    })
}

/// Pooled OLS estimate of `ρ` and its residuals.
pub fn pooled_fit(series: &Series, blocklength: usize) -> Result<PooledFit> {
    let stats = block_stats(series, blocklength)?;
    if stats.y2 <= 0.0 {
        return Err(UrError::DegenerateSeries);
    }
    let phi_hat = stats.numerator_sum() / stats.denominator_sum();
    if !phi_hat.is_finite() {
        return Err(UrError::NonFinite("pooled estimator"));
    }
    let rho_hat = 1.0 + phi_hat;
    let y = series.values();
    let mut residuals = Vec::with_capacity(y.len());
    residuals.push(0.0);
    residuals.extend(y.windows(2).map(|w| w[1] - rho_hat * w[0]));
    Ok(PooledFit {
        rho_hat,
        phi_hat,
        stats,
        residuals,
    })
}
