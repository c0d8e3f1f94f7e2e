//! Brute-force oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use urblock::rng::RngStream;
use urblock::Series;

/// Literal double loop for the pooled sums `(N, D)`, 1-based indices as in
/// `Σ_{j=1}^{T-B} Σ_{t=2}^{B} Δy_{t+j} (y_{t+j-1} - y_j)`.
pub fn block_sums_oracle(y: &[f64], b: usize) -> (f64, f64) {
    let t_len = y.len();
    let at = |i: usize| y[i - 1];
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 1..=t_len - b {
        for t in 2..=b {
            let dev = at(t + j - 1) - at(j);
            num += (at(t + j) - at(t + j - 1)) * dev;
            den += dev * dev;
        }
    }
    (num, den)
}

/// `(Y1, Y2)` from the oracle sums.
pub fn block_stats_oracle(y: &[f64], b: usize) -> (f64, f64) {
    let (num, den) = block_sums_oracle(y, b);
    let (bf, tf) = (b as f64, y.len() as f64);
    (num / (bf.powf(1.5) * tf.sqrt()), den / (bf * bf * tf))
}

fn residual_mean(u: &[f64]) -> f64 {
    u[1..].iter().sum::<f64>() / (u.len() - 1) as f64
}

pub fn sigma2_oracle(u: &[f64]) -> f64 {
    let m = residual_mean(u);
    u[1..].iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (u.len() - 2) as f64
}

/// Literal triple loop for the κ̂² ratio.
pub fn kappa2_oracle(u: &[f64], b: usize) -> f64 {
    let t_len = u.len();
    let at = |i: usize| u[i - 1];
    let ubar = residual_mean(u);
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 1..=t_len - b {
        let mut m = 0.0;
        for k in 1..=b {
            m += at(j + k);
        }
        m /= b as f64;
        for t in 1..=b {
            let d = (at(j + t) - m).powi(2);
            num += (at(j + 1) - ubar).powi(2) * d;
            den += d;
        }
    }
    num / den
}

/// Unpadded profile at `s = t/T`, each value recomputed from scratch.
pub fn profile_oracle(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let ubar = residual_mean(u);
    let total: f64 = u[1..].iter().map(|x| (x - ubar).powi(2)).sum();
    (0..=n)
        .map(|t| {
            if t < 2 {
                return 0.0;
            }
            let part = &u[1..t];
            let m = part.iter().sum::<f64>() / part.len() as f64;
            part.iter().map(|x| (x - m).powi(2)).sum::<f64>() / total
        })
        .collect()
}

pub fn random_walk(n: usize, seed: u64) -> Series {
    let mut g = RngStream::new(seed, 0).generator();
    let mut y = 0.0;
    Series::new(
        (0..n)
            .map(|_| {
                y += g.normal();
                y
            })
            .collect(),
    )
    .unwrap()
}

/// Residual-like vector with `û_1 = 0` and variance `var(t/T)` at `t >= 2`.
pub fn hetero_residuals(n: usize, seed: u64, var: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut g = RngStream::new(seed, 0).generator();
    let nf = n as f64;
    std::iter::once(0.0)
        .chain((2..=n).map(|t| var(t as f64 / nf).sqrt() * g.normal()))
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Step variance `1 + 3·1{r <= 2/3}`.
pub fn step_variance(r: f64) -> f64 {
    if r <= 2.0 / 3.0 {
        4.0
    } else {
        1.0
    }
}
