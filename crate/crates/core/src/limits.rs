//! Limiting distributions and the fixed-b critical value table.
//!
//! Under a local alternative `ρ = 1 - c/√(BT)` with `B/T → b`, the fixed-b
//! statistic converges to
//!
//! ```text
//!   ∫_0^{1-b} (J(b+r) - J(r))² dr - b(1-b)
//!   ---------------------------------------------------
//!   2 √( b ∫_0^{1-b} ∫_r^{b+r} (J(s) - J(r))² ds dr )
//! ```
//!
//! where `J(r) = ∫_0^r e^{-(r-s)c/b} dW(s)`. [`simulate_fb_statistic`] draws one
//! value of this functional on a discrete grid, and [`build_crit_table`]
//! collects lower-tail quantiles at `c = 0`.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, UrError};
use crate::rng::RngStream;

pub const TABLE_B: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const TABLE_ALPHA: [f64; 8] = [0.2, 0.1, 0.05, 0.04, 0.03, 0.02, 0.01, 0.001];

/// Published fixed-b quantiles (rows follow [`TABLE_ALPHA`], columns [`TABLE_B`]),
/// simulated on a 50,000 point grid with 100,000 repetitions.
const PUBLISHED: [[f64; 9]; 8] = [
    [-0.788, -0.812, -0.815, -0.799, -0.761, -0.701, -0.623, -0.520, -0.377],
    [-1.126, -1.128, -1.104, -1.055, -0.987, -0.903, -0.798, -0.664, -0.486],
    [-1.403, -1.375, -1.327, -1.257, -1.169, -1.067, -0.939, -0.781, -0.573],
    [-1.486, -1.446, -1.391, -1.318, -1.222, -1.113, -0.978, -0.814, -0.600],
    [-1.582, -1.534, -1.471, -1.394, -1.291, -1.169, -1.025, -0.855, -0.630],
    [-1.709, -1.650, -1.579, -1.489, -1.374, -1.246, -1.094, -0.909, -0.669],
    [-1.904, -1.830, -1.745, -1.639, -1.511, -1.361, -1.191, -0.995, -0.729],
    [-2.431, -2.320, -2.203, -2.042, -1.882, -1.692, -1.480, -1.226, -0.905],
];

/// File name looked up under `URBLOCK_TABLE_DIR`.
pub const TABLE_FILE: &str = "crittable.csv";
pub const TABLE_DIR_ENV: &str = "URBLOCK_TABLE_DIR";

const HEADER_TAG: &str = "urblock-crittable v1";

/// Where a table's quantiles came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub grid: usize,
    pub reps: usize,
    /// `None` for the published table, whose seed is unknown.
    pub seed: Option<u64>,
}

/// Lower-tail quantiles of the fixed-b null distribution on a `(α, b)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CritTable {
    pub b_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    /// `quantiles[i][j]` belongs to `alpha_grid[i]` and `b_grid[j]`.
    pub quantiles: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl CritTable {
    /// The published table shipped with the crate.
    pub fn embedded() -> Self {
        CritTable {
            b_grid: TABLE_B.to_vec(),
            alpha_grid: TABLE_ALPHA.to_vec(),
            quantiles: PUBLISHED.iter().map(|r| r.to_vec()).collect(),
            provenance: Provenance {
                grid: 50_000,
                reps: 100_000,
                seed: None,
            },
        }
    }

    /// The table in `$URBLOCK_TABLE_DIR/crittable.csv` if the variable is set,
    /// the embedded one otherwise.
    pub fn load_default() -> Result<Self> {
        match std::env::var_os(TABLE_DIR_ENV) {
            Some(dir) => CritTable::read(Path::new(&dir).join(TABLE_FILE)),
            None => Ok(CritTable::embedded()),
        }
    }

    fn alpha_row(&self, alpha: f64) -> Result<usize> {
        self.alpha_grid
            .iter()
            .position(|a| (a - alpha).abs() < 1e-12)
            .ok_or_else(|| {
                UrError::InvalidArgument(format!(
                    "alpha {alpha} not tabulated (available: {:?})",
                    self.alpha_grid
                ))
            })
    }

    /// Critical value at `(b, α)`, linear in `b` between grid points.
    /// `α` must be on the grid and `b` inside the grid's range.
    pub fn lookup(&self, b: f64, alpha: f64) -> Result<f64> {
        let row = &self.quantiles[self.alpha_row(alpha)?];
        let lo = self.b_grid[0];
        let hi = *self.b_grid.last().expect("non-empty b grid");
        if !(lo - 1e-12..=hi + 1e-12).contains(&b) {
            return Err(UrError::InvalidArgument(format!(
                "relative blocklength {b:.4} outside tabulated range [{lo}, {hi}]"
            )));
        }
        let b = b.clamp(lo, hi);
        let j = self
            .b_grid
            .windows(2)
            .position(|w| b <= w[1])
            .unwrap_or(self.b_grid.len() - 2);
        let (b0, b1) = (self.b_grid[j], self.b_grid[j + 1]);
        let w = (b - b0) / (b1 - b0);
        Ok(row[j] + w * (row[j + 1] - row[j]))
    }

    /// Serializes to the plain-text table format.
    pub fn to_text(&self) -> String {
        let seed = self
            .provenance
            .seed
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        let mut out = format!(
            "{HEADER_TAG} grid={} reps={} seed={seed}\n",
            self.provenance.grid, self.provenance.reps
        );
        for (j, b) in self.b_grid.iter().enumerate() {
            for (i, a) in self.alpha_grid.iter().enumerate() {
                let _ = writeln!(out, "{b},{a},{:.6}", self.quantiles[i][j]);
            }
        }
        out
    }

    /// Parses the plain-text format; `#` comment lines and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(UrError::Parse {
            line: 0,
            message: "empty table".into(),
        })?;
        let rest = header.strip_prefix(HEADER_TAG).ok_or(UrError::Parse {
            line: hline,
            message: format!("expected header `{HEADER_TAG} ...`"),
        })?;
        let mut provenance = Provenance {
            grid: 0,
            reps: 0,
            seed: None,
        };
        for kv in rest.split_whitespace() {
            let bad = || UrError::Parse {
                line: hline,
                message: format!("bad header field `{kv}`"),
            };
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            match k {
                "grid" => provenance.grid = v.parse().map_err(|_| bad())?,
                "reps" => provenance.reps = v.parse().map_err(|_| bad())?,
                "seed" if v == "none" => provenance.seed = None,
                "seed" => provenance.seed = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }

        let mut entries: Vec<(f64, f64, f64)> = Vec::new();
        for (line, l) in lines {
            let fields: Vec<&str> = l.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = if fields.len() == 3 {
                fields.iter().map(|f| f.parse().ok()).collect()
            } else {
                None
            };
            match parsed {
                Some(v) => entries.push((v[0], v[1], v[2])),
                None => {
                    return Err(UrError::Parse {
                        line,
                        message: format!("expected `b,alpha,quantile`, got `{l}`"),
                    })
                }
            }
        }

        let mut b_grid: Vec<f64> = Vec::new();
        let mut alpha_grid: Vec<f64> = Vec::new();
        for (b, a, _) in &entries {
            if !b_grid.contains(b) {
                b_grid.push(*b);
            }
            if !alpha_grid.contains(a) {
                alpha_grid.push(*a);
            }
        }
        if b_grid.len() < 2 || entries.len() != b_grid.len() * alpha_grid.len() {
            return Err(UrError::Parse {
                line: hline,
                message: "table is not a complete b x alpha grid with at least two b values".into(),
            });
        }
        let mut quantiles = vec![vec![f64::NAN; b_grid.len()]; alpha_grid.len()];
        for (b, a, q) in entries {
            let j = b_grid.iter().position(|x| *x == b).unwrap();
            let i = alpha_grid.iter().position(|x| *x == a).unwrap();
            quantiles[i][j] = q;
        }
        Ok(CritTable {
            b_grid,
            alpha_grid,
            quantiles,
            provenance,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| UrError::Io(format!("{}: {e}", path.display())))?;
        CritTable::parse(&text)
    }

    /// `true` if every `b` column is nonincreasing as `α` decreases.
    pub fn is_monotone_in_alpha(&self) -> bool {
        let mut order: Vec<usize> = (0..self.alpha_grid.len()).collect();
        order.sort_by(|&x, &y| self.alpha_grid[x].total_cmp(&self.alpha_grid[y]));
        (0..self.b_grid.len()).all(|j| {
            order
                .windows(2)
                .all(|w| self.quantiles[w[0]][j] <= self.quantiles[w[1]][j])
        })
    }
}

/// Value of the fixed-b functional for one path, together with its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbDraw {
    pub numerator: f64,
    pub denominator: f64,
}

impl FbDraw {
    /// The ratio, or `None` when the denominator vanishes.
    pub fn value(&self) -> Option<f64> {
        let v = self.numerator / self.denominator;
        (self.denominator > 0.0 && v.is_finite()).then_some(v)
    }
}

/// Evaluates the functional on a path `j[0..=n]` sampled at `i/n`, with the
/// integrals as left-endpoint Riemann sums.
pub fn fb_functional(path: &[f64], b: f64) -> FbDraw {
    let n = path.len() - 1;
    let m = ((b * n as f64).round() as usize).clamp(1, n - 1);
    let nf = n as f64;
    let be = m as f64 / nf;

    let mut p1 = Vec::with_capacity(n + 2);
    let mut p2 = Vec::with_capacity(n + 2);
    let (mut s1, mut s2) = (0.0, 0.0);
    p1.push(0.0);
    p2.push(0.0);
    for v in path {
        s1 += v;
        s2 += v * v;
        p1.push(s1);
        p2.push(s2);
    }

    let mut outer = 0.0;
    let mut inner = 0.0;
    for i in 0..n - m {
        let d = path[i + m] - path[i];
        outer += d * d;
        // Σ_{k=i}^{i+m-1} (J_k - J_i)²
        let w1 = p1[i + m] - p1[i];
        let w2 = p2[i + m] - p2[i];
        let ji = path[i];
        inner += (w2 - 2.0 * ji * w1 + m as f64 * ji * ji).max(0.0);
    }
    FbDraw {
        numerator: outer / nf - be * (1.0 - be),
        denominator: 2.0 * (be * inner / (nf * nf)).sqrt(),
    }
}

/// Draws an Ornstein-Uhlenbeck path `J_{c,b}` on `n + 1` points with the exact
/// AR(1) recursion `J_{i+1} = e^{-c/(bn)} J_i + ε_i`, `ε_i ~ N(0, 1/n)`.
/// With `c = 0` this is a Brownian motion.
pub fn simulate_path(b: f64, c: f64, n: usize, rng: RngStream) -> Vec<f64> {
    let mut g = rng.generator();
    let decay = (-c / (b * n as f64)).exp();
    let sd = (1.0 / n as f64).sqrt();
    let mut path = Vec::with_capacity(n + 1);
    let mut j = 0.0;
    path.push(j);
    for _ in 0..n {
        j = decay * j + sd * g.normal();
        path.push(j);
    }
    path
}

fn check_fb_args(b: f64, c: f64, grid: usize) -> Result<()> {
    if !(b > 0.0 && b < 1.0) {
        return Err(UrError::InvalidArgument(format!("b must be in (0, 1), got {b}")));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(UrError::InvalidArgument(format!("c must be >= 0, got {c}")));
    }
    if grid < 100 {
        return Err(UrError::InvalidArgument(format!("grid must be >= 100, got {grid}")));
    }
    Ok(())
}

/// One draw of the fixed-b limit at `(b, c)` on a grid of `grid` steps.
pub fn simulate_fb_statistic(b: f64, c: f64, grid: usize, rng: RngStream) -> Result<f64> {
    check_fb_args(b, c, grid)?;
    fb_functional(&simulate_path(b, c, grid, rng), b)
        .value()
        .ok_or(UrError::NonFinite("fixed-b functional (zero denominator)"))
}

/// Empirical lower-tail quantile: the `⌈αn⌉`-th order statistic.
pub fn lower_quantile(sorted: &[f64], alpha: f64) -> f64 {
    let n = sorted.len();
    let k = ((alpha * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

/// Simulates `reps` draws per `b` (replication `r` uses stream `r` of `seed`,
/// shared across `b` values) and tabulates quantiles at each `α`.
pub fn build_crit_table(
    b_grid: &[f64],
    alpha_grid: &[f64],
    grid: usize,
    reps: usize,
    seed: u64,
) -> Result<CritTable> {
    if reps < 1000 {
        return Err(UrError::InvalidArgument(format!("reps must be >= 1000, got {reps}")));
    }
    if b_grid.len() < 2 || alpha_grid.is_empty() {
        return Err(UrError::InvalidArgument(
            "need at least two b values and one alpha".into(),
        ));
    }
    for &a in alpha_grid {
        if !(a > 0.0 && a < 1.0) {
            return Err(UrError::InvalidArgument(format!("alpha must be in (0, 1), got {a}")));
        }
    }
    for &b in b_grid {
        check_fb_args(b, 0.0, grid)?;
    }

    // Each path serves every b, so simulate once per replication.
    let draws: Vec<Vec<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let path = simulate_path(0.5, 0.0, grid, RngStream::new(seed, r));
            b_grid
                .iter()
                .map(|&b| fb_functional(&path, b).value().unwrap_or(f64::NEG_INFINITY))
                .collect()
        })
        .collect();

    let mut quantiles = vec![vec![0.0; b_grid.len()]; alpha_grid.len()];
    for j in 0..b_grid.len() {
        let mut col: Vec<f64> = draws.iter().map(|d| d[j]).collect();
        col.sort_by(f64::total_cmp);
        for (i, &a) in alpha_grid.iter().enumerate() {
            quantiles[i][j] = lower_quantile(&col, a);
        }
    }
    Ok(CritTable {
        b_grid: b_grid.to_vec(),
        alpha_grid: alpha_grid.to_vec(),
        quantiles,
        provenance: Provenance {
            grid,
            reps,
            seed: Some(seed),
        },
    })
}

/// Drift `∫σ² / √∫σ⁴` of the small-b limit, by the midpoint rule on `n` cells.
pub fn variance_drift_factor(variance: impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let (mut s2, mut s4) = (0.0, 0.0);
    for i in 0..n {
        let v = variance((i as f64 + 0.5) * h);
        s2 += v * h;
        s4 += v * v * h;
    }
    s2 / s4.sqrt()
}

/// Asymptotic rejection probability of the small-b test under `ρ = 1 - c/√(BT)`:
/// `Φ(Φ⁻¹(α) + c (√3/2) ∫σ² / √∫σ⁴)`.
pub fn sb_local_power(c: f64, alpha: f64, variance: impl Fn(f64) -> f64) -> f64 {
    let normal = Normal::standard();
    let drift = c * 3f64.sqrt() / 2.0 * variance_drift_factor(variance, 100_000);
    normal.cdf(normal.inverse_cdf(alpha) + drift)
}

/// Monte Carlo check of [`sb_local_power`]: the share of `N(-drift, 1)` draws
/// below `Φ⁻¹(α)`.
pub fn simulate_sb_local_power(
    c: f64,
    alpha: f64,
    variance: impl Fn(f64) -> f64,
    reps: usize,
    seed: u64,
) -> f64 {
    let normal = Normal::standard();
    let drift = c * 3f64.sqrt() / 2.0 * variance_drift_factor(variance, 100_000);
    let cv = normal.inverse_cdf(alpha);
    let mut g = RngStream::new(seed, 0).generator();
    let hits = (0..reps).filter(|_| g.normal() - drift < cv).count();
    hits as f64 / reps as f64
}
