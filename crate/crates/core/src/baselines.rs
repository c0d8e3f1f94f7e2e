//! Comparison unit root tests: augmented Dickey-Fuller with a constant,
//! DF-GLS with GLS demeaning or detrending, and the single-frequency Fourier
//! test of Enders and Lee.
//!
//! Critical values come from the simulated null distribution of each
//! statistic (`ρ = 1`, iid N(0,1) errors, no trend) at the sample size in
//! use, cached per `(kind, T, lag rule)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, UrError};
use crate::limits::{lower_quantile, TABLE_ALPHA, TABLE_DIR_ENV};
use crate::ols::{design_from_columns, ols};
use crate::rng::RngStream;
use crate::series::Series;
use crate::testkit::{Diagnostics, TestOutcome};

pub const DFGLS_CBAR: f64 = 7.0;
pub const DFGLS_TREND_CBAR: f64 = 13.5;
/// Null replications behind every baseline critical value.
pub const NULL_REPS: usize = 100_000;
pub const NULL_SEED: u64 = 0x0b5e_11e5;
pub const BASE_TABLE_FILE: &str = "basetable.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BaselineKind {
    Adf,
    DfGls,
    DfGlsTrend,
    EndersLee,
}

impl BaselineKind {
    pub fn id(&self) -> &'static str {
        match self {
            BaselineKind::Adf => "adf",
            BaselineKind::DfGls => "df-gls",
            BaselineKind::DfGlsTrend => "df-gls-trend",
            BaselineKind::EndersLee => "el",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        [
            BaselineKind::Adf,
            BaselineKind::DfGls,
            BaselineKind::DfGlsTrend,
            BaselineKind::EndersLee,
        ]
        .into_iter()
        .find(|k| k.id() == id)
    }

    fn min_len(&self) -> usize {
        match self {
            BaselineKind::EndersLee => 30,
            _ => 25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BaseLag {
    Fixed(usize),
    /// BIC over `0..=p_max` on a common sample.
    Bic(usize),
}

impl BaseLag {
    fn id(&self) -> String {
        match self {
            BaseLag::Fixed(p) => p.to_string(),
            BaseLag::Bic(p) => format!("bic{p}"),
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.strip_prefix("bic") {
            Some(p) => p.parse().ok().map(BaseLag::Bic),
            None => s.parse().ok().map(BaseLag::Fixed),
        }
    }

    fn max_lag(&self) -> usize {
        match *self {
            BaseLag::Fixed(p) | BaseLag::Bic(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BaselineSpec {
    pub kind: BaselineKind,
    pub lag: BaseLag,
}

impl BaselineSpec {
    pub fn new(kind: BaselineKind, lag: BaseLag) -> Self {
        BaselineSpec { kind, lag }
    }
}

/// Dickey-Fuller type regression
///
/// ```text
/// r_t = φ x_{t-1} + [β_0] + Σ_i ξ_i Δx_{t-i} + extra_t' γ + e_t
/// ```
///
/// over `t = start..T` (1-based). Returns `(t-ratio of φ, SSR, n_obs)`.
struct DfRegression<'a> {
    response: &'a [f64],
    level: &'a [f64],
    intercept: bool,
    extra: &'a [Vec<f64>],
}

impl DfRegression<'_> {
    fn fit(&self, p: usize, start: usize) -> Result<(f64, f64, usize)> {
        let n = self.level.len();
        let x = self.level;
        let rows: Vec<usize> = (start..=n).collect();
        let resp: Vec<f64> = rows.iter().map(|&t| self.response[t - 1]).collect();
        let mut cols: Vec<Vec<f64>> = vec![rows.iter().map(|&t| x[t - 2]).collect()];
        if self.intercept {
            cols.push(vec![1.0; rows.len()]);
        }
        for col in self.extra {
            cols.push(rows.iter().map(|&t| col[t - 1]).collect());
        }
        for i in 1..=p {
            cols.push(rows.iter().map(|&t| x[t - 1 - i] - x[t - 2 - i]).collect());
        }
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        let fit = ols(&design_from_columns(&refs), &resp)?;
        let scale: f64 = resp.iter().map(|v| v * v).sum();
        if fit.ssr <= 1e-24 * scale.max(f64::MIN_POSITIVE) {
            return Err(UrError::DegenerateSeries);
        }
        let t = fit.t_stat(0);
        if !t.is_finite() {
            return Err(UrError::NonFinite("baseline t-ratio"));
        }
        Ok((t, fit.ssr, fit.n_obs))
    }

    fn statistic(&self, lag: BaseLag) -> Result<(f64, usize)> {
        let p = match lag {
            BaseLag::Fixed(p) => p,
            BaseLag::Bic(p_max) => self.select_bic(p_max)?,
        };
        Ok((self.fit(p, p + 2)?.0, p))
    }

    fn select_bic(&self, p_max: usize) -> Result<usize> {
        let start = p_max + 2;
        let mut best = (f64::INFINITY, 0);
        for p in 0..=p_max {
            let (_, ssr, n) = self.fit(p, start)?;
            let k = p + 1 + usize::from(self.intercept) + self.extra.len();
            let nf = n as f64;
            let bic = nf * (ssr / nf).ln() + k as f64 * nf.ln();
            if bic < best.0 {
                best = (bic, p);
            }
        }
        Ok(best.1)
    }
}

fn diff_with_nan_head(x: &[f64]) -> Vec<f64> {
    let mut d = Vec::with_capacity(x.len());
    d.push(f64::NAN);
    d.extend(x.windows(2).map(|w| w[1] - w[0]));
    d
}

fn check_len(series: &Series, kind: BaselineKind, lag: BaseLag) -> Result<()> {
    let min = kind.min_len().max(lag.max_lag() + 12);
    if series.len() < min {
        return Err(UrError::SeriesTooShort {
            len: series.len(),
            min,
        });
    }
    Ok(())
}

/// ADF t-ratio with a constant; returns the statistic and the lag used.
pub fn adf_statistic(series: &Series, lag: BaseLag) -> Result<(f64, usize)> {
    check_len(series, BaselineKind::Adf, lag)?;
    let y = series.values();
    let dy = diff_with_nan_head(y);
    DfRegression {
        response: &dy,
        level: y,
        intercept: true,
        extra: &[],
    }
    .statistic(lag)
}

/// Local-to-unity GLS demeaned (`trend = false`, `c̄ = 7`) or detrended
/// (`trend = true`, `c̄ = 13.5`) series `y - Zβ̂`.
pub fn gls_detrend(series: &Series, trend: bool) -> Result<Vec<f64>> {
    let y = series.values();
    let n = y.len();
    let cbar = if trend { DFGLS_TREND_CBAR } else { DFGLS_CBAR };
    let a = 1.0 - cbar / n as f64;
    let quasi = |v: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        out.push(v[0]);
        out.extend(v.windows(2).map(|w| w[1] - a * w[0]));
        out
    };
    let ones = vec![1.0; n];
    let time: Vec<f64> = (1..=n).map(|t| t as f64).collect();
    let mut z: Vec<&[f64]> = vec![&ones];
    if trend {
        z.push(&time);
    }
    let zq: Vec<Vec<f64>> = z.iter().map(|c| quasi(c)).collect();
    let zq_refs: Vec<&[f64]> = zq.iter().map(Vec::as_slice).collect();
    let beta = ols(&design_from_columns(&zq_refs), &quasi(y))?.coefficients;
    let detrended: Vec<f64> = (0..n)
        .map(|t| y[t] - z.iter().zip(&beta).map(|(c, b)| c[t] * b).sum::<f64>())
        .collect();
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let size = detrended.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if size <= 1e-9 * (scale + 1.0) {
        return Err(UrError::DegenerateSeries);
    }
    Ok(detrended)
}

/// DF-GLS t-ratio: Dickey-Fuller regression without deterministics on the
/// GLS demeaned or detrended series.
pub fn dfgls_statistic(series: &Series, lag: BaseLag, trend: bool) -> Result<(f64, usize)> {
    let kind = if trend {
        BaselineKind::DfGlsTrend
    } else {
        BaselineKind::DfGls
    };
    check_len(series, kind, lag)?;
    let yd = gls_detrend(series, trend)?;
    let dyd = diff_with_nan_head(&yd);
    DfRegression {
        response: &dyd,
        level: &yd,
        intercept: false,
        extra: &[],
    }
    .statistic(lag)
}

/// Enders-Lee single-frequency Fourier t-ratio.
///
/// Stage one regresses `Δy_t` on `(1, Δsin(2πt/T), Δcos(2πt/T))` and forms
/// `S̃_t = y_t - D̃_t - (y_1 - D̃_1)` with `D̃_t = δ̂_0 t + δ̂_1 sin + δ̂_2 cos`.
/// Stage two is the t-ratio of `φ` in
/// `Δy_t = φ S̃_{t-1} + β_0 + β_1 Δsin + β_2 Δcos + Σ ξ_i ΔS̃_{t-i} + e_t`.
pub fn enders_lee_statistic(series: &Series, lag: BaseLag) -> Result<(f64, usize)> {
    check_len(series, BaselineKind::EndersLee, lag)?;
    let y = series.values();
    let n = y.len();
    let nf = n as f64;
    let sin: Vec<f64> = (1..=n).map(|t| (2.0 * PI * t as f64 / nf).sin()).collect();
    let cos: Vec<f64> = (1..=n).map(|t| (2.0 * PI * t as f64 / nf).cos()).collect();
    let dsin = diff_with_nan_head(&sin);
    let dcos = diff_with_nan_head(&cos);
    let dy = diff_with_nan_head(y);

    let ones = vec![1.0; n - 1];
    let aux = ols(
        &design_from_columns(&[&ones, &dsin[1..], &dcos[1..]]),
        &dy[1..],
    )?;
    let d = &aux.coefficients;
    let dtilde = |t: usize| d[0] * t as f64 + d[1] * sin[t - 1] + d[2] * cos[t - 1];
    let anchor = y[0] - dtilde(1);
    let s: Vec<f64> = (1..=n).map(|t| y[t - 1] - dtilde(t) - anchor).collect();

    DfRegression {
        response: &dy,
        level: &s,
        intercept: true,
        extra: &[dsin, dcos],
    }
    .statistic(lag)
}

/// Statistic and lag used for any baseline.
pub fn baseline_statistic(series: &Series, spec: &BaselineSpec) -> Result<(f64, usize)> {
    match spec.kind {
        BaselineKind::Adf => adf_statistic(series, spec.lag),
        BaselineKind::DfGls => dfgls_statistic(series, spec.lag, false),
        BaselineKind::DfGlsTrend => dfgls_statistic(series, spec.lag, true),
        BaselineKind::EndersLee => enders_lee_statistic(series, spec.lag),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct NullKey {
    kind: BaselineKind,
    len: usize,
    lag: BaseLag,
}

/// Simulated null quantiles at the [`TABLE_ALPHA`] levels, keyed by test,
/// length and lag rule.
#[derive(Debug, Default)]
struct NullCache {
    entries: HashMap<NullKey, Vec<f64>>,
    loaded: bool,
}

fn cache() -> &'static Mutex<NullCache> {
    static CACHE: OnceLock<Mutex<NullCache>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(NullCache::default()))
}

fn table_path() -> Option<PathBuf> {
    std::env::var_os(TABLE_DIR_ENV).map(|d| PathBuf::from(d).join(BASE_TABLE_FILE))
}

const BASE_HEADER: &str = "urblock-basetable v1";

fn render_base_table(entries: &HashMap<NullKey, Vec<f64>>) -> String {
    let mut keys: Vec<&NullKey> = entries.keys().collect();
    keys.sort_by_key(|k| (k.kind.id(), k.len, k.lag.id()));
    let mut out = format!("{BASE_HEADER} reps={NULL_REPS} seed={NULL_SEED}\n");
    for k in keys {
        for (a, q) in TABLE_ALPHA.iter().zip(&entries[k]) {
            let _ = writeln!(out, "{},{},{},{a},{q:.6}", k.kind.id(), k.len, k.lag.id());
        }
    }
    out
}

fn parse_base_table(text: &str) -> Result<HashMap<NullKey, Vec<f64>>> {
    let mut map: HashMap<NullKey, Vec<f64>> = HashMap::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| UrError::Parse {
            line: i + 1,
            message,
        };
        if !seen_header {
            if !line.starts_with(BASE_HEADER) {
                return Err(err(format!("expected `{BASE_HEADER}` header")));
            }
            let expect = format!("reps={NULL_REPS} seed={NULL_SEED}");
            if line[BASE_HEADER.len()..].trim() != expect {
                return Err(err(format!("table was built with other settings than `{expect}`")));
            }
            seen_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let parsed = (f.len() == 5)
            .then(|| {
                Some((
                    BaselineKind::from_id(f[0])?,
                    f[1].parse::<usize>().ok()?,
                    BaseLag::parse(f[2])?,
                    f[3].parse::<f64>().ok()?,
                    f[4].parse::<f64>().ok()?,
                ))
            })
            .flatten();
        let (kind, len, lag, alpha, q) =
            parsed.ok_or_else(|| err(format!("expected `kind,T,p,alpha,quantile`, got `{line}`")))?;
        let pos = TABLE_ALPHA
            .iter()
            .position(|a| (a - alpha).abs() < 1e-12)
            .ok_or_else(|| err(format!("alpha {alpha} is not a tabulated level")))?;
        let row = map
            .entry(NullKey { kind, len, lag })
            .or_insert_with(|| vec![f64::NAN; TABLE_ALPHA.len()]);
        row[pos] = q;
    }
    if map.values().any(|r| r.iter().any(|v| v.is_nan())) {
        return Err(UrError::Parse {
            line: 0,
            message: "incomplete alpha rows in baseline table".into(),
        });
    }
    Ok(map)
}

fn simulate_null(kind: BaselineKind, len: usize, lag: BaseLag, reps: usize, seed: u64) -> Vec<f64> {
    let spec = BaselineSpec { kind, lag };
    let salt = (kind as u64) << 48 ^ (len as u64) << 16 ^ lag.max_lag() as u64;
    let base = RngStream::new(seed, 0).derive(salt);
    let mut stats: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .filter_map(|r| {
            let mut g = RngStream::new(base.seed, r).generator();
            let mut y = 0.0;
            let path: Vec<f64> = (0..len)
                .map(|_| {
                    y += g.normal();
                    y
                })
                .collect();
            let s = Series::new(path).ok()?;
            baseline_statistic(&s, &spec).ok().map(|(t, _)| t)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    TABLE_ALPHA.iter().map(|&a| lower_quantile(&stats, a)).collect()
}

/// Null quantiles of `kind` at length `len` for every [`TABLE_ALPHA`] level.
///
/// Computed once per process and key. With `URBLOCK_TABLE_DIR` set, entries
/// are read from and written back to `basetable.csv` in that directory.
/// Callers running inside a rayon pool should warm the cache first.
pub fn null_quantiles(kind: BaselineKind, len: usize, lag: BaseLag) -> Result<Vec<f64>> {
    let key = NullKey { kind, len, lag };
    {
        let mut c = cache().lock().expect("baseline cache poisoned");
        if !c.loaded {
            c.loaded = true;
            if let Some(path) = table_path().filter(|p| p.exists()) {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| UrError::Io(format!("{}: {e}", path.display())))?;
                c.entries.extend(parse_base_table(&text)?);
            }
        }
        if let Some(q) = c.entries.get(&key) {
            return Ok(q.clone());
        }
    }
    // Simulated outside the lock: the result is deterministic, so a racing
    // duplicate computes the same values.
    log::info!(
        "simulating {} null distribution at T={len}, lag {} ({NULL_REPS} reps)",
        kind.id(),
        lag.id()
    );
    let q = simulate_null(kind, len, lag, NULL_REPS, NULL_SEED);
    let mut c = cache().lock().expect("baseline cache poisoned");
    c.entries.insert(key, q.clone());
    if let Some(path) = table_path() {
        std::fs::write(&path, render_base_table(&c.entries))
            .map_err(|e| UrError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(q)
}

/// Critical value for `kind` at level `alpha` (one of [`TABLE_ALPHA`]).
pub fn critical_value(kind: BaselineKind, len: usize, lag: BaseLag, alpha: f64) -> Result<f64> {
    let pos = TABLE_ALPHA
        .iter()
        .position(|a| (a - alpha).abs() < 1e-12)
        .ok_or_else(|| {
            UrError::InvalidArgument(format!(
                "alpha {alpha} not available for baseline tests (use one of {TABLE_ALPHA:?})"
            ))
        })?;
    Ok(null_quantiles(kind, len, lag)?[pos])
}

/// Runs a baseline test against its simulated null critical value.
pub fn baseline_test(series: &Series, spec: &BaselineSpec, alpha: f64) -> Result<TestOutcome> {
    if series.is_constant() {
        return Err(UrError::DegenerateSeries);
    }
    let (statistic, lag) = baseline_statistic(series, spec)?;
    let critical_value = critical_value(spec.kind, series.len(), spec.lag, alpha)?;
    Ok(TestOutcome {
        statistic,
        critical_value,
        p_value: None,
        reject: statistic < critical_value,
        diagnostics: Diagnostics {
            len: series.len(),
            lag,
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn walk(n: usize, seed: u64) -> Series {
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

    #[test]
    fn adf_matches_direct_regression() {
        let s = walk(60, 1);
        let y = s.values();
        let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let lvl = &y[..59];
        let fit = ols(&design_from_columns(&[lvl, &[1.0; 59]]), &dy).unwrap();
        let (t, p) = adf_statistic(&s, BaseLag::Fixed(0)).unwrap();
        assert_eq!(p, 0);
        assert_relative_eq!(t, fit.t_stat(0), max_relative = 1e-12);
    }

    #[test]
    fn shift_and_scale_invariance() {
        let s = walk(120, 2);
        let moved = s.affine(2.5, -40.0).unwrap();
        for kind in [
            BaselineKind::Adf,
            BaselineKind::DfGls,
            BaselineKind::DfGlsTrend,
            BaselineKind::EndersLee,
        ] {
            let spec = BaselineSpec::new(kind, BaseLag::Fixed(1));
            let a = baseline_statistic(&s, &spec).unwrap().0;
            let b = baseline_statistic(&moved, &spec).unwrap().0;
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
    }

    #[test]
    fn linear_series_detrends_to_zero() {
        let s = Series::new((1..=50).map(|t| 3.0 + 0.5 * t as f64).collect()).unwrap();
        assert_eq!(gls_detrend(&s, true).unwrap_err(), UrError::DegenerateSeries);
        assert_eq!(
            dfgls_statistic(&s, BaseLag::Fixed(0), true).unwrap_err(),
            UrError::DegenerateSeries
        );
    }

    #[test]
    fn gls_demeaning_constant_only() {
        // With c̄ = T the quasi-difference is the plain level, so β̂ is a
        // regression of (y_1, y_2, ...) on (1, 1, ...) quasi-differenced at a = 0.
        let s = walk(40, 3);
        let yd = gls_detrend(&s, false).unwrap();
        let a = 1.0 - DFGLS_CBAR / 40.0;
        let y = s.values();
        let num = y[0] + (1..40).map(|t| (y[t] - a * y[t - 1]) * (1.0 - a)).sum::<f64>();
        let den = 1.0 + 39.0 * (1.0 - a) * (1.0 - a);
        let beta = num / den;
        for t in 0..40 {
            assert_relative_eq!(yd[t], y[t] - beta, max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn fourier_trend_is_absorbed() {
        let s = walk(200, 4);
        let spec = BaselineSpec::new(BaselineKind::EndersLee, BaseLag::Fixed(0));
        let base = baseline_statistic(&s, &spec).unwrap().0;
        for lambda in [3.0, 9.0] {
            let y: Vec<f64> = s
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| v + lambda * 0.5 * (2.0 * PI * (i + 1) as f64 / 200.0).cos())
                .collect();
            let t = baseline_statistic(&Series::new(y).unwrap(), &spec).unwrap().0;
            assert_relative_eq!(t, base, max_relative = 1e-8);
        }
    }

    #[test]
    fn constant_series_degenerate() {
        let s = Series::new(vec![1.0; 40]).unwrap();
        assert!(adf_statistic(&s, BaseLag::Fixed(0)).is_err());
    }

    #[test]
    fn too_short() {
        let s = walk(20, 5);
        assert!(matches!(
            adf_statistic(&s, BaseLag::Fixed(0)),
            Err(UrError::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn bic_lag_in_range() {
        let s = walk(200, 6);
        let (_, p) = adf_statistic(&s, BaseLag::Bic(5)).unwrap();
        assert!(p <= 5);
    }

    #[test]
    fn base_table_round_trip() {
        let mut m = HashMap::new();
        m.insert(
            NullKey {
                kind: BaselineKind::Adf,
                len: 100,
                lag: BaseLag::Bic(5),
            },
            TABLE_ALPHA.iter().map(|a| -3.0 + a).collect::<Vec<f64>>(),
        );
        let text = render_base_table(&m);
        assert!(text.starts_with("urblock-basetable v1"));
        assert!(text.contains("adf,100,bic5,0.05,-2.950000"));
        let back = parse_base_table(&text).unwrap();
        assert_eq!(back.len(), 1);
    }

    #[test]
    fn small_null_simulation_is_sane() {
        // Dickey-Fuller with constant: 5% quantile near -2.9 at T = 100.
        let q = simulate_null(BaselineKind::Adf, 100, BaseLag::Fixed(0), 4000, 7);
        let q05 = q[2];
        assert!((-3.1..=-2.7).contains(&q05), "{q05}");
    }
}
