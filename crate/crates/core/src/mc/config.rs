//! Experiment grid files.
//!
//! ```text
//! # comment
//! reps = 10000              # keys before the first section are defaults
//! alpha = 0.05
//!
//! [iid-T300]                # one section per experiment
//! T = 100, 300              # list-valued keys expand to a grid
//! rho = 1, 0.9
//! init_var = 0, 5, 10       # or init_sd
//! trend = sharp-break
//! lambda = 3, 6, 9
//! errors = iid              # or ar1(0.5)
//! variance = const          # step(2), or `step` to reuse lambda
//! tests = tau-sb[0.7], tau-fb[0.2], adf
//! lags = bic5               # default lag for tests without an @suffix
//! ```
//!
//! Grid cells are ordered `init`, `T`, `rho`, `lambda` from outermost to
//! innermost.

use std::collections::BTreeMap;

use crate::baselines::BaseLag;
use crate::error::{Result, UrError};
use crate::testkit::LagRule;

use super::dgp::{DgpSpec, ErrorModel, VarianceFn};
use super::experiment::{parse_lag, TestId};
use super::trend::{TrendKind, TrendSpec};

const KEYS: [&str; 13] = [
    "T", "rho", "init_var", "init_sd", "trend", "lambda", "errors", "variance", "tests", "lags",
    "reps", "alpha", "seed",
];

/// One section of a grid file, expanded into DGP cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub cells: Vec<DgpSpec>,
    pub tests: Vec<TestId>,
    pub reps: usize,
    pub alpha: f64,
    /// Seed given in the file, if any.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default)]
struct Section {
    name: String,
    line: usize,
    keys: BTreeMap<String, (usize, String)>,
}

fn perr(line: usize, message: impl Into<String>) -> UrError {
    UrError::Parse {
        line,
        message: message.into(),
    }
}

fn list<T>(line: usize, key: &str, v: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    let items: Option<Vec<T>> = v.split(',').map(|s| f(s.trim())).collect();
    match items {
        Some(items) if !items.is_empty() => Ok(items),
        _ => Err(perr(line, format!("bad value for `{key}`: `{v}`"))),
    }
}

fn parse_call(s: &str, name: &str) -> Option<f64> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?.trim().parse().ok()
}

/// Splits a test list on commas that are not inside brackets.
fn split_tests(v: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in v.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(v[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(v[start..].trim());
    out.into_iter().filter(|s| !s.is_empty()).collect()
}

impl Section {
    fn get(&self, defaults: &Section, key: &str) -> Option<(usize, String)> {
        self.keys.get(key).or_else(|| defaults.keys.get(key)).cloned()
    }

    fn build(&self, defaults: &Section) -> Result<Experiment> {
        let get = |k: &str| self.get(defaults, k);
        let need = |k: &str| {
            get(k).ok_or_else(|| perr(self.line, format!("section [{}] lacks `{k}`", self.name)))
        };

        let (l, v) = need("T")?;
        let lens = list(l, "T", &v, |s| s.parse::<usize>().ok())?;
        let rhos = match get("rho") {
            Some((l, v)) => list(l, "rho", &v, |s| s.parse::<f64>().ok())?,
            None => vec![1.0],
        };
        let inits = match (get("init_var"), get("init_sd")) {
            (Some(_), Some(_)) => {
                return Err(perr(self.line, "give either `init_var` or `init_sd`, not both"))
            }
            (Some((l, v)), None) => list(l, "init_var", &v, |s| {
                s.parse::<f64>().ok().filter(|x| *x >= 0.0).map(f64::sqrt)
            })?,
            (None, Some((l, v))) => list(l, "init_sd", &v, |s| s.parse::<f64>().ok())?,
            (None, None) => vec![0.0],
        };
        let kind = match get("trend") {
            Some((l, v)) => {
                TrendKind::from_id(&v).ok_or_else(|| perr(l, format!("unknown trend `{v}`")))?
            }
            None => TrendKind::Zero,
        };
        let lambdas = match get("lambda") {
            Some((l, v)) => list(l, "lambda", &v, |s| s.parse::<f64>().ok())?,
            None => vec![0.0],
        };
        let errors = match get("errors") {
            None => ErrorModel::Iid,
            Some((_, v)) if v == "iid" => ErrorModel::Iid,
            Some((l, v)) => ErrorModel::Ar1(
                parse_call(&v, "ar1").ok_or_else(|| perr(l, format!("bad errors `{v}`")))?,
            ),
        };
        // None inside means "step break of size lambda"
        let variance: Option<VarianceFn> = match get("variance") {
            None => Some(VarianceFn::Const),
            Some((_, v)) if v == "const" => Some(VarianceFn::Const),
            Some((_, v)) if v == "step" => None,
            Some((l, v)) => Some(VarianceFn::StepBreak(
                parse_call(&v, "step").ok_or_else(|| perr(l, format!("bad variance `{v}`")))?,
            )),
        };
        let default_lag = match get("lags") {
            Some((l, v)) => {
                Some(parse_lag(&v).ok_or_else(|| perr(l, format!("bad lags `{v}`")))?)
            }
            None => None,
        };
        let (l, v) = need("tests")?;
        let mut tests = Vec::new();
        for item in split_tests(&v) {
            let mut id: TestId = item.parse().map_err(|e: UrError| perr(l, e.to_string()))?;
            if let (Some(lag), false) = (default_lag, item.contains('@')) {
                id = match id {
                    TestId::Pooled(spec) => TestId::Pooled(spec.with_lag(lag)),
                    TestId::Baseline(mut spec) => {
                        spec.lag = match lag {
                            LagRule::Fixed(p) => BaseLag::Fixed(p),
                            LagRule::Bic(p) => BaseLag::Bic(p),
                            LagRule::Schwert => {
                                return Err(perr(l, "`schwert` lags are not available for baseline tests"))
                            }
                        };
                        TestId::Baseline(spec)
                    }
                };
            }
            tests.push(id);
        }
        if tests.is_empty() {
            return Err(perr(l, "empty test list"));
        }
        let reps = match get("reps") {
            Some((l, v)) => v.parse().map_err(|_| perr(l, format!("bad reps `{v}`")))?,
            None => 10_000,
        };
        let alpha = match get("alpha") {
            Some((l, v)) => v.parse().map_err(|_| perr(l, format!("bad alpha `{v}`")))?,
            None => 0.05,
        };
        let seed = match get("seed") {
            Some((l, v)) => Some(v.parse().map_err(|_| perr(l, format!("bad seed `{v}`")))?),
            None => None,
        };

        let mut cells = Vec::new();
        for &init_sd in &inits {
            for &len in &lens {
                for &rho in &rhos {
                    for &lambda in &lambdas {
                        let cell = DgpSpec {
                            len,
                            rho,
                            trend: TrendSpec::new(kind, lambda),
                            errors,
                            variance: variance.unwrap_or(VarianceFn::StepBreak(lambda)),
                            init_sd,
                        };
                        cell.validate().map_err(|e| perr(self.line, e.to_string()))?;
                        cells.push(cell);
                    }
                }
            }
        }
        Ok(Experiment {
            name: self.name.clone(),
            cells,
            tests,
            reps,
            alpha,
            seed,
        })
    }
}

/// Parses a grid file into experiments, in file order.
pub fn parse_config(text: &str) -> Result<Vec<Experiment>> {
    let mut defaults = Section::default();
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| perr(line, format!("malformed section header `{content}`")))?;
            if sections.iter().any(|s| s.name == name) {
                return Err(perr(line, format!("duplicate section [{name}]")));
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                keys: BTreeMap::new(),
            });
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| perr(line, format!("expected `key = value`, got `{content}`")))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(perr(line, format!("unknown key `{k}`")));
        }
        let target = sections.last_mut().unwrap_or(&mut defaults);
        if target.keys.insert(k.to_string(), (line, v.to_string())).is_some() {
            return Err(perr(line, format!("duplicate key `{k}`")));
        }
    }
    if sections.is_empty() {
        return Err(perr(0, "no experiment sections"));
    }
    sections.iter().map(|s| s.build(&defaults)).collect()
}
