//! Simulated data: `y_t = d(t/T) + x_t`, `x_t = ρ x_{t-1} + u_t`,
//! `x_0 ~ N(0, σ_0²)`, with iid or AR(1) errors driven by innovations
//! `ε_t ~ N(0, σ²(t/T))`.

use std::fmt;

use serde::Serialize;

use crate::error::{Result, UrError};
use crate::rng::RngStream;
use crate::series::Series;

use super::trend::{trend_value, TrendSpec};

/// Draws discarded before `u_1` when errors are autoregressive.
pub const AR_BURN_IN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ErrorModel {
    Iid,
    /// `u_t = a u_{t-1} + ε_t` with `|a| < 1`.
    Ar1(f64),
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorModel::Iid => f.write_str("iid"),
            ErrorModel::Ar1(a) => write!(f, "ar1({a})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum VarianceFn {
    Const,
    /// `σ²(r) = 1 + λ_v 1{r <= 2/3}`
    StepBreak(f64),
}

impl VarianceFn {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            VarianceFn::Const => 1.0,
            VarianceFn::StepBreak(l) => {
                if r <= 2.0 / 3.0 {
                    1.0 + l
                } else {
                    1.0
                }
            }
        }
    }
}

impl fmt::Display for VarianceFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarianceFn::Const => f.write_str("const"),
            VarianceFn::StepBreak(l) => write!(f, "step({l})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DgpSpec {
    pub len: usize,
    pub rho: f64,
    pub trend: TrendSpec,
    pub errors: ErrorModel,
    pub variance: VarianceFn,
    /// Standard deviation of `x_0`.
    pub init_sd: f64,
}

impl DgpSpec {
    /// Driftless Gaussian random walk from zero.
    pub fn random_walk(len: usize) -> Self {
        DgpSpec {
            len,
            rho: 1.0,
            trend: TrendSpec::zero(),
            errors: ErrorModel::Iid,
            variance: VarianceFn::Const,
            init_sd: 0.0,
        }
    }

    pub fn with_rho(self, rho: f64) -> Self {
        DgpSpec { rho, ..self }
    }

    pub fn with_trend(self, trend: TrendSpec) -> Self {
        DgpSpec { trend, ..self }
    }

    pub fn with_errors(self, errors: ErrorModel) -> Self {
        DgpSpec { errors, ..self }
    }

    pub fn with_variance(self, variance: VarianceFn) -> Self {
        DgpSpec { variance, ..self }
    }

    pub fn with_init_sd(self, init_sd: f64) -> Self {
        DgpSpec { init_sd, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(UrError::InvalidArgument(m));
        if self.len < crate::series::MIN_LEN {
            return bad(format!("T = {} too small", self.len));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return bad(format!("rho must be in (0, 1], got {}", self.rho));
        }
        if !(self.init_sd >= 0.0 && self.init_sd.is_finite()) {
            return bad(format!("init_sd must be >= 0, got {}", self.init_sd));
        }
        if !self.trend.lambda.is_finite() {
            return bad("trend lambda must be finite".into());
        }
        if let ErrorModel::Ar1(a) = self.errors {
            if !(a.abs() < 1.0) {
                return bad(format!("AR(1) coefficient must satisfy |a| < 1, got {a}"));
            }
        }
        if let VarianceFn::StepBreak(l) = self.variance {
            if !(l > -1.0 && l.is_finite()) {
                return bad(format!("variance break must exceed -1, got {l}"));
            }
        }
        Ok(())
    }
}

/// `ρ = 1 - c/√(BT)`, the local alternative scale of the pooled tests.
pub fn local_rho(c: f64, blocklength: usize, len: usize) -> f64 {
    1.0 - c / ((blocklength * len) as f64).sqrt()
}

/// Draws one series. The draw order is `x_0`, then (AR errors only) the
/// stationary start and burn-in, then `ε_1..ε_T`.
pub fn simulate_dgp(spec: &DgpSpec, rng: RngStream) -> Result<Series> {
    spec.validate()?;
    Ok(Series::new(simulate_values(spec, rng)).expect("simulated values are finite"))
}

pub(crate) fn simulate_values(spec: &DgpSpec, rng: RngStream) -> Vec<f64> {
    let n = spec.len;
    let nf = n as f64;
    let mut g = rng.generator();
    let mut x = spec.init_sd * g.normal();
    let mut u = match spec.errors {
        ErrorModel::Iid => 0.0,
        ErrorModel::Ar1(a) => {
            let sd0 = spec.variance.eval(0.0).sqrt();
            let mut u = sd0 / (1.0 - a * a).sqrt() * g.normal();
            for _ in 0..AR_BURN_IN {
                u = a * u + sd0 * g.normal();
            }
            u
        }
    };
    let mut y = Vec::with_capacity(n);
    for t in 1..=n {
        let r = t as f64 / nf;
        let eps = spec.variance.eval(r).sqrt() * g.normal();
        u = match spec.errors {
            ErrorModel::Iid => eps,
            ErrorModel::Ar1(a) => a * u + eps,
        };
        x = spec.rho * x + u;
        y.push(trend_value(&spec.trend, r) + x);
    }
    y
}
