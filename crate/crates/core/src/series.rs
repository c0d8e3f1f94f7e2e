//! Validated time series and blocklength schemes.

use serde::{Deserialize, Serialize};

use crate::error::{Result, UrError};

/// Smallest series length any block scheme can work with (`2 <= B < T`).
pub const MIN_LEN: usize = 4;

/// Guard added before flooring so that `T^γ` or `b·T` landing a few ulps
/// under an integer still resolves to that integer.
const FLOOR_GUARD: f64 = 1e-9;

/// An ordered, finite, univariate time series of length at least [`MIN_LEN`].
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_LEN {
            return Err(UrError::SeriesTooShort {
                len: values.len(),
                min: MIN_LEN,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(UrError::NonFiniteValue { index });
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// True when every observation equals the first.
    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }

    /// First differences `y_t - y_{t-1}` for `t = 2..T` (length `T - 1`).
    pub fn diff(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Returns `a * y + c` as a new series.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        Series::new(self.values.iter().map(|v| scale * v + shift).collect())
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = UrError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Series::new(values)
    }
}

impl AsRef<[f64]> for Series {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// How the blocklength `B` is derived from the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlockScheme {
    /// `B = max(2, ⌊T^γ⌋)`, the small-b rule.
    PowerRule(f64),
    /// `B = max(2, ⌊b·T⌋)`, the fixed-b rule.
    FixedFraction(f64),
    /// A fixed blocklength.
    Explicit(usize),
}

impl BlockScheme {
    pub fn resolve(&self, len: usize) -> Result<usize> {
        resolve_blocklength(*self, len)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            BlockScheme::PowerRule(g) if !(g > 0.0 && g < 1.0) => Err(UrError::BadScheme(
                format!("power-rule exponent must lie in (0,1), got {g}"),
            )),
            BlockScheme::FixedFraction(b) if !(b > 0.0 && b < 1.0) => Err(UrError::BadScheme(
                format!("relative blocklength must lie in (0,1), got {b}"),
            )),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for BlockScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlockScheme::PowerRule(g) => write!(f, "B=T^{g}"),
            BlockScheme::FixedFraction(b) => write!(f, "B={b}T"),
            BlockScheme::Explicit(b) => write!(f, "B={b}"),
        }
    }
}

/// Resolves a block scheme against a sample size, enforcing `2 <= B < T`.
pub fn resolve_blocklength(scheme: BlockScheme, len: usize) -> Result<usize> {
    scheme.validate()?;
    if len < MIN_LEN {
        return Err(UrError::SeriesTooShort { len, min: MIN_LEN });
    }
    let t = len as f64;
    let b = match scheme {
        BlockScheme::PowerRule(g) => ((t.powf(g) + FLOOR_GUARD).floor() as usize).max(2),
        BlockScheme::FixedFraction(frac) => ((frac * t + FLOOR_GUARD).floor() as usize).max(2),
        BlockScheme::Explicit(b) => b,
    };
    if b < 2 || b >= len {
        return Err(UrError::SchemeInfeasible {
            blocklength: b,
            len,
        });
    }
    Ok(b)
}
