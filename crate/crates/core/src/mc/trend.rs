//! Deterministic trend shapes `d(r)` on `[0, 1]`, scaled by a size parameter `λ`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TrendKind {
    Zero,
    /// `λ 1{r <= 2/3}`
    SharpBreak,
    /// `λ 1{r <= 1/4} + λ 1{r > 3/4}`
    UShapedBreak,
    /// `λ (4r - 8/3) 1{r > 2/3}`: flat, then a kink at `2/3`.
    ContinuousBreak,
    /// `λ (4r 1{r > 2/3} - 8/3)`, the tabulated expression taken literally,
    /// which jumps by `8λ/3` at `2/3`.
    ContinuousBreakLiteral,
    /// `λ (r 1{r <= 1/4} + (r - 1) 1{1/4 < r <= 3/4} + r 1{r > 3/4})`
    UShapedIntercept,
    /// `λ / (1 + e^{20(r - 0.75)})`
    Lstar,
    /// `λ / (1 + e^{20(r - 0.2)}) - 0.5 λ / (1 + e^{20(r - 0.75)})`
    OffsettingLstar,
    /// `λ (2r 1{r <= 1/2} + 2(1 - r) 1{r > 1/2})`
    Triangular,
    /// `0.5 λ cos(2πr)`
    Fourier,
}

impl TrendKind {
    pub const ALL: [TrendKind; 10] = [
        TrendKind::Zero,
        TrendKind::SharpBreak,
        TrendKind::UShapedBreak,
        TrendKind::ContinuousBreak,
        TrendKind::ContinuousBreakLiteral,
        TrendKind::UShapedIntercept,
        TrendKind::Lstar,
        TrendKind::OffsettingLstar,
        TrendKind::Triangular,
        TrendKind::Fourier,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            TrendKind::Zero => "zero",
            TrendKind::SharpBreak => "sharp-break",
            TrendKind::UShapedBreak => "u-shaped-break",
            TrendKind::ContinuousBreak => "continuous-break",
            TrendKind::ContinuousBreakLiteral => "continuous-break-literal",
            TrendKind::UShapedIntercept => "u-shaped-intercept",
            TrendKind::Lstar => "lstar",
            TrendKind::OffsettingLstar => "offsetting-lstar",
            TrendKind::Triangular => "triangular",
            TrendKind::Fourier => "fourier",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        TrendKind::ALL.into_iter().find(|k| k.id() == id)
    }

    /// The shape at `λ = 1`.
    pub fn shape(&self, r: f64) -> f64 {
        let logistic = |c: f64| 1.0 / (1.0 + (20.0 * (r - c)).exp());
        match self {
            TrendKind::Zero => 0.0,
            TrendKind::SharpBreak => indicator(r <= 2.0 / 3.0),
            TrendKind::UShapedBreak => indicator(r <= 0.25) + indicator(r > 0.75),
            TrendKind::ContinuousBreak => (4.0 * r - 8.0 / 3.0) * indicator(r > 2.0 / 3.0),
            TrendKind::ContinuousBreakLiteral => 4.0 * r * indicator(r > 2.0 / 3.0) - 8.0 / 3.0,
            TrendKind::UShapedIntercept => {
                if r <= 0.25 {
                    r
                } else if r <= 0.75 {
                    r - 1.0
                } else {
                    r
                }
            }
            TrendKind::Lstar => logistic(0.75),
            TrendKind::OffsettingLstar => logistic(0.2) - 0.5 * logistic(0.75),
            TrendKind::Triangular => {
                if r <= 0.5 {
                    2.0 * r
                } else {
                    2.0 * (1.0 - r)
                }
            }
            TrendKind::Fourier => 0.5 * (2.0 * PI * r).cos(),
        }
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

impl fmt::Display for TrendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendSpec {
    pub kind: TrendKind,
    pub lambda: f64,
}

impl TrendSpec {
    pub fn new(kind: TrendKind, lambda: f64) -> Self {
        TrendSpec { kind, lambda }
    }

    pub fn zero() -> Self {
        TrendSpec::new(TrendKind::Zero, 0.0)
    }
}

/// `d(r)` for `r` in `[0, 1]`.
pub fn trend_value(spec: &TrendSpec, r: f64) -> f64 {
    if spec.kind == TrendKind::Zero {
        return 0.0;
    }
    spec.lambda * spec.kind.shape(r)
}
