//! Math operations applied to a [`Series`] before it is plotted or sonified.
//!
//! Every operation is pure, keeps NaN gaps in place and leaves `x` untouched
//! except [`cut`]. Nonlinear operations require input already normalized to `[0, 1]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Series;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("series has no finite values")]
    AllNaN,
    #[error("value {value} at index {index} is outside [0, 1]; normalize first")]
    NotNormalized { index: usize, value: f64 },
    #[error("smoothing window {window} must be odd and between 1 and the series length {len}")]
    BadWindow { window: usize, len: usize },
    #[error("cut range [{lo}, {hi}] is invalid for a series of length {len}")]
    BadRange { lo: usize, hi: usize, len: usize },
}

impl TransformError {
    pub fn kind(&self) -> &'static str {
        match self {
            TransformError::AllNaN => "AllNaN",
            TransformError::NotNormalized { .. } => "NotNormalized",
            TransformError::BadWindow { .. } => "BadWindow",
            TransformError::BadRange { .. } => "BadRange",
        }
    }
}

/// A failing pipeline step and its position in the spec.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("step {step}: {source}")]
pub struct PipelineError {
    pub step: usize,
    #[source]
    pub source: TransformError,
}

/// One operation of a [`TransformSpec`]. Serialized as `{"op": "...", ...params}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformStep {
    Normalize,
    Invert,
    Log,
    Square,
    SquareRoot,
    Smooth { window: usize },
    Cut { lo: usize, hi: usize },
}

impl TransformStep {
    pub fn apply(&self, series: &Series) -> Result<Series, TransformError> {
        match *self {
            TransformStep::Normalize => normalize(series),
            TransformStep::Invert => invert(series),
            TransformStep::Log => log_scale(series),
            TransformStep::Square => square(series),
            TransformStep::SquareRoot => square_root(series),
            TransformStep::Smooth { window } => smooth(series, window),
            TransformStep::Cut { lo, hi } => cut(series, lo, hi),
        }
    }
}

/// Ordered list of steps, serialized as a bare JSON array.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransformSpec {
    pub steps: Vec<TransformStep>,
}

impl TransformSpec {
    pub fn new(steps: Vec<TransformStep>) -> Self {
        TransformSpec { steps }
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transform steps always serialize")
    }

    pub fn ends_with_normalize(&self) -> bool {
        matches!(self.steps.last(), Some(TransformStep::Normalize))
    }
}

fn finite_range(y: &[f64]) -> Result<(f64, f64), TransformError> {
    y.iter()
        .filter(|v| v.is_finite())
        .fold(None, |acc: Option<(f64, f64)>, &v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
        .ok_or(TransformError::AllNaN)
}

fn map_finite(series: &Series, f: impl Fn(f64) -> f64) -> Series {
    series.with_y(
        series
            .y()
            .iter()
            .map(|&v| if v.is_nan() { v } else { f(v) })
            .collect(),
    )
}

fn check_normalized(series: &Series) -> Result<(), TransformError> {
    match series
        .y()
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_nan() && !(0.0..=1.0).contains(*v))
    {
        Some((index, &value)) => Err(TransformError::NotNormalized { index, value }),
        None => Ok(()),
    }
}

/// Min-max scaling of finite values into `[0, 1]`. A constant series maps to 0.5.
pub fn normalize(series: &Series) -> Result<Series, TransformError> {
    let (lo, hi) = finite_range(series.y())?;
    if lo == hi {
        return Ok(map_finite(series, |_| 0.5));
    }
    let span = hi - lo;
    Ok(map_finite(series, |v| (v - lo) / span))
}

/// Reflects finite values about the midpoint of their range: `y' = min + max - y`.
pub fn invert(series: &Series) -> Result<Series, TransformError> {
    let (lo, hi) = finite_range(series.y())?;
    let sum = lo + hi;
    Ok(map_finite(series, |v| sum - v))
}

/// `log10(1 + 9y)`, which maps `[0, 1]` onto itself.
pub fn log_scale(series: &Series) -> Result<Series, TransformError> {
    check_normalized(series)?;
    Ok(map_finite(series, |v| (9.0f64).mul_add(v, 1.0).log10()))
}

pub fn square(series: &Series) -> Result<Series, TransformError> {
    check_normalized(series)?;
    Ok(map_finite(series, |v| v * v))
}

pub fn square_root(series: &Series) -> Result<Series, TransformError> {
    check_normalized(series)?;
    Ok(map_finite(series, f64::sqrt))
}

/// Centered moving average of odd width. Windows are truncated at the series
/// ends, NaN values are left out of each average, and a window holding only
/// NaN yields NaN.
pub fn smooth(series: &Series, window: usize) -> Result<Series, TransformError> {
    let y = series.y();
    let len = y.len();
    if window == 0 || window.is_multiple_of(2) || window > len {
        return Err(TransformError::BadWindow { window, len });
    }
    let half = window / 2;
    let out = (0..len)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(len - 1);
            let mut finite = y[lo..=hi].iter().filter(|v| !v.is_nan());
            let Some(&base) = finite.next() else {
                return f64::NAN;
            };
            // offsets from the first value keep a constant window exact
            let (offset, n) = finite.fold((0.0, 1usize), |(s, n), v| (s + (v - base), n + 1));
            base + offset / n as f64
        })
        .collect();
    Ok(series.with_y(out))
}

/// Inclusive sub-series `[lo, hi]`.
pub fn cut(series: &Series, lo: usize, hi: usize) -> Result<Series, TransformError> {
    let len = series.len();
    if lo > hi || hi >= len {
        return Err(TransformError::BadRange { lo, hi, len });
    }
    Ok(series.slice(lo, hi))
}

/// Applies the steps left to right, stopping at the first failure.
pub fn apply_pipeline(series: &Series, spec: &TransformSpec) -> Result<Series, PipelineError> {
    spec.steps
        .iter()
        .enumerate()
        .try_fold(series.clone(), |acc, (step, op)| {
            op.apply(&acc).map_err(|source| PipelineError { step, source })
        })
}
