//! Difficulty grids keyed in exact tenths of a logit.
//!
//! Specified difficulties live on a 0.1-step grid, so binning and map keys
//! use an integer count of tenths rather than raw floats. That keeps curve
//! keys exact, ordered, and hashable.

use std::fmt;

use crate::rasch::RaschError;

/// A logit value held as an integer number of tenths (`Tenths(-20)` is -2.0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tenths(pub i32);

impl Tenths {
    /// Nearest grid key for an arbitrary logit.
    pub fn from_logit(value: f64) -> Self {
        Tenths((value * 10.0).round() as i32)
    }

    pub fn to_logit(self) -> f64 {
        f64::from(self.0) / 10.0
    }
}

impl fmt::Display for Tenths {
    /// One-decimal fixed notation with an explicit minus sign: `-2.0`, `0.0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1}", self.to_logit())
    }
}

/// Inclusive arithmetic sequence from `min` to `max` in steps of `step`,
/// with every value rounded to one decimal place.
pub fn difficulty_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, RaschError> {
    if !min.is_finite() || !max.is_finite() || !step.is_finite() {
        return Err(RaschError::NonFinite {
            name: "grid bound",
            value: if min.is_finite() { max } else { min },
        });
    }
    if step <= 0.0 || min > max {
        return Err(RaschError::InvalidGrid(format!(
            "need step > 0 and min <= max, got min={min}, max={max}, step={step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let v = min + i as f64 * step;
            (v * 10.0).round() / 10.0
        })
        .collect())
}
