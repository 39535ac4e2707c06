//! Closed-form color targets of the three strategies.

use super::StrategyError;

/// `w(w+1)/2`, the number of colors `R(w)` forces.
pub fn szemeredi_bound(w: u32) -> u64 {
    let w = u64::from(w);
    w * (w + 1) / 2
}

/// Per-level separator target of the two-dimensional strategy (strict).
pub fn theorem1_level_threshold(w: u32) -> f64 {
    let w = f64::from(w);
    2.0 * w - (2.0 * w).sqrt()
}

pub fn theorem1_total(w: u32) -> f64 {
    (1..=w).map(theorem1_level_threshold).sum()
}

/// Per-level separator target of the realizer-presented strategy (non-strict).
pub fn theorem2_level_threshold(w: u32, d: u32) -> Result<f64, StrategyError> {
    if d < 2 {
        return Err(StrategyError::BadParameters(format!("dimension must be at least 2, got {d}")));
    }
    let (w, d) = (f64::from(w), f64::from(d));
    Ok(2.0 * w - w / (d - 1.0) - (d - 2.0) / 2.0)
}

pub fn theorem2_total(w: u32, d: u32) -> Result<f64, StrategyError> {
    (1..=w).map(|i| theorem2_level_threshold(i, d)).sum()
}
