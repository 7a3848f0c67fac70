//! Correspondence quality metrics.
//!
//! Per-vertex error is the geodesic distance on the target shape between the
//! predicted image and the ground-truth image, normalized by the target's
//! diameter. Curves report the fraction of vertices at or under a threshold.

use crate::error::{Error, Result};
use crate::mesh::GeodesicField;
use crate::perm::Permutation;

/// Threshold grid for correspondence curves: 0 to 0.15 in steps of 0.0015.
pub fn pck_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 * 0.0015).collect()
}

/// Normalized geodesic error per vertex of the source shape.
pub fn geodesic_error(
    pred: &Permutation,
    truth: &Permutation,
    target: &GeodesicField,
) -> Result<Vec<f64>> {
    if pred.len() != truth.len() {
        return Err(Error::dim(format!(
            "prediction maps {} vertices, ground truth {}",
            pred.len(),
            truth.len()
        )));
    }
    if pred.len() != target.n() {
        return Err(Error::dim(format!(
            "maps cover {} vertices, target field has {}",
            pred.len(),
            target.n()
        )));
    }
    let diam = target.diameter();
    if !(diam > 0.0) {
        return Err(Error::param("target shape has zero diameter"));
    }
    Ok((0..pred.len())
        .map(|v| target.matrix().get(pred.apply(v), truth.apply(v)) / diam)
        .collect())
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    /// (threshold, fraction of errors <= threshold) per grid point.
    pub curve: Vec<(f64, f64)>,
    /// Trapezoidal area under the curve, normalized by the threshold span.
    pub auc: f64,
}

/// Accuracy curve and area for a pooled error sample.
pub fn pck_auc(errors: &[f64], grid: &[f64]) -> Result<EvalReport> {
    if errors.is_empty() {
        return Err(Error::param("no errors to evaluate"));
    }
    if grid.len() < 2 {
        return Err(Error::param("threshold grid needs at least 2 points"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("threshold grid must be strictly increasing"));
    }
    let n = errors.len() as f64;
    let curve: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| {
            let hits = errors.iter().filter(|&&e| e <= t).count();
            (t, hits as f64 / n)
        })
        .collect();
    let mut area = 0.0;
    for w in curve.windows(2) {
        let (t0, f0) = w[0];
        let (t1, f1) = w[1];
        area += 0.5 * (f0 + f1) * (t1 - t0);
    }
    let span = grid[grid.len() - 1] - grid[0];
    Ok(EvalReport { curve, auc: area / span })
}

/// Fraction of errors at or under a single threshold.
pub fn pck_at(errors: &[f64], threshold: f64) -> f64 {
    if errors.is_empty() {
        return 0.0;
    }
    errors.iter().filter(|&&e| e <= threshold).count() as f64 / errors.len() as f64
}
