//! Closed-form endofunction criteria for linear-fractional and affine maps,
//! and a sampling test of positivity near the boundary support.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::inversion::BoundarySupportEstimate;

/// Samples at or above this value count as nonnegative.
pub const PASS_THRESHOLD: f64 = -1e-12;

/// `a/(z + c) + b` maps `C₊` into itself iff `Im b ≥ 0`, `Im c ≥ 0` and
/// `|a| + Re a ≤ 2 Im b Im c`. When `Im b Im c = 0` the last condition
/// says `a < 0`.
pub fn linear_fractional_check(a: Complex64, b: Complex64, c: Complex64) -> bool {
    if a == Complex64::new(0.0, 0.0) {
        return false;
    }
    b.im >= 0.0 && c.im >= 0.0 && a.norm() + a.re <= 2.0 * b.im * c.im
}

/// For `Im b Im c > 0`: nonnegativity on `ℝ` of
/// `β x² + x Im a − γ Re a + β γ²`, the numerator of `Im φ(x − Re c)`.
/// `None` outside that regime.
pub fn linear_fractional_quadratic_check(a: Complex64, b: Complex64, c: Complex64) -> Option<bool> {
    let (beta, gamma) = (b.im, c.im);
    if !(beta > 0.0 && gamma > 0.0) {
        return None;
    }
    let k0 = beta * gamma * gamma - gamma * a.re;
    // β x² + a.im x + k0 ≥ 0 on ℝ with β > 0
    Some(a.im * a.im <= 4.0 * beta * k0)
}

/// `a z + b` maps `C₊` into itself iff `a > 0` and `Im b ≥ 0`.
pub fn affine_check(a: Complex64, b: Complex64) -> bool {
    a.im == 0.0 && a.re > 0.0 && b.im >= 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of [`localized_positivity_check`]. A pass is sampling evidence
/// for positivity near the support, not a proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub verdict: Verdict,
    /// Smallest sampled `Im φ`.
    pub minimum: f64,
    /// Where it was attained; the witness on failure.
    pub at: Complex64,
    pub samples: usize,
    pub note: String,
}

/// Samples `Im φ` on `{x + iy : dist(x, support) ≤ margin, 0 < y ≤ margin}`
/// with `grid` points per direction (heights geometric down to
/// `1e-6 · margin`), and near `∞` through `z = −1/w` with `w` in the same
/// box around `0`. Infinite interval ends are clipped at `±1/margin`.
pub fn localized_positivity_check<F>(
    evaluator: F,
    support: &BoundarySupportEstimate,
    margin: f64,
    grid: usize,
) -> Result<PositivityReport>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let grid = grid.max(2);
    let margin = if margin > 0.0 && margin.is_finite() { margin } else { 1e-2 };
    let heights: Vec<f64> = (0..grid)
        .map(|k| margin * 10f64.powf(-6.0 * k as f64 / (grid - 1) as f64))
        .collect();
    let line = |lo: f64, hi: f64| -> Vec<f64> {
        (0..grid).map(|k| lo + (hi - lo) * k as f64 / (grid - 1) as f64).collect()
    };
    let clip = 1.0 / margin;
    let mut points: Vec<Complex64> = Vec::new();
    for &(lo, hi) in &support.intervals {
        let lo = lo.max(-clip) - margin;
        let hi = hi.min(clip) + margin;
        for x in line(lo, hi) {
            points.extend(heights.iter().map(|&y| Complex64::new(x, y)));
        }
    }
    if support.includes_infinity {
        for u in line(-margin, margin) {
            points.extend(heights.iter().map(|&v| -1.0 / Complex64::new(u, v)));
        }
    }
    let values = points
        .par_iter()
        .map(|&z| Ok(evaluator(z)?.im))
        .collect::<Result<Vec<f64>>>()?;
    let (minimum, at) = values
        .iter()
        .zip(&points)
        .fold((f64::INFINITY, Complex64::new(0.0, 0.0)), |best, (&v, &z)| {
            if v < best.0 { (v, z) } else { best }
        });
    let verdict = if minimum >= PASS_THRESHOLD { Verdict::Pass } else { Verdict::Fail };
    Ok(PositivityReport {
        verdict,
        minimum,
        at,
        samples: points.len(),
        note: "sampling evidence near the boundary support; not a proof of positivity".into(),
    })
}
