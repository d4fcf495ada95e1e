//! Recovering a representing measure from boundary limits of its function.
//!
//! All limits are taken along geometric sequences and extrapolated with
//! Neville's algorithm; the entry of the tableau with the smallest local
//! error estimate is returned.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::representation::{BoundaryMeasure, ExtendedReal};

/// Number of levels in the default boundary sequences.
pub const DEFAULT_LEVELS: usize = 12;
/// Residual bound for [`stoltz_verify`].
pub const STOLTZ_THRESHOLD: f64 = 1e-3;

const DIVERGENCE_FACTOR: f64 = 1e3;

/// Extrapolated limit with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limit {
    pub value: f64,
    pub error: f64,
}

/// `y_k = 0.1 · 2^{-k}` for `k < levels`.
pub fn default_y_seq(levels: usize) -> Vec<f64> {
    (0..levels).map(|k| 0.1 * 0.5f64.powi(k as i32)).collect()
}

fn check_sequence(y_seq: &[f64]) -> Result<()> {
    if y_seq.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 levels".into()));
    }
    if y_seq.iter().any(|y| !(y.is_finite() && *y > 0.0)) || y_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("y sequence must be positive and strictly decreasing".into()));
    }
    Ok(())
}

struct Extrapolant {
    value: Complex64,
    error: f64,
}

/// Neville extrapolation of `v(h)` to `h = 0`.
fn extrapolate(h: &[f64], v: &[Complex64], location: &str) -> Result<Extrapolant> {
    let n = h.len();
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    let floor = 1e-12 * (1.0 + scale);
    let mut prev: Vec<Complex64> = Vec::new();
    let mut best = Extrapolant { value: v[0], error: f64::INFINITY };
    let mut diag_diffs: Vec<f64> = Vec::new();
    for i in 0..n {
        let mut row = vec![v[i]];
        for j in 1..=i {
            let p = (prev[j - 1] * h[i] - row[j - 1] * h[i - j]) / (h[i] - h[i - j]);
            let err = (p - row[j - 1]).norm().max((p - prev[j - 1]).norm());
            if err < best.error {
                best = Extrapolant { value: p, error: err };
            }
            row.push(p);
        }
        if i > 0 {
            diag_diffs.push((row[i] - prev[i - 1]).norm());
        }
        prev = row;
    }
    for w in diag_diffs.windows(3) {
        if w[0] > floor && w[1] > DIVERGENCE_FACTOR * w[0] && w[2] > DIVERGENCE_FACTOR * w[1] {
            return Err(Error::NoConvergence {
                location: location.into(),
                reason: format!("extrapolants diverge ({:.3e} → {:.3e} → {:.3e})", w[0], w[1], w[2]),
            });
        }
    }
    Ok(best)
}

/// Stieltjes inversion: `lim_{y→0} Im φ(x+iy)/(π(1+x²))`.
///
/// Fails with `NoConvergence` when the samples keep growing like `1/y`,
/// which is the signature of an atom at `x`.
pub fn density_at<F>(evaluator: F, x: f64, y_seq: &[f64]) -> Result<Limit>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    check_sequence(y_seq)?;
    let norm = PI * (1.0 + x * x);
    let samples = y_seq
        .iter()
        .map(|&y| Ok(evaluator(Complex64::new(x, y))?.im / norm))
        .collect::<Result<Vec<f64>>>()?;
    let location = format!("x = {x}");
    let k = samples.len();
    let growing = (k - 3..k).all(|i| {
        let ratio = y_seq[i - 1] / y_seq[i];
        samples[i] > 0.9 * ratio * samples[i - 1] && samples[i - 1] > 0.0
    });
    if growing && samples[k - 1] * y_seq[k - 1] > 1e-12 {
        return Err(Error::NoConvergence {
            location,
            reason: "samples grow like 1/y (atom)".into(),
        });
    }
    let v: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    let e = extrapolate(y_seq, &v, &location)?;
    Ok(Limit { value: e.value.re, error: e.error })
}

/// `lim_{y→∞} Im φ(iy)/y`, sampled at `y = 4^k ≤ 1e8` and extrapolated in `1/y`.
pub fn mass_at_infinity<F>(evaluator: F) -> Result<Limit>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let ys: Vec<f64> = (0..14).map(|k| 4f64.powi(k)).collect();
    let v = ys
        .iter()
        .map(|&y| Ok(Complex64::new(evaluator(Complex64::new(0.0, y))?.im / y, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = ys.iter().map(|y| 1.0 / y).collect();
    let e = extrapolate(&h, &v, "∞")?;
    Ok(Limit { value: e.value.re, error: e.error })
}

/// `lim_{y→0} y φ(c+iy) / (i(1+c²))`, the mass of the atom at `c`.
pub fn atom_mass_at<F>(evaluator: F, c: f64) -> Result<Limit>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    atom_mass_with(evaluator, c, &default_y_seq(DEFAULT_LEVELS))
}

pub fn atom_mass_with<F>(evaluator: F, c: f64, y_seq: &[f64]) -> Result<Limit>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    check_sequence(y_seq)?;
    let unit = Complex64::new(0.0, 1.0 + c * c);
    let v = y_seq
        .iter()
        .map(|&y| Ok(evaluator(Complex64::new(c, y))? * y / unit))
        .collect::<Result<Vec<_>>>()?;
    let e = extrapolate(y_seq, &v, &format!("c = {c}"))?;
    Ok(Limit { value: e.value.re, error: e.error })
}

/// Nontangential cone `{|x − c| < y tan(aperture)}`, or
/// `{|x| < y tan(aperture)}` read near `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoltzSector {
    pub apex: ExtendedReal,
    pub aperture: f64,
}

impl StoltzSector {
    pub fn new(apex: ExtendedReal, aperture: f64) -> Result<Self> {
        if !(aperture > 0.0 && aperture < PI / 2.0) {
            return Err(Error::InvalidArgument(format!("aperture {aperture} not in (0, π/2)")));
        }
        Ok(Self { apex, aperture })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let x = match self.apex {
            ExtendedReal::Finite(c) => z.re - c,
            ExtendedReal::Infinity => z.re,
        };
        z.im > 0.0 && x.abs() < z.im * self.aperture.tan()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoltzReport {
    pub sector: StoltzSector,
    /// Max residual over the decade nearest the apex.
    pub final_residual: f64,
    /// Max residual over the decade farthest from the apex.
    pub initial_residual: f64,
    /// `sup |φ(z)/y|` over sampled points with `y ≥ b` (apex `∞`), or
    /// `sup |y φ(z)|` over sampled points with `y ≤ b` (finite apex).
    pub supremum: f64,
    pub b: f64,
    pub samples: usize,
}

/// Samples the limit quantity of the Stoltz proposition on five rays of the
/// sector at geometrically spaced distances `1 … 1e8` from `i`-direction
/// (`∞` apex) or `1 … 1e-8` from `c`.
///
/// Fails with `ViolationDetected` at the worst point of the final decade if
/// the residual there exceeds [`STOLTZ_THRESHOLD`] or exceeds the residual of
/// the first decade.
pub fn stoltz_verify<F>(
    evaluator: F,
    lambda: &BoundaryMeasure,
    sector: StoltzSector,
    samples: usize,
    b: f64,
) -> Result<StoltzReport>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples per ray".into()));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("b = {b} must be positive")));
    }
    let rays = 5;
    let mass = lambda
        .atoms()
        .iter()
        .filter(|a| match (a.loc, sector.apex) {
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => true,
            (ExtendedReal::Finite(s), ExtendedReal::Finite(c)) => (s - c).abs() <= 1e-12 * (1.0 + c.abs()),
            _ => false,
        })
        .map(|a| a.mass)
        .sum::<f64>();
    let (start, end) = match sector.apex {
        ExtendedReal::Infinity => (0.0, 8.0),
        ExtendedReal::Finite(_) => (0.0, -8.0),
    };
    let mut report = StoltzReport {
        sector,
        final_residual: 0.0,
        initial_residual: 0.0,
        supremum: 0.0,
        b,
        samples,
    };
    let mut witness = Complex64::new(0.0, 0.0);
    for j in 0..rays {
        let psi = 0.95 * sector.aperture * (2.0 * j as f64 / (rays - 1) as f64 - 1.0);
        let dir = Complex64::new(psi.sin(), psi.cos());
        for k in 0..samples {
            let e = start + (end - start) * k as f64 / (samples - 1) as f64;
            let r = 10f64.powf(e);
            let (z, residual, sup_term) = match sector.apex {
                ExtendedReal::Infinity => {
                    let z = dir * r;
                    let w = evaluator(z)?;
                    let res = ((w - z * mass) / z.im).norm();
                    (z, res, (z.im >= b).then(|| (w / z.im).norm()))
                }
                ExtendedReal::Finite(c) => {
                    let z = dir * r + c;
                    let w = evaluator(z)?;
                    let res = ((w + (1.0 + c * c) * mass / (z - c)) * z.im).norm();
                    (z, res, (z.im <= b).then(|| (w * z.im).norm()))
                }
            };
            if let Some(s) = sup_term {
                report.supremum = report.supremum.max(s);
            }
            if (e - start).abs() <= 1.0 {
                report.initial_residual = report.initial_residual.max(residual);
            }
            if (end - e).abs() <= 1.0 && residual >= report.final_residual {
                report.final_residual = residual;
                witness = z;
            }
        }
    }
    let decays = report.final_residual <= report.initial_residual * (1.0 + 1e-9) + 1e-12;
    if report.final_residual > STOLTZ_THRESHOLD || !decays || !report.supremum.is_finite() {
        return Err(Error::ViolationDetected { point: witness, residual: report.final_residual });
    }
    Ok(report)
}

/// Heuristic support estimate: closed intervals of `ℝ` plus a flag for `∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySupportEstimate {
    pub intervals: Vec<(f64, f64)>,
    pub includes_infinity: bool,
    pub threshold: f64,
}

/// Marks the grid cells whose endpoints or midpoint carry an apparent
/// density `(Im φ(x + i y_probe) − λ({∞}) y_probe)/(π(1+x²))` above
/// `threshold`, or whose endpoints carry an atom above `threshold`, and
/// merges neighbours. `∞` is included when its mass exceeds `threshold`.
///
/// Only a heuristic: thin supports and tiny masses can be missed, and the
/// Poisson smoothing at height `y_probe` widens everything.
pub fn support_estimate<F>(evaluator: F, grid: &[f64], y_probe: f64, threshold: f64) -> Result<BoundarySupportEstimate>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("grid must be finite and strictly increasing".into()));
    }
    if !(y_probe > 0.0) {
        return Err(Error::InvalidArgument("y_probe must be positive".into()));
    }
    let infinity = mass_at_infinity(&evaluator).map(|l| l.value).unwrap_or(0.0);
    let apparent = |x: f64| -> Result<f64> {
        let w = evaluator(Complex64::new(x, y_probe))?;
        Ok((w.im - infinity * y_probe) / (PI * (1.0 + x * x)))
    };
    let node_flags = grid
        .par_iter()
        .map(|&x| {
            let atom = atom_mass_at(&evaluator, x).map(|l| l.value > threshold).unwrap_or(true);
            Ok(atom || apparent(x)? > threshold)
        })
        .collect::<Result<Vec<bool>>>()?;
    let cell_flags = grid
        .par_windows(2)
        .map(|w| Ok(apparent(0.5 * (w[0] + w[1]))? > threshold))
        .collect::<Result<Vec<bool>>>()?;
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut push = |lo: f64, hi: f64| match intervals.last_mut() {
        Some(last) if last.1 >= lo => last.1 = last.1.max(hi),
        _ => intervals.push((lo, hi)),
    };
    for (i, w) in grid.windows(2).enumerate() {
        if cell_flags[i] {
            push(w[0], w[1]);
        } else if node_flags[i] {
            push(w[0], w[0]);
        }
    }
    if node_flags[grid.len() - 1] {
        let x = grid[grid.len() - 1];
        push(x, x);
    }
    Ok(BoundarySupportEstimate {
        intervals,
        includes_infinity: infinity > threshold,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{eval, eval_atomic};
    use crate::representation::{Atom, DensitySpec, HerglotzFunction};
    use proptest::prelude::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn ys() -> Vec<f64> {
        default_y_seq(DEFAULT_LEVELS)
    }

    fn phi_s(s: f64) -> impl Fn(Complex64) -> Result<Complex64> {
        move |z| Ok(eval_atomic(ExtendedReal::Finite(s), z))
    }

    #[test]
    fn density_examples() {
        let d = density_at(|z| Ok(z + I), 0.0, &ys()).unwrap();
        assert!((d.value - 1.0 / PI).abs() < 1e-14);
        for x in [-3.0, 0.0, 2.5] {
            assert!(density_at(|z| Ok(z), x, &ys()).unwrap().value.abs() < 1e-14);
        }
        assert!(density_at(|z| Ok(z), 0.0, &[0.1, 0.2, 0.05]).is_err());
        assert!(density_at(|z| Ok(z), 0.0, &[0.1, 0.05]).is_err());
    }

    #[test]
    fn density_of_cauchy_measure_near_real_line() {
        // φ(z) = i has density 1/(π(1+x²))
        for x in [-10.0, -0.3, 0.0, 4.0] {
            let d = density_at(|_| Ok(I), x, &ys()).unwrap();
            assert!((d.value - 1.0 / (PI * (1.0 + x * x))).abs() < 1e-14);
        }
    }

    #[test]
    fn atom_signals_no_convergence() {
        for s in [-1.0, 0.0, 0.7] {
            let err = density_at(phi_s(s), s, &ys()).unwrap_err();
            assert!(matches!(err, Error::NoConvergence { .. }), "{err}");
            let d = density_at(phi_s(s), s + 0.3, &ys()).unwrap();
            assert!(d.value.abs() < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn extrapolation_detects_blow_up() {
        // a 1/h singularity makes the diagonal of the tableau run away
        let h: Vec<f64> = (0..12).map(|k| 0.5f64.powi(k)).collect();
        let v: Vec<Complex64> = h.iter().map(|h| Complex64::new(1.0 / h.powi(11), 0.0)).collect();
        assert!(extrapolate(&h, &v, "test").is_err());
        let v: Vec<Complex64> = h.iter().map(|h| Complex64::new(1.0 + h + h * h, 0.0)).collect();
        let e = extrapolate(&h, &v, "test").unwrap();
        assert!((e.value.re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn mass_at_infinity_examples() {
        let m = mass_at_infinity(|z| Ok(z * 3.0 + Complex64::new(1.0, 2.0))).unwrap();
        assert!((m.value - 3.0).abs() < 1e-12);
        for s in [-2.0, 0.0, 5.0] {
            assert!(mass_at_infinity(phi_s(s)).unwrap().value.abs() < 1e-12);
        }
        // 2z − 1/z: atom 2 at ∞ and 1 at 0
        let f = |z: Complex64| Ok(z * 2.0 - 1.0 / z);
        let m = mass_at_infinity(f).unwrap();
        assert!((m.value - 2.0).abs() < 1e-12);
        let a = atom_mass_at(f, 0.0).unwrap();
        assert!((a.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn atom_mass_examples() {
        for s in [-3.0, 0.0, 0.5, 10.0] {
            let m = atom_mass_at(phi_s(s), s).unwrap();
            assert!((m.value - 1.0).abs() < 1e-12, "{m:?}");
            assert!(atom_mass_at(phi_s(s), s + 1.0).unwrap().value.abs() < 1e-12);
        }
        let (a, b, c0) = (-1.5, 0.4, 0.8);
        let f = |z: Complex64| Ok(a / (z + c0) + b);
        let m = atom_mass_at(f, -c0).unwrap();
        assert!((m.value + a / (1.0 + c0 * c0)).abs() < 1e-12);
    }

    #[test]
    fn stoltz_examples() {
        for aperture in [PI / 6.0, PI / 3.0, 1.5] {
            let inf = StoltzSector::new(ExtendedReal::Infinity, aperture).unwrap();
            let lambda = BoundaryMeasure::atom(ExtendedReal::Infinity, 1.0).unwrap();
            let r = stoltz_verify(|z| Ok(z), &lambda, inf, 17, 1.0).unwrap();
            assert_eq!(r.final_residual, 0.0);
            assert!((r.supremum - 1.0 / (0.95 * aperture).cos()).abs() < 1e-12);

            let s = 0.4;
            let at_s = StoltzSector::new(ExtendedReal::Finite(s), aperture).unwrap();
            let lambda = BoundaryMeasure::atom(ExtendedReal::Finite(s), 1.0).unwrap();
            let r = stoltz_verify(phi_s(s), &lambda, at_s, 17, 1.0).unwrap();
            assert!(r.final_residual < 1e-6, "{r:?}");
            // forgetting the atom leaves y φ → i(1+s²)
            let err = stoltz_verify(phi_s(s), &BoundaryMeasure::zero(), at_s, 17, 1.0).unwrap_err();
            assert!(matches!(err, Error::ViolationDetected { .. }));

            let density = DensitySpec::rational(vec![1.0], vec![1.0, 0.0, 1.0]).unwrap();
            let lambda = BoundaryMeasure::from_density(density).unwrap();
            let phi = HerglotzFunction::new(0.0, lambda.clone()).unwrap();
            let r = stoltz_verify(|z| eval(&phi, z, 1e-12), &lambda, inf, 17, 1.0).unwrap();
            assert!(r.final_residual < 1e-5, "{r:?}");
        }
        assert!(StoltzSector::new(ExtendedReal::Infinity, PI / 2.0).is_err());
    }

    #[test]
    fn support_examples() {
        let grid: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.1).collect();
        let est = support_estimate(phi_s(1.0), &grid, 1e-3, 1e-2).unwrap();
        assert_eq!(est.intervals.len(), 1);
        let (lo, hi) = est.intervals[0];
        assert!(lo <= 1.0 && hi >= 1.0 && hi - lo <= 0.4 + 1e-12, "{est:?}");
        assert!(!est.includes_infinity);

        let est = support_estimate(|z| Ok(z + 5.0), &grid, 1e-3, 1e-2).unwrap();
        assert!(est.intervals.is_empty() && est.includes_infinity);

        let nodes: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
        let values = vec![1.0; nodes.len()];
        let density = DensitySpec::grid(nodes, values, 0.0).unwrap();
        let phi = HerglotzFunction::new(0.0, BoundaryMeasure::from_density(density).unwrap()).unwrap();
        let est = support_estimate(|z| eval(&phi, z, 1e-10), &grid, 1e-3, 1e-2).unwrap();
        assert_eq!(est.intervals.len(), 1, "{est:?}");
        let (lo, hi) = est.intervals[0];
        assert!((lo + 0.1).abs() < 0.11 && (hi - 1.1).abs() < 0.11, "{est:?}");
    }

    fn arb_measure() -> impl Strategy<Value = (Vec<(f64, f64)>, f64, f64, f64)> {
        (
            prop::collection::btree_map(-20i32..20, 0.1..2.0f64, 0..5),
            0.1..3.0f64,
            -2.0..2.0f64,
            0.3..2.0f64,
        )
            .prop_map(|(atoms, k, c, w)| {
                let atoms = atoms.into_iter().map(|(i, m)| (i as f64 * 0.25, m)).collect();
                (atoms, k, c, w)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn roundtrip((atoms, k, center, width) in arb_measure(), inf in 0.0..2.0f64) {
            let den = vec![center * center + width * width, -2.0 * center, 1.0];
            let density = DensitySpec::rational(vec![k], den).unwrap();
            let mut list: Vec<Atom> = atoms.iter().map(|&(x, m)| Atom::finite(x, m)).collect();
            if inf > 0.5 {
                list.push(Atom::infinity(inf));
            }
            let lambda = BoundaryMeasure::new(list, Some(density.clone())).unwrap();
            let phi = HerglotzFunction::new(0.3, lambda).unwrap();
            let ev = |z| eval(&phi, z, 1e-12);
            for &(x, m) in &atoms {
                let got = atom_mass_at(ev, x).unwrap().value;
                prop_assert!((got - m).abs() <= 1e-4 * m, "{got} vs {m}");
                prop_assert!(density_at(ev, x, &ys()).is_err());
            }
            for j in 0..8 {
                let x = -2.375 + 0.5 * j as f64 + 0.0625;
                let got = density_at(ev, x, &ys()).unwrap().value;
                prop_assert!((got - density.value(x)).abs() < 1e-6, "x={x}: {got} vs {}", density.value(x));
                prop_assert!(atom_mass_at(ev, x).unwrap().value.abs() < 1e-6);
            }
            let m = mass_at_infinity(ev).unwrap().value;
            let expected = if inf > 0.5 { inf } else { 0.0 };
            prop_assert!((m - expected).abs() <= 1e-6 * expected.max(1.0));
        }

        #[test]
        fn aperture_monotonicity(s in -3.0..3.0f64, a0 in 0.1..1.0f64, grow in 0.0..0.5f64) {
            let lambda = BoundaryMeasure::atom(ExtendedReal::Finite(s), 1.0).unwrap();
            for apex in [ExtendedReal::Finite(s), ExtendedReal::Infinity] {
                let small = StoltzSector::new(apex, a0).unwrap();
                let large = StoltzSector::new(apex, a0 + grow).unwrap();
                if stoltz_verify(phi_s(s), &lambda, small, 9, 0.5).is_ok() {
                    prop_assert!(stoltz_verify(phi_s(s), &lambda, large, 9, 0.5).is_ok());
                }
            }
        }
    }
}
