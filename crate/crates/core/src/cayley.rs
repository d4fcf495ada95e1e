//! Cayley transfer between the unit disk and the upper half-plane.
//!
//! `w = i(1 − z)/(1 + z)` sends `D` onto `C₊` and `e^{it}` to `tan(t/2)`;
//! a disk function `ϕ` with `Re ϕ ≥ 0` corresponds to `φ(w) = iϕ(z)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::evaluation::eval;
use crate::quadrature::{integrate, DEFAULT_MAX_INTERVALS};
use crate::representation::{Atom, BoundaryMeasure, DensitySpec, ExtendedReal, HerglotzFunction};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `i(1 − z)/(1 + z)`
pub fn disk_to_halfplane(z: Complex64) -> Complex64 {
    I * (1.0 - z) / (1.0 + z)
}

/// `(i − w)/(i + w)`
pub fn halfplane_to_disk(w: Complex64) -> Complex64 {
    (I - w) / (I + w)
}

/// `s = tan(t/2)`, with `t = π` (and anything beyond) going to `∞`.
pub fn boundary_param(t: f64) -> ExtendedReal {
    ExtendedReal::from_angle(t)
}

/// Density `g(t)` of `μ` against `dt`: piecewise linear through
/// `(angles, values)` and equal to `at_pi` on the arc through `t = π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskDensity {
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
    pub at_pi: f64,
}

impl DiskDensity {
    pub fn uniform(value: f64) -> Self {
        Self { angles: Vec::new(), values: Vec::new(), at_pi: value }
    }

    pub fn value(&self, t: f64) -> f64 {
        let n = self.angles.len();
        if n == 0 || t < self.angles[0] || t > self.angles[n - 1] {
            return self.at_pi;
        }
        let k = self.angles.partition_point(|&a| a <= t);
        if k == n {
            return self.values[n - 1];
        }
        let (a0, a1) = (self.angles[k - 1], self.angles[k]);
        let u = (t - a0) / (a1 - a0);
        self.values[k - 1] * (1.0 - u) + self.values[k] * u
    }
}

/// Positive measure on `T`, parametrized by `t ∈ (−π, π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskMeasure {
    /// `(t, mass)` pairs.
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pub density: Option<DiskDensity>,
}

impl DiskMeasure {
    fn validate(&self) -> Result<()> {
        for &(t, m) in &self.atoms {
            if !(t > -PI && t <= PI) || !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidMeasure(format!("bad disk atom ({t}, {m})")));
            }
        }
        if let Some(d) = &self.density {
            let ok = d.angles.len() == d.values.len()
                && d.angles.iter().all(|t| *t > -PI && *t < PI)
                && d.angles.windows(2).all(|w| w[1] > w[0])
                && d.values.iter().chain([&d.at_pi]).all(|v| v.is_finite() && *v >= 0.0);
            if !ok {
                return Err(Error::InvalidMeasure(
                    "disk density needs increasing angles in (−π, π) and nonnegative values".into(),
                ));
            }
        }
        Ok(())
    }
}

/// `ϕ(z) = i·imag_at_zero + (1/2π) ∫ (ζ + z)/(ζ − z) μ(dζ)` for `|z| < 1`.
pub fn eval_disk(mu: &DiskMeasure, imag_at_zero: f64, z: Complex64, tol: f64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::InvalidArgument(format!("{z} is not in the unit disk")));
    }
    let kernel = |t: f64| {
        let zeta = Complex64::from_polar(1.0, t);
        (zeta + z) / (zeta - z)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for &(t, m) in &mu.atoms {
        acc += kernel(t) * m;
    }
    if let Some(d) = &mu.density {
        let mut points = vec![-PI];
        points.extend(&d.angles);
        points.push(PI);
        acc += integrate(|t| kernel(t) * d.value(t), &points, tol, DEFAULT_MAX_INTERVALS)?.value;
    }
    Ok(I * imag_at_zero + acc / (2.0 * PI))
}

/// Half-plane function `φ(w) = iϕ(z)`: `λ` is `μ/2π` carried by
/// `t ↦ tan(t/2)` and `α = Re φ(i) = −Im ϕ(0)`.
///
/// The result is checked against [`eval_disk`] at ten paired points.
pub fn transfer_disk_measure(mu: &DiskMeasure, imag_at_zero: f64) -> Result<HerglotzFunction> {
    mu.validate()?;
    let atoms = mu
        .atoms
        .iter()
        .map(|&(t, m)| Atom::new(boundary_param(t), m / (2.0 * PI)))
        .collect();
    let density = match &mu.density {
        None => None,
        Some(d) => {
            // the weighted density π(1+s²)ρ(s) of λ is g(t)
            let nodes: Vec<f64> = d.angles.iter().map(|t| (0.5 * t).tan()).collect();
            let values = nodes
                .iter()
                .zip(&d.values)
                .map(|(s, g)| g / (PI * (1.0 + s * s)))
                .collect();
            Some(DensitySpec::grid(nodes, values, d.at_pi)?)
        }
    };
    let phi = HerglotzFunction::new(-imag_at_zero, BoundaryMeasure::new(atoms, density)?)?;
    for k in 0..10 {
        let z = Complex64::from_polar(0.1 + 0.08 * k as f64, 0.7 * k as f64 - 3.0);
        let disk = eval_disk(mu, imag_at_zero, z, 1e-11)? * I;
        let half = eval(&phi, disk_to_halfplane(z), 1e-11)?;
        if (disk - half).norm() > 1e-7 * (1.0 + disk.norm()) {
            return Err(Error::InvalidMeasure(format!(
                "transfer mismatch at z = {z}: {disk} vs {half}"
            )));
        }
    }
    Ok(phi)
}
