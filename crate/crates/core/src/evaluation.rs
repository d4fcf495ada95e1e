//! Evaluation of atomic and general Herglotz functions off the real line.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moebius::Endomatrix;
use crate::representation::{density_integral, ExtendedReal, HerglotzFunction};

/// A point of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint(Complex64);

impl UpperHalfPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
            Ok(Self(z))
        } else {
            Err(Error::InvalidArgument(format!("{z} is not in the upper half-plane")))
        }
    }

    pub fn get(self) -> Complex64 {
        self.0
    }
}

fn check_off_axis(z: Complex64) -> Result<()> {
    if z.im == 0.0 || !z.is_finite() {
        Err(Error::InvalidArgument(format!("evaluation point {z} must be finite and off the real line")))
    } else {
        Ok(())
    }
}

/// `φ_s(z) = (1 + s z)/(s − z)`, and `z` itself for `s = ∞`.
pub fn eval_atomic(s: ExtendedReal, z: Complex64) -> Complex64 {
    match s {
        ExtendedReal::Finite(s) => (1.0 + s * z) / (s - z),
        ExtendedReal::Infinity => z,
    }
}

/// `φ(z) = α + λ({∞}) z + ∫_ℝ φ_s(z) λ(ds)`.
///
/// Rational and pole densities are integrated in closed form; grid densities
/// by adaptive quadrature with absolute error `tol`.
pub fn eval(phi: &HerglotzFunction, z: Complex64, tol: f64) -> Result<Complex64> {
    eval_with(phi, z, tol, true)
}

/// Same as [`eval`] but always integrating the density numerically.
pub fn eval_quadrature(phi: &HerglotzFunction, z: Complex64, tol: f64) -> Result<Complex64> {
    eval_with(phi, z, tol, false)
}

fn eval_with(phi: &HerglotzFunction, z: Complex64, tol: f64, closed_form: bool) -> Result<Complex64> {
    check_off_axis(z)?;
    if z.im < 0.0 {
        return eval_with(phi, z.conj(), tol, closed_form).map(|w| w.conj());
    }
    let m = &phi.measure;
    let mut acc = Complex64::new(phi.alpha, 0.0);
    for atom in m.atoms() {
        acc += eval_atomic(atom.loc, z) * atom.mass;
    }
    if let Some(d) = m.density() {
        let exact = if closed_form { d.as_poles() } else { None };
        acc += match exact {
            Some(p) => p.herglotz(z),
            None => density_integral(d, |s| eval_atomic(ExtendedReal::Finite(s), z), &[z.re], tol)?,
        };
    }
    Ok(acc)
}

/// `φ(M.z)` evaluated directly.
pub fn eval_composed(phi: &HerglotzFunction, m: &Endomatrix, z: Complex64, tol: f64) -> Result<Complex64> {
    let z = UpperHalfPoint::new(z)?;
    eval(phi, m.apply(z.get()), tol)
}
