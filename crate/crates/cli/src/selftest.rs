//! Closed-form examples with known answers.

use num_complex::Complex64;
use serde_json::{json, Value};

use pickfn::cayley::{disk_to_halfplane, halfplane_to_disk};
use pickfn::evaluation::{eval, eval_atomic, eval_composed};
use pickfn::inversion::{atom_mass_at, default_y_seq, density_at, mass_at_infinity, DEFAULT_LEVELS};
use pickfn::moebius::{EndoClass, Endomatrix, Matrix2C};
use pickfn::positivity::{affine_check, linear_fractional_check};
use pickfn::rational::{check_rational, RationalFunction};
use pickfn::transform::{angle_nodes, semigroup_check, transform_function};
use pickfn::{Atom, BoundaryMeasure, ExtendedReal, HerglotzFunction};

use crate::{Failure, Global};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

type Check = (&'static str, Box<dyn Fn(f64) -> pickfn::Result<f64>>, f64);

fn checks() -> Vec<Check> {
    vec![
        (
            "identity evaluates to its argument",
            Box::new(|tol| {
                let phi = HerglotzFunction::new(0.0, BoundaryMeasure::new(vec![Atom::infinity(1.0)], None)?)?;
                Ok((eval(&phi, c(2.0, 3.0), tol)? - c(2.0, 3.0)).norm())
            }),
            1e-12,
        ),
        (
            "atomic functions fix i",
            Box::new(|_| {
                let locs = [-3.0, -0.5, 0.0, 1.0, 7.5].map(ExtendedReal::Finite);
                Ok(locs.iter().chain([&ExtendedReal::Infinity]).map(|&s| (eval_atomic(s, c(0.0, 1.0)) - c(0.0, 1.0)).norm()).fold(0.0, f64::max))
            }),
            1e-15,
        ),
        (
            "z + i is a contact line with offset 1",
            Box::new(|_| {
                let m = Matrix2C::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0))?;
                Ok(match m.classify()? {
                    EndoClass::ContactLine { offset } => (offset - 1.0).abs(),
                    _ => 1.0,
                })
            }),
            1e-12,
        ),
        (
            "semigroup law for atomic matrices",
            Box::new(|tol| {
                let m = Endomatrix::new(Matrix2C::atomic(ExtendedReal::Finite(0.5)))?;
                let n = Endomatrix::new(Matrix2C::atomic(ExtendedReal::Finite(-2.0)))?;
                let grid: Vec<ExtendedReal> = angle_nodes(50).into_iter().map(ExtendedReal::from_angle).collect();
                let f = |s: ExtendedReal| c(s.finite().map_or(0.0, |x| 1.0 / (1.0 + x * x)), 0.0);
                semigroup_check(&m, &n, f, &grid, tol)
            }),
            1e-8,
        ),
        (
            "log has density 1/(1+x²) on the negative axis",
            Box::new(|_| {
                let l = density_at(|z: Complex64| Ok(z.ln()), -1.0, &default_y_seq(DEFAULT_LEVELS))?;
                Ok((l.value - 0.5).abs())
            }),
            1e-8,
        ),
        (
            "-1/z has unit mass at 0",
            Box::new(|_| Ok((atom_mass_at(|z: Complex64| Ok(-1.0 / z), 0.0)?.value - 1.0).abs())),
            1e-8,
        ),
        (
            "2z + i has mass 2 at infinity",
            Box::new(|_| Ok((mass_at_infinity(|z: Complex64| Ok(2.0 * z + c(0.0, 1.0)))?.value - 2.0).abs())),
            1e-8,
        ),
        (
            "-1/z is certified as an endofunction",
            Box::new(|_| {
                let cert = check_rational(&RationalFunction::from_real(&[-1.0], &[0.0, 1.0])?)?;
                let mass = cert.measure.as_ref().map_or(0.0, |m| m.total_mass());
                Ok(if cert.verdict { (mass - 1.0).abs() } else { 1.0 })
            }),
            1e-10,
        ),
        (
            "1/z is refuted with a witness",
            Box::new(|_| {
                let cert = check_rational(&RationalFunction::from_real(&[1.0], &[0.0, 1.0])?)?;
                Ok(match cert.witness {
                    Some(w) if !cert.verdict && w.im > 0.0 && (1.0 / w).im < 0.0 => 0.0,
                    _ => 1.0,
                })
            }),
            0.0,
        ),
        (
            "linear-fractional and affine verdicts",
            Box::new(|_| {
                let ok = linear_fractional_check(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0))
                    && !linear_fractional_check(c(4.0, 0.0), c(0.0, 1.0), c(0.0, 1.0))
                    && affine_check(c(1.0, 0.0), c(0.0, 1.0))
                    && !affine_check(c(-1.0, 0.0), c(0.0, 1.0));
                Ok(if ok { 0.0 } else { 1.0 })
            }),
            0.0,
        ),
        (
            "Cayley maps are mutually inverse",
            Box::new(|_| {
                let z = c(0.3, -0.4);
                Ok((halfplane_to_disk(disk_to_halfplane(z)) - z).norm())
            }),
            1e-14,
        ),
        (
            "transform of an atom matches composition",
            Box::new(|tol| {
                let phi = HerglotzFunction::new(0.5, BoundaryMeasure::atom(ExtendedReal::Finite(1.0), 2.0)?)?;
                let m = Endomatrix::new(Matrix2C::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(2.0, 0.0))?)?;
                let t = transform_function(&phi, &m, tol)?;
                let z = c(-0.7, 0.4);
                Ok((eval(&t, z, tol)? - eval_composed(&phi, &m, z, tol)?).norm())
            }),
            1e-8,
        ),
    ]
}

pub fn run(g: &Global) -> Result<Value, Failure> {
    let mut results = Vec::new();
    let mut failed = 0;
    for (name, check, bound) in checks() {
        let (pass, detail) = match check(g.tol) {
            Ok(v) => (v <= bound, json!(v)),
            Err(e) => (false, json!(e.to_string())),
        };
        if !pass {
            failed += 1;
            eprintln!("FAIL {name}: {detail}");
        }
        results.push(json!({ "name": name, "pass": pass, "value": detail, "bound": bound }));
    }
    Ok(json!({ "passed": results.len() - failed, "failed": failed, "checks": results }))
}
