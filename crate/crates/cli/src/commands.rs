use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use pickfn::cayley::{boundary_param, disk_to_halfplane, halfplane_to_disk, transfer_disk_measure};
use pickfn::evaluation::{self, eval_composed};
use pickfn::inversion::{
    atom_mass_at, default_y_seq, density_at, mass_at_infinity, support_estimate, DEFAULT_LEVELS,
};
use pickfn::moebius::{Endomatrix, Matrix2C};
use pickfn::positivity::{affine_check, linear_fractional_check, localized_positivity_check};
use pickfn::rational::{check_rational as certify, RationalFunction};
use pickfn::transform::{angle_nodes, markov_apply, semigroup_check as law_deviation, transform_function};
use pickfn::ExtendedReal;

use crate::input::{CayleyInput, EvalInput, FunctionInput, PositivityInput, Probe, SemigroupInput, TransformInput};
use crate::{Failure, Global, GridArgs};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn probe(input: FunctionInput) -> Result<Probe, Failure> {
    Probe::try_from(input).map_err(Failure::Malformed)
}

fn linspace(g: &GridArgs) -> Result<Vec<f64>, Failure> {
    if g.nodes < 2 || !(g.grid_max > g.grid_min) {
        return Err(Failure::Domain("grid needs --nodes ≥ 2 and --grid-max > --grid-min".into()));
    }
    let h = (g.grid_max - g.grid_min) / (g.nodes - 1) as f64;
    Ok((0..g.nodes).map(|k| g.grid_min + h * k as f64).collect())
}

fn loc_value(s: ExtendedReal) -> Value {
    match s {
        ExtendedReal::Finite(x) => json!(x),
        ExtendedReal::Infinity => json!("inf"),
    }
}

pub fn eval_points(g: &Global, at: &[Complex64]) -> Result<Vec<Complex64>, Failure> {
    let points = if at.is_empty() { vec![I] } else { at.to_vec() };
    let input: EvalInput = g.parse()?;
    let f = |z: Complex64| -> pickfn::Result<Complex64> {
        match &input {
            EvalInput::Plain(phi) => evaluation::eval(phi, z, g.tol),
            EvalInput::Composed { phi, matrix } => eval_composed(phi, &Endomatrix::new(*matrix)?, z, g.tol),
            EvalInput::Builtin { builtin } => Ok(builtin.eval(z)),
        }
    };
    Ok(points.iter().map(|&z| f(z)).collect::<pickfn::Result<Vec<_>>>()?)
}

pub fn eval(g: &Global, at: &[Complex64]) -> Result<Value, Failure> {
    let values = eval_points(g, at)?;
    Ok(match values.as_slice() {
        [one] => to_value(one),
        many => to_value(&many),
    })
}

pub fn classify_matrix(m: Matrix2C) -> Result<Value, Failure> {
    let class = m.classify()?;
    let mut out = to_value(&class);
    out["kappa"] = class.kappa().map_or(Value::Null, |k| json!(k));
    Ok(out)
}

pub fn classify(g: &Global) -> Result<Value, Failure> {
    classify_matrix(g.parse()?)
}

pub fn transform(g: &Global, nodes: usize) -> Result<Value, Failure> {
    let input: TransformInput = g.parse()?;
    let m = Endomatrix::new(input.matrix)?;
    let out = transform_function(&input.phi, &m, g.tol)?;
    if g.emit_grid.is_some() {
        let grid: Vec<ExtendedReal> = angle_nodes(nodes).into_iter().map(ExtendedReal::from_angle).collect();
        let f = input.f;
        let values = grid
            .par_iter()
            .map(|&s| markov_apply(&m, |t| f.eval(t), s, g.tol).map(|v| v.re))
            .collect::<pickfn::Result<Vec<f64>>>()?;
        let s: Vec<Value> = grid.iter().map(|&s| loc_value(s)).collect();
        g.emit(&json!({ "s": s, "markov": values }))?;
    }
    Ok(json!({ "alpha": out.alpha, "measure": to_value(&out.measure) }))
}

/// Local maxima of `Im φ` along `Im z = h`, sharpened by golden-section
/// search at heights shrinking by ten.
fn atom_candidates<F>(f: &F, grid: &[f64]) -> Vec<f64>
where
    F: Fn(Complex64) -> pickfn::Result<Complex64> + Sync,
{
    let h = grid[1] - grid[0];
    let height = |x: f64, y: f64| f(Complex64::new(x, y)).map(|w| w.im).unwrap_or(f64::NEG_INFINITY);
    let row: Vec<f64> = grid.par_iter().map(|&x| height(x, h)).collect();
    let peaks: Vec<usize> = (1..grid.len() - 1)
        .filter(|&k| row[k] >= row[k - 1] && row[k] > row[k + 1])
        .collect();
    peaks
        .into_par_iter()
        .map(|k| {
            let (mut lo, mut hi) = (grid[k - 1], grid[k + 1]);
            let mut y = h;
            for _ in 0..8 {
                let ratio = 0.5 * (5f64.sqrt() - 1.0);
                let (mut a, mut b) = (lo, hi);
                for _ in 0..60 {
                    let x1 = b - ratio * (b - a);
                    let x2 = a + ratio * (b - a);
                    if height(x1, y) >= height(x2, y) {
                        b = x2;
                    } else {
                        a = x1;
                    }
                }
                let x = 0.5 * (a + b);
                y *= 0.1;
                lo = x - 10.0 * y;
                hi = x + 10.0 * y;
            }
            0.5 * (lo + hi)
        })
        .collect()
}

pub fn invert(g: &Global, grid: &GridArgs, threshold: f64, known: &[f64]) -> Result<Value, Failure> {
    let p = probe(g.parse()?)?;
    let f = |z: Complex64| p.eval(z, g.tol);
    let xs = linspace(grid)?;
    let ys = default_y_seq(DEFAULT_LEVELS);
    let limits: Vec<Option<pickfn::inversion::Limit>> =
        xs.par_iter().map(|&x| density_at(f, x, &ys).ok()).collect();
    let mut locations: Vec<f64> = known.to_vec();
    for c in atom_candidates(&f, &xs) {
        if !locations.iter().any(|x| (x - c).abs() <= 1e-6 * (1.0 + c.abs())) {
            locations.push(c);
        }
    }
    locations.sort_by(f64::total_cmp);
    let atoms: Vec<Value> = locations
        .par_iter()
        .filter_map(|&c| {
            let l = atom_mass_at(f, c).ok()?;
            let keep = known.contains(&c) || l.value > threshold;
            keep.then(|| json!({ "loc": c, "mass": l.value, "error": l.error }))
        })
        .collect();
    let infinity = mass_at_infinity(f)?;
    let support = support_estimate(f, &xs, 0.5 * (xs[1] - xs[0]), threshold)?;
    let density: Vec<Value> = limits.iter().map(|l| l.map_or(Value::Null, |l| json!(l.value))).collect();
    let errors: Vec<Value> = limits.iter().map(|l| l.map_or(Value::Null, |l| json!(l.error))).collect();
    g.emit(&json!({ "x": xs, "density": density }))?;
    Ok(json!({
        "nodes": xs,
        "density": density,
        "density_error": errors,
        "atoms": atoms,
        "mass_at_infinity": to_value(&infinity),
        "support": to_value(&support),
    }))
}

pub fn check_rational(g: &Global) -> Result<Value, Failure> {
    let f: RationalFunction = g.parse()?;
    Ok(to_value(&certify(&f)?))
}

pub fn check_positivity(
    g: &Global,
    margin: f64,
    grid: usize,
    support_grid: &GridArgs,
    threshold: f64,
) -> Result<Value, Failure> {
    match g.parse::<PositivityInput>()? {
        PositivityInput::LinearFractional { a, b, c } => {
            Ok(json!({ "kind": "linear-fractional", "verdict": linear_fractional_check(a, b, c) }))
        }
        PositivityInput::Affine { a, b } => Ok(json!({ "kind": "affine", "verdict": affine_check(a, b) })),
        PositivityInput::Function { function } => {
            let p = probe(function)?;
            let f = |z: Complex64| p.eval(z, g.tol);
            let xs = linspace(support_grid)?;
            let support = support_estimate(f, &xs, 0.5 * (xs[1] - xs[0]), threshold)?;
            let report = localized_positivity_check(f, &support, margin, grid)?;
            Ok(json!({ "kind": "function", "support": to_value(&support), "report": to_value(&report) }))
        }
    }
}

pub fn semigroup_check(g: &Global, nodes: usize) -> Result<Value, Failure> {
    let input: SemigroupInput = g.parse()?;
    let m = Endomatrix::new(input.m)?;
    let n = Endomatrix::new(input.n)?;
    let grid: Vec<ExtendedReal> = angle_nodes(nodes).into_iter().map(ExtendedReal::from_angle).collect();
    let f = input.f;
    let deviation = law_deviation(&m, &n, |t| f.eval(t), &grid, g.tol)?;
    if g.emit_grid.is_some() {
        let mn = m.compose(&n)?;
        let values = grid
            .par_iter()
            .map(|&s| markov_apply(&mn, |t| f.eval(t), s, g.tol).map(|v| v.re))
            .collect::<pickfn::Result<Vec<f64>>>()?;
        let s: Vec<Value> = grid.iter().map(|&s| loc_value(s)).collect();
        g.emit(&json!({ "s": s, "markov": values }))?;
    }
    Ok(json!({ "max_deviation": deviation, "nodes": grid.len() }))
}

pub fn cayley(g: &Global) -> Result<Value, Failure> {
    Ok(match g.parse::<CayleyInput>()? {
        CayleyInput::Point { z } => {
            if !(z.norm() < 1.0) {
                return Err(Failure::Domain(format!("{z} is not in the open unit disk")));
            }
            json!({ "w": to_value(&disk_to_halfplane(z)) })
        }
        CayleyInput::Inverse { w } => {
            if !(w.im > 0.0) {
                return Err(Failure::Domain(format!("{w} is not in the upper half-plane")));
            }
            json!({ "z": to_value(&halfplane_to_disk(w)) })
        }
        CayleyInput::Boundary { t } => json!({ "x": loc_value(boundary_param(t)) }),
        CayleyInput::Measure { mu, imag_at_zero } => to_value(&transfer_disk_measure(&mu, imag_at_zero)?),
    })
}
