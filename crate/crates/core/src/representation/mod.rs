//! Boundary measures on the extended real line and Herglotz functions.

mod density;
pub mod json;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, DEFAULT_MAX_INTERVALS};

pub use density::{DensitySpec, GridDensity, Pole, PoleDensity, RationalDensity};

/// Default absolute tolerance for density quadrature.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A point of ℝ̄ = ℝ ⊔ {∞}. Serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "json::LocJson", into = "json::LocJson")]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    /// Maps `±∞` to [`ExtendedReal::Infinity`]; NaN is rejected.
    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() {
            Err(Error::InvalidArgument("NaN is not a point of the extended reals".into()))
        } else if x.is_infinite() {
            Ok(Self::Infinity)
        } else {
            Ok(Self::Finite(x))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(x) => Some(x),
            Self::Infinity => None,
        }
    }

    /// The angle `t ∈ (−π, π]` with `tan(t/2) = s`.
    pub fn angle(self) -> f64 {
        match self {
            Self::Finite(x) => 2.0 * x.atan(),
            Self::Infinity => PI,
        }
    }

    pub fn from_angle(t: f64) -> Self {
        if t.abs() >= PI {
            Self::Infinity
        } else {
            Self::Finite((0.5 * t).tan())
        }
    }

    /// Point of the Riemann sphere, `None` standing for ∞.
    pub fn to_complex(self) -> Option<Complex64> {
        self.finite().map(|x| Complex64::new(x, 0.0))
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::Infinity => write!(f, "∞"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub loc: ExtendedReal,
    pub mass: f64,
}

impl Atom {
    pub fn new(loc: ExtendedReal, mass: f64) -> Self {
        Self { loc, mass }
    }

    pub fn finite(loc: f64, mass: f64) -> Self {
        Self::new(ExtendedReal::Finite(loc), mass)
    }

    pub fn infinity(mass: f64) -> Self {
        Self::new(ExtendedReal::Infinity, mass)
    }
}

/// Finite positive measure on ℝ̄: point masses plus an optional density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "json::MeasureJson", into = "json::MeasureJson")]
pub struct BoundaryMeasure {
    atoms: Vec<Atom>,
    density: Option<DensitySpec>,
    total_mass: f64,
}

impl BoundaryMeasure {
    /// Validates the atoms and merges those sharing a location.
    pub fn new(atoms: Vec<Atom>, density: Option<DensitySpec>) -> Result<Self> {
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            if let ExtendedReal::Finite(x) = atom.loc {
                if !x.is_finite() {
                    return Err(Error::InvalidMeasure(format!("atom location {x} is not finite")));
                }
            }
            if !(atom.mass > 0.0) || !atom.mass.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {} has mass {}, expected a finite positive value",
                    atom.loc, atom.mass
                )));
            }
            match merged.iter_mut().find(|a| a.loc == atom.loc) {
                Some(a) => a.mass += atom.mass,
                None => merged.push(atom),
            }
        }
        let atom_mass: f64 = merged.iter().map(|a| a.mass).sum();
        let density_mass = match &density {
            None => 0.0,
            Some(d) => match d.mass() {
                Some(m) => m,
                None => density_integral(d, |_| Complex64::new(1.0, 0.0), &[], DEFAULT_TOL)?.re,
            },
        };
        Ok(Self {
            atoms: merged,
            density,
            total_mass: atom_mass + density_mass,
        })
    }

    pub fn zero() -> Self {
        Self {
            atoms: Vec::new(),
            density: None,
            total_mass: 0.0,
        }
    }

    pub fn atom(loc: ExtendedReal, mass: f64) -> Result<Self> {
        Self::new(vec![Atom::new(loc, mass)], None)
    }

    pub fn from_density(density: DensitySpec) -> Result<Self> {
        Self::new(Vec::new(), Some(density))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&DensitySpec> {
        self.density.as_ref()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// λ({∞}).
    pub fn mass_at_infinity(&self) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.loc.is_infinite())
            .map(|a| a.mass)
            .sum()
    }

    pub fn finite_atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms
            .iter()
            .filter_map(|a| a.loc.finite().map(|x| (x, a.mass)))
    }

    pub fn is_zero(&self) -> bool {
        self.total_mass == 0.0
    }

    /// `Σ f(loc)·mass + ∫ f ρ dx`; the quadrature error on the density part
    /// is at most `tol`.
    pub fn integrate<F>(&self, f: F, tol: f64) -> Result<Complex64>
    where
        F: Fn(ExtendedReal) -> Complex64,
    {
        self.integrate_with_breaks(f, &[], tol)
    }

    /// Like [`BoundaryMeasure::integrate`], also splitting the density
    /// quadrature at the given real points.
    pub fn integrate_with_breaks<F>(&self, f: F, breaks: &[f64], tol: f64) -> Result<Complex64>
    where
        F: Fn(ExtendedReal) -> Complex64,
    {
        let atoms = self
            .atoms
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc + f(a.loc) * a.mass);
        match &self.density {
            None => Ok(atoms),
            Some(d) => Ok(atoms + density_integral(d, |x| f(ExtendedReal::Finite(x)), breaks, tol)?),
        }
    }
}

/// `∫_ℝ f(x) ρ(x) dx` on the compactified angle `θ ∈ (−π, π)`.
///
/// Poles closer to ℝ than a thousandth of their window are integrated in
/// `x = r + ε tan φ`, where the Cauchy bump is flat.
pub(crate) fn density_integral<F>(density: &DensitySpec, f: F, breaks: &[f64], tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if let DensitySpec::Poles(p) = density {
        let windows = near_pole_windows(p);
        if !windows.is_empty() {
            return windowed_pole_integral(p, &windows, &f, breaks, tol);
        }
    }
    let mut points: Vec<f64> = density
        .features()
        .into_iter()
        .chain(breaks.iter().copied())
        .filter(|x| x.is_finite())
        .map(|x| 2.0 * x.atan())
        .chain([-PI, PI])
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let integrand = |theta: f64| {
        // ρ(x) dx = w(x) dθ / 2π with w the weighted density
        let x = (0.5 * theta).tan();
        let w = density.weighted(x);
        if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            f(x) * (w / (2.0 * PI))
        }
    };
    let budget = DEFAULT_MAX_INTERVALS + points.len();
    quadrature::integrate(integrand, &points, tol, budget).map(|r| r.value)
}

/// `(pole index, half-width)` of each window around a nearly real pole.
fn near_pole_windows(p: &PoleDensity) -> Vec<(usize, f64)> {
    let centers: Vec<f64> = p.poles().iter().map(|q| q.at.re).collect();
    p.poles()
        .iter()
        .enumerate()
        .filter_map(|(k, q)| {
            let r = q.at.re;
            let gap = centers
                .iter()
                .enumerate()
                .filter(|&(j, &c)| j != k && c != r)
                .map(|(_, &c)| (c - r).abs())
                .fold(f64::INFINITY, f64::min);
            let eps = -q.at.im;
            // tan φ loses u·half/ε near the window edge
            let half = (30.0 * eps.sqrt()).min(1e-2 * (1.0 + r.abs())).min(0.45 * gap);
            (eps <= 1e-3 * half).then_some((k, half))
        })
        .collect()
}

fn windowed_pole_integral<F>(
    p: &PoleDensity,
    windows: &[(usize, f64)],
    f: &F,
    breaks: &[f64],
    tol: f64,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let tol = tol / (1 + windows.len()) as f64;
    let spans: Vec<(f64, f64)> = windows
        .iter()
        .map(|&(k, half)| (p.poles()[k].at.re - half, p.poles()[k].at.re + half))
        .collect();
    let inside = |x: f64| spans.iter().any(|&(a, b)| x > a && x < b);
    let features: Vec<f64> = p.poles().iter().map(|q| q.at.re).chain(breaks.iter().copied()).filter(|x| x.is_finite()).collect();

    // the Cauchy tail decays on the scale of the window: geometric breaks outside it
    let tails = windows.iter().flat_map(|&(k, half)| {
        let r = p.poles()[k].at.re;
        (1..8).map(move |j| half * 4f64.powi(j)).flat_map(move |d| [r - d, r + d])
    });
    let mut points: Vec<f64> = features
        .iter()
        .copied()
        .chain(spans.iter().flat_map(|&(a, b)| [a, b]))
        .chain(tails)
        .map(|x| 2.0 * x.atan())
        .chain([-PI, PI])
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let outer = |theta: f64| {
        let x = (0.5 * theta).tan();
        let w = p.weighted(x);
        if w == 0.0 || inside(x) {
            Complex64::new(0.0, 0.0)
        } else {
            f(x) * (w / (2.0 * PI))
        }
    };
    let budget = DEFAULT_MAX_INTERVALS + points.len();
    let mut total = quadrature::integrate(outer, &points, tol, budget)?.value;

    for &(k, half) in windows {
        let pole = p.poles()[k];
        let (r, eps) = (pole.at.re, -pole.at.im);
        let edge = (half / eps).atan();
        let mut phis: Vec<f64> = features
            .iter()
            .filter(|&&x| (x - r).abs() < half)
            .map(|&x| ((x - r) / eps).atan())
            .chain([-edge, edge])
            .collect();
        phis.sort_by(f64::total_cmp);
        phis.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let rest = |x: f64| {
            let z = Complex64::new(x, 0.0);
            p.poles()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(p.constant(), |acc, (_, q)| acc + q.residue / (q.at - z))
                .im
        };
        // Im(R/(ζ − x)) dx = (Re R − Im R tan φ) dφ
        let inner = |phi: f64| {
            let t = phi.tan();
            let x = r + eps * t;
            f(x) * ((pole.residue.re - pole.residue.im * t) / (PI * (1.0 + x * x)))
        };
        let flat = |x: f64| f(x) * (rest(x) / (PI * (1.0 + x * x)));
        let mut xs: Vec<f64> = features.iter().copied().filter(|&x| (x - r).abs() < half).chain([r - half, r + half]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        total += quadrature::integrate(flat, &xs, tol, DEFAULT_MAX_INTERVALS + xs.len())?.value;
        total += quadrature::integrate(inner, &phis, tol, DEFAULT_MAX_INTERVALS + phis.len())?.value;
    }
    Ok(total)
}

/// `φ(w) = α + λ({∞}) w + ∫_ℝ (1 + s w)/(s − w) λ(ds)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "json::HerglotzJson", into = "json::HerglotzJson")]
pub struct HerglotzFunction {
    pub alpha: f64,
    pub measure: BoundaryMeasure,
}

impl HerglotzFunction {
    pub fn new(alpha: f64, measure: BoundaryMeasure) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self { alpha, measure })
    }

    /// The identity function `z ↦ z`.
    pub fn identity() -> Self {
        Self {
            alpha: 0.0,
            measure: BoundaryMeasure::atom(ExtendedReal::Infinity, 1.0).expect("unit atom"),
        }
    }

    /// `a z + b` with `a ≥ 0`, `Im b ≥ 0`.
    pub fn affine(a: f64, b: Complex64) -> Result<Self> {
        if a < 0.0 || b.im < 0.0 {
            return Err(Error::InvalidArgument(
                "affine Herglotz function needs a >= 0 and Im b >= 0".into(),
            ));
        }
        let atoms = if a > 0.0 { vec![Atom::infinity(a)] } else { Vec::new() };
        let density = if b.im > 0.0 { Some(DensitySpec::cauchy(b.im)?) } else { None };
        Self::new(b.re, BoundaryMeasure::new(atoms, density)?)
    }

    pub fn total_mass(&self) -> f64 {
        self.measure.total_mass()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(_: ExtendedReal) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn cauchy(c: f64) -> DensitySpec {
        DensitySpec::rational(vec![c / PI], vec![1.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn unit_atom_at_infinity() {
        let m = BoundaryMeasure::atom(ExtendedReal::Infinity, 1.0).unwrap();
        assert_eq!(m.integrate(one, DEFAULT_TOL).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(m.total_mass(), 1.0);
    }

    #[test]
    fn cauchy_density_has_unit_mass() {
        let m = BoundaryMeasure::from_density(cauchy(1.0)).unwrap();
        let v = m.integrate(one, DEFAULT_TOL).unwrap();
        assert!((v.re - 1.0).abs() < 1e-10);
        assert!((m.total_mass() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn atom_plus_density_against_lorentzian() {
        let m = BoundaryMeasure::new(vec![Atom::finite(0.0, 2.0)], Some(cauchy(1.0))).unwrap();
        let f = |s: ExtendedReal| match s {
            ExtendedReal::Finite(x) => Complex64::new(1.0 / (1.0 + x * x), 0.0),
            ExtendedReal::Infinity => Complex64::new(0.0, 0.0),
        };
        // oracle: ∫ dx/(π(1+x²)²) by composite Simpson on x = tan u
        let n = 20000;
        let h = PI / n as f64;
        let g = |u: f64| u.cos().powi(2) / PI;
        let mut s = g(-PI / 2.0) + g(PI / 2.0);
        for k in 1..n {
            let u = -PI / 2.0 + k as f64 * h;
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * g(u);
        }
        let oracle = 2.0 + s * h / 3.0;
        let v = m.integrate(f, DEFAULT_TOL).unwrap();
        assert!((v.re - oracle).abs() < 1e-10);
        assert!((v.re - 2.5).abs() < 1e-10);
    }

    #[test]
    fn nearly_real_pole_against_closed_form() {
        for eps in [1e-5, 1e-9, 1e-11, 1e-13, 1e-15] {
            let pole = Pole { residue: Complex64::new(0.8, 0.0), at: Complex64::new(1.3, -eps) };
            let p = PoleDensity::new(Complex64::new(0.0, 0.4), vec![pole]).unwrap();
            let d = DensitySpec::Poles(p.clone());
            let mass = density_integral(&d, |_| Complex64::new(1.0, 0.0), &[], 1e-12).unwrap();
            assert!((mass.re - p.mass()).abs() < 1e-11, "{eps}: {mass} vs {}", p.mass());
            let z = Complex64::new(0.3, 0.5);
            let kernel = |s: f64| (1.0 + s * z) / (s - z);
            let got = density_integral(&d, kernel, &[], 1e-12).unwrap();
            assert!((got - p.herglotz(z)).norm() < 1e-12, "{eps}: {got} vs {}", p.herglotz(z));
        }
    }

    #[test]
    fn total_mass_examples() {
        let m = BoundaryMeasure::from_density(DensitySpec::cauchy(3.0).unwrap()).unwrap();
        assert!((m.total_mass() - 3.0).abs() < 1e-14);
        let m = BoundaryMeasure::new(vec![Atom::finite(0.0, 0.5), Atom::finite(1.0, 0.25)], None).unwrap();
        assert_eq!(m.total_mass(), 0.75);
    }

    #[test]
    fn duplicate_atoms_merge() {
        let m = BoundaryMeasure::new(
            vec![Atom::finite(1.0, 0.5), Atom::infinity(1.0), Atom::finite(1.0, 0.25)],
            None,
        )
        .unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[0].mass, 0.75);
    }

    #[test]
    fn rejects_bad_atoms() {
        assert!(BoundaryMeasure::atom(ExtendedReal::Finite(0.0), 0.0).is_err());
        assert!(BoundaryMeasure::atom(ExtendedReal::Finite(f64::NAN), 1.0).is_err());
        assert!(BoundaryMeasure::atom(ExtendedReal::Finite(0.0), -1.0).is_err());
        assert!(ExtendedReal::new(f64::NAN).is_err());
        assert_eq!(ExtendedReal::new(f64::INFINITY).unwrap(), ExtendedReal::Infinity);
    }

    #[test]
    fn zero_measure() {
        let m = BoundaryMeasure::new(vec![], None).unwrap();
        assert!(m.is_zero());
        assert_eq!(m.integrate(one, DEFAULT_TOL).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn grid_mass_matches_quadrature() {
        let d = DensitySpec::grid(vec![-1.0, 0.0, 0.5, 3.0], vec![0.1, 0.4, 0.3, 0.0], 0.2).unwrap();
        let exact = d.mass().unwrap();
        let quad = density_integral(&d, |_| Complex64::new(1.0, 0.0), &[], 1e-12).unwrap();
        assert!((exact - quad.re).abs() < 1e-10);
    }

    fn arb_measure() -> impl Strategy<Value = BoundaryMeasure> {
        (
            prop::collection::vec((-5.0..5.0f64, 0.1..2.0f64), 0..4),
            0.0..2.0f64,
            0.0..3.0f64,
            0.2..2.0f64,
        )
            .prop_map(|(atoms, inf, c, w)| {
                let mut atoms: Vec<Atom> = atoms.into_iter().map(|(x, m)| Atom::finite(x, m)).collect();
                if inf > 0.5 {
                    atoms.push(Atom::infinity(inf));
                }
                // c/(π) · 1/(x² + w²), mass c/w
                let density = DensitySpec::rational(vec![c / PI], vec![w * w, 0.0, 1.0]).unwrap();
                BoundaryMeasure::new(atoms, Some(density)).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn integrate_one_is_total_mass(m in arb_measure()) {
            let v = m.integrate(one, DEFAULT_TOL).unwrap();
            prop_assert!((v.re - m.total_mass()).abs() < 1e-9);
            prop_assert!(m.total_mass() >= 0.0);
        }

        #[test]
        fn integrate_is_linear(m in arb_measure(), p in -2.0..2.0f64, q in -2.0..2.0f64) {
            let f = |s: ExtendedReal| match s {
                ExtendedReal::Finite(x) => Complex64::new(x.atan(), 1.0 / (1.0 + x * x)),
                ExtendedReal::Infinity => Complex64::new(PI / 2.0, 0.0),
            };
            let g = |s: ExtendedReal| match s {
                ExtendedReal::Finite(x) => Complex64::new(x / (1.0 + x * x), 0.0),
                ExtendedReal::Infinity => Complex64::new(0.0, 0.0),
            };
            let lhs = m.integrate(|s| f(s) * p + g(s) * q, 1e-11).unwrap();
            let rhs = m.integrate(f, 1e-11).unwrap() * p + m.integrate(g, 1e-11).unwrap() * q;
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }
    }
}
