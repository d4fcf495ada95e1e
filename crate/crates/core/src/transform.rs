//! Representing measures under Möbius maps: the kernel family μ_{ₛM}, the
//! Markov operator Λ_M and the transformed measure λ^M.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluation::{eval_atomic, eval_quadrature};
use crate::moebius::{EndoClass, Endomatrix, Matrix2C};
use crate::poly::Polynomial;
use crate::representation::{
    density_integral, Atom, BoundaryMeasure, DensitySpec, ExtendedReal, GridDensity, HerglotzFunction, Pole,
    PoleDensity, RationalDensity,
};

/// Nodes used when λ^M has to be tabulated.
pub const DEFAULT_GRID_NODES: usize = 256;

/// `|Im(γ δ̄)| / (|γ|² + |δ|²)` of the translate below which ₛM counts as unbounded.
const UNBOUNDED_TOL: f64 = 1e-13;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Nodes `tan(θ_k/2)` for `n` equally spaced angles in `(−π, π)`.
pub fn angle_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (0.5 * (-PI + (k as f64 + 0.5) * 2.0 * PI / n as f64)).tan())
        .collect()
}

/// The family `s ↦ μ_{ₛM}` realizing the Markov operator of `M`.
#[derive(Debug, Clone, Copy)]
pub struct KernelFamily {
    m: Endomatrix,
}

impl KernelFamily {
    pub fn new(m: Endomatrix) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &Endomatrix {
        &self.m
    }

    pub fn at(&self, s: ExtendedReal) -> Result<BoundaryMeasure> {
        mu_family(&self.m, s)
    }
}

/// Density of the bounded case: `Im φ(x)/(π(1+x²))` for `φ = (αx+β)/(γx+δ)`
/// with its pole in the lower half-plane.
fn bounded_kernel(sm: &Matrix2C) -> Result<PoleDensity> {
    let (al, _be, ga, de) = (sm.a(), sm.b(), sm.c(), sm.d());
    // (αz + β)/(γz + δ) = α/γ + (det/γ²)/(ζ − z), ζ = −δ/γ
    let zeta = -de / ga;
    if !(zeta.im < 0.0) {
        return Err(Error::NotEndomatrix);
    }
    Ok(PoleDensity::from_parts(
        al / ga,
        vec![Pole {
            residue: sm.det() / (ga * ga),
            at: zeta,
        }],
    ))
}

/// Poles within roundoff of ℝ are replaced by the atom they approximate.
const NEAR_REAL_POLE: f64 = 1e-15;
/// Poles above ℝ by more than this are a genuine failure.
const POLE_ROUNDOFF: f64 = 1e-10;

fn bounded_measure(sm: &Matrix2C) -> Result<BoundaryMeasure> {
    let zeta = -sm.d() / sm.c();
    let scale = 1.0 + zeta.norm_sqr();
    if zeta.im > POLE_ROUNDOFF * scale {
        return Err(Error::NotEndomatrix);
    }
    if zeta.im > -NEAR_REAL_POLE * scale {
        // R/(r − z) = λ (1 + r z)/(r − z) + const with λ = R/(1 + r²)
        let r = zeta.re;
        let mass = (sm.det() / (sm.c() * sm.c())).re / (1.0 + r * r);
        if !(mass > 0.0) {
            return Err(Error::NotEndomatrix);
        }
        let cauchy = (sm.a() / sm.c()).im;
        let density = (cauchy > 0.0).then(|| DensitySpec::Poles(PoleDensity::from_parts(Complex64::new(0.0, cauchy), Vec::new())));
        return BoundaryMeasure::new(vec![Atom::finite(r, mass)], density);
    }
    BoundaryMeasure::from_density(DensitySpec::Poles(bounded_kernel(sm)?))
}

/// The representing measure μ_{ₛM} of `z ↦ φ_s(M.z)`.
pub fn mu_family(m: &Endomatrix, s: ExtendedReal) -> Result<BoundaryMeasure> {
    let sm = m.matrix().left_translate(s);
    let (big_a, _, _) = sm.image_form();
    let scale = sm.c().norm_sqr() + sm.d().norm_sqr();
    if big_a.abs() > UNBOUNDED_TOL * scale {
        return bounded_measure(&sm);
    }
    let d = match m.matrix().contact_decompose(s) {
        Ok(d) => d,
        // nearly tangent but not unbounded: still a genuine disk
        Err(_) if sm.c() != Complex64::new(0.0, 0.0) => return bounded_measure(&sm),
        Err(e) => return Err(e),
    };
    if !(d.p > 0.0) {
        return Err(Error::NotEndomatrix);
    }
    let cauchy = d.q.im > 1e-14 * (1.0 + d.q.norm()) && !matches!(m.class(), EndoClass::RealOrbit);
    let density = cauchy.then(|| DensitySpec::Poles(PoleDensity::from_parts(Complex64::new(0.0, d.q.im), Vec::new())));
    BoundaryMeasure::new(vec![Atom::new(d.t, d.p)], density)
}

/// `(Λ_M f)(s) = μ_{ₛM}(f)`.
pub fn markov_apply<F>(m: &Endomatrix, f: F, s: ExtendedReal, tol: f64) -> Result<Complex64>
where
    F: Fn(ExtendedReal) -> Complex64,
{
    mu_family(m, s)?.integrate(f, tol)
}

/// `max_s |Λ_{MN} f(s) − Λ_M(Λ_N f)(s)|` over the grid.
pub fn semigroup_check<F>(m: &Endomatrix, n: &Endomatrix, f: F, grid: &[ExtendedReal], tol: f64) -> Result<f64>
where
    F: Fn(ExtendedReal) -> Complex64 + Sync,
{
    let mn = m.compose(n)?;
    // Λ_N f has a kink where ₜN becomes unbounded, and jumps with f at N.∞
    let breaks: Vec<f64> = match n.class() {
        EndoClass::ContactCircle { tangency } => vec![tangency],
        EndoClass::RealOrbit => {
            let nm = n.matrix();
            if nm.c() == Complex64::new(0.0, 0.0) { Vec::new() } else { vec![(nm.a() / nm.c()).re] }
        }
        _ => Vec::new(),
    };
    let inner_tol = tol * 1e-2;
    let deviations = grid
        .par_iter()
        .map(|&s| {
            let direct = markov_apply(&mn, &f, s, inner_tol)?;
            let failure = RefCell::new(None);
            let inner = |t: ExtendedReal| {
                if failure.borrow().is_some() {
                    return Complex64::new(0.0, 0.0);
                }
                markov_apply(n, &f, t, inner_tol).unwrap_or_else(|e| {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                })
            };
            let iterated = mu_family(m, s)?.integrate_with_breaks(inner, &breaks, tol)?;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            Ok((direct - iterated).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(deviations.into_iter().fold(0.0, f64::max))
}

fn require_real_automatrix(a: &Matrix2C) -> Result<()> {
    if a.is_real_proportional() && a.is_endomatrix() {
        Ok(())
    } else {
        Err(Error::NotRealAutomatrix)
    }
}

/// λ^A for a real matrix with positive determinant: atoms move to `A⁻¹.s`
/// with weight `(1+s²)/(1+(A⁻¹.s)²) · det/(a − cs)²`, densities by the
/// substitution `s = A.t`.
pub fn pushforward_real(lambda: &BoundaryMeasure, a: &Matrix2C) -> Result<BoundaryMeasure> {
    require_real_automatrix(a)?;
    let atoms = lambda
        .atoms()
        .iter()
        .map(|atom| {
            let d = a.contact_decompose(atom.loc)?;
            Ok(Atom::new(d.t, atom.mass * d.p))
        })
        .collect::<Result<Vec<_>>>()?;
    let density = lambda.density().map(|d| pushforward_density(d, a)).transpose()?;
    BoundaryMeasure::new(atoms, density)
}

fn pushforward_density(d: &DensitySpec, a: &Matrix2C) -> Result<DensitySpec> {
    match d {
        DensitySpec::Rational(r) => pushforward_rational(r, a).map(DensitySpec::Rational),
        DensitySpec::Poles(p) => compose_poles(p, a).map(DensitySpec::Poles),
        DensitySpec::Grid(g) => pushforward_grid(g, a).map(DensitySpec::Grid),
    }
}

/// `σ(x) = (1 + s²) ρ(s) / (1 + x²)` at `s = A.x`, as one rational function.
fn pushforward_rational(r: &RationalDensity, m: &Matrix2C) -> Result<RationalDensity> {
    let num = Polynomial::from_real(r.numerator());
    if num.is_zero() {
        return RationalDensity::new(vec![0.0], r.denominator().to_vec());
    }
    let den = Polynomial::from_real(r.denominator());
    let [a, b, c, d] = m.entries().map(|z| Complex64::new(z.re, 0.0));
    let (nn, dn) = (num.degree(), den.degree());
    let num_t = num.compose_mobius(a, b, c, d, nn);
    let den_t = den.compose_mobius(a, b, c, d, dn);
    // 1 + s² = ((ax+b)² + (cx+d)²)/(cx+d)²
    let lift = Polynomial::new(vec![b * b + d * d, 2.0 * (a * b + c * d), a * a + c * c]);
    let spare = Polynomial::new(vec![d, c]).pow(dn - nn - 2);
    let new_num = &(&lift * &num_t) * &spare;
    let new_den = &Polynomial::from_real(&[1.0, 0.0, 1.0]) * &den_t;
    RationalDensity::new(new_num.real_part(), new_den.real_part())
}

/// Pole form of `x ↦ g(M.x)` for `g = κ + Σ f/(ζ − w)`.
fn compose_poles(p: &PoleDensity, m: &Matrix2C) -> Result<PoleDensity> {
    let [a, b, c, d] = m.entries();
    let det = m.det();
    let mut constant = p.constant();
    let mut poles = Vec::with_capacity(p.poles().len());
    for pole in p.poles() {
        // f/(ζ − M.x) = f c/u + (f det/u²)/(ζ' − x), u = ζc − a, ζ' = M⁻¹.ζ
        let u = pole.at * c - a;
        let v = pole.at * d - b;
        let at = -v / u;
        if !(at.im < 0.0) || !at.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "transformed pole {at} left the lower half-plane"
            )));
        }
        constant += pole.residue * c / u;
        poles.push(Pole {
            residue: pole.residue * det / (u * u),
            at,
        });
    }
    Ok(PoleDensity::from_parts(constant, poles))
}

fn pushforward_grid(g: &GridDensity, a: &Matrix2C) -> Result<GridDensity> {
    let inv = a.inverse();
    // old node angles and three interior angles per segment, mapped back
    let mut angles: Vec<f64> = Vec::new();
    let old: Vec<f64> = g.nodes().iter().map(|x| 2.0 * x.atan()).collect();
    for (k, &t) in old.iter().enumerate() {
        angles.push(t);
        if let Some(&next) = old.get(k + 1) {
            angles.extend((1..4).map(|j| t + (next - t) * j as f64 / 4.0));
        }
    }
    let mut nodes: Vec<f64> = angles
        .into_iter()
        .filter_map(|t| inv.apply_finite(ExtendedReal::from_angle(t)))
        .collect();
    if let Some(t_inf) = a.preimage_real(ExtendedReal::Infinity).and_then(|t| t.finite()) {
        nodes.push(t_inf);
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let weighted_at = |s: ExtendedReal| match s {
        ExtendedReal::Finite(s) => g.weighted(s),
        ExtendedReal::Infinity => g.tail(),
    };
    let values: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let s = a.apply_real(x);
            weighted_at(s) / (PI * (1.0 + x * x))
        })
        .collect();
    let tail = weighted_at(a.apply_real_infinity());
    GridDensity::new(nodes, values, tail)
}

trait RealAction {
    fn apply_real(&self, x: f64) -> ExtendedReal;
    fn apply_real_infinity(&self) -> ExtendedReal;
    fn apply_finite(&self, s: ExtendedReal) -> Option<f64>;
}

impl RealAction for Matrix2C {
    fn apply_real(&self, x: f64) -> ExtendedReal {
        let [a, b, c, d] = self.entries().map(|z| z.re);
        let den = c * x + d;
        if den == 0.0 {
            ExtendedReal::Infinity
        } else {
            ExtendedReal::Finite((a * x + b) / den)
        }
    }

    fn apply_real_infinity(&self) -> ExtendedReal {
        let [a, _, c, _] = self.entries().map(|z| z.re);
        if c == 0.0 {
            ExtendedReal::Infinity
        } else {
            ExtendedReal::Finite(a / c)
        }
    }

    /// `self.s` when it is finite.
    fn apply_finite(&self, s: ExtendedReal) -> Option<f64> {
        match s {
            ExtendedReal::Finite(x) => self.apply_real(x).finite(),
            ExtendedReal::Infinity => self.apply_real_infinity().finite(),
        }
    }
}

/// Density of λ^M coming from a density ρ of λ: `Im φ_ρ(M.x)/(π(1+x²))`,
/// tabulated on angle nodes; `φ_ρ` by quadrature.
fn tabulate_density(d: &DensitySpec, m: &Endomatrix, nodes: usize, tol: f64) -> Result<GridDensity> {
    let rho = HerglotzFunction::new(0.0, BoundaryMeasure::from_density(d.clone())?)?;
    let weighted_at = |w: Option<Complex64>| -> Result<f64> {
        match w {
            None => Ok(d.weighted_at_infinity()),
            Some(w) if w.im <= 1e-12 * (1.0 + w.norm()) => Ok(d.weighted(w.re)),
            Some(w) => Ok(eval_quadrature(&rho, w, tol)?.im.max(0.0)),
        }
    };
    let image = |x: Option<f64>| -> Option<Complex64> {
        let mm = m.matrix();
        let (num, den) = match x {
            Some(x) => (mm.a() * x + mm.b(), mm.c() * x + mm.d()),
            None => (mm.a(), mm.c()),
        };
        (den.norm() > 1e-14 * num.norm()).then(|| num / den)
    };
    let xs = angle_nodes(nodes);
    let values = xs
        .par_iter()
        .map(|&x| Ok(weighted_at(image(Some(x)))? / (PI * (1.0 + x * x))))
        .collect::<Result<Vec<f64>>>()?;
    let tail = weighted_at(image(None))?;
    GridDensity::new(xs, values, tail)
}

/// Sum of density pieces, exact when all pieces have pole forms.
fn combine_densities(pieces: Vec<DensitySpec>) -> Result<Option<DensitySpec>> {
    if pieces.len() <= 1 {
        return Ok(pieces.into_iter().next());
    }
    let poles: Option<Vec<PoleDensity>> = pieces.iter().map(DensitySpec::as_poles).collect();
    if let Some(poles) = poles {
        return Ok(Some(DensitySpec::Poles(PoleDensity::combine(poles.iter().map(|p| (1.0, p))))));
    }
    // tabulate the sum on the union of grid nodes and default angle nodes
    let mut nodes = angle_nodes(DEFAULT_GRID_NODES);
    for p in &pieces {
        if let DensitySpec::Grid(g) = p {
            nodes.extend_from_slice(g.nodes());
        }
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let values = nodes.iter().map(|&x| pieces.iter().map(|p| p.value(x)).sum()).collect();
    let tail = pieces.iter().map(DensitySpec::weighted_at_infinity).sum();
    Ok(Some(DensitySpec::Grid(GridDensity::new(nodes, values, tail)?)))
}

/// `(α_M, λ^M)` with `φ(M.z) = α_M + ∫ φ_t(z) λ^M(dt)`.
pub fn transform_measure(
    lambda: &BoundaryMeasure,
    alpha: f64,
    m: &Endomatrix,
    tol: f64,
) -> Result<(f64, BoundaryMeasure)> {
    let w0 = m.apply(I);
    let mut shift = 0.0;
    let mut atoms = Vec::new();
    let mut pieces = Vec::new();
    for atom in lambda.atoms() {
        shift += atom.mass * eval_atomic(atom.loc, w0).re;
        let mu = mu_family(m, atom.loc)?;
        atoms.extend(mu.atoms().iter().map(|a| Atom::new(a.loc, a.mass * atom.mass)));
        if let Some(DensitySpec::Poles(p)) = mu.density() {
            pieces.push(DensitySpec::Poles(PoleDensity::combine([(atom.mass, p)])));
        }
    }
    if let Some(d) = lambda.density() {
        match d.as_poles() {
            Some(p) => {
                shift += p.herglotz(w0).re;
                pieces.push(DensitySpec::Poles(compose_poles(&p, m.matrix())?));
            }
            None => {
                shift += density_integral(d, |s| eval_atomic(ExtendedReal::Finite(s), w0), &[w0.re], tol)?.re;
                let piece = match m.class() {
                    EndoClass::RealOrbit => pushforward_density(d, m.matrix())?,
                    _ => DensitySpec::Grid(tabulate_density(d, m, DEFAULT_GRID_NODES, tol)?),
                };
                pieces.push(piece);
            }
        }
    }
    let density = combine_densities(pieces)?;
    Ok((alpha + shift, BoundaryMeasure::new(atoms, density)?))
}

/// The representation of `z ↦ φ(M.z)`.
pub fn transform_function(phi: &HerglotzFunction, m: &Endomatrix, tol: f64) -> Result<HerglotzFunction> {
    let (alpha, measure) = transform_measure(&phi.measure, phi.alpha, m, tol)?;
    HerglotzFunction::new(alpha, measure)
}
