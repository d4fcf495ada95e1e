//! Rational functions: partial fractions and endofunction certificates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::poly::{cluster_roots, real_roots, Polynomial};
use crate::representation::{Atom, BoundaryMeasure, DensitySpec, ExtendedReal};

/// Relative imaginary part below which a pole is taken to be real.
pub const SNAP_TOL: f64 = 1e-9;
const BORDERLINE_TOL: f64 = 1e-6;
const CLUSTER_TOL: f64 = 1e-6;
const COMMON_ROOT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `num/den` with complex coefficients in ascending order, without common roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RationalJson", into = "RationalJson")]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

impl TryFrom<RationalJson> for RationalFunction {
    type Error = Error;

    fn try_from(r: RationalJson) -> Result<Self> {
        Self::new(r.num, r.den)
    }
}

impl From<RationalFunction> for RationalJson {
    fn from(r: RationalFunction) -> Self {
        Self {
            num: r.num.coeffs().to_vec(),
            den: r.den.coeffs().to_vec(),
        }
    }
}

impl RationalFunction {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Self::from_polys(Polynomial::new(num), Polynomial::new(den))
    }

    pub fn from_real(num: &[f64], den: &[f64]) -> Result<Self> {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(c(num), c(den))
    }

    /// Cancels common roots and scales the denominator to be monic.
    pub fn from_polys(num: Polynomial, den: Polynomial) -> Result<Self> {
        let mut num = num.trimmed(1e-15);
        let mut den = den.trimmed(1e-15);
        if den.is_zero() {
            return Err(Error::InvalidArgument("denominator is zero".into()));
        }
        if num.is_zero() {
            return Ok(Self { num, den: Polynomial::constant(ONE) });
        }
        'outer: loop {
            if den.degree() == 0 || num.degree() == 0 {
                break;
            }
            for (r, _) in clustered_roots(&den)? {
                let scale: f64 = num
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.norm() * r.norm().powi(k as i32))
                    .sum();
                if num.eval(r).norm() <= COMMON_ROOT_TOL * scale {
                    num = num.div_linear(r).0;
                    den = den.div_linear(r).0;
                    continue 'outer;
                }
            }
            break;
        }
        let lead = den.leading();
        Ok(Self {
            num: num.scale(1.0 / lead),
            den: den.scale(1.0 / lead),
        })
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// True when all coefficients are real up to `tol` relative to the largest one.
    pub fn is_real(&self, tol: f64) -> bool {
        self.num.is_real(tol * self.num.norm_inf().max(1e-300)) && self.den.is_real(tol * self.den.norm_inf())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

/// `c / (s − z)^order`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealPoleTerm {
    pub s: f64,
    pub c: Complex64,
    pub order: usize,
}

/// `f(z) = Σ_{k≥2} higher[k−2] z^k + a z + b + Σ c_j/(s_j − z)^{order_j} + ψ(z)`.
///
/// `ψ` vanishes at `∞` and has all its poles in `C₋`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialFractionForm {
    pub a: Complex64,
    pub b: Complex64,
    pub higher: Vec<Complex64>,
    pub poles: Vec<RealPoleTerm>,
    pub remainder: RationalFunction,
    pub warnings: Vec<String>,
}

impl PartialFractionForm {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.a * z + self.b;
        for (k, &c) in self.higher.iter().enumerate() {
            acc += c * z.powi(k as i32 + 2);
        }
        for p in &self.poles {
            acc += p.c / (p.s - z).powi(p.order as i32);
        }
        acc + self.remainder.eval(z)
    }

    fn is_constant(&self) -> bool {
        self.a == ZERO && self.higher.is_empty() && self.poles.is_empty() && self.remainder.is_zero()
    }
}

/// First `n` Taylor coefficients of `p/q` at `0`.
fn series_quotient(p: &Polynomial, q: &Polynomial, n: usize) -> Vec<Complex64> {
    let pc = |k: usize| p.coeffs().get(k).copied().unwrap_or(ZERO);
    let qc = |k: usize| q.coeffs().get(k).copied().unwrap_or(ZERO);
    let mut h = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = pc(k);
        for j in 0..k {
            acc -= h[j] * qc(k - j);
        }
        h.push(acc / qc(0));
    }
    h
}

/// Roots with multiplicity; centers of multiple roots are refined by Newton
/// steps on the derivative of order `k − 1`, where the root is simple.
fn clustered_roots(p: &Polynomial) -> Result<Vec<(Complex64, usize)>> {
    let mut clusters = cluster_roots(&p.roots()?, CLUSTER_TOL);
    for (z, k) in clusters.iter_mut() {
        if *k == 1 {
            continue;
        }
        let mut d = p.clone();
        for _ in 1..*k {
            d = d.derivative();
        }
        let dd = d.derivative();
        for _ in 0..3 {
            let step = d.eval(*z) / dd.eval(*z);
            if !step.is_finite() || step.norm() > CLUSTER_TOL * (1.0 + z.norm()) {
                break;
            }
            *z -= step;
        }
    }
    Ok(clusters)
}

/// Splits off the polynomial part and the real poles; `C₋` poles stay in `ψ`.
pub fn partial_fractions(f: &RationalFunction) -> Result<PartialFractionForm> {
    let (q, r) = f.num.div_rem(&f.den);
    let qc = q.coeffs();
    let b = qc[0];
    let a = qc.get(1).copied().unwrap_or(ZERO);
    let higher = qc.iter().skip(2).copied().collect();
    let mut warnings = Vec::new();

    let clusters = clustered_roots(&f.den)?;
    let mut real: Vec<(f64, usize)> = Vec::new();
    let mut lower: Vec<Complex64> = Vec::new();
    for &(z, mult) in &clusters {
        let rel = z.im / (1.0 + z.norm());
        if rel.abs() <= SNAP_TOL {
            real.push((z.re, mult));
        } else if rel > 0.0 {
            return Err(Error::PoleInUpperHalfPlane(z));
        } else {
            if rel.abs() <= BORDERLINE_TOL {
                warnings.push(format!("pole {z} is close to the real line"));
            }
            lower.extend(std::iter::repeat_n(z, mult));
        }
    }
    let real_roots_list = |skip: Option<usize>, extra: usize| -> Vec<Complex64> {
        let mut v = Vec::new();
        for (i, &(s, k)) in real.iter().enumerate() {
            let k = if Some(i) == skip { extra } else { k };
            v.extend(std::iter::repeat_n(Complex64::new(s, 0.0), k));
        }
        v
    };

    let mut poles = Vec::new();
    let mut real_part_num = Polynomial::zero();
    for (j, &(s, k)) in real.iter().enumerate() {
        let sc = Complex64::new(s, 0.0);
        let mut rest = real_roots_list(Some(j), 0);
        rest.extend(&lower);
        let den_rest = Polynomial::from_roots(&rest, ONE);
        let h = series_quotient(&r.taylor_shift(sc), &den_rest.taylor_shift(sc), k);
        for m in 1..=k {
            let d = h[k - m];
            let c = if m % 2 == 0 { d } else { -d };
            poles.push(RealPoleTerm { s, c, order: m });
            // d/(z − s)^m over the monic real denominator
            let cofactor = Polynomial::from_roots(&real_roots_list(Some(j), k - m), ONE);
            real_part_num = real_part_num + cofactor.scale(d);
        }
    }
    let den_real = Polynomial::from_roots(&real_roots_list(None, 0), ONE);
    let den_lower = Polynomial::from_roots(&lower, ONE);
    let num_lower = if real.is_empty() {
        r
    } else {
        (r - &den_lower * &real_part_num).div_rem(&den_real).0
    };
    let remainder = if lower.is_empty() {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::constant(ONE) }
    } else {
        RationalFunction { num: num_lower.trimmed(1e-14), den: den_lower }
    };
    Ok(PartialFractionForm { a, b, higher, poles, remainder, warnings })
}

/// Why a rational function fails to be an endofunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Refutation {
    PoleInUpperHalfPlane { pole: Complex64 },
    NonSimpleRealPole { s: f64, order: usize },
    NonRealResidue { s: f64, c: Complex64 },
    NegativeResidue { s: f64, c: f64 },
    NonRealSlope { a: Complex64 },
    NegativeSlope { a: f64 },
    HigherDegree { degree: usize },
    RealConstant,
    BelowMinimum { c: f64, min: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndofunctionCertificate {
    pub verdict: bool,
    /// `Re f(i)` on a true verdict.
    pub alpha: Option<f64>,
    pub measure: Option<BoundaryMeasure>,
    /// Imaginary part of the constant term (non-real case).
    pub constant: Option<f64>,
    /// `min_ℝ Im ψ` including the limit `0` at `∞` (non-real case).
    pub min_im_psi: Option<f64>,
    pub witness: Option<Complex64>,
    pub reason: Option<Refutation>,
    pub warnings: Vec<String>,
}

impl EndofunctionCertificate {
    fn refuted(f: &RationalFunction, reason: Refutation, hints: Vec<Complex64>, warnings: Vec<String>) -> Self {
        Self {
            verdict: false,
            alpha: None,
            measure: None,
            constant: None,
            min_im_psi: None,
            witness: find_witness(f, &hints),
            reason: Some(reason),
            warnings,
        }
    }
}

/// A point of `C₊` where `Im f < 0`, searching the hints first and then a
/// strip `[−50, 50] × [1e-4, 1]` and large circles.
pub fn find_witness(f: &RationalFunction, hints: &[Complex64]) -> Option<Complex64> {
    let most_negative = |pts: &mut dyn Iterator<Item = Complex64>| {
        pts.filter(|z| z.im > 0.0)
            .map(|z| (f.eval(z).im, z))
            .filter(|(v, _)| v.is_finite() && *v < 0.0)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, z)| z)
    };
    if let Some(z) = most_negative(&mut hints.iter().copied()) {
        return Some(z);
    }
    let strip = (0..=1000).flat_map(|i| {
        let x = -50.0 + 0.1 * i as f64;
        (0..=8).map(move |k| Complex64::new(x, 10f64.powf(-0.5 * k as f64)))
    });
    let circles = [1e2, 1e4, 1e6].into_iter().flat_map(|r| {
        (1..64).map(move |k| Complex64::from_polar(r, PI * k as f64 / 64.0))
    });
    most_negative(&mut strip.chain(circles))
}

fn around(center: Complex64, radius: f64) -> impl Iterator<Item = Complex64> {
    (0..64).map(move |k| center + Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / 64.0))
}

fn pole_hints(s: f64) -> Vec<Complex64> {
    let eps = 1e-6 * (1.0 + s.abs());
    around(Complex64::new(s, 0.0), eps).filter(|z| z.im > 0.0).collect()
}

fn far_hints() -> Vec<Complex64> {
    [1e3, 1e6]
        .into_iter()
        .flat_map(|r| (1..32).map(move |k| Complex64::from_polar(r, PI * k as f64 / 32.0)))
        .chain([Complex64::new(1e6, 1e-6), Complex64::new(-1e6, 1e-6)])
        .collect()
}

fn scale_of(f: &RationalFunction) -> f64 {
    f.num.norm_inf().max(f.den.norm_inf())
}

enum Structural {
    Refuted(Box<EndofunctionCertificate>),
    Ok(PartialFractionForm),
}

/// Checks shared by both cases: poles, slope, residues.
fn structural(f: &RationalFunction, real_case: bool) -> Result<Structural> {
    let refute = |reason, hints, warnings| {
        Ok(Structural::Refuted(Box::new(EndofunctionCertificate::refuted(f, reason, hints, warnings))))
    };
    let pf = match partial_fractions(f) {
        Ok(pf) => pf,
        Err(Error::PoleInUpperHalfPlane(p)) => {
            let hints = around(p, 1e-3 * p.im).collect();
            return refute(Refutation::PoleInUpperHalfPlane { pole: p }, hints, Vec::new());
        }
        Err(e) => return Err(e),
    };
    let w = pf.warnings.clone();
    if !pf.higher.is_empty() {
        let degree = pf.higher.len() + 1;
        return refute(Refutation::HigherDegree { degree }, far_hints(), w);
    }
    let tol = 1e-12 * scale_of(f);
    if pf.a.im.abs() > tol {
        return refute(Refutation::NonRealSlope { a: pf.a }, far_hints(), w);
    }
    if pf.a.re < -tol {
        return refute(Refutation::NegativeSlope { a: pf.a.re }, far_hints(), w);
    }
    for p in &pf.poles {
        if p.order > 1 {
            return refute(Refutation::NonSimpleRealPole { s: p.s, order: p.order }, pole_hints(p.s), w);
        }
    }
    for p in &pf.poles {
        if p.c.im.abs() > 1e-10 * (1.0 + p.c.norm()) {
            return refute(Refutation::NonRealResidue { s: p.s, c: p.c }, pole_hints(p.s), w);
        }
        if p.c.re <= 0.0 {
            return refute(Refutation::NegativeResidue { s: p.s, c: p.c.re }, pole_hints(p.s), w);
        }
    }
    if real_case && pf.is_constant() {
        return refute(Refutation::RealConstant, Vec::new(), w);
    }
    Ok(Structural::Ok(pf))
}

fn lambda_zero(pf: &PartialFractionForm) -> Vec<Atom> {
    let mut atoms: Vec<Atom> = pf
        .poles
        .iter()
        .map(|p| Atom::finite(p.s, p.c.re / (1.0 + p.s * p.s)))
        .collect();
    if pf.a.re > 0.0 {
        atoms.push(Atom::new(ExtendedReal::Infinity, pf.a.re));
    }
    atoms
}

/// Endofunction test for real rational functions: every pole real and
/// simple with positive residue, `a ≥ 0`, `f` not constant.
///
/// On success the measure is `a δ_∞ + Σ c_j/(1+s_j²) δ_{s_j}` and
/// `α = b + Σ c_j s_j/(1+s_j²)`.
pub fn check_real_rational(f: &RationalFunction) -> Result<EndofunctionCertificate> {
    if !f.is_real(1e-12) {
        return Err(Error::InvalidArgument("coefficients are not real".into()));
    }
    let pf = match structural(f, true)? {
        Structural::Refuted(c) => return Ok(*c),
        Structural::Ok(pf) => pf,
    };
    let alpha = pf.b.re + pf.poles.iter().map(|p| p.c.re * p.s / (1.0 + p.s * p.s)).sum::<f64>();
    let measure = BoundaryMeasure::new(lambda_zero(&pf), None)?;
    Ok(EndofunctionCertificate {
        verdict: true,
        alpha: Some(alpha),
        measure: Some(measure),
        constant: None,
        min_im_psi: None,
        witness: None,
        reason: None,
        warnings: pf.warnings,
    })
}

/// `Im ψ = N/D` on `ℝ` for `ψ = P/Q`: `N = Im(P Q̄)`, `D = |Q|²`.
fn imaginary_part_on_line(psi: &RationalFunction) -> (Vec<f64>, Vec<f64>) {
    let p = psi.numerator();
    let q = psi.denominator();
    let n = (p * &q.conj()).imag_part();
    let d = (q * &q.conj()).real_part();
    (n, d)
}

/// `min_ℝ Im ψ` (with the value `0` at `∞`) and a minimizer, `None` meaning `∞`.
fn min_im_psi(psi: &RationalFunction) -> Result<(f64, Option<f64>)> {
    if psi.is_zero() {
        return Ok((0.0, None));
    }
    let (n, d) = imaginary_part_on_line(psi);
    let (np, dp) = (Polynomial::from_real(&n), Polynomial::from_real(&d));
    let crit_poly = &np.derivative() * &dp - &np * &dp.derivative();
    let crit = real_roots(&crit_poly.real_part(), 1e-7)
        .map_err(|e| Error::CriticalPointFailure(e.to_string()))?;
    let mut best = (0.0, None);
    for x in crit {
        let v = np.eval_real(x).re / dp.eval_real(x).re;
        if !v.is_finite() {
            return Err(Error::CriticalPointFailure(format!("Im ψ not finite at {x}")));
        }
        if v < best.0 {
            best = (v, Some(x));
        }
    }
    Ok(best)
}

/// Endofunction test for rational functions with non-real coefficients:
/// `f = a z + (b + ic) + Σ c_j/(s_j − z) + ψ` is an endofunction iff the
/// real-pole part is admissible and `c ≥ −min_ℝ Im ψ`.
///
/// On success the measure is the atomic part plus the density
/// `(c + Im ψ(s))/(π(1+s²))`, and `α = Re f(i)`.
pub fn check_nonreal_rational(f: &RationalFunction) -> Result<EndofunctionCertificate> {
    let pf = match structural(f, false)? {
        Structural::Refuted(c) => return Ok(*c),
        Structural::Ok(pf) => pf,
    };
    let c = pf.b.im;
    let (m, argmin) = min_im_psi(&pf.remainder)?;
    let tol = 1e-10 * (1.0 + m.abs());
    if c < -m - tol {
        let hints = match argmin {
            Some(x) => (2..=10).map(|k| Complex64::new(x, 10f64.powi(-k))).collect(),
            None => far_hints(),
        };
        let mut cert = EndofunctionCertificate::refuted(f, Refutation::BelowMinimum { c, min: m }, hints, pf.warnings);
        cert.constant = Some(c);
        cert.min_im_psi = Some(m);
        return Ok(cert);
    }
    let density = if pf.remainder.is_zero() && c <= tol {
        None
    } else {
        let (n, d) = imaginary_part_on_line(&pf.remainder);
        let dens_num = (Polynomial::from_real(&d).scale(Complex64::new(c, 0.0)) + Polynomial::from_real(&n)).real_part();
        let dens_den = (&Polynomial::from_real(&d) * &Polynomial::from_real(&[PI, 0.0, PI])).real_part();
        Some(DensitySpec::rational(dens_num, dens_den)?)
    };
    let measure = BoundaryMeasure::new(lambda_zero(&pf), density)?;
    Ok(EndofunctionCertificate {
        verdict: true,
        alpha: Some(f.eval(Complex64::new(0.0, 1.0)).re),
        measure: Some(measure),
        constant: Some(c),
        min_im_psi: Some(m),
        witness: None,
        reason: None,
        warnings: pf.warnings,
    })
}

/// Dispatches to the real or non-real check.
pub fn check_rational(f: &RationalFunction) -> Result<EndofunctionCertificate> {
    if f.is_real(1e-12) {
        check_real_rational(f)
    } else {
        check_nonreal_rational(f)
    }
}
