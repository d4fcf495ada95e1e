//! Absolutely continuous parts of boundary measures.
//!
//! Every density `ρ` here is described through its *weighted* form
//! `w(x) = π (1 + x²) ρ(x)`, which stays bounded on the whole circle ℝ̄ and
//! is what the quadrature sees after the substitution `x = tan(θ/2)`:
//! `ρ(x) dx = w(θ) dθ / 2π`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{self, Polynomial};

/// Relative slack tolerated when checking that a density is nonnegative.
const NONNEG_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    Rational(RationalDensity),
    Grid(GridDensity),
    Poles(PoleDensity),
}

impl DensitySpec {
    pub fn rational(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        RationalDensity::new(num, den).map(Self::Rational)
    }

    pub fn grid(nodes: Vec<f64>, values: Vec<f64>, tail: f64) -> Result<Self> {
        GridDensity::new(nodes, values, tail).map(Self::Grid)
    }

    pub fn poles(constant: Complex64, poles: Vec<Pole>) -> Result<Self> {
        PoleDensity::new(constant, poles).map(Self::Poles)
    }

    /// The standard Cauchy density `c / (π (1 + x²))`.
    pub fn cauchy(c: f64) -> Result<Self> {
        Self::poles(Complex64::new(0.0, c), Vec::new())
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::Rational(r) => r.value(x),
            Self::Grid(g) => g.value(x),
            Self::Poles(p) => p.value(x),
        }
    }

    /// `π (1 + x²) ρ(x)`, evaluated without overflow for large `|x|`.
    pub fn weighted(&self, x: f64) -> f64 {
        match self {
            Self::Rational(r) => r.weighted(x),
            Self::Grid(g) => g.weighted(x),
            Self::Poles(p) => p.weighted(x),
        }
    }

    /// Limit of the weighted density at ∞.
    pub fn weighted_at_infinity(&self) -> f64 {
        match self {
            Self::Rational(r) => r.weighted_at_infinity(),
            Self::Grid(g) => g.tail,
            Self::Poles(p) => p.constant.im.max(0.0),
        }
    }

    /// Locations on ℝ where the density has kinks or sharp peaks.
    pub fn features(&self) -> Vec<f64> {
        match self {
            Self::Rational(r) => r.features.clone(),
            Self::Grid(g) => g.nodes.clone(),
            Self::Poles(p) => p.poles.iter().map(|p| p.at.re).collect(),
        }
    }

    /// Total mass `∫ ρ dx`, exact where a closed form exists.
    pub fn mass(&self) -> Option<f64> {
        match self {
            Self::Rational(r) => r.to_poles().ok().map(|p| p.mass()),
            Self::Grid(g) => Some(g.mass()),
            Self::Poles(p) => Some(p.mass()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Rational(_) => "rational",
            Self::Grid(_) => "grid",
            Self::Poles(_) => "poles",
        }
    }

    /// Exact pole form when available (Rational with simple roots, Poles).
    pub fn as_poles(&self) -> Option<PoleDensity> {
        match self {
            Self::Rational(r) => r.to_poles().ok(),
            Self::Poles(p) => Some(p.clone()),
            Self::Grid(_) => None,
        }
    }
}

/// Evaluates `x^k · num(x) / den(x)` stably for any finite `x`.
fn ratio(num: &[f64], den: &[f64], x: f64, k: i32) -> f64 {
    if x.abs() <= 1.0 {
        let n = num.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        let d = den.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        return n / d * x.powi(k);
    }
    // p(x) = x^deg · p_rev(1/x)
    let u = 1.0 / x;
    let n = num.iter().fold(0.0, |acc, &c| acc * u + c);
    let d = den.iter().fold(0.0, |acc, &c| acc * u + c);
    let shift = den.len() as i32 - num.len() as i32 - k;
    n / d * u.powi(shift)
}

/// `ρ = num / den` with real coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalDensity {
    num: Vec<f64>,
    den: Vec<f64>,
    features: Vec<f64>,
}

impl RationalDensity {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMeasure(msg));
        if num.iter().chain(den.iter()).any(|c| !c.is_finite()) {
            return bad("rational density has non-finite coefficients".into());
        }
        let num = Polynomial::from_real(&num).trimmed(0.0).real_part();
        let den = Polynomial::from_real(&den).trimmed(0.0).real_part();
        if den.iter().all(|&c| c == 0.0) {
            return bad("rational density has a zero denominator".into());
        }
        let num_zero = num.iter().all(|&c| c == 0.0);
        if !num_zero && num.len() + 1 > den.len() - 1 {
            return bad(format!(
                "rational density needs deg(num) <= deg(den) - 2, got {} and {}",
                num.len() - 1,
                den.len() - 1
            ));
        }
        let roots = Polynomial::from_real(&den).roots()?;
        for r in &roots {
            if r.im.abs() <= 1e-12 * (1.0 + r.re.abs()) {
                return bad(format!("denominator has a real root near {}", r.re));
            }
        }
        if !num_zero {
            // den keeps one sign on ℝ; the numerator must share it
            let sign = den[0].signum();
            let signed: Vec<f64> = num.iter().map(|&c| c * sign).collect();
            let scale = signed.iter().map(|c| c.abs()).fold(0.0, f64::max);
            match poly::min_on_real_line(&signed)? {
                Some((m, x)) if m < -NONNEG_SLACK * scale => {
                    return bad(format!("rational density is negative near x = {x}"));
                }
                None => return bad("rational density is negative for large |x|".into()),
                _ => {}
            }
        }
        let mut features: Vec<f64> = roots.iter().map(|r| r.re).collect();
        features.sort_by(f64::total_cmp);
        features.dedup();
        Ok(Self { num, den, features })
    }

    pub fn numerator(&self) -> &[f64] {
        &self.num
    }

    pub fn denominator(&self) -> &[f64] {
        &self.den
    }

    pub fn value(&self, x: f64) -> f64 {
        ratio(&self.num, &self.den, x, 0).max(0.0)
    }

    pub fn weighted(&self, x: f64) -> f64 {
        if x.abs() <= 1.0 {
            PI * (1.0 + x * x) * self.value(x)
        } else {
            // (1 + x²) ρ = (1 + u²) · ρ / u²
            let u = 1.0 / x;
            PI * (1.0 + u * u) * ratio(&self.num, &self.den, x, 2).max(0.0)
        }
    }

    fn weighted_at_infinity(&self) -> f64 {
        if self.num.len() + 2 == self.den.len() && self.num.iter().any(|&c| c != 0.0) {
            (PI * self.num.last().unwrap() / self.den.last().unwrap()).max(0.0)
        } else {
            0.0
        }
    }

    /// Partial-fraction form through the residues at the lower half-plane
    /// roots of the denominator; fails for repeated roots.
    pub fn to_poles(&self) -> Result<PoleDensity> {
        if self.num.iter().all(|&c| c == 0.0) {
            return PoleDensity::new(Complex64::new(0.0, 0.0), Vec::new());
        }
        let den = Polynomial::from_real(&self.den);
        let num = Polynomial::from_real(&self.num);
        let roots = den.roots()?;
        let clusters = poly::cluster_roots(&roots, 1e-7);
        if clusters.iter().any(|(_, m)| *m > 1) {
            return Err(Error::UnsupportedDensity(
                "rational density with a repeated denominator root has no simple pole form".into(),
            ));
        }
        let dden = den.derivative();
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut kappa = Complex64::new(0.0, 0.0);
        let mut poles = Vec::new();
        for &(r, _) in clusters.iter().filter(|(r, _)| r.im < 0.0) {
            let residue = num.eval(r) / dden.eval(r);
            let c = -two_pi_i * residue;
            kappa -= c * r;
            poles.push(Pole {
                residue: c * (1.0 + r * r),
                at: r,
            });
        }
        PoleDensity::new(kappa, poles)
    }
}

/// Piecewise-linear interpolation of the weighted density in the angle
/// `θ = 2 atan x`, with the Cauchy tail `tail / (π (1 + x²))` outside the
/// node range.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    nodes: Vec<f64>,
    values: Vec<f64>,
    tail: f64,
    angles: Vec<f64>,
    weights: Vec<f64>,
}

impl GridDensity {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, tail: f64) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidMeasure(msg.to_string()));
        if nodes.len() != values.len() {
            return bad("grid density needs as many values as nodes");
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return bad("grid nodes must be finite and strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return bad("grid values must be finite and nonnegative");
        }
        if !tail.is_finite() || tail < 0.0 {
            return bad("grid tail constant must be finite and nonnegative");
        }
        let angles = nodes.iter().map(|x| 2.0 * x.atan()).collect();
        let weights = nodes
            .iter()
            .zip(&values)
            .map(|(x, v)| PI * (1.0 + x * x) * v)
            .collect();
        Ok(Self {
            nodes,
            values,
            tail,
            angles,
            weights,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    fn weighted_at_angle(&self, theta: f64) -> f64 {
        let n = self.angles.len();
        if n == 0 || theta < self.angles[0] || theta > self.angles[n - 1] {
            return self.tail;
        }
        let k = self.angles.partition_point(|&a| a <= theta);
        if k == n {
            return self.weights[n - 1];
        }
        let (a0, a1) = (self.angles[k - 1], self.angles[k]);
        let t = (theta - a0) / (a1 - a0);
        self.weights[k - 1] * (1.0 - t) + self.weights[k] * t
    }

    pub fn weighted(&self, x: f64) -> f64 {
        self.weighted_at_angle(2.0 * x.atan())
    }

    pub fn value(&self, x: f64) -> f64 {
        self.weighted(x) / (PI * (1.0 + x * x))
    }

    fn mass(&self) -> f64 {
        let n = self.angles.len();
        if n == 0 {
            return self.tail;
        }
        let inner: f64 = self
            .angles
            .windows(2)
            .zip(self.weights.windows(2))
            .map(|(a, w)| 0.5 * (w[0] + w[1]) * (a[1] - a[0]))
            .sum();
        let outer = self.tail * (2.0 * PI - (self.angles[n - 1] - self.angles[0]));
        (inner + outer) / (2.0 * PI)
    }
}

/// One simple pole `residue / (at − x)` with `at` in the lower half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub residue: Complex64,
    pub at: Complex64,
}

/// Boundary density of the rational function
/// `g(z) = constant + Σ residue_k / (at_k − z)`, holomorphic on the closed
/// upper half-plane: `ρ(x) = Im g(x) / (π (1 + x²))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleDensity {
    constant: Complex64,
    poles: Vec<Pole>,
}

impl PoleDensity {
    pub fn new(constant: Complex64, poles: Vec<Pole>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMeasure(msg));
        if !constant.is_finite() || poles.iter().any(|p| !p.residue.is_finite() || !p.at.is_finite()) {
            return bad("pole density has non-finite data".into());
        }
        if let Some(p) = poles.iter().find(|p| !(p.at.im < 0.0)) {
            return bad(format!("pole density needs poles in the lower half-plane, got {}", p.at));
        }
        let density = Self { constant, poles };
        density.check_nonnegative()?;
        Ok(density)
    }

    /// Skips the nonnegativity check, for densities that are Poisson
    /// transforms of positive measures by construction.
    pub(crate) fn from_parts(constant: Complex64, poles: Vec<Pole>) -> Self {
        Self { constant, poles }
    }

    /// `Σ weight_k · density_k`, with nonnegative weights.
    pub fn combine<'a>(parts: impl IntoIterator<Item = (f64, &'a PoleDensity)>) -> Self {
        let mut constant = Complex64::new(0.0, 0.0);
        let mut poles = Vec::new();
        for (w, p) in parts {
            constant += p.constant * w;
            poles.extend(p.poles.iter().map(|q| Pole {
                residue: q.residue * w,
                at: q.at,
            }));
        }
        Self { constant, poles }
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    /// `g(z)`; valid for any `z` away from the poles.
    pub fn g(&self, z: Complex64) -> Complex64 {
        self.poles
            .iter()
            .fold(self.constant, |acc, p| acc + p.residue / (p.at - z))
    }

    pub fn weighted(&self, x: f64) -> f64 {
        self.g(Complex64::new(x, 0.0)).im.max(0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.weighted(x) / (PI * (1.0 + x * x))
    }

    /// Poisson's formula at `i`: the mass is `Im g(i)`.
    pub fn mass(&self) -> f64 {
        self.g(Complex64::new(0.0, 1.0)).im
    }

    /// `∫ (1 + s z)/(s − z) ρ(s) ds` for `z` in the upper half-plane.
    pub fn herglotz(&self, z: Complex64) -> Complex64 {
        self.g(z) - self.g(Complex64::new(0.0, 1.0)).re
    }

    /// Expands `Im g(x)` into `U(x) / V(x)` with real polynomials, `V = |Q|²`.
    pub fn to_real_ratio(&self) -> (Vec<f64>, Vec<f64>) {
        let q = Polynomial::from_roots(
            &self.poles.iter().map(|p| p.at).collect::<Vec<_>>(),
            Complex64::new(1.0, 0.0),
        );
        // g = P / Q with Q = Π (z − at_k) and residue/(at − z) = −residue/(z − at)
        let mut p = q.scale(self.constant);
        for (k, pole) in self.poles.iter().enumerate() {
            let others: Vec<Complex64> = self
                .poles
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, q)| q.at)
                .collect();
            p = p + Polynomial::from_roots(&others, -pole.residue);
        }
        let pq = &p * &q.conj();
        let v = (&q * &q.conj()).real_part();
        (pq.imag_part(), v)
    }

    fn check_nonnegative(&self) -> Result<()> {
        if self.constant.im < -NONNEG_SLACK * (1.0 + self.constant.norm()) {
            return Err(Error::InvalidMeasure(
                "pole density is negative for large |x|".into(),
            ));
        }
        if self.poles.is_empty() {
            return Ok(());
        }
        let (u, _) = self.to_real_ratio();
        let scale = u.iter().map(|c| c.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        match poly::min_on_real_line(&u)? {
            Some((m, x)) if m < -NONNEG_SLACK * scale => Err(Error::InvalidMeasure(format!(
                "pole density is negative near x = {x}"
            ))),
            // odd or negative leading terms can only arise from round-off here
            _ => Ok(()),
        }
    }
}
