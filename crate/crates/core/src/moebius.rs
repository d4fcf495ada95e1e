//! Möbius action of 2×2 complex matrices, endomatrices of the upper
//! half-plane and their boundary geometry.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::representation::ExtendedReal;

/// Below this modulus a normalized Hermitian coefficient is treated as zero.
const FORM_EPS: f64 = 1e-13;
/// Slack for the closed-half-plane containment tests.
const CONTAIN_EPS: f64 = 1e-10;
/// Band around κ = 1 treated as contact.
pub const CONTACT_TOL: f64 = 1e-9;
/// Imaginary parts below this (after normalization) count as real.
pub const REAL_TOL: f64 = 1e-10;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtendedComplex {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Self::Finite(z) => Some(z),
            Self::Infinity => None,
        }
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        Self::Finite(z)
    }
}

impl From<ExtendedReal> for ExtendedComplex {
    fn from(s: ExtendedReal) -> Self {
        match s {
            ExtendedReal::Finite(x) => Self::Finite(Complex64::new(x, 0.0)),
            ExtendedReal::Infinity => Self::Infinity,
        }
    }
}

/// Invertible 2×2 complex matrix, stored with unit Frobenius norm and its
/// first non-negligible entry real positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct Matrix2C {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MatrixJson {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl From<Matrix2C> for MatrixJson {
    fn from(m: Matrix2C) -> Self {
        Self { a: m.a, b: m.b, c: m.c, d: m.d }
    }
}

impl TryFrom<MatrixJson> for Matrix2C {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        Matrix2C::new(m.a, m.b, m.c, m.d)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Matrix2C {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let entries = [a, b, c, d];
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        let norm = entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::SingularMatrix(0.0));
        }
        let lead = entries
            .iter()
            .find(|z| z.norm() > 1e-12 * norm)
            .copied()
            .unwrap_or(a);
        let phase = lead.conj() / (lead.norm() * norm);
        let m = Self {
            a: a * phase,
            b: b * phase,
            c: c * phase,
            d: d * phase,
        };
        let det = m.det().norm();
        if det <= 1e-14 {
            return Err(Error::SingularMatrix(det));
        }
        Ok(m)
    }

    pub fn real(a: f64, b: f64, c_: f64, d: f64) -> Result<Self> {
        Self::new(c(a, 0.0), c(b, 0.0), c(c_, 0.0), c(d, 0.0))
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0).expect("identity")
    }

    /// The inversion `z ↦ −1/z`.
    pub fn inversion() -> Self {
        Self::real(0.0, 1.0, -1.0, 0.0).expect("inversion")
    }

    /// `((s, 1), (−1, s))`, whose action is the atomic function φ_s;
    /// the identity for `s = ∞`.
    pub fn atomic(s: ExtendedReal) -> Self {
        match s {
            ExtendedReal::Finite(s) => Self::real(s, 1.0, -1.0, s).expect("atomic matrix"),
            ExtendedReal::Infinity => Self::identity(),
        }
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a).expect("inverse of an invertible matrix")
    }

    pub fn scale(&self, k: Complex64) -> Result<Self> {
        Self::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    /// True when the matrix is a complex multiple of a real matrix.
    pub fn is_real_proportional(&self) -> bool {
        self.entries().iter().all(|z| z.im.abs() <= REAL_TOL)
    }

    /// Largest 2×2 minor of the two normalized matrices stacked as rows;
    /// zero exactly when they are proportional.
    pub fn proportionality_residual(&self, other: &Self) -> f64 {
        let x = self.entries();
        let y = other.entries();
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                worst = worst.max((x[i] * y[j] - x[j] * y[i]).norm());
            }
        }
        worst
    }

    /// `(a z + b)/(c z + d)` on the Riemann sphere.
    pub fn apply(&self, z: ExtendedComplex) -> ExtendedComplex {
        match z {
            ExtendedComplex::Infinity => {
                if self.c == c(0.0, 0.0) {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::Finite(self.a / self.c)
                }
            }
            ExtendedComplex::Finite(z) => {
                let den = self.c * z + self.d;
                if den == c(0.0, 0.0) {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// `(a z + b)/(c z + d)` for a finite point, without the ∞ bookkeeping.
    pub fn map(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// `M⁻¹.s` for a boundary point, snapped to ℝ̄ when its imaginary part
    /// is negligible; `None` if it leaves the real line.
    pub fn preimage_real(&self, s: ExtendedReal) -> Option<ExtendedReal> {
        // M⁻¹ ∝ ((d, −b), (−c, a))
        let (num, den) = match s {
            ExtendedReal::Finite(s) => (self.d * s - self.b, self.a - self.c * s),
            ExtendedReal::Infinity => (self.d, -self.c),
        };
        snap_real(num, den)
    }

    /// Coefficients `(A, G, C)` of `H(w) = A|w|² + Im(G w) + C`, which is
    /// positive exactly on the image of the upper half-plane.
    pub fn image_form(&self) -> (f64, Complex64, f64) {
        let big_a = (self.c * self.d.conj()).im;
        let g = self.d * self.a.conj() - self.b.conj() * self.c;
        let big_c = (self.a * self.b.conj()).im;
        (big_a, g, big_c)
    }

    /// The circline `M.ℝ̄`.
    pub fn boundary_image(&self) -> Result<Circline> {
        let (big_a, g, big_c) = self.image_form();
        if big_a.abs() <= FORM_EPS {
            if g.norm() <= FORM_EPS {
                return Err(Error::DegenerateImage);
            }
            let point = c(0.0, -big_c) * g.conj() / g.norm_sqr();
            let mut direction = g.conj() / g.norm();
            if direction.re < 0.0 || (direction.re == 0.0 && direction.im < 0.0) {
                direction = -direction;
            }
            return Ok(Circline::Line { point, direction });
        }
        let center = c(0.0, -1.0) * g.conj() / (2.0 * big_a);
        let disc = g.norm_sqr() - 4.0 * big_a * big_c;
        if !(disc > 0.0) {
            return Err(Error::DegenerateImage);
        }
        Ok(Circline::Circle {
            center,
            radius: disc.sqrt() / (2.0 * big_a.abs()),
        })
    }

    /// Whether `M.C₊ ⊂ C₊`.
    pub fn is_endomatrix(&self) -> bool {
        let (big_a, g, big_c) = self.image_form();
        let scale = g.norm().max(big_a.abs()).max(big_c.abs());
        if big_a.abs() <= FORM_EPS {
            // half-plane {Im(G w) > −C}: must be {Im w > r} with r ≥ 0
            g.re > 0.0 && g.im.abs() <= CONTAIN_EPS * scale && big_c <= CONTAIN_EPS * scale
        } else if big_a > 0.0 {
            // exterior of a circle
            false
        } else {
            // open disk: Im center ≥ radius, i.e. Re G ≥ √(|G|² − 4AC)
            let disc = g.norm_sqr() - 4.0 * big_a * big_c;
            disc > 0.0 && g.re > 0.0 && g.re - disc.sqrt() >= -CONTAIN_EPS * scale
        }
    }

    /// Contact degree `κ = radius / Im center`; `None` for real-proportional
    /// matrices where it is undefined.
    pub fn contact_degree(&self) -> Option<f64> {
        if self.is_real_proportional() {
            return None;
        }
        let (big_a, g, big_c) = self.image_form();
        if big_a.abs() <= FORM_EPS {
            return Some(1.0);
        }
        let disc = (g.norm_sqr() - 4.0 * big_a * big_c).max(0.0);
        Some((disc.sqrt() / g.re).min(1.0))
    }

    pub fn classify(&self) -> Result<EndoClass> {
        if !self.is_endomatrix() {
            return Err(Error::NotEndomatrix);
        }
        if self.is_real_proportional() {
            return Ok(EndoClass::RealOrbit);
        }
        let kappa = self.contact_degree().expect("non-real matrix");
        Ok(match self.boundary_image()? {
            Circline::Line { point, .. } => EndoClass::ContactLine { offset: point.im.max(0.0) },
            Circline::Circle { center, .. } if (kappa - 1.0).abs() <= CONTACT_TOL => {
                EndoClass::ContactCircle { tangency: center.re }
            }
            disk @ Circline::Circle { .. } => EndoClass::NonContact { kappa, disk },
        })
    }

    /// `ₛM = ((s, 1), (−1, s)) M / √(1+s²)`, and `M` itself at `s = ∞`.
    pub fn left_translate(&self, s: ExtendedReal) -> Self {
        &Self::atomic(s) * self
    }

    /// Writes the atomic function of `ₛM` as `p φ_t + q` when `ₛM` has an
    /// unbounded image.
    pub fn contact_decompose(&self, s: ExtendedReal) -> Result<ContactDecomposition> {
        let sm = self.left_translate(s);
        if !sm.is_endomatrix() {
            return Err(Error::NotEndomatrix);
        }
        let (big_a, _, _) = sm.image_form();
        if big_a.abs() > 1e-9 {
            return Err(Error::NotUnboundedCase(format!(
                "the translate at s = {s} maps the half-plane onto a bounded disk"
            )));
        }
        let t = self.preimage_real(s).ok_or_else(|| {
            Error::NotUnboundedCase(format!("M⁻¹.{s} is not a boundary point"))
        })?;
        let (a, b, c_, d) = (self.a, self.b, self.c, self.d);
        let det = self.det();
        let (p, q) = match s {
            ExtendedReal::Finite(s) => {
                let den = (c_ * s - a).powi(2) + (d * s - b).powi(2);
                let p = det * (1.0 + s * s) / den;
                let q = ((a * c_ + b * d) * (s * s - 1.0) + (c_ * c_ + d * d - a * a - b * b) * s) / den;
                (p, q)
            }
            ExtendedReal::Infinity => {
                let den = c_ * c_ + d * d;
                (det / den, (a * c_ + b * d) / den)
            }
        };
        Ok(ContactDecomposition { p: p.re, q, t })
    }
}

fn snap_real(num: Complex64, den: Complex64) -> Option<ExtendedReal> {
    let scale = num.norm().max(den.norm());
    if den.norm() <= 1e-13 * scale {
        return Some(ExtendedReal::Infinity);
    }
    let t = num / den;
    if t.im.abs() <= 1e-8 * (1.0 + t.norm()) {
        Some(ExtendedReal::Finite(t.re))
    } else {
        None
    }
}

impl Mul for &Matrix2C {
    type Output = Matrix2C;

    fn mul(self, o: &Matrix2C) -> Matrix2C {
        Matrix2C::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
        .expect("product of invertible matrices")
    }
}

impl Mul for Matrix2C {
    type Output = Matrix2C;

    fn mul(self, o: Matrix2C) -> Matrix2C {
        &self * &o
    }
}

/// A circle or an extended line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Circline {
    Circle { center: Complex64, radius: f64 },
    Line { point: Complex64, direction: Complex64 },
}

impl Circline {
    /// Signed distance-like test: `true` when the point lies on the circline
    /// within `tol` (relative to the radius for circles).
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        match *self {
            Circline::Circle { center, radius } => ((z - center).norm() - radius).abs() <= tol * (1.0 + radius),
            Circline::Line { point, direction } => ((z - point) * direction.conj()).im.abs() <= tol * (1.0 + (z - point).norm()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum EndoClass {
    RealOrbit,
    NonContact { kappa: f64, disk: Circline },
    ContactCircle { tangency: f64 },
    ContactLine { offset: f64 },
}

impl EndoClass {
    pub fn kappa(&self) -> Option<f64> {
        match self {
            Self::RealOrbit => None,
            Self::NonContact { kappa, .. } => Some(*kappa),
            Self::ContactCircle { .. } | Self::ContactLine { .. } => Some(1.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RealOrbit => "real-orbit",
            Self::NonContact { .. } => "non-contact",
            Self::ContactCircle { .. } => "contact-circle",
            Self::ContactLine { .. } => "contact-line",
        }
    }
}

/// Matrix certified to map the upper half-plane into itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endomatrix {
    m: Matrix2C,
    class: EndoClass,
}

impl Endomatrix {
    pub fn new(m: Matrix2C) -> Result<Self> {
        let class = m.classify()?;
        Ok(Self { m, class })
    }

    pub fn identity() -> Self {
        Self::new(Matrix2C::identity()).expect("identity is an endomatrix")
    }

    pub fn matrix(&self) -> &Matrix2C {
        &self.m
    }

    pub fn class(&self) -> EndoClass {
        self.class
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.m.map(z)
    }

    pub fn compose(&self, other: &Endomatrix) -> Result<Self> {
        Self::new(&self.m * &other.m)
    }

    /// Class of the left translate `ₛM`.
    pub fn translate_class(&self, s: ExtendedReal) -> Result<EndoClass> {
        self.m.left_translate(s).classify()
    }
}

/// `φ_{ₛM} = p φ_t + q` with `p > 0`, `Im q ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactDecomposition {
    pub p: f64,
    pub q: Complex64,
    pub t: ExtendedReal,
}

impl ContactDecomposition {
    /// `((p, q), (0, 1)) · ((t, 1), (−1, t))`.
    pub fn matrix(&self) -> Result<Matrix2C> {
        let upper = Matrix2C::new(c(self.p, 0.0), self.q, c(0.0, 0.0), c(1.0, 0.0))?;
        Ok(&upper * &Matrix2C::atomic(self.t))
    }
}
