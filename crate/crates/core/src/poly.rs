//! Dense univariate polynomials with complex coefficients, stored in
//! ascending degree order, plus the root finders the rest of the crate
//! relies on.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![ZERO])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `lead · Π (z − r)`
    pub fn from_roots(roots: &[Complex64], lead: Complex64) -> Self {
        let mut p = Self::constant(lead);
        for &r in roots {
            p = p.mul_linear(r);
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients below `rel` times the largest one.
    pub fn trimmed(&self, rel: f64) -> Self {
        let scale = self.norm_inf();
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().unwrap().norm() <= rel * scale {
            c.pop();
        }
        Self::new(c)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Coefficient-wise complex conjugate; on the real line this is `conj(p(x))`.
    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    pub fn imag_part(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.im).collect()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }

    /// `p(z) · (z − r)`
    pub fn mul_linear(&self, r: Complex64) -> Self {
        let mut out = vec![ZERO; self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k + 1] += c;
            out[k] -= c * r;
        }
        Self::new(out)
    }

    /// Synthetic division by `(z − r)`; returns quotient and remainder `p(r)`.
    pub fn div_linear(&self, r: Complex64) -> (Self, Complex64) {
        let n = self.coeffs.len();
        if n == 1 {
            return (Self::zero(), self.coeffs[0]);
        }
        let mut q = vec![ZERO; n - 1];
        let mut acc = ZERO;
        for k in (0..n).rev() {
            acc = acc * r + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (Self::new(q), acc)
    }

    /// Euclidean division `self = q · d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dn = d.degree();
        if self.degree() < dn {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let lead = d.leading();
        let mut q = vec![ZERO; self.degree() - dn + 1];
        for k in (0..q.len()).rev() {
            let c = rem[k + dn] / lead;
            q[k] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= c * dc;
            }
        }
        rem.truncate(dn.max(1));
        (Self::new(q), Self::new(rem))
    }

    /// Coefficients of `p(z + c)`.
    pub fn taylor_shift(&self, c: Complex64) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = a[j + 1] * c;
                a[j] += t;
            }
        }
        Self::new(a)
    }

    /// Homogenized substitution `(c z + d)^n · p((a z + b)/(c z + d))` with `n` given.
    pub fn compose_mobius(&self, a: Complex64, b: Complex64, c: Complex64, d: Complex64, n: usize) -> Self {
        assert!(n >= self.degree());
        let num = Self::new(vec![b, a]);
        let den = Self::new(vec![d, c]);
        let mut out = Self::zero();
        for (k, &coef) in self.coeffs.iter().enumerate() {
            if coef == ZERO {
                continue;
            }
            let term = num.pow(k) * den.pow(n - k);
            out = out + term.scale(coef);
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::constant(ONE);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// All complex roots, counted with multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let p = self.trimmed(1e-15);
        if p.degree() == 0 {
            return Ok(Vec::new());
        }
        // exact zeros at the origin are peeled off first
        let mut zeros = 0;
        while zeros < p.coeffs.len() - 1 && p.coeffs[zeros] == ZERO {
            zeros += 1;
        }
        let reduced = Self::new(p.coeffs[zeros..].to_vec());
        let mut roots = vec![ZERO; zeros];
        roots.extend(aberth(&reduced)?);
        Ok(roots)
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![ZERO; n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, &c) in rhs.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Polynomial::new(out)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Self) -> Polynomial {
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Self) -> Polynomial {
        &self * &rhs
    }
}

fn aberth(p: &Polynomial) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p.leading();
    if n == 1 {
        return Ok(vec![-p.coeffs[0] / lead]);
    }
    let dp = p.derivative();

    // Fujiwara-type bound for the starting circle
    let radius = (0..n)
        .map(|k| (p.coeffs[k] / lead).norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let mut converged = false;
    for _ in 0..800 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let pz = p.eval(z[k]);
            if pz == ZERO {
                continue;
            }
            let ratio = pz / dp.eval(z[k]);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| ONE / (z[k] - z[j]))
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if z.iter().any(|r| !r.is_finite()) {
        return Err(Error::RootFindingFailure(
            "Aberth iteration produced non-finite roots".into(),
        ));
    }
    if !converged {
        // clustered roots converge linearly; accept if the residual is tiny
        let scale: f64 = p.coeffs.iter().map(|c| c.norm()).sum();
        let worst = z
            .iter()
            .map(|&r| p.eval(r).norm() / (scale * (1.0 + r.norm()).powi(n as i32)))
            .fold(0.0, f64::max);
        if worst > 1e-9 {
            return Err(Error::RootFindingFailure(format!(
                "Aberth iteration stalled (relative residual {worst:e})"
            )));
        }
    }
    Ok(z)
}

/// Real roots of a real polynomial via eigenvalues of its companion matrix,
/// each polished by Newton steps. Roots whose imaginary part exceeds
/// `imag_tol · (1 + |root|)` are discarded.
pub fn real_roots(coeffs: &[f64], imag_tol: f64) -> Result<Vec<f64>> {
    let p = Polynomial::from_real(coeffs).trimmed(1e-15);
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let c: Vec<f64> = p.real_part();
    let lead = c[n];
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -c[i] / lead;
    }
    let eig = companion.complex_eigenvalues();
    if eig.iter().any(|e| !e.is_finite()) {
        return Err(Error::RootFindingFailure(
            "companion eigenvalues are not finite".into(),
        ));
    }
    let dp = p.derivative();
    let mut out: Vec<f64> = eig
        .iter()
        .filter(|e| e.im.abs() <= imag_tol * (1.0 + e.re.abs()))
        .map(|e| {
            let mut x = e.re;
            for _ in 0..4 {
                let d = dp.eval_real(x).re;
                if d == 0.0 {
                    break;
                }
                let step = p.eval_real(x).re / d;
                if !step.is_finite() || step.abs() > 1e-3 * (1.0 + x.abs()) {
                    break;
                }
                x -= step;
            }
            x
        })
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Groups numerically coincident roots; returns `(mean location, multiplicity)`.
pub fn cluster_roots(roots: &[Complex64], rel_tol: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    let mut members: Vec<Vec<Complex64>> = Vec::new();
    for &r in roots {
        let hit = clusters
            .iter()
            .position(|(c, _)| (*c - r).norm() <= rel_tol * (1.0 + r.norm()));
        match hit {
            Some(i) => {
                members[i].push(r);
                let m = &members[i];
                let mean = m.iter().sum::<Complex64>() / m.len() as f64;
                clusters[i] = (mean, m.len());
            }
            None => {
                clusters.push((r, 1));
                members.push(vec![r]);
            }
        }
    }
    clusters
}

/// Minimum of the real polynomial over ℝ together with a minimizer;
/// `None` when the polynomial is unbounded below.
pub fn min_on_real_line(coeffs: &[f64]) -> Result<Option<(f64, f64)>> {
    let p = Polynomial::from_real(coeffs).trimmed(1e-15);
    let n = p.degree();
    let c = p.real_part();
    if n == 0 {
        return Ok(Some((c[0], 0.0)));
    }
    if n % 2 == 1 || c[n] < 0.0 {
        return Ok(None);
    }
    let crit = real_roots(&p.derivative().real_part(), 1e-7)?;
    let best = crit
        .into_iter()
        .map(|x| (p.eval_real(x).re, x))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    Ok(best.or(Some((c[0], 0.0))))
}
