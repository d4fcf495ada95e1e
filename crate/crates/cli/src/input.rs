//! JSON inputs shared by the subcommands.

use num_complex::Complex64;
use serde::Deserialize;

use pickfn::evaluation::{eval, eval_atomic};
use pickfn::moebius::Matrix2C;
use pickfn::{ExtendedReal, HerglotzFunction};

/// A function to probe: an explicit representation or a named closed form.
#[derive(Debug, Clone, Deserialize)]
pub struct FunctionInput {
    #[serde(default)]
    pub phi: Option<HerglotzFunction>,
    #[serde(default)]
    pub builtin: Option<Builtin>,
}

/// Closed-form Pick functions evaluated directly, not through a measure.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Builtin {
    Identity,
    Log,
    Sqrt,
    NegInv,
    Tan,
    Atomic { s: ExtendedReal },
}

impl Builtin {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            Self::Identity => z,
            Self::Log => z.ln(),
            Self::Sqrt => z.sqrt(),
            Self::NegInv => -1.0 / z,
            Self::Tan => z.tan(),
            Self::Atomic { s } => eval_atomic(s, z),
        }
    }
}

pub enum Probe {
    Phi(HerglotzFunction),
    Builtin(Builtin),
}

impl Probe {
    pub fn eval(&self, z: Complex64, tol: f64) -> pickfn::Result<Complex64> {
        match self {
            Self::Phi(phi) => eval(phi, z, tol),
            Self::Builtin(b) => Ok(b.eval(z)),
        }
    }
}

impl TryFrom<FunctionInput> for Probe {
    type Error = String;

    fn try_from(input: FunctionInput) -> Result<Self, String> {
        match (input.phi, input.builtin) {
            (Some(phi), None) => Ok(Self::Phi(phi)),
            (None, Some(b)) => Ok(Self::Builtin(b)),
            _ => Err("expected exactly one of \"phi\" or \"builtin\"".into()),
        }
    }
}

/// Test functions on ℝ̄ for the Markov operator.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    One,
    #[default]
    Cauchy,
    Odd,
    Arctan,
}

impl TestFunction {
    pub fn eval(self, s: ExtendedReal) -> Complex64 {
        let v = match (self, s) {
            (Self::One, _) => 1.0,
            (Self::Cauchy, ExtendedReal::Finite(x)) => 1.0 / (1.0 + x * x),
            (Self::Odd, ExtendedReal::Finite(x)) => x / (1.0 + x * x),
            (Self::Arctan, ExtendedReal::Finite(x)) => x.atan(),
            (Self::Arctan, ExtendedReal::Infinity) => std::f64::consts::FRAC_PI_2,
            (_, ExtendedReal::Infinity) => 0.0,
        };
        Complex64::new(v, 0.0)
    }
}

/// `eval` accepts a bare representation, `{phi, matrix}` for `φ(M.z)`, or
/// `{builtin}`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum EvalInput {
    Composed { phi: HerglotzFunction, matrix: Matrix2C },
    Builtin { builtin: Builtin },
    Plain(HerglotzFunction),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformInput {
    pub phi: HerglotzFunction,
    pub matrix: Matrix2C,
    #[serde(default)]
    pub f: TestFunction,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupInput {
    pub m: Matrix2C,
    pub n: Matrix2C,
    #[serde(default)]
    pub f: TestFunction,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PositivityInput {
    LinearFractional { a: Complex64, b: Complex64, c: Complex64 },
    Affine { a: Complex64, b: Complex64 },
    Function {
        #[serde(flatten)]
        function: FunctionInput,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CayleyInput {
    /// Disk point to half-plane point.
    Point { z: Complex64 },
    /// Half-plane point to disk point.
    Inverse { w: Complex64 },
    /// Boundary angle to `tan(t/2)`.
    Boundary { t: f64 },
    Measure {
        mu: pickfn::cayley::DiskMeasure,
        #[serde(default)]
        imag_at_zero: f64,
    },
}
