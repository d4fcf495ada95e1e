//! JSON wire format for measures and Herglotz functions.
//!
//! ```json
//! {"alpha": 0.0,
//!  "atoms": [{"loc": 1.5, "mass": 0.5}, {"loc": "inf", "mass": 1.0}],
//!  "density": {"kind": "rational", "num": [1.0], "den": [1.0, 0.0, 1.0]}}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Atom, BoundaryMeasure, DensitySpec, ExtendedReal, HerglotzFunction, Pole};
use crate::error::Error;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocJson {
    Number(f64),
    Symbol(String),
}

impl From<ExtendedReal> for LocJson {
    fn from(s: ExtendedReal) -> Self {
        match s {
            ExtendedReal::Finite(x) => Self::Number(x),
            ExtendedReal::Infinity => Self::Symbol("inf".into()),
        }
    }
}

impl TryFrom<LocJson> for ExtendedReal {
    type Error = Error;

    fn try_from(loc: LocJson) -> Result<Self, Error> {
        match loc {
            LocJson::Number(x) => ExtendedReal::new(x),
            LocJson::Symbol(s) if s == "inf" => Ok(ExtendedReal::Infinity),
            LocJson::Symbol(s) => Err(Error::InvalidArgument(format!(
                "location must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomJson {
    pub loc: LocJson,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoleJson {
    pub residue: Complex64,
    pub at: Complex64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DensityJson {
    Rational { num: Vec<f64>, den: Vec<f64> },
    Grid { nodes: Vec<f64>, values: Vec<f64>, tail: f64 },
    Poles { constant: Complex64, poles: Vec<PoleJson> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureJson {
    #[serde(default)]
    pub atoms: Vec<AtomJson>,
    #[serde(default)]
    pub density: Option<DensityJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HerglotzJson {
    pub alpha: f64,
    #[serde(flatten)]
    pub measure: MeasureJson,
}

impl From<&DensitySpec> for DensityJson {
    fn from(d: &DensitySpec) -> Self {
        match d {
            DensitySpec::Rational(r) => Self::Rational {
                num: r.numerator().to_vec(),
                den: r.denominator().to_vec(),
            },
            DensitySpec::Grid(g) => Self::Grid {
                nodes: g.nodes().to_vec(),
                values: g.values().to_vec(),
                tail: g.tail(),
            },
            DensitySpec::Poles(p) => Self::Poles {
                constant: p.constant(),
                poles: p
                    .poles()
                    .iter()
                    .map(|q| PoleJson { residue: q.residue, at: q.at })
                    .collect(),
            },
        }
    }
}

impl TryFrom<DensityJson> for DensitySpec {
    type Error = Error;

    fn try_from(d: DensityJson) -> Result<Self, Error> {
        match d {
            DensityJson::Rational { num, den } => DensitySpec::rational(num, den),
            DensityJson::Grid { nodes, values, tail } => DensitySpec::grid(nodes, values, tail),
            DensityJson::Poles { constant, poles } => DensitySpec::poles(
                constant,
                poles.into_iter().map(|p| Pole { residue: p.residue, at: p.at }).collect(),
            ),
        }
    }
}

impl From<BoundaryMeasure> for MeasureJson {
    fn from(m: BoundaryMeasure) -> Self {
        Self {
            atoms: m
                .atoms()
                .iter()
                .map(|a| AtomJson { loc: a.loc.into(), mass: a.mass })
                .collect(),
            density: m.density().map(DensityJson::from),
        }
    }
}

impl TryFrom<MeasureJson> for BoundaryMeasure {
    type Error = Error;

    fn try_from(m: MeasureJson) -> Result<Self, Error> {
        let atoms = m
            .atoms
            .into_iter()
            .map(|a| Ok(Atom::new(a.loc.try_into()?, a.mass)))
            .collect::<Result<Vec<_>, Error>>()?;
        let density = m.density.map(DensitySpec::try_from).transpose()?;
        BoundaryMeasure::new(atoms, density)
    }
}

impl From<HerglotzFunction> for HerglotzJson {
    fn from(h: HerglotzFunction) -> Self {
        Self {
            alpha: h.alpha,
            measure: h.measure.into(),
        }
    }
}

impl TryFrom<HerglotzJson> for HerglotzFunction {
    type Error = Error;

    fn try_from(h: HerglotzJson) -> Result<Self, Error> {
        HerglotzFunction::new(h.alpha, h.measure.try_into()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_all_density_kinds() {
        let texts = [
            r#"{"alpha":0.5,"atoms":[{"loc":1.5,"mass":0.5},{"loc":"inf","mass":1.0}],"density":{"kind":"rational","num":[1.0],"den":[1.0,0.0,1.0]}}"#,
            r#"{"alpha":0.0,"atoms":[],"density":{"kind":"grid","nodes":[0.0,1.0],"values":[0.2,0.1],"tail":0.0}}"#,
            r#"{"alpha":-1.0,"atoms":[],"density":{"kind":"poles","constant":[0.0,1.0],"poles":[{"residue":[1.0,0.0],"at":[0.0,-1.0]}]}}"#,
            r#"{"alpha":2.0,"atoms":[{"loc":0,"mass":1}],"density":null}"#,
        ];
        for text in texts {
            let h: HerglotzFunction = serde_json::from_str(text).unwrap();
            let back = serde_json::to_string(&h).unwrap();
            let again: HerglotzFunction = serde_json::from_str(&back).unwrap();
            assert_eq!(h, again);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let bad = [
            r#"{"alpha":0,"atoms":[{"loc":"minf","mass":1}],"density":null}"#,
            r#"{"alpha":0,"atoms":[{"loc":0,"mass":-1}],"density":null}"#,
            r#"{"alpha":0,"atoms":[],"density":{"kind":"rational","num":[0,1],"den":[1,0,1]}}"#,
            r#"{"alpha":0,"atoms":[],"density":{"kind":"spline"}}"#,
        ];
        for text in bad {
            assert!(serde_json::from_str::<HerglotzFunction>(text).is_err(), "{text}");
        }
    }
}
