//! JSON model files.
//!
//! ```json
//! {
//!   "species": ["up", "down"],
//!   "lambda": ["1/2", 0.5],
//!   "interactions": [ { "species": ["down", "up"], "delta_sq": 2.0 } ]
//! }
//! ```
//!
//! Ratios are numbers or rational strings. Species lists inside
//! interactions are canonicalised on load; a repeated multiset is an error.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spec::{Fraction, ModelSpec};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RatioRepr {
    Number(f64),
    Text(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct InteractionRepr {
    species: Vec<String>,
    delta_sq: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr {
    species: Vec<String>,
    lambda: Vec<RatioRepr>,
    #[serde(default)]
    interactions: Vec<InteractionRepr>,
}

pub fn from_json(text: &str) -> Result<ModelSpec> {
    let repr: ModelRepr =
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(format!("model file: {e}")))?;
    let lambda = repr
        .lambda
        .iter()
        .map(|r| match r {
            RatioRepr::Number(v) if v.fract() == 0.0 && v.abs() < 1e15 => {
                Ok(Fraction::exact(*v as i64, 1))
            }
            RatioRepr::Number(v) => Ok(Fraction::Float(*v)),
            RatioRepr::Text(t) => Fraction::parse(t),
        })
        .collect::<Result<Vec<_>>>()?;
    let index = |label: &str| {
        repr.species
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::UnknownSpecies(label.to_string()))
    };
    let interactions = repr
        .interactions
        .iter()
        .map(|i| {
            let tuple = i
                .species
                .iter()
                .map(|l| index(l))
                .collect::<Result<Vec<_>>>()?;
            Ok((tuple, i.delta_sq))
        })
        .collect::<Result<Vec<_>>>()?;
    ModelSpec::new(repr.species.clone(), lambda, interactions)
}

pub fn to_json(spec: &ModelSpec) -> String {
    let repr = ModelRepr {
        species: spec.species().to_vec(),
        lambda: spec
            .lambda()
            .iter()
            .map(|l| match l {
                Fraction::Exact(_) => RatioRepr::Text(l.to_string()),
                Fraction::Float(v) => RatioRepr::Number(*v),
            })
            .collect(),
        interactions: spec
            .interactions()
            .iter()
            .map(|(m, &d)| InteractionRepr {
                species: m
                    .species()
                    .iter()
                    .map(|&s| spec.species()[s].clone())
                    .collect(),
                delta_sq: d,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&repr).expect("model serialises")
}

pub fn load(path: impl AsRef<Path>) -> Result<ModelSpec> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn save(spec: &ModelSpec, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json(spec))?;
    Ok(())
}
