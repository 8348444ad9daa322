//! Parisi functionals for the Ising and spherical ensembles, the
//! variational search over discrete paths, and the zero-temperature
//! extrapolation.

mod ising;
mod optimize;
mod path;
mod spherical;
mod zero_temp;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::MixtureFunction;

pub use ising::{ising_functional, IsingOptions, DEFAULT_NODES, DEFAULT_POINT_BUDGET};
pub use optimize::{optimize_path, OptimizeOptions, Optimized};
pub use optimize::{ISING_K_CAP, SPHERICAL_K_CAP};
pub use path::{lift_path, ParisiPath};
pub use spherical::{spherical_functional, SphericalInner};
pub use zero_temp::{geometric_alphas, gse_from_free_energy, Extrapolation, DEFAULT_ALPHAS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Ising,
    Spherical,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Ising => "ising",
            Ensemble::Spherical => "spherical",
        })
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ising" => Ok(Ensemble::Ising),
            "spherical" => Ok(Ensemble::Spherical),
            other => Err(Error::InvalidArgument(format!(
                "unknown ensemble `{other}`"
            ))),
        }
    }
}

/// Value of a Parisi functional with its pieces.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionalValue {
    pub value: f64,
    /// Per-species term, so that `value = Σ_s λ_s per_species[s] + correction`.
    pub per_species: Vec<f64>,
    /// `−½ Σ_j m_j (θ(q_{j+1}) − θ(q_j))`.
    pub theta_sum: f64,
    /// Quadrature nodes per level (Ising only).
    pub nodes: Option<usize>,
    /// Inner minimisers `b*_s` and `|X'_s(b*_s)|` (spherical only).
    pub inner: Option<Vec<SphericalInner>>,
}

/// `−½ Σ_{j=1..k} m_j (θ(q_{j+1}) − θ(q_j))`.
pub fn theta_correction(f: &MixtureFunction, path: &ParisiPath) -> f64 {
    let q = path.q();
    let thetas: Vec<f64> = q.iter().map(|row| f.theta_unchecked(row)).collect();
    let m = path.m();
    -0.5 * (1..=path.k())
        .map(|j| m[j] * (thetas[j + 1] - thetas[j]))
        .sum::<f64>()
}

/// Evaluate the functional of either ensemble with default settings.
pub fn evaluate(
    f: &MixtureFunction,
    ensemble: Ensemble,
    path: &ParisiPath,
) -> Result<FunctionalValue> {
    match ensemble {
        Ensemble::Ising => ising_functional(f, path, &IsingOptions::default()),
        Ensemble::Spherical => spherical_functional(f, path),
    }
}

pub(crate) fn check_dims(f: &MixtureFunction, path: &ParisiPath) -> Result<()> {
    if f.species_count() != path.species_count() {
        return Err(Error::Dimension(format!(
            "mixture has {} species, path has {}",
            f.species_count(),
            path.species_count()
        )));
    }
    Ok(())
}

/// Covariance increments `ξ^s(q_{j+1}) − ξ^s(q_j)` for `j = 0..=k`, with
/// round-off negatives above `−1e−14` clamped to zero. The first level
/// starts from 0 rather than `ξ^s(0)`, so degree-1 terms act as a random
/// field of variance `ξ^s(0)`.
pub(crate) fn increments(f: &MixtureFunction, path: &ParisiPath, s: usize) -> Result<Vec<f64>> {
    let q = path.q();
    let mut xs: Vec<f64> = q.iter().map(|row| f.species_derivative(s, row)).collect();
    xs[0] = 0.0;
    (0..=path.k())
        .map(|j| {
            let v = xs[j + 1] - xs[j];
            if v >= 0.0 {
                Ok(v)
            } else if v >= -1e-14 {
                Ok(0.0)
            } else {
                Err(Error::NegativeIncrement {
                    species: s,
                    level: j,
                    value: v,
                })
            }
        })
        .collect()
}
