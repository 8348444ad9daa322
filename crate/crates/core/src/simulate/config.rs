use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::FiniteSizes;

/// A point of the Ising cube or of the product of spheres of radii
/// `√#I_s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Configuration {
    values: Vec<f64>,
}

impl Configuration {
    pub fn ising(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| *v != 1.0 && *v != -1.0) {
            return Err(Error::InvalidArgument(format!(
                "Ising coordinate {i} is {}",
                values[i]
            )));
        }
        Ok(Configuration { values })
    }

    /// Checks that every species block has squared norm equal to its size.
    pub fn spherical(values: Vec<f64>, sizes: &FiniteSizes) -> Result<Self> {
        check_len(values.len(), sizes)?;
        for s in 0..sizes.species_count() {
            let r = sizes.block(s);
            let n = r.len() as f64;
            let sq: f64 = values[r].iter().map(|v| v * v).sum();
            if (sq - n).abs() > 1e-9 * n {
                return Err(Error::InvalidArgument(format!(
                    "species {s} block has squared norm {sq}, expected {n}"
                )));
            }
        }
        Ok(Configuration { values })
    }

    /// Rescales every species block onto its sphere.
    pub fn project_spherical(mut values: Vec<f64>, sizes: &FiniteSizes) -> Result<Self> {
        check_len(values.len(), sizes)?;
        for s in 0..sizes.species_count() {
            let r = sizes.block(s);
            let n = r.len() as f64;
            let norm = values[r.clone()].iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "species {s} block cannot be normalised"
                )));
            }
            let c = n.sqrt() / norm;
            values[r].iter_mut().for_each(|v| *v *= c);
        }
        Ok(Configuration { values })
    }

    pub fn random_ising(sizes: &FiniteSizes, rng: &mut impl Rng) -> Self {
        let values = (0..sizes.n())
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        Configuration { values }
    }

    /// Uniform point on the product of spheres.
    pub fn random_spherical(sizes: &FiniteSizes, rng: &mut impl Rng) -> Self {
        loop {
            let raw: Vec<f64> = (0..sizes.n()).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(c) = Configuration::project_spherical(raw, sizes) {
                return c;
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn negated(&self) -> Self {
        Configuration {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

fn check_len(len: usize, sizes: &FiniteSizes) -> Result<()> {
    if len != sizes.n() {
        return Err(Error::Dimension(format!(
            "configuration has {len} coordinates, sizes sum to {}",
            sizes.n()
        )));
    }
    Ok(())
}

/// Per-species overlaps `R_s(σ, τ) = (1/#I_s) Σ_{i ∈ I_s} σ_i τ_i`.
pub fn overlap(
    sigma: &Configuration,
    tau: &Configuration,
    sizes: &FiniteSizes,
) -> Result<Vec<f64>> {
    check_len(sigma.len(), sizes)?;
    check_len(tau.len(), sizes)?;
    Ok((0..sizes.species_count())
        .map(|s| {
            let r = sizes.block(s);
            let n = r.len() as f64;
            let dot: f64 = sigma.values[r.clone()]
                .iter()
                .zip(&tau.values[r])
                .map(|(a, b)| a * b)
                .sum();
            let v = dot / n;
            debug_assert!(v.abs() <= 1.0 + 1e-9, "overlap {v} violates Cauchy-Schwarz");
            v.clamp(-1.0, 1.0)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;

    #[test]
    fn self_and_negated_overlap() {
        let sizes = FiniteSizes::new(vec![3, 5]).unwrap();
        let mut rng = seeding::stream(1, &[]);
        let s = Configuration::random_spherical(&sizes, &mut rng);
        let r = overlap(&s, &s, &sizes).unwrap();
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let r = overlap(&s, &s.negated(), &sizes).unwrap();
        assert!(r.iter().all(|v| (v + 1.0).abs() < 1e-12));
    }

    #[test]
    fn hand_computed_ising() {
        let sizes = FiniteSizes::new(vec![2, 2]).unwrap();
        let a = Configuration::ising(vec![1.0, 1.0, -1.0, 1.0]).unwrap();
        let b = Configuration::ising(vec![1.0, -1.0, -1.0, -1.0]).unwrap();
        // Species 0: (1 − 1)/2 = 0; species 1: (1 − 1)/2 = 0.
        assert_eq!(overlap(&a, &b, &sizes).unwrap(), vec![0.0, 0.0]);
        let c = Configuration::ising(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(overlap(&a, &c, &sizes).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn validation() {
        let sizes = FiniteSizes::new(vec![2]).unwrap();
        assert!(Configuration::ising(vec![1.0, 0.5]).is_err());
        assert!(Configuration::spherical(vec![1.0, 1.0], &sizes).is_ok());
        assert!(Configuration::spherical(vec![1.0, 0.0], &sizes).is_err());
        assert!(Configuration::project_spherical(vec![0.0, 0.0], &sizes).is_err());
    }
}
