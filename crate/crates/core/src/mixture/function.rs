use serde::Serialize;

use super::spec::{FiniteSizes, ModelSpec};
use crate::error::{Error, Result};

/// Slack allowed on `|x_s| <= 1` for overlaps computed in floating point.
const DOMAIN_SLACK: f64 = 1e-12;

/// One monomial `coef · Π x_s^{exponents[s]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coef: f64,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(x)
            .fold(self.coef, |acc, (&e, &xs)| acc * xs.powi(e as i32))
    }

    fn partial(&self, s: usize, x: &[f64]) -> f64 {
        let e = self.exponents[s];
        if e == 0 {
            return 0.0;
        }
        self.exponents.iter().zip(x).enumerate().fold(
            self.coef * e as f64,
            |acc, (t, (&et, &xt))| {
                let power = if t == s { et - 1 } else { et };
                acc * xt.powi(power as i32)
            },
        )
    }
}

/// Covariance polynomial `ξ` on `[-1, 1]^S`, together with the species
/// ratios it was built with (needed for `ξ^s = (1/λ_s) ∂ξ/∂x_s`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureFunction {
    lambda: Vec<f64>,
    terms: Vec<Monomial>,
    degree_cap: u32,
}

/// Covariance polynomial of `spec`: the limiting one when `sizes` is
/// `None`, the finite-N one (ratios `#I_s / N`) otherwise.
pub fn build_mixture(spec: &ModelSpec, sizes: Option<&FiniteSizes>) -> Result<MixtureFunction> {
    let lambda = match sizes {
        Some(sz) => {
            sz.check_matches(spec)?;
            sz.lambda_n()
        }
        None => spec.lambda_values(),
    };
    let s = spec.species_count();
    let terms = spec
        .interactions()
        .iter()
        .map(|(multiset, &delta_sq)| {
            let weight: f64 = multiset.species().iter().map(|&t| lambda[t]).product();
            Monomial {
                exponents: multiset.counts(s),
                coef: multiset.orderings() * delta_sq * weight,
            }
        })
        .collect();
    MixtureFunction::new(lambda, terms)
}

impl MixtureFunction {
    pub fn new(lambda: Vec<f64>, terms: Vec<Monomial>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidModel(
                "mixture needs at least one species".into(),
            ));
        }
        let mut merged: Vec<Monomial> = Vec::new();
        for t in terms {
            if t.exponents.len() != lambda.len() {
                return Err(Error::Dimension(format!(
                    "monomial over {} species in a {}-species mixture",
                    t.exponents.len(),
                    lambda.len()
                )));
            }
            if t.degree() == 0 {
                if t.coef != 0.0 {
                    return Err(Error::InvalidModel(
                        "mixture must not have a constant term".into(),
                    ));
                }
                continue;
            }
            match merged.iter_mut().find(|m| m.exponents == t.exponents) {
                Some(m) => m.coef += t.coef,
                None => merged.push(t),
            }
        }
        merged.retain(|m| m.coef != 0.0);
        merged.sort_by(|a, b| {
            a.degree()
                .cmp(&b.degree())
                .then(b.exponents.cmp(&a.exponents))
        });
        let degree_cap = merged.iter().map(Monomial::degree).max().unwrap_or(0);
        Ok(MixtureFunction {
            lambda,
            terms: merged,
            degree_cap,
        })
    }

    /// Single-species polynomial `Σ_p β_p² x^p` from `betas_sq[p]`
    /// (index 0 is ignored).
    pub fn single_species(betas_sq: &[f64]) -> Self {
        let terms = betas_sq
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &b)| b != 0.0)
            .map(|(p, &b)| Monomial {
                exponents: vec![p as u32],
                coef: b,
            })
            .collect();
        MixtureFunction::new(vec![1.0], terms).expect("single-species terms are well formed")
    }

    /// Single-species pure `p`-spin `β² x^p`.
    pub fn pure(p: usize, beta_sq: f64) -> Self {
        let mut b = vec![0.0; p + 1];
        b[p] = beta_sq;
        MixtureFunction::single_species(&b)
    }

    pub fn zero(species_count: usize) -> Self {
        let lambda = vec![1.0 / species_count as f64; species_count];
        MixtureFunction {
            lambda,
            terms: vec![],
            degree_cap: 0,
        }
    }

    pub fn species_count(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `c · ξ`; the inverse-temperature scaling `Δ → αΔ` is `c = α²`.
    pub fn scaled(&self, c: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|m| Monomial {
                exponents: m.exponents.clone(),
                coef: m.coef * c,
            })
            .collect();
        MixtureFunction::new(self.lambda.clone(), terms).expect("scaling keeps the shape")
    }

    /// Coefficient sums per total degree; for a spec-built polynomial this
    /// is the `β_p²` sequence (index = degree).
    pub fn degree_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.degree_cap as usize + 1];
        for m in &self.terms {
            w[m.degree() as usize] += m.coef;
        }
        w
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.lambda.len() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, mixture has {} species",
                x.len(),
                self.lambda.len()
            )));
        }
        match x.iter().position(|v| !(v.abs() <= 1.0 + DOMAIN_SLACK)) {
            Some(index) => Err(Error::Domain {
                index,
                value: x[index],
            }),
            None => Ok(()),
        }
    }

    /// `ξ(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.value(x))
    }

    /// `ξ^s(x) = (1/λ_s) ∂ξ/∂x_s`.
    pub fn partial_s(&self, s: usize, x: &[f64]) -> Result<f64> {
        if s >= self.lambda.len() {
            return Err(Error::UnknownSpecies(format!("index {s}")));
        }
        self.check(x)?;
        Ok(self.species_derivative(s, x))
    }

    /// `θ(x) = Σ_s x_s ∂ξ/∂x_s − ξ(x)`.
    pub fn theta(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.theta_unchecked(x))
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|m| m.value(x)).sum()
    }

    pub(crate) fn species_derivative(&self, s: usize, x: &[f64]) -> f64 {
        self.terms.iter().map(|m| m.partial(s, x)).sum::<f64>() / self.lambda[s]
    }

    pub(crate) fn theta_unchecked(&self, x: &[f64]) -> f64 {
        // For a monomial, Σ_s x_s ∂_s m = deg(m) · m.
        self.terms
            .iter()
            .map(|m| (m.degree() as f64 - 1.0) * m.value(x))
            .sum()
    }

    /// Euclidean gradient `∂ξ/∂x_s` for all species.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok((0..self.lambda.len())
            .map(|s| self.terms.iter().map(|m| m.partial(s, x)).sum())
            .collect())
    }
}
