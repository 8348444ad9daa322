//! Named models used throughout examples, tests and the CLI.

use super::spec::{Fraction, ModelSpec};
use crate::error::Result;

fn binomial(n: usize, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// Single species with `Δ² = β_p²` for each `(p, β_p²)`.
pub fn single_species(betas_sq: &[(usize, f64)]) -> Result<ModelSpec> {
    ModelSpec::with_numbered_species(
        vec![Fraction::exact(1, 1)],
        betas_sq.iter().map(|&(p, b)| (vec![0; p], b)),
    )
}

/// Single-species SK model: `ξ(x) = β² x²`.
pub fn sk(beta: f64) -> ModelSpec {
    single_species(&[(2, beta * beta)]).expect("valid SK model")
}

/// Single-species pure `p`-spin: `ξ(x) = β² x^p`.
pub fn pure(p: usize, beta: f64) -> ModelSpec {
    single_species(&[(p, beta * beta)]).expect("valid pure model")
}

/// Balanced bipartite SK: `λ = (½, ½)`, `Δ²₁₂ = 2β²`, so `ξ = β² x₁x₂`.
pub fn bipartite_sk(beta: f64) -> ModelSpec {
    ModelSpec::with_numbered_species(
        vec![Fraction::exact(1, 2), Fraction::exact(1, 2)],
        vec![(vec![0, 1], 2.0 * beta * beta)],
    )
    .expect("valid bipartite model")
}

/// Balanced pure bipartite model: `λ = (p/(p+q), q/(p+q))` and the single
/// strength on `{1^p, 2^q}` chosen so that `ξ = β² x₁^p x₂^q`.
pub fn pure_bipartite(p: usize, q: usize, beta: f64) -> ModelSpec {
    assert!(p >= 1 && q >= 1, "pure bipartite model needs p, q >= 1");
    let n = p + q;
    let (pf, qf, nf) = (p as f64, q as f64, n as f64);
    let ratio_weight = binomial(n, p) * pf.powi(p as i32) * qf.powi(q as i32) / nf.powi(n as i32);
    let mut tuple = vec![0; p];
    tuple.extend(std::iter::repeat_n(1, q));
    ModelSpec::with_numbered_species(
        vec![
            Fraction::exact(p as i64, n as i64),
            Fraction::exact(q as i64, n as i64),
        ],
        vec![(tuple, beta * beta / ratio_weight)],
    )
    .expect("valid pure bipartite model")
}
