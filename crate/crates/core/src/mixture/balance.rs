use std::collections::BTreeMap;

use serde::Serialize;

use super::function::build_mixture;
use super::spec::{Fraction, ModelSpec};
use crate::error::{Error, Result};

pub const DEFAULT_BALANCE_TOL: f64 = 1e-10;

/// λ-weighted row sums per degree and the balanced verdict.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceReport {
    /// degree → row sum for every species `t`.
    pub row_sums: BTreeMap<usize, Vec<f64>>,
    /// degree → relative spread `(max − min) / max |row|`.
    pub discrepancy: BTreeMap<usize, f64>,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub balanced: bool,
}

/// Row sums `Σ_{s2..sp} Δ²_{t,s2..sp} λ_{s2}···λ_{sp}` for each degree.
fn row_sums(spec: &ModelSpec) -> BTreeMap<usize, Vec<f64>> {
    let s = spec.species_count();
    let lambda = spec.lambda_values();
    let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (multiset, &delta_sq) in spec.interactions() {
        let row = rows
            .entry(multiset.degree())
            .or_insert_with(|| vec![0.0; s]);
        for (t, slot) in row.iter_mut().enumerate() {
            if let Some(rest) = multiset.without(t) {
                let weight: f64 = rest.species().iter().map(|&u| lambda[u]).product();
                *slot += rest.orderings() * delta_sq * weight;
            }
        }
    }
    rows
}

/// Checks that every degree's row sums agree across species within
/// relative tolerance `tol`.
pub fn check_balanced(spec: &ModelSpec, tol: f64) -> BalanceReport {
    let row_sums = row_sums(spec);
    let discrepancy: BTreeMap<usize, f64> = row_sums
        .iter()
        .map(|(&p, row)| {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            let scale = row.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let d = if scale > 0.0 {
                (max - min) / scale
            } else {
                0.0
            };
            (p, d)
        })
        .collect();
    let max_discrepancy = discrepancy.values().copied().fold(0.0, f64::max);
    BalanceReport {
        row_sums,
        discrepancy,
        max_discrepancy,
        tolerance: tol,
        balanced: max_discrepancy <= tol,
    }
}

/// `β_p²` indexed by degree (index 0 unused and zero).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaSquares(Vec<f64>);

impl BetaSquares {
    pub fn new(values: Vec<f64>) -> Self {
        BetaSquares(values)
    }

    pub fn get(&self, p: usize) -> f64 {
        self.0.get(p).copied().unwrap_or(0.0)
    }

    pub fn max_degree(&self) -> usize {
        self.0.iter().rposition(|&b| b != 0.0).unwrap_or(0)
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Nonzero `(p, β_p²)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0
            .iter()
            .copied()
            .enumerate()
            .filter(|&(p, b)| p > 0 && b != 0.0)
    }
}

/// `β_p² = Σ_{s1..sp} Δ²_{s1..sp} λ_{s1}···λ_{sp}`.
pub fn reduce_beta(spec: &ModelSpec) -> BetaSquares {
    let lambda = spec.lambda_values();
    let mut b = vec![0.0; spec.max_degree() + 1];
    for (multiset, &delta_sq) in spec.interactions() {
        let weight: f64 = multiset.species().iter().map(|&t| lambda[t]).product();
        b[multiset.degree()] += multiset.orderings() * delta_sq * weight;
    }
    BetaSquares(b)
}

/// Decoupled model with `Δ̄²_{s..s} = β_p² / λ_s^{p−1}` on the diagonal and
/// zero elsewhere.
pub fn diagonal_lift(spec: &ModelSpec) -> ModelSpec {
    let betas = reduce_beta(spec);
    let lambda = spec.lambda_values();
    let interactions: Vec<(Vec<usize>, f64)> = betas
        .iter()
        .flat_map(|(p, b)| {
            let lambda = &lambda;
            (0..lambda.len()).map(move |s| (vec![s; p], b / lambda[s].powi(p as i32 - 1)))
        })
        .collect();
    let lambda_exact: Vec<Fraction> = spec.lambda().to_vec();
    ModelSpec::new(spec.species().to_vec(), lambda_exact, interactions)
        .expect("lift of a valid spec is valid")
}

/// Smallest `ξ̄(x) − ξ(x)` over the grid, plus the gap at the all-ones vector.
#[derive(Debug, Clone, Serialize)]
pub struct KeyMargin {
    pub min_margin: f64,
    pub argmin: Vec<f64>,
    /// `ξ̄(1) − ξ(1)`, zero up to rounding.
    pub ones_gap: f64,
}

/// Margin of the AM–GM comparison between a balanced model and its
/// diagonal lift on grid points in `[0, 1]^S`.
pub fn key_inequality_margin(spec: &ModelSpec, grid: &[Vec<f64>]) -> Result<KeyMargin> {
    let report = check_balanced(spec, DEFAULT_BALANCE_TOL);
    if !report.balanced {
        return Err(Error::Unbalanced(report.max_discrepancy));
    }
    let xi = build_mixture(spec, None)?;
    let lifted = build_mixture(&diagonal_lift(spec), None)?;
    let s = spec.species_count();
    let ones = vec![1.0; s];
    let ones_gap = lifted.eval(&ones)? - xi.eval(&ones)?;
    let mut min_margin = f64::INFINITY;
    let mut argmin = vec![0.0; s];
    for x in grid {
        if x.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidArgument(
                "key inequality grid must lie in [0, 1]^S".into(),
            ));
        }
        let m = lifted.eval(x)? - xi.eval(x)?;
        if m < min_margin {
            min_margin = m;
            argmin = x.clone();
        }
    }
    Ok(KeyMargin {
        min_margin,
        argmin,
        ones_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::{models, MixtureFunction};

    #[test]
    fn bipartite_is_balanced() {
        let beta = 0.9;
        let r = check_balanced(&models::bipartite_sk(beta), DEFAULT_BALANCE_TOL);
        assert!(r.balanced);
        for v in &r.row_sums[&2] {
            assert!((v - beta * beta).abs() < 1e-15);
        }
    }

    #[test]
    fn unequal_diagonal_not_balanced() {
        let spec = ModelSpec::with_numbered_species(
            vec![Fraction::exact(1, 2), Fraction::exact(1, 2)],
            vec![(vec![0, 0], 1.0), (vec![1, 1], 2.0)],
        )
        .unwrap();
        let r = check_balanced(&spec, DEFAULT_BALANCE_TOL);
        assert!(!r.balanced);
        assert_eq!(r.row_sums[&2], vec![0.5, 1.0]);
        assert!((r.max_discrepancy - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pure_bipartite_balanced_only_at_natural_ratio() {
        let (p, q) = (2, 3);
        assert!(check_balanced(&models::pure_bipartite(p, q, 1.0), 1e-10).balanced);
        let off = ModelSpec::with_numbered_species(
            vec![Fraction::exact(1, 2), Fraction::exact(1, 2)],
            vec![(vec![0, 0, 1, 1, 1], 1.0)],
        )
        .unwrap();
        assert!(!check_balanced(&off, 1e-10).balanced);
    }

    #[test]
    fn degree_one_requires_equal_fields() {
        let spec = ModelSpec::with_numbered_species(
            vec![Fraction::exact(1, 4), Fraction::exact(3, 4)],
            vec![(vec![0], 1.0), (vec![1], 1.0)],
        )
        .unwrap();
        assert!(check_balanced(&spec, 1e-10).balanced);
    }

    #[test]
    fn beta_reduction() {
        let b = reduce_beta(&models::bipartite_sk(1.3));
        assert!((b.get(2) - 1.69).abs() < 1e-14);
        assert_eq!(b.max_degree(), 2);
        let zero = reduce_beta(&models::single_species(&[]).unwrap());
        assert_eq!(zero.total(), 0.0);
        let pure = reduce_beta(&models::pure_bipartite(2, 1, 1.0));
        assert!((pure.get(3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lift_of_bipartite() {
        let lifted = diagonal_lift(&models::bipartite_sk(1.0));
        assert!((lifted.delta_sq(&[0, 0]) - 2.0).abs() < 1e-15);
        assert!((lifted.delta_sq(&[1, 1]) - 2.0).abs() < 1e-15);
        assert_eq!(lifted.delta_sq(&[0, 1]), 0.0);
    }

    #[test]
    fn lift_of_single_species_is_identity() {
        let spec = models::single_species(&[(2, 0.7), (3, 0.2)]).unwrap();
        let lifted = diagonal_lift(&spec);
        assert!((lifted.delta_sq(&[0, 0]) - 0.7).abs() < 1e-15);
        assert!((lifted.delta_sq(&[0, 0, 0]) - 0.2).abs() < 1e-15);
        assert_eq!(lifted.interactions().len(), 2);
    }

    #[test]
    fn lift_of_exchangeable_three_spin() {
        // Δ² = 1 on every multiset of size 3 over 3 species, λ = 1/3: β₃² = 1.
        let third = Fraction::exact(1, 3);
        let mut inter = vec![];
        for a in 0..3 {
            for b in a..3 {
                for c in b..3 {
                    inter.push((vec![a, b, c], 1.0));
                }
            }
        }
        let spec = ModelSpec::with_numbered_species(vec![third; 3], inter).unwrap();
        let b3 = reduce_beta(&spec).get(3);
        assert!((b3 - 1.0).abs() < 1e-14);
        let lifted = diagonal_lift(&spec);
        for s in 0..3 {
            assert!((lifted.delta_sq(&[s, s, s]) - 9.0 * b3).abs() < 1e-12);
        }
    }

    #[test]
    fn lifted_mixture_is_weighted_powers() {
        let spec = models::pure_bipartite(1, 2, 1.1);
        let lifted = build_mixture(&diagonal_lift(&spec), None).unwrap();
        let b = reduce_beta(&spec).get(3);
        let l = spec.lambda_values();
        let x = [0.4f64, 0.9];
        let want = b * (l[0] * x[0].powi(3) + l[1] * x[1].powi(3));
        assert!((lifted.eval(&x).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn key_margin_examples() {
        let beta = 1.2;
        let spec = models::bipartite_sk(beta);
        let r = key_inequality_margin(&spec, &[vec![1.0, 0.0]]).unwrap();
        assert!((r.min_margin - 0.5 * beta * beta).abs() < 1e-14);
        let r = key_inequality_margin(&spec, &[vec![1.0, 1.0]]).unwrap();
        assert!(r.min_margin.abs() < 1e-14);
        assert!(r.ones_gap.abs() < 1e-14);
        let r = key_inequality_margin(&spec, &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(r.min_margin, 0.0);
    }

    #[test]
    fn key_margin_rejects_unbalanced() {
        let spec = ModelSpec::with_numbered_species(
            vec![Fraction::exact(1, 2), Fraction::exact(1, 2)],
            vec![(vec![0, 0], 1.0), (vec![1, 1], 2.0)],
        )
        .unwrap();
        assert!(matches!(
            key_inequality_margin(&spec, &[vec![0.5, 0.5]]),
            Err(Error::Unbalanced(_))
        ));
    }

    #[test]
    fn single_species_betas_round_trip() {
        let spec = models::single_species(&[(1, 0.1), (3, 0.5)]).unwrap();
        let f = build_mixture(&spec, None).unwrap();
        let g = MixtureFunction::single_species(reduce_beta(&spec).as_slice());
        assert_eq!(f.terms(), g.terms());
    }
}
