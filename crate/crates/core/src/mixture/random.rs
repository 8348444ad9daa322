//! Random model generators for property tests and acceptance runs.

use rand::Rng;

use super::balance::check_balanced;
use super::spec::{Fraction, ModelSpec, Multiset};

fn random_lambda<R: Rng>(rng: &mut R, species_count: usize) -> Vec<Fraction> {
    let weights: Vec<i64> = (0..species_count)
        .map(|_| rng.random_range(1..=9))
        .collect();
    let total: i64 = weights.iter().sum();
    weights.iter().map(|&w| Fraction::exact(w, total)).collect()
}

/// Random spec with exact random ratios and each multiset of degree
/// `1..=max_degree` present with probability `density`. Not balanced in
/// general.
pub fn random_spec<R: Rng>(
    rng: &mut R,
    species_count: usize,
    max_degree: usize,
    density: f64,
) -> ModelSpec {
    let lambda = random_lambda(rng, species_count);
    let mut inter = Vec::new();
    for p in 1..=max_degree {
        for m in Multiset::all(species_count, p) {
            if rng.random_bool(density) {
                inter.push((m.species().to_vec(), rng.random_range(0.05..2.0)));
            }
        }
    }
    ModelSpec::with_numbered_species(lambda, inter).expect("random spec is valid")
}

/// Random balanced spec: a random spec whose diagonal entries `Δ²_{t..t}`
/// are then raised so that every degree's row sums equal their maximum.
pub fn random_balanced_spec<R: Rng>(
    rng: &mut R,
    species_count: usize,
    max_degree: usize,
) -> ModelSpec {
    let base = random_spec(rng, species_count, max_degree, 0.6);
    let lambda = base.lambda_values();
    let report = check_balanced(&base, 0.0);
    let mut entries: std::collections::BTreeMap<Multiset, f64> = base.interactions().clone();
    for (&p, row) in &report.row_sums {
        let target = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (t, &r) in row.iter().enumerate() {
            let add = (target - r) / lambda[t].powi(p as i32 - 1);
            if add > 0.0 {
                *entries.entry(Multiset::new(vec![t; p])).or_insert(0.0) += add;
            }
        }
    }
    ModelSpec::new(
        base.species().to_vec(),
        base.lambda().to_vec(),
        entries.into_iter().map(|(k, v)| (k.species().to_vec(), v)),
    )
    .expect("equalised spec is valid")
}
