use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::{FiniteSizes, ModelSpec};
use crate::seeding::{self, tag};

/// Largest total number of stored couplings.
pub const DEFAULT_ENTRY_BUDGET: usize = 1 << 24;

/// Couplings `g_{i_1..i_p}` for one ordered species tuple, stored densely
/// over the product of the species blocks in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub species: Vec<usize>,
    pub g: Vec<f64>,
}

impl Block {
    pub fn degree(&self) -> usize {
        self.species.len()
    }
}

/// One draw of the disorder. Only species tuples with nonzero `Δ²` are
/// stored. Each block has its own stream keyed by its species tuple, so two
/// models sharing a tuple share its couplings under the same seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderSample {
    seed: u64,
    block_sizes: Vec<usize>,
    blocks: Vec<Block>,
}

/// All distinct orderings of a sorted multiset, in lexicographic order.
pub(crate) fn orderings(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (0..cur.len().saturating_sub(1))
            .rev()
            .find(|&i| cur[i] < cur[i + 1])
        else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

fn layout(spec: &ModelSpec, sizes: &FiniteSizes) -> Result<Vec<Vec<usize>>> {
    sizes.check_matches(spec)?;
    let tuples: Vec<Vec<usize>> = spec
        .interactions()
        .keys()
        .flat_map(|m| orderings(m.species()))
        .collect();
    let total: usize = tuples
        .iter()
        .map(|t| t.iter().map(|&s| sizes.block_sizes()[s]).product::<usize>())
        .sum();
    if total > DEFAULT_ENTRY_BUDGET {
        return Err(Error::TooLarge(format!(
            "{total} couplings exceed the budget of {DEFAULT_ENTRY_BUDGET}"
        )));
    }
    Ok(tuples)
}

impl DisorderSample {
    pub fn generate(spec: &ModelSpec, sizes: &FiniteSizes, seed: u64) -> Result<Self> {
        let blocks = layout(spec, sizes)?
            .into_iter()
            .map(|species| {
                let len = species.iter().map(|&s| sizes.block_sizes()[s]).product();
                let mut labels = vec![tag::DISORDER, species.len() as u64];
                labels.extend(species.iter().map(|&s| s as u64));
                let mut rng = seeding::stream(seed, &labels);
                let g = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
                Block { species, g }
            })
            .collect();
        Ok(DisorderSample {
            seed,
            block_sizes: sizes.block_sizes().to_vec(),
            blocks,
        })
    }

    pub fn zeros(spec: &ModelSpec, sizes: &FiniteSizes) -> Result<Self> {
        let blocks = layout(spec, sizes)?
            .into_iter()
            .map(|species| {
                let len = species.iter().map(|&s| sizes.block_sizes()[s]).product();
                Block {
                    species,
                    g: vec![0.0; len],
                }
            })
            .collect();
        Ok(DisorderSample {
            seed: 0,
            block_sizes: sizes.block_sizes().to_vec(),
            blocks,
        })
    }

    /// Every coupling multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            b.g.iter_mut().for_each(|v| *v *= c);
        }
        out
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn entry_count(&self) -> usize {
        self.blocks.iter().map(|b| b.g.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::models;

    #[test]
    fn orderings_of_multisets() {
        assert_eq!(orderings(&[0, 1, 2]).len(), 6);
        assert_eq!(
            orderings(&[0, 0, 1]),
            vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]
        );
        assert_eq!(orderings(&[2, 2]), vec![vec![2, 2]]);
        assert_eq!(orderings(&[3]), vec![vec![3]]);
    }

    #[test]
    fn regeneration_is_identical() {
        let spec = models::pure_bipartite(1, 2, 1.0);
        let sizes = FiniteSizes::new(vec![3, 4]).unwrap();
        let a = DisorderSample::generate(&spec, &sizes, 9).unwrap();
        let b = DisorderSample::generate(&spec, &sizes, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, DisorderSample::generate(&spec, &sizes, 10).unwrap());
        // {0,1,1}: three orderings of sizes 3·4·4.
        assert_eq!(a.blocks().len(), 3);
        assert_eq!(a.entry_count(), 3 * 48);
    }

    #[test]
    fn shared_tuples_share_couplings() {
        let sizes = FiniteSizes::new(vec![5]).unwrap();
        let a = DisorderSample::generate(&models::sk(0.3), &sizes, 4).unwrap();
        let b = DisorderSample::generate(&models::sk(0.5), &sizes, 4).unwrap();
        assert_eq!(a.blocks(), b.blocks());
    }

    #[test]
    fn over_budget() {
        let spec = models::pure(4, 1.0);
        let sizes = FiniteSizes::new(vec![100]).unwrap();
        assert!(matches!(
            DisorderSample::generate(&spec, &sizes, 0),
            Err(Error::TooLarge(_))
        ));
    }
}
