use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A species ratio, kept exact when it was given as a rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fraction {
    Exact(Rational64),
    Float(f64),
}

impl Fraction {
    pub fn value(&self) -> f64 {
        match *self {
            Fraction::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Fraction::Float(v) => v,
        }
    }

    pub fn exact(numer: i64, denom: i64) -> Self {
        Fraction::Exact(Rational64::new(numer, denom))
    }

    /// Parses `"1/3"`, `"2"` (exact) or a decimal such as `"0.25"` (float).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad_fraction(t))?;
            let d: i64 = d.trim().parse().map_err(|_| bad_fraction(t))?;
            if d == 0 {
                return Err(bad_fraction(t));
            }
            return Ok(Fraction::Exact(Rational64::new(n, d)));
        }
        if let Ok(n) = t.parse::<i64>() {
            return Ok(Fraction::Exact(Rational64::from_integer(n)));
        }
        t.parse::<f64>()
            .map(Fraction::Float)
            .map_err(|_| bad_fraction(t))
    }
}

fn bad_fraction(t: &str) -> Error {
    Error::InvalidModel(format!("cannot parse species ratio `{t}`"))
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fraction::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Fraction::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Fraction::Float(v) => write!(f, "{v}"),
        }
    }
}

/// Sorted multiset of species indices; its length is the interaction degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Multiset(Vec<usize>);

impl Multiset {
    pub fn new(mut species: Vec<usize>) -> Self {
        species.sort_unstable();
        Multiset(species)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn species(&self) -> &[usize] {
        &self.0
    }

    /// Multiplicity of every species in `0..species_count`.
    pub fn counts(&self, species_count: usize) -> Vec<u32> {
        let mut c = vec![0u32; species_count];
        for &s in &self.0 {
            c[s] += 1;
        }
        c
    }

    /// Number of distinct orderings `p! / Π c_s!`.
    pub fn orderings(&self) -> f64 {
        let mut result = 1.0;
        let mut placed = 0u32;
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            // multiply by C(placed + run, run)
            for r in 1..=(j - i) as u32 {
                placed += 1;
                result = result * placed as f64 / r as f64;
            }
            i = j;
        }
        result.round()
    }

    /// The multiset with one copy of `s` removed, if `s` is present.
    pub fn without(&self, s: usize) -> Option<Multiset> {
        let pos = self.0.iter().position(|&t| t == s)?;
        let mut rest = self.0.clone();
        rest.remove(pos);
        Some(Multiset(rest))
    }
}

/// Species ratios and symmetric interaction strengths of a finite mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    species: Vec<String>,
    lambda: Vec<Fraction>,
    interactions: BTreeMap<Multiset, f64>,
}

impl ModelSpec {
    /// Validates and canonicalises a specification. Species lists inside
    /// `interactions` may come in any order; zero strengths are dropped and
    /// a repeated multiset is an error.
    pub fn new(
        species: Vec<String>,
        lambda: Vec<Fraction>,
        interactions: impl IntoIterator<Item = (Vec<usize>, f64)>,
    ) -> Result<Self> {
        let count = species.len();
        if count == 0 {
            return Err(Error::InvalidModel(
                "at least one species is required".into(),
            ));
        }
        for (i, name) in species.iter().enumerate() {
            if species[..i].contains(name) {
                return Err(Error::InvalidModel(format!(
                    "duplicate species label `{name}`"
                )));
            }
        }
        if lambda.len() != count {
            return Err(Error::InvalidModel(format!(
                "{} species but {} ratios",
                count,
                lambda.len()
            )));
        }
        for (s, l) in lambda.iter().enumerate() {
            let v = l.value();
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "ratio of species `{}` must be positive, got {l}",
                    species[s]
                )));
            }
        }
        let exact: Option<Vec<Rational64>> = lambda
            .iter()
            .map(|l| match l {
                Fraction::Exact(r) => Some(*r),
                Fraction::Float(_) => None,
            })
            .collect();
        let sums_to_one = match exact {
            Some(rs) => rs.into_iter().sum::<Rational64>() == Rational64::from_integer(1),
            None => (lambda.iter().map(Fraction::value).sum::<f64>() - 1.0).abs() <= 1e-12,
        };
        if !sums_to_one {
            return Err(Error::InvalidModel("species ratios must sum to 1".into()));
        }

        let mut map = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for (tuple, delta_sq) in interactions {
            if tuple.is_empty() {
                return Err(Error::InvalidModel(
                    "interaction with empty species list".into(),
                ));
            }
            if let Some(&bad) = tuple.iter().find(|&&s| s >= count) {
                return Err(Error::InvalidModel(format!(
                    "species index {bad} out of range"
                )));
            }
            if !(delta_sq >= 0.0) || !delta_sq.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "interaction strength must be a nonnegative number, got {delta_sq}"
                )));
            }
            let key = Multiset::new(tuple);
            if !seen.insert(key.clone()) {
                return Err(Error::InvalidModel(format!(
                    "duplicate interaction for species multiset {:?}",
                    key.species()
                )));
            }
            if delta_sq > 0.0 {
                map.insert(key, delta_sq);
            }
        }
        Ok(ModelSpec {
            species,
            lambda,
            interactions: map,
        })
    }

    /// Species labelled "1", "2", ...
    pub fn with_numbered_species(
        lambda: Vec<Fraction>,
        interactions: impl IntoIterator<Item = (Vec<usize>, f64)>,
    ) -> Result<Self> {
        let species = (1..=lambda.len()).map(|i| i.to_string()).collect();
        ModelSpec::new(species, lambda, interactions)
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn species_index(&self, label: &str) -> Result<usize> {
        self.species
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::UnknownSpecies(label.to_string()))
    }

    pub fn lambda(&self) -> &[Fraction] {
        &self.lambda
    }

    pub fn lambda_values(&self) -> Vec<f64> {
        self.lambda.iter().map(Fraction::value).collect()
    }

    /// Nonzero interaction strengths keyed by sorted multiset.
    pub fn interactions(&self) -> &BTreeMap<Multiset, f64> {
        &self.interactions
    }

    /// Δ² for an arbitrary ordered species tuple (0 when absent).
    pub fn delta_sq(&self, tuple: &[usize]) -> f64 {
        self.interactions
            .get(&Multiset::new(tuple.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn max_degree(&self) -> usize {
        self.interactions
            .keys()
            .map(Multiset::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.interactions.keys().map(Multiset::degree).collect();
        d.dedup();
        d
    }

    pub fn is_zero(&self) -> bool {
        self.interactions.is_empty()
    }

    /// The same species and ratios with every Δ² multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scale factor {factor} must be >= 0"
            )));
        }
        let interactions = self
            .interactions
            .iter()
            .map(|(k, &v)| (k.species().to_vec(), v * factor))
            .collect::<Vec<_>>();
        ModelSpec::new(self.species.clone(), self.lambda.clone(), interactions)
    }
}

/// Block sizes `#I_s` of a finite system, species-contiguous in `0..N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSizes {
    block_sizes: Vec<usize>,
}

impl FiniteSizes {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::InvalidModel(
                "every species block needs at least one site".into(),
            ));
        }
        Ok(FiniteSizes { block_sizes })
    }

    /// Sizes summing to `n`, proportional to the spec ratios (largest
    /// remainder rounding, every block at least one site).
    pub fn proportional(spec: &ModelSpec, n: usize) -> Result<Self> {
        let s = spec.species_count();
        if n < s {
            return Err(Error::InvalidArgument(format!(
                "N = {n} is smaller than {s} species"
            )));
        }
        let lambda = spec.lambda_values();
        let raw: Vec<f64> = lambda.iter().map(|l| l * n as f64).collect();
        let mut sizes: Vec<usize> = raw.iter().map(|r| (r.floor() as usize).max(1)).collect();
        while sizes.iter().sum::<usize>() < n {
            let i = (0..s)
                .max_by(|&a, &b| {
                    (raw[a] - sizes[a] as f64)
                        .total_cmp(&(raw[b] - sizes[b] as f64))
                        .then(b.cmp(&a))
                })
                .expect("s > 0");
            sizes[i] += 1;
        }
        while sizes.iter().sum::<usize>() > n {
            let i = (0..s)
                .filter(|&i| sizes[i] > 1)
                .min_by(|&a, &b| (raw[a] - sizes[a] as f64).total_cmp(&(raw[b] - sizes[b] as f64)))
                .expect("n >= s");
            sizes[i] -= 1;
        }
        FiniteSizes::new(sizes)
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn species_count(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn n(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn lambda_n(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.block_sizes.iter().map(|&b| b as f64 / n).collect()
    }

    /// Coordinate range of species `s`.
    pub fn block(&self, s: usize) -> Range<usize> {
        let start: usize = self.block_sizes[..s].iter().sum();
        start..start + self.block_sizes[s]
    }

    /// Species of every coordinate.
    pub fn species_of_sites(&self) -> Vec<usize> {
        self.block_sizes
            .iter()
            .enumerate()
            .flat_map(|(s, &b)| std::iter::repeat_n(s, b))
            .collect()
    }

    pub fn check_matches(&self, spec: &ModelSpec) -> Result<()> {
        if self.species_count() != spec.species_count() {
            return Err(Error::Dimension(format!(
                "sizes have {} blocks, model has {} species",
                self.species_count(),
                spec.species_count()
            )));
        }
        Ok(())
    }
}

impl Multiset {
    /// Every sorted multiset of `degree` species drawn from `0..species_count`.
    pub fn all(species_count: usize, degree: usize) -> Vec<Multiset> {
        fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Multiset>) {
            if left == 0 {
                out.push(Multiset(cur.clone()));
                return;
            }
            for s in start..n {
                cur.push(s);
                rec(s, n, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(
            0,
            species_count,
            degree,
            &mut Vec::with_capacity(degree),
            &mut out,
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Fraction {
        Fraction::exact(1, 2)
    }

    #[test]
    fn orderings_counts() {
        assert_eq!(Multiset::new(vec![0, 0, 1]).orderings(), 3.0);
        assert_eq!(Multiset::new(vec![0, 1, 2]).orderings(), 6.0);
        assert_eq!(Multiset::new(vec![2, 2, 2, 2]).orderings(), 1.0);
        assert_eq!(Multiset::new(vec![0, 0, 1, 1]).orderings(), 6.0);
    }

    #[test]
    fn canonicalises_unsorted_lists() {
        let spec = ModelSpec::with_numbered_species(vec![half(), half()], vec![(vec![1, 0], 2.0)])
            .unwrap();
        assert_eq!(spec.delta_sq(&[0, 1]), 2.0);
        assert_eq!(spec.delta_sq(&[1, 0]), 2.0);
        assert_eq!(spec.delta_sq(&[0, 0]), 0.0);
        assert_eq!(spec.max_degree(), 2);
    }

    #[test]
    fn duplicate_multiset_rejected() {
        let err = ModelSpec::with_numbered_species(
            vec![half(), half()],
            vec![(vec![0, 1], 1.0), (vec![1, 0], 1.0)],
        );
        assert!(matches!(err, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn invalid_lambda_rejected() {
        assert!(ModelSpec::with_numbered_species(vec![half()], vec![]).is_err());
        assert!(ModelSpec::with_numbered_species(
            vec![Fraction::Float(1.2), Fraction::Float(-0.2)],
            vec![]
        )
        .is_err());
        let third = Fraction::exact(1, 3);
        assert!(ModelSpec::with_numbered_species(vec![third; 3], vec![]).is_ok());
    }

    #[test]
    fn negative_strength_rejected() {
        assert!(ModelSpec::with_numbered_species(
            vec![Fraction::exact(1, 1)],
            vec![(vec![0], -1.0)]
        )
        .is_err());
    }

    #[test]
    fn fraction_parsing() {
        assert_eq!(Fraction::parse("1/3").unwrap(), Fraction::exact(1, 3));
        assert_eq!(Fraction::parse(" 2 / 4 ").unwrap(), Fraction::exact(1, 2));
        assert_eq!(Fraction::parse("0.25").unwrap(), Fraction::Float(0.25));
        assert!(Fraction::parse("1/0").is_err());
        assert!(Fraction::parse("abc").is_err());
    }

    #[test]
    fn proportional_sizes() {
        let spec = ModelSpec::with_numbered_species(
            vec![Fraction::exact(1, 3), Fraction::exact(2, 3)],
            vec![],
        )
        .unwrap();
        let sizes = FiniteSizes::proportional(&spec, 10).unwrap();
        assert_eq!(sizes.n(), 10);
        assert_eq!(sizes.block_sizes(), &[3, 7]);
        assert_eq!(sizes.block(1), 3..10);
        let l = sizes.lambda_n();
        assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
