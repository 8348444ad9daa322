use super::config::Configuration;
use super::disorder::{orderings, Block, DisorderSample};
use crate::error::{Error, Result};
use crate::mixture::{FiniteSizes, ModelSpec};

/// A disorder sample bound to its model: every block with its weight
/// `N^{−(p−1)/2} √Δ²` and the offsets of its species blocks.
pub(crate) struct Couplings<'a> {
    pub n: usize,
    pub terms: Vec<(f64, &'a Block, Vec<usize>, Vec<usize>)>,
}

impl<'a> Couplings<'a> {
    pub fn bind(
        spec: &ModelSpec,
        sizes: &FiniteSizes,
        disorder: &'a DisorderSample,
    ) -> Result<Self> {
        sizes.check_matches(spec)?;
        if disorder.block_sizes() != sizes.block_sizes() {
            return Err(Error::Dimension(format!(
                "disorder drawn for block sizes {:?}, model uses {:?}",
                disorder.block_sizes(),
                sizes.block_sizes()
            )));
        }
        let expected: Vec<Vec<usize>> = spec
            .interactions()
            .keys()
            .flat_map(|m| orderings(m.species()))
            .collect();
        let mut have: Vec<&Vec<usize>> = disorder.blocks().iter().map(|b| &b.species).collect();
        let mut want: Vec<&Vec<usize>> = expected.iter().collect();
        have.sort();
        want.sort();
        if have != want {
            return Err(Error::Dimension(
                "disorder was drawn for a different interaction pattern".into(),
            ));
        }
        let n = sizes.n();
        let offsets: Vec<usize> = (0..sizes.species_count())
            .map(|s| sizes.block(s).start)
            .collect();
        let terms = disorder
            .blocks()
            .iter()
            .map(|b| {
                let p = b.degree();
                let w = spec.delta_sq(&b.species).sqrt() / (n as f64).powf((p as f64 - 1.0) / 2.0);
                let offs = b.species.iter().map(|&s| offsets[s]).collect();
                let dims = b.species.iter().map(|&s| sizes.block_sizes()[s]).collect();
                (w, b, offs, dims)
            })
            .collect();
        Ok(Couplings { n, terms })
    }

    /// `H(σ)`, adding `∂H/∂σ` into `grad` when given.
    pub fn evaluate(&self, sigma: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let mut total = 0.0;
        for (w, block, offs, dims) in &self.terms {
            total += contract(*w, &block.g, offs, dims, sigma, grad.as_deref_mut());
        }
        total
    }
}

/// `w Σ g_{i_1..i_p} σ_{i_1}⋯σ_{i_p}` over one block; the last index runs
/// in the inner loop.
fn contract(
    w: f64,
    g: &[f64],
    offs: &[usize],
    dims: &[usize],
    sigma: &[f64],
    mut grad: Option<&mut [f64]>,
) -> f64 {
    let p = dims.len();
    let inner = dims[p - 1];
    let last = &sigma[offs[p - 1]..offs[p - 1] + inner];
    let mut idx = vec![0usize; p - 1];
    let mut others = vec![0.0; p - 1];
    let mut value = 0.0;
    for row in g.chunks_exact(inner) {
        let sites: Vec<usize> = (0..p - 1).map(|l| offs[l] + idx[l]).collect();
        let prefix: f64 = sites.iter().map(|&i| sigma[i]).product();
        let dot: f64 = row.iter().zip(last).map(|(a, b)| a * b).sum();
        value += prefix * dot;
        if let Some(gr) = grad.as_deref_mut() {
            let tail = &mut gr[offs[p - 1]..offs[p - 1] + inner];
            for (t, r) in tail.iter_mut().zip(row) {
                *t += w * prefix * r;
            }
            for l in 0..p - 1 {
                others[l] = (0..p - 1)
                    .filter(|&m| m != l)
                    .map(|m| sigma[sites[m]])
                    .product();
            }
            for l in 0..p - 1 {
                gr[sites[l]] += w * others[l] * dot;
            }
        }
        for l in (0..p - 1).rev() {
            idx[l] += 1;
            if idx[l] < dims[l] {
                break;
            }
            idx[l] = 0;
        }
    }
    w * value
}

/// `H_N(σ)` for the given model, sizes and disorder.
pub fn hamiltonian(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    disorder: &DisorderSample,
    sigma: &Configuration,
) -> Result<f64> {
    let c = Couplings::bind(spec, sizes, disorder)?;
    if sigma.len() != c.n {
        return Err(Error::Dimension(format!(
            "configuration has {} coordinates, N = {}",
            sigma.len(),
            c.n
        )));
    }
    Ok(c.evaluate(sigma.values(), None))
}

/// `H_N(σ)` and its Euclidean gradient.
pub fn hamiltonian_gradient(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    disorder: &DisorderSample,
    sigma: &Configuration,
) -> Result<(f64, Vec<f64>)> {
    let c = Couplings::bind(spec, sizes, disorder)?;
    if sigma.len() != c.n {
        return Err(Error::Dimension(format!(
            "configuration has {} coordinates, N = {}",
            sigma.len(),
            c.n
        )));
    }
    let mut grad = vec![0.0; c.n];
    let h = c.evaluate(sigma.values(), Some(&mut grad));
    Ok((h, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::models;
    use crate::seeding;
    use approx::assert_relative_eq;

    // Direct sum over all ordered index tuples, one site at a time.
    fn brute(spec: &ModelSpec, sizes: &FiniteSizes, d: &DisorderSample, s: &[f64]) -> f64 {
        let n = sizes.n();
        let species = sizes.species_of_sites();
        let mut total = 0.0;
        for b in d.blocks() {
            let p = b.degree();
            let w = spec.delta_sq(&b.species).sqrt() / (n as f64).powf((p as f64 - 1.0) / 2.0);
            let sites: Vec<Vec<usize>> = b
                .species
                .iter()
                .map(|&t| (0..n).filter(|&i| species[i] == t).collect())
                .collect();
            for (k, g) in b.g.iter().enumerate() {
                let mut rest = k;
                let mut prod = 1.0;
                for l in (0..p).rev() {
                    prod *= s[sites[l][rest % sites[l].len()]];
                    rest /= sites[l].len();
                }
                total += w * g * prod;
            }
        }
        total
    }

    #[test]
    fn matches_brute_force_and_gradient() {
        let spec = ModelSpec::with_numbered_species(
            vec![
                crate::mixture::Fraction::exact(2, 5),
                crate::mixture::Fraction::exact(3, 5),
            ],
            vec![
                (vec![0], 0.5),
                (vec![0, 1], 1.2),
                (vec![1, 1], 0.7),
                (vec![0, 1, 1], 0.9),
            ],
        )
        .unwrap();
        let sizes = FiniteSizes::new(vec![2, 3]).unwrap();
        let d = DisorderSample::generate(&spec, &sizes, 3).unwrap();
        let mut rng = seeding::stream(5, &[]);
        let s = Configuration::random_spherical(&sizes, &mut rng);
        let (h, g) = hamiltonian_gradient(&spec, &sizes, &d, &s).unwrap();
        assert_relative_eq!(
            h,
            brute(&spec, &sizes, &d, s.values()),
            max_relative = 1e-12
        );
        for i in 0..sizes.n() {
            let eps = 1e-6;
            let mut up = s.values().to_vec();
            let mut dn = s.values().to_vec();
            up[i] += eps;
            dn[i] -= eps;
            let fd = (brute(&spec, &sizes, &d, &up) - brute(&spec, &sizes, &d, &dn)) / (2.0 * eps);
            assert!((fd - g[i]).abs() < 1e-7, "site {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn linear_in_couplings() {
        let spec = models::pure_bipartite(1, 2, 1.3);
        let sizes = FiniteSizes::new(vec![3, 4]).unwrap();
        let d = DisorderSample::generate(&spec, &sizes, 8).unwrap();
        let mut rng = seeding::stream(2, &[]);
        let s = Configuration::random_ising(&sizes, &mut rng);
        let h1 = hamiltonian(&spec, &sizes, &d, &s).unwrap();
        let h2 = hamiltonian(&spec, &sizes, &d.scaled(2.0), &s).unwrap();
        assert_eq!(h2, 2.0 * h1);
        let z = DisorderSample::zeros(&spec, &sizes).unwrap();
        assert_eq!(hamiltonian(&spec, &sizes, &z, &s).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_inputs() {
        let spec = models::sk(1.0);
        let sizes = FiniteSizes::new(vec![4]).unwrap();
        let d = DisorderSample::generate(&spec, &sizes, 1).unwrap();
        let s = Configuration::ising(vec![1.0; 5]).unwrap();
        assert!(matches!(
            hamiltonian(&spec, &sizes, &d, &s),
            Err(Error::Dimension(_))
        ));
        let other = FiniteSizes::new(vec![5]).unwrap();
        let s5 = Configuration::ising(vec![1.0; 5]).unwrap();
        assert!(matches!(
            hamiltonian(&spec, &other, &d, &s5),
            Err(Error::Dimension(_))
        ));
        assert!(hamiltonian(
            &models::pure(3, 1.0),
            &sizes,
            &d,
            &Configuration::ising(vec![1.0; 4]).unwrap()
        )
        .is_err());
    }
}
