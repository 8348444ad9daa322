use std::collections::BTreeMap;

use super::disorder::DisorderSample;
use super::hamiltonian::Couplings;
use crate::error::{Error, Result};
use crate::mixture::{FiniteSizes, ModelSpec};

pub const ISING_EXACT_MAX_N: usize = 24;

/// `H` on the cube as a multilinear polynomial: since `σ_i² = 1`, each
/// monomial reduces to the product over sites of odd multiplicity, kept as
/// a bitmask.
struct Multilinear {
    n: usize,
    terms: BTreeMap<u32, f64>,
}

impl Multilinear {
    fn build(c: &Couplings<'_>) -> Self {
        let mut terms = BTreeMap::new();
        for (w, block, offs, dims) in &c.terms {
            let p = dims.len();
            for (k, g) in block.g.iter().enumerate() {
                let mut rest = k;
                let mut mask = 0u32;
                for l in (0..p).rev() {
                    mask ^= 1 << (offs[l] + rest % dims[l]);
                    rest /= dims[l];
                }
                *terms.entry(mask).or_insert(0.0) += w * g;
            }
        }
        Multilinear { n: c.n, terms }
    }

    fn value(&self, negative: u32) -> f64 {
        self.terms
            .iter()
            .map(|(&m, &c)| {
                if (m & negative).count_ones() % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .sum()
    }
}

struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        self.max + self.sum.ln()
    }
}

fn bind<'a>(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    disorder: &'a DisorderSample,
) -> Result<Couplings<'a>> {
    if sizes.n() > ISING_EXACT_MAX_N {
        return Err(Error::TooLarge(format!(
            "exact enumeration supports N <= {ISING_EXACT_MAX_N}, got {}",
            sizes.n()
        )));
    }
    Couplings::bind(spec, sizes, disorder)
}

/// `(1/N) log (2^{−N} Σ_σ exp H(σ))` for one disorder sample, by Gray-code
/// enumeration: each step flips one spin and updates `H` through the terms
/// containing that spin only.
pub fn ising_exact_free_energy(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    disorder: &DisorderSample,
) -> Result<f64> {
    let form = Multilinear::build(&bind(spec, sizes, disorder)?);
    let n = form.n;
    let mut by_site: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for (&m, &c) in &form.terms {
        for (i, list) in by_site.iter_mut().enumerate() {
            if m >> i & 1 == 1 {
                list.push((m, c));
            }
        }
    }
    let mut h = form.value(0);
    let mut negative = 0u32;
    let mut acc = LogSumExp::new();
    acc.push(h);
    for step in 1u64..(1u64 << n) {
        let site = step.trailing_zeros() as usize;
        let mut current = 0.0;
        for &(m, c) in &by_site[site] {
            current += if (m & negative).count_ones() % 2 == 1 {
                -c
            } else {
                c
            };
        }
        h -= 2.0 * current;
        negative ^= 1 << site;
        acc.push(h);
    }
    Ok((acc.value() - n as f64 * std::f64::consts::LN_2) / n as f64)
}

/// Same quantity with `H` recomputed from scratch at every configuration.
/// Reference implementation for testing the incremental one.
pub fn ising_naive_free_energy(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    disorder: &DisorderSample,
) -> Result<f64> {
    let c = bind(spec, sizes, disorder)?;
    let n = c.n;
    let mut acc = LogSumExp::new();
    let mut sigma = vec![1.0; n];
    for state in 0u64..(1u64 << n) {
        for (i, s) in sigma.iter_mut().enumerate() {
            *s = if state >> i & 1 == 1 { -1.0 } else { 1.0 };
        }
        acc.push(c.evaluate(&sigma, None));
    }
    Ok((acc.value() - n as f64 * std::f64::consts::LN_2) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::{models, Fraction};
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_disorder() {
        let spec = models::sk(1.0);
        let sizes = FiniteSizes::new(vec![6]).unwrap();
        let d = DisorderSample::zeros(&spec, &sizes).unwrap();
        assert_abs_diff_eq!(
            ising_exact_free_energy(&spec, &sizes, &d).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn two_spin_closed_form() {
        let beta = 0.9;
        let spec = models::sk(beta);
        let sizes = FiniteSizes::new(vec![2]).unwrap();
        let d = DisorderSample::generate(&spec, &sizes, 17).unwrap();
        let g = &d.blocks()[0].g;
        // Diagonal terms are constants; off-diagonal pair couples σ1σ2.
        let w = beta / 2f64.sqrt();
        let constant = w * (g[0] + g[3]);
        let h12 = w * (g[1] + g[2]);
        let direct =
            ((2.0 * (constant + h12).exp() + 2.0 * (constant - h12).exp()) / 4.0).ln() / 2.0;
        assert_abs_diff_eq!(
            ising_exact_free_energy(&spec, &sizes, &d).unwrap(),
            direct,
            epsilon = 1e-14
        );
    }

    #[test]
    fn gray_code_matches_naive() {
        let spec = ModelSpec::with_numbered_species(
            vec![Fraction::exact(1, 3), Fraction::exact(2, 3)],
            vec![
                (vec![0], 0.3),
                (vec![0, 1], 1.1),
                (vec![1, 1], 0.6),
                (vec![0, 0, 1], 0.8),
                (vec![1, 1, 1, 1], 0.2),
            ],
        )
        .unwrap();
        for n in [3, 6, 12] {
            let sizes = FiniteSizes::proportional(&spec, n).unwrap();
            for seed in 0..3 {
                let d = DisorderSample::generate(&spec, &sizes, seed).unwrap();
                let a = ising_exact_free_energy(&spec, &sizes, &d).unwrap();
                let b = ising_naive_free_energy(&spec, &sizes, &d).unwrap();
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn size_cap() {
        let spec = models::sk(1.0);
        let sizes = FiniteSizes::new(vec![25]).unwrap();
        let d = DisorderSample::generate(&spec, &sizes, 0).unwrap();
        assert!(matches!(
            ising_exact_free_energy(&spec, &sizes, &d),
            Err(Error::TooLarge(_))
        ));
    }
}
