use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{overlap, Configuration};
use super::disorder::DisorderSample;
use super::hamiltonian::Couplings;
use super::ising::ising_exact_free_energy;
use super::replica_seed;
use super::spherical::{spherical_gse_search, GseOptions};
use crate::error::{Error, Result};
use crate::mixture::{build_mixture, FiniteSizes, MixtureFunction, ModelSpec};
use crate::optim;
use crate::seeding::{self, tag};
use crate::stats::Summary;

pub const LIPSCHITZ_MAX_N: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct CovariancePair {
    pub overlap: Vec<f64>,
    /// `N ξ_N(R(σ, τ))`.
    pub expected: f64,
    /// Sample mean of `H(σ) H(τ)`.
    pub estimate: f64,
    pub stderr: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub n: usize,
    pub n_disorders: usize,
    pub pairs: Vec<CovariancePair>,
    pub max_abs_z: f64,
    pub tolerance_se: f64,
    pub holds: bool,
}

/// Monte Carlo check of `E[H(σ)H(τ)] = N ξ_N(R(σ, τ))` on `n_pairs` random
/// Ising pairs with overlaps spread over `[−1, 1]`.
pub fn covariance_check(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    n_pairs: usize,
    n_disorders: usize,
    seed: u64,
) -> Result<CovarianceReport> {
    if n_disorders < 2 {
        return Err(Error::InvalidArgument("need at least two disorders".into()));
    }
    let xi = build_mixture(spec, Some(sizes))?;
    let pairs: Vec<(Configuration, Configuration)> = (0..n_pairs)
        .map(|k| {
            let mut rng = seeding::stream(seed, &[tag::CONFIG, k as u64]);
            let sigma = Configuration::random_ising(sizes, &mut rng);
            let flip: f64 = rng.random();
            let tau: Vec<f64> = sigma
                .values()
                .iter()
                .map(|&v| if rng.random::<f64>() < flip { -v } else { v })
                .collect();
            (sigma, Configuration::ising(tau).expect("spins stay ±1"))
        })
        .collect();
    let products: Vec<Vec<f64>> = (0..n_disorders)
        .into_par_iter()
        .map(|r| {
            let d = DisorderSample::generate(spec, sizes, replica_seed(seed, r))?;
            let c = Couplings::bind(spec, sizes, &d)?;
            Ok(pairs
                .iter()
                .map(|(s, t)| c.evaluate(s.values(), None) * c.evaluate(t.values(), None))
                .collect())
        })
        .collect::<Result<_>>()?;
    let n = sizes.n() as f64;
    let tolerance_se = 4.0;
    let mut out = Vec::with_capacity(n_pairs);
    for (k, (s, t)) in pairs.iter().enumerate() {
        let column: Vec<f64> = products.iter().map(|row| row[k]).collect();
        let summary = Summary::of(&column);
        let r = overlap(s, t, sizes)?;
        let expected = n * xi.value(&r);
        let z = (summary.mean - expected) / summary.stderr;
        out.push(CovariancePair {
            overlap: r,
            expected,
            estimate: summary.mean,
            stderr: summary.stderr,
            z,
        });
    }
    let max_abs_z = out.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
    Ok(CovarianceReport {
        n: sizes.n(),
        n_disorders,
        pairs: out,
        max_abs_z,
        tolerance_se,
        holds: max_abs_z <= tolerance_se,
    })
}

/// `sup_{x ∈ [−1,1]^dim} g(x)` by a grid scan followed by Nelder–Mead from
/// the best grid points.
pub fn sup_on_cube(g: &dyn Fn(&[f64]) -> f64, dim: usize) -> f64 {
    let per_axis = match dim {
        0 => return g(&[]),
        1 => 401,
        2 => 101,
        3 => 31,
        4 => 13,
        _ => 5,
    };
    let total = (per_axis as u64).pow(dim as u32);
    let mut scored: Vec<(f64, Vec<f64>)> = (0..total)
        .map(|mut k| {
            let x: Vec<f64> = (0..dim)
                .map(|_| {
                    let i = k % per_axis as u64;
                    k /= per_axis as u64;
                    -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64
                })
                .collect();
            (g(&x), x)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let clamp = |x: &[f64]| x.iter().map(|v| v.clamp(-1.0, 1.0)).collect::<Vec<_>>();
    let neg = |x: &[f64]| -g(&clamp(x));
    let mut best = scored[0].0;
    for (_, x) in scored.iter().take(5) {
        let res = optim::nelder_mead(&neg, x, 0.1, 2000, 1e-15);
        best = best.max(g(&clamp(&res.x)));
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    pub n: usize,
    pub n_disorders: usize,
    /// Mean of `F_A − F_B` over paired disorders.
    pub mean_difference: f64,
    pub stderr: f64,
    /// `sup |ξ_A − ξ_B|` over `[−1, 1]^S`.
    pub sup_abs_difference: f64,
    pub holds: bool,
    /// Mean of `F_B − F_A`.
    pub one_sided_lhs: f64,
    /// `½[ξ_B(1) − ξ_A(1) + sup (ξ_A − ξ_B)]`.
    pub one_sided_rhs: f64,
    pub one_sided_holds: bool,
}

/// Paired exact enumeration of two Ising models on shared disorder seeds,
/// compared against the covariance-based bounds. Both sides allow three
/// standard errors.
pub fn lipschitz_bound_check(
    spec_a: &ModelSpec,
    spec_b: &ModelSpec,
    sizes: &FiniteSizes,
    n_disorders: usize,
    seed: u64,
) -> Result<LipschitzReport> {
    if sizes.n() > LIPSCHITZ_MAX_N {
        return Err(Error::TooLarge(format!(
            "Lipschitz check supports N <= {LIPSCHITZ_MAX_N}"
        )));
    }
    if n_disorders < 2 {
        return Err(Error::InvalidArgument("need at least two disorders".into()));
    }
    let xa = build_mixture(spec_a, Some(sizes))?;
    let xb = build_mixture(spec_b, Some(sizes))?;
    let diffs: Vec<f64> = (0..n_disorders)
        .into_par_iter()
        .map(|r| {
            let s = replica_seed(seed, r);
            let fa = ising_exact_free_energy(
                spec_a,
                sizes,
                &DisorderSample::generate(spec_a, sizes, s)?,
            )?;
            let fb = ising_exact_free_energy(
                spec_b,
                sizes,
                &DisorderSample::generate(spec_b, sizes, s)?,
            )?;
            Ok(fa - fb)
        })
        .collect::<Result<_>>()?;
    let summary = Summary::of(&diffs);
    let dim = sizes.species_count();
    let sup_abs = sup_on_cube(&|x| (xa.value(x) - xb.value(x)).abs(), dim);
    let sup_a_minus_b = sup_on_cube(&|x| xa.value(x) - xb.value(x), dim);
    let ones = vec![1.0; dim];
    let rhs = 0.5 * (xb.value(&ones) - xa.value(&ones) + sup_a_minus_b);
    let slack = 3.0 * summary.stderr;
    Ok(LipschitzReport {
        n: sizes.n(),
        n_disorders,
        mean_difference: summary.mean,
        stderr: summary.stderr,
        sup_abs_difference: sup_abs,
        holds: summary.mean.abs() <= sup_abs + slack,
        one_sided_lhs: -summary.mean,
        one_sided_rhs: rhs,
        one_sided_holds: -summary.mean <= rhs + slack,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IsingAverage {
    pub n: usize,
    pub seeds: Vec<u64>,
    pub free_energies: Vec<f64>,
    pub summary: Summary,
    /// `ξ_N(1)/2`.
    pub annealed: f64,
    /// Every single-disorder value lies strictly below the annealed bound.
    /// Jensen only bounds the average, so this can fail at high temperature.
    pub strictly_below_annealed: bool,
    /// The disorder average lies below the annealed bound by more than
    /// three standard errors.
    pub mean_below_annealed: bool,
}

/// Exact free energies over `n_disorders` replicas.
pub fn ising_disorder_average(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    n_disorders: usize,
    seed: u64,
) -> Result<IsingAverage> {
    let seeds: Vec<u64> = (0..n_disorders).map(|r| replica_seed(seed, r)).collect();
    let free_energies: Vec<f64> = seeds
        .par_iter()
        .map(|&s| ising_exact_free_energy(spec, sizes, &DisorderSample::generate(spec, sizes, s)?))
        .collect::<Result<_>>()?;
    let xi = build_mixture(spec, Some(sizes))?;
    let annealed = 0.5 * xi.value(&vec![1.0; sizes.species_count()]);
    Ok(IsingAverage {
        n: sizes.n(),
        strictly_below_annealed: free_energies.iter().all(|&f| f < annealed),
        mean_below_annealed: {
            let s = Summary::of(&free_energies);
            s.mean + 3.0 * s.stderr < annealed
        },
        summary: Summary::of(&free_energies),
        seeds,
        free_energies,
        annealed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GseAverage {
    pub n: usize,
    pub seeds: Vec<u64>,
    pub values: Vec<f64>,
    pub summary: Summary,
    pub stagnated: usize,
}

/// Spherical ground-state search over `n_disorders` replicas; restarts of
/// replica `r` are seeded from the replica seed.
pub fn spherical_gse_average(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    n_disorders: usize,
    seed: u64,
    opts: &GseOptions,
) -> Result<GseAverage> {
    let seeds: Vec<u64> = (0..n_disorders).map(|r| replica_seed(seed, r)).collect();
    let runs: Vec<(f64, bool)> = seeds
        .par_iter()
        .map(|&s| {
            let d = DisorderSample::generate(spec, sizes, s)?;
            let r = spherical_gse_search(
                spec,
                sizes,
                &d,
                &GseOptions {
                    seed: s,
                    ..opts.clone()
                },
            )?;
            Ok((r.value, r.stagnated))
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    Ok(GseAverage {
        n: sizes.n(),
        summary: Summary::of(&values),
        stagnated: runs.iter().filter(|r| r.1).count(),
        seeds,
        values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub n_disorders: usize,
    pub mean: f64,
    pub std: f64,
    pub t: f64,
    pub exceedances: usize,
    pub frequency: f64,
    /// `2 exp(−N t² / (2 ξ_N(1)))`.
    pub bound: f64,
    /// Three binomial standard deviations at the bound.
    pub slack: f64,
    pub holds: bool,
}

/// Spread of `max H/N` across disorders against the Gaussian concentration
/// tail at `t = 2√(2ξ_N(1)/N)`, with the sample mean standing in for the
/// expectation.
pub fn concentration_check(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    n_disorders: usize,
    seed: u64,
    opts: &GseOptions,
) -> Result<ConcentrationReport> {
    let avg = spherical_gse_average(spec, sizes, n_disorders, seed, opts)?;
    let xi1 = annealed_xi1(spec, sizes)?;
    let n = sizes.n() as f64;
    let t = 2.0 * (2.0 * xi1 / n).sqrt();
    let bound = if xi1 > 0.0 {
        (2.0 * (-n * t * t / (2.0 * xi1)).exp()).min(1.0)
    } else {
        1.0
    };
    let exceedances = avg
        .values
        .iter()
        .filter(|v| (*v - avg.summary.mean).abs() > t)
        .count();
    let frequency = exceedances as f64 / n_disorders as f64;
    let slack = 3.0 * (bound * (1.0 - bound) / n_disorders as f64).sqrt();
    Ok(ConcentrationReport {
        n: sizes.n(),
        n_disorders,
        mean: avg.summary.mean,
        std: avg.summary.std,
        t,
        exceedances,
        frequency,
        bound,
        slack,
        holds: frequency <= bound + slack,
    })
}

fn annealed_xi1(spec: &ModelSpec, sizes: &FiniteSizes) -> Result<f64> {
    let xi: MixtureFunction = build_mixture(spec, Some(sizes))?;
    Ok(xi.value(&vec![1.0; sizes.species_count()]))
}
