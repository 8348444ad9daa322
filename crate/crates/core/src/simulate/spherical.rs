use rayon::prelude::*;
use serde::Serialize;

use super::config::Configuration;
use super::disorder::DisorderSample;
use super::hamiltonian::Couplings;
use crate::error::Result;
use crate::mixture::{FiniteSizes, ModelSpec};
use crate::seeding::{self, tag};

#[derive(Debug, Clone, Serialize)]
pub struct GseOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop when the tangent gradient norm divided by N falls below this.
    pub tol: f64,
    pub initial_step: f64,
}

impl Default for GseOptions {
    fn default() -> Self {
        GseOptions {
            restarts: 20,
            seed: 0,
            max_iters: 5000,
            tol: 1e-10,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GseResult {
    /// Best `max H(σ)/N` found: a lower bound on the true maximum.
    pub value: f64,
    pub configuration: Configuration,
    /// Per-restart values, in restart order.
    pub restarts: Vec<f64>,
    pub converged: usize,
    /// Some restart ran out of iterations or step size before converging.
    pub stagnated: bool,
}

/// Tangent gradient level below which a line-search stall counts as
/// convergence.
pub const STALL_TOL: f64 = 1e-6;

struct Ascent {
    value: f64,
    sigma: Vec<f64>,
    converged: bool,
}

fn retract(x: &mut [f64], sizes: &FiniteSizes) {
    for s in 0..sizes.species_count() {
        let r = sizes.block(s);
        let n = r.len() as f64;
        let norm = x[r.clone()].iter().map(|v| v * v).sum::<f64>().sqrt();
        x[r].iter_mut().for_each(|v| *v *= n.sqrt() / norm);
    }
}

fn ascend(c: &Couplings<'_>, sizes: &FiniteSizes, start: Vec<f64>, opts: &GseOptions) -> Ascent {
    let n = c.n as f64;
    let mut sigma = start;
    let mut grad = vec![0.0; c.n];
    let mut h = c.evaluate(&sigma, Some(&mut grad));
    let mut step = opts.initial_step;
    let mut trial = vec![0.0; c.n];
    for _ in 0..opts.max_iters {
        // Project onto the tangent space of each species sphere.
        for s in 0..sizes.species_count() {
            let r = sizes.block(s);
            let radius_sq = r.len() as f64;
            let dot: f64 = sigma[r.clone()]
                .iter()
                .zip(&grad[r.clone()])
                .map(|(a, b)| a * b)
                .sum();
            for i in r {
                grad[i] -= dot / radius_sq * sigma[i];
            }
        }
        let norm_sq: f64 = grad.iter().map(|v| v * v).sum();
        if norm_sq.sqrt() / n < opts.tol {
            return Ascent {
                value: h / n,
                sigma,
                converged: true,
            };
        }
        loop {
            for ((t, s), g) in trial.iter_mut().zip(&sigma).zip(&grad) {
                *t = s + step * g;
            }
            retract(&mut trial, sizes);
            let h_trial = c.evaluate(&trial, None);
            // Strict increase: once the Armijo slack drops below the rounding
            // of `h`, equality would otherwise accept every step.
            if h_trial > h && h_trial >= h + 1e-4 * step * norm_sq {
                std::mem::swap(&mut sigma, &mut trial);
                step *= 2.0;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                // No ascent possible at machine precision. A value-based line
                // search stalls near |∇|/N ~ sqrt(eps), well before `tol`.
                return Ascent {
                    value: h / n,
                    sigma,
                    converged: norm_sq.sqrt() / n < STALL_TOL,
                };
            }
        }
        grad.iter_mut().for_each(|v| *v = 0.0);
        h = c.evaluate(&sigma, Some(&mut grad));
    }
    Ascent {
        value: h / n,
        sigma,
        converged: false,
    }
}

/// Multi-start Riemannian gradient ascent of `H(σ)/N` over the product of
/// species spheres. Restart `r` starts from a uniform point drawn from the
/// stream `(seed, r)`, so more restarts never lower the result.
pub fn spherical_gse_search(
    spec: &ModelSpec,
    sizes: &FiniteSizes,
    disorder: &DisorderSample,
    opts: &GseOptions,
) -> Result<GseResult> {
    let c = Couplings::bind(spec, sizes, disorder)?;
    let runs: Vec<Ascent> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = seeding::stream(opts.seed, &[tag::RESTART, r as u64]);
            let start = Configuration::random_spherical(sizes, &mut rng).into_values();
            ascend(&c, sizes, start, opts)
        })
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let converged = runs.iter().filter(|r| r.converged).count();
    Ok(GseResult {
        value: runs[best].value,
        configuration: Configuration::spherical(runs[best].sigma.clone(), sizes)?,
        restarts: runs.iter().map(|r| r.value).collect(),
        converged,
        stagnated: converged < runs.len(),
    })
}
