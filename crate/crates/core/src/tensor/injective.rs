use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::gaussian::GaussianTensor;
use crate::error::{Error, Result};
use crate::seeding::{self, tag};

#[derive(Debug, Clone)]
pub struct InjectiveOptions {
    /// Defaults to `10 · p · d`.
    pub restarts: Option<usize>,
    /// Sweep cap per restart.
    pub iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for InjectiveOptions {
    fn default() -> Self {
        InjectiveOptions {
            restarts: None,
            iters: 5000,
            tol: 1e-12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectiveEstimate {
    /// `⟨T, u⁽¹⁾ ⊗ ⋯ ⊗ u⁽ᵖ⁾⟩` at the best restart; a lower bound on `‖T‖_inj`.
    pub value: f64,
    pub vectors: Vec<Vec<f64>>,
    pub restarts: usize,
    pub converged: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlsRun {
    pub value: f64,
    pub vectors: Vec<Vec<f64>>,
    /// Objective after every sweep.
    pub trace: Vec<f64>,
    pub converged: bool,
}

/// Contract every mode except `keep` against `us`, leaving a vector of
/// length `d`. Trailing modes are contracted first so each pass reads a
/// contiguous block.
pub(crate) fn contract_all_but(t: &GaussianTensor, us: &[Vec<f64>], keep: usize) -> Vec<f64> {
    let (p, d) = (t.order(), t.dim());
    let mut cur: Vec<f64> = t.entries().to_vec();
    for mode in (keep + 1..p).rev() {
        let u = &us[mode];
        cur = cur
            .chunks_exact(d)
            .map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum())
            .collect();
    }
    for u in us.iter().take(keep) {
        let rest = cur.len() / d;
        let mut next = vec![0.0; rest];
        for (i, ui) in u.iter().enumerate() {
            for (n, c) in next.iter_mut().zip(&cur[i * rest..(i + 1) * rest]) {
                *n += ui * c;
            }
        }
        cur = next;
    }
    cur
}

fn normalise(v: &mut [f64]) -> Option<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(norm)
}

fn random_unit(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if normalise(&mut v).is_some() {
            return v;
        }
    }
}

/// Alternating maximisation from `start`: each step replaces one vector by
/// the normalised contraction of `T` with the others, which is the exact
/// maximiser in that mode. Stops when a sweep gains less than `tol`.
pub fn alternating_maximization(
    t: &GaussianTensor,
    start: Vec<Vec<f64>>,
    iters: usize,
    tol: f64,
) -> Result<AlsRun> {
    let p = t.order();
    if start.len() != p || start.iter().any(|u| u.len() != t.dim()) {
        return Err(Error::Dimension(
            "one start vector of length d per mode".into(),
        ));
    }
    let mut us = start;
    let mut trace = Vec::new();
    let mut value = f64::NEG_INFINITY;
    for _ in 0..iters.max(1) {
        let mut sweep_value = value;
        for k in 0..p {
            let mut v = contract_all_but(t, &us, k);
            let norm = normalise(&mut v)
                .ok_or_else(|| Error::InvalidArgument("zero contraction".into()))?;
            us[k] = v;
            sweep_value = norm;
        }
        let gain = sweep_value - value;
        value = sweep_value;
        trace.push(value);
        if gain < tol * value.abs().max(1.0) {
            return Ok(AlsRun {
                value,
                vectors: us,
                trace,
                converged: true,
            });
        }
    }
    Ok(AlsRun {
        value,
        vectors: us,
        trace,
        converged: false,
    })
}

/// Multi-start alternating maximisation. Restart `r` starts from uniform
/// sphere points drawn from the stream `(seed, r)`; an attempt that hits a
/// zero contraction is redrawn.
pub fn injective_norm_estimate(
    t: &GaussianTensor,
    opts: &InjectiveOptions,
) -> Result<InjectiveEstimate> {
    let (p, d) = (t.order(), t.dim());
    if p == 1 {
        let mut u = t.entries().to_vec();
        let value = normalise(&mut u).unwrap_or(0.0);
        if value == 0.0 {
            u = vec![0.0; d];
            u[0] = 1.0;
        }
        return Ok(InjectiveEstimate {
            value,
            vectors: vec![u],
            restarts: 1,
            converged: 1,
        });
    }
    let restarts = opts.restarts.unwrap_or(10 * p * d).max(1);
    let runs: Vec<Option<AlsRun>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            for attempt in 0..8u64 {
                let mut rng = seeding::stream(opts.seed, &[tag::RESTART, r as u64, attempt]);
                let start = (0..p).map(|_| random_unit(d, &mut rng)).collect();
                if let Ok(run) = alternating_maximization(t, start, opts.iters, opts.tol) {
                    return Some(run);
                }
            }
            None
        })
        .collect();
    let converged = runs.iter().flatten().filter(|r| r.converged).count();
    let best = runs
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .ok_or_else(|| Error::InvalidArgument("every restart hit a zero contraction".into()))?;
    Ok(InjectiveEstimate {
        value: best.value,
        vectors: best.vectors,
        restarts,
        converged,
    })
}
