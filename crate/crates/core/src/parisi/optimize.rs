use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    ising_functional, spherical_functional, Ensemble, FunctionalValue, IsingOptions, ParisiPath,
    DEFAULT_NODES,
};
use crate::error::{Error, Result};
use crate::mixture::MixtureFunction;
use crate::optim;
use crate::seeding::{self, tag};

pub const ISING_K_CAP: usize = 3;
pub const SPHERICAL_K_CAP: usize = 8;

#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Ising quadrature nodes per level.
    pub nodes: usize,
    pub max_iters: u64,
    /// Nelder–Mead spread tolerance on objective values.
    pub tol: f64,
    /// Optimise at k = 1, 2, … in turn, warm-starting each level from the
    /// embedding of the previous optimum.
    pub ladder: bool,
    pub warm_start: Option<ParisiPath>,
    /// Overrides the default cap on k for the ensemble.
    pub k_cap: Option<usize>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            restarts: 8,
            seed: 0,
            nodes: DEFAULT_NODES,
            max_iters: 4000,
            tol: 1e-13,
            ladder: true,
            warm_start: None,
            k_cap: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Optimized {
    pub path: ParisiPath,
    pub value: FunctionalValue,
    pub converged: bool,
    /// Best value found at each k of the ladder (just the final k without it).
    pub ladder: Vec<(usize, f64)>,
}

fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u
    } else {
        u.exp().ln_1p()
    }
}

fn inv_softplus(y: f64) -> f64 {
    let y = y.max(1e-300);
    if y > 30.0 {
        y
    } else {
        y.exp_m1().ln()
    }
}

/// Unconstrained coordinates for paths with `k` levels and `s` species:
/// `k − 1` softplus mass increments (the last increment is pinned to
/// `softplus(0)`), then `k + 1` square-root overlap increments per species.
struct Coordinates {
    k: usize,
    s: usize,
}

impl Coordinates {
    fn decode(&self, x: &[f64]) -> Option<ParisiPath> {
        let k = self.k;
        let mut inc: Vec<f64> = x[..k - 1].iter().map(|&u| softplus(u)).collect();
        inc.push(std::f64::consts::LN_2);
        let total: f64 = inc.iter().sum();
        let mut m = vec![0.0; k + 1];
        let mut acc = 0.0;
        for j in 1..k {
            acc += inc[j - 1];
            m[j] = acc / total;
        }
        m[k] = 1.0;
        let mut q = vec![vec![0.0; self.s]; k + 2];
        for s in 0..self.s {
            let w = &x[k - 1 + s * (k + 1)..k - 1 + (s + 1) * (k + 1)];
            let total: f64 = w.iter().map(|v| v * v).sum();
            let mut acc = 0.0;
            for j in 1..=k {
                acc += w[j - 1] * w[j - 1];
                q[j][s] = if total > 0.0 {
                    (acc / total).min(1.0)
                } else {
                    0.0
                };
            }
            q[k + 1][s] = 1.0;
        }
        ParisiPath::new(m, q).ok()
    }

    fn encode(&self, path: &ParisiPath) -> Vec<f64> {
        let m = path.m();
        let k = self.k;
        let last = m[k] - m[k - 1];
        let mut x: Vec<f64> = (1..k)
            .map(|j| inv_softplus(std::f64::consts::LN_2 * (m[j] - m[j - 1]) / last))
            .collect();
        for s in 0..self.s {
            for j in 0..=k {
                x.push(
                    (path.q_level(j + 1)[s] - path.q_level(j)[s])
                        .max(0.0)
                        .sqrt(),
                );
            }
        }
        x
    }

    fn random(&self, rng: &mut impl Rng) -> Vec<f64> {
        let mut x: Vec<f64> = (1..self.k).map(|_| rng.random_range(-2.5..2.5)).collect();
        x.extend((0..self.s * (self.k + 1)).map(|_| rng.random_range(0.0..1.0)));
        x
    }

    fn default_start(&self) -> Vec<f64> {
        let k = self.k;
        let m: Vec<f64> = (0..=k).map(|j| j as f64 / k as f64).collect();
        let q: Vec<Vec<f64>> = (0..k + 2)
            .map(|j| {
                vec![
                    if j == k + 1 {
                        1.0
                    } else {
                        0.5 * j as f64 / (k + 1) as f64
                    };
                    self.s
                ]
            })
            .collect();
        self.encode(&ParisiPath::new(m, q).expect("default path is valid"))
    }
}

struct Candidate {
    path: ParisiPath,
    value: f64,
    converged: bool,
    restart: usize,
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    a.value
        .total_cmp(&b.value)
        .then(a.path.q_norm().total_cmp(&b.path.q_norm()))
        .then(a.restart.cmp(&b.restart))
        .is_lt()
}

fn objective(f: &MixtureFunction, ensemble: Ensemble, nodes: usize, path: &ParisiPath) -> f64 {
    let v = match ensemble {
        Ensemble::Ising => ising_functional(
            f,
            path,
            &IsingOptions {
                nodes,
                ..Default::default()
            },
        ),
        Ensemble::Spherical => spherical_functional(f, path),
    };
    match v {
        Ok(v) if v.value.is_finite() => v.value,
        _ => f64::INFINITY,
    }
}

fn solve_level(
    f: &MixtureFunction,
    ensemble: Ensemble,
    k: usize,
    warm: Option<&ParisiPath>,
    opts: &OptimizeOptions,
) -> Candidate {
    let coords = Coordinates {
        k,
        s: f.species_count(),
    };
    let mut starts = vec![match warm {
        Some(p) => coords.encode(p),
        None => coords.default_start(),
    }];
    for r in 1..opts.restarts.max(1) {
        let mut rng = seeding::stream(opts.seed, &[tag::RESTART, k as u64, r as u64]);
        starts.push(coords.random(&mut rng));
    }
    let cost = |x: &[f64]| match coords.decode(x) {
        Some(p) => objective(f, ensemble, opts.nodes, &p),
        None => f64::INFINITY,
    };
    let runs: Vec<Candidate> = starts
        .par_iter()
        .enumerate()
        .filter_map(|(restart, x0)| {
            let res = optim::nelder_mead(&cost, x0, 0.5, opts.max_iters, opts.tol);
            let path = coords.decode(&res.x)?;
            Some(Candidate {
                path,
                value: res.value,
                converged: res.converged,
                restart,
            })
        })
        .collect();
    let mut best: Option<Candidate> = None;
    for c in runs {
        if best.as_ref().is_none_or(|b| better(&c, b)) {
            best = Some(c);
        }
    }
    best.unwrap_or_else(|| {
        let path = coords
            .decode(&coords.default_start())
            .expect("default path is valid");
        let value = objective(f, ensemble, opts.nodes, &path);
        Candidate {
            path,
            value,
            converged: false,
            restart: 0,
        }
    })
}

/// Minimise the Parisi functional over paths with `k` levels. The result
/// is the value at a feasible path, hence an upper bound on the infimum.
pub fn optimize_path(
    f: &MixtureFunction,
    ensemble: Ensemble,
    k: usize,
    opts: &OptimizeOptions,
) -> Result<Optimized> {
    let cap = opts.k_cap.unwrap_or(match ensemble {
        Ensemble::Ising => ISING_K_CAP,
        Ensemble::Spherical => SPHERICAL_K_CAP,
    });
    if k == 0 || k > cap {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 1..={cap} for {ensemble}"
        )));
    }
    let s = f.species_count();
    let warm = opts
        .warm_start
        .as_ref()
        .filter(|p| p.species_count() == s && p.k() <= k)
        .cloned();
    let embed = |p: &ParisiPath, target: usize| {
        let mut p = p.clone();
        while p.k() < target {
            p = p.refine();
        }
        p
    };
    let first = if opts.ladder {
        warm.as_ref().map_or(1, |p| p.k())
    } else {
        k
    };
    let mut ladder = Vec::new();
    let mut current = warm;
    let mut converged = true;
    let mut last = None;
    for level in first..=k {
        let start = current.as_ref().map(|p| embed(p, level));
        let c = solve_level(f, ensemble, level, start.as_ref(), opts);
        ladder.push((level, c.value));
        converged = c.converged;
        current = Some(c.path.clone());
        last = Some(c);
    }
    let best = last.expect("at least one level");
    let value = match ensemble {
        Ensemble::Ising => ising_functional(
            f,
            &best.path,
            &IsingOptions {
                nodes: opts.nodes,
                ..Default::default()
            },
        )?,
        Ensemble::Spherical => spherical_functional(f, &best.path)?,
    };
    Ok(Optimized {
        path: best.path,
        value,
        converged,
        ladder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coordinates_round_trip() {
        let c = Coordinates { k: 3, s: 2 };
        let path = ParisiPath::new(
            vec![0.0, 0.2, 0.7, 1.0],
            vec![
                vec![0.0, 0.0],
                vec![0.1, 0.0],
                vec![0.4, 0.3],
                vec![0.4, 0.9],
                vec![1.0, 1.0],
            ],
        )
        .unwrap();
        let back = c.decode(&c.encode(&path)).unwrap();
        for (a, b) in back.m().iter().zip(path.m()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        for (a, b) in back.q().iter().flatten().zip(path.q().iter().flatten()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn sk_high_temperature() {
        let f = MixtureFunction::pure(2, 0.25);
        let opts = OptimizeOptions {
            restarts: 4,
            ..Default::default()
        };
        let r = optimize_path(&f, Ensemble::Ising, 1, &opts).unwrap();
        assert_abs_diff_eq!(r.value.value, 0.125, epsilon = 1e-9);
        assert!(r.path.q_level(1)[0] < 1e-3);
    }

    #[test]
    fn spherical_sk_matches_closed_form() {
        let f = MixtureFunction::pure(2, 1.0);
        let opts = OptimizeOptions {
            restarts: 4,
            ..Default::default()
        };
        let r = optimize_path(&f, Ensemble::Spherical, 2, &opts).unwrap();
        let beta: f64 = 1.0;
        let closed = 2f64.sqrt() * beta - 0.5 * (2f64.sqrt() * beta).ln() - 0.75;
        assert_abs_diff_eq!(r.value.value, closed, epsilon = 1e-6);
    }

    #[test]
    fn zero_mixture() {
        let f = MixtureFunction::zero(2);
        for e in [Ensemble::Ising, Ensemble::Spherical] {
            let r = optimize_path(
                &f,
                e,
                2,
                &OptimizeOptions {
                    restarts: 2,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_abs_diff_eq!(r.value.value, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ladder_is_monotone() {
        let f = MixtureFunction::single_species(&[0.0, 0.0, 1.2, 0.6]);
        let opts = OptimizeOptions {
            restarts: 3,
            ..Default::default()
        };
        let r = optimize_path(&f, Ensemble::Spherical, 4, &opts).unwrap();
        for w in r.ladder.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-9, "{:?}", r.ladder);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let f = MixtureFunction::pure(2, 1.0);
        assert!(optimize_path(&f, Ensemble::Ising, 4, &OptimizeOptions::default()).is_err());
        assert!(optimize_path(&f, Ensemble::Spherical, 0, &OptimizeOptions::default()).is_err());
    }

    #[test]
    fn deterministic_across_pools() {
        let f = MixtureFunction::single_species(&[0.0, 0.0, 1.0, 0.5]);
        let opts = OptimizeOptions {
            restarts: 5,
            seed: 11,
            ..Default::default()
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| optimize_path(&f, Ensemble::Spherical, 2, &opts).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.value.value.to_bits(), b.value.value.to_bits());
        assert_eq!(a.path, b.path);
    }
}
