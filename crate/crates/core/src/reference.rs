//! Closed-form and low-dimensional reference values.

use crate::error::{Error, Result};
use crate::mixture::{reduce_beta, MixtureFunction, ModelSpec};
use crate::optim;
use crate::parisi::{
    gse_from_free_energy, optimize_path, Ensemble, Extrapolation, OptimizeOptions, ParisiPath,
    DEFAULT_ALPHAS,
};

/// Free energy of the balanced bipartite spherical SK model:
/// `½β²` for `β ≤ 1/√2`, else `√2β − ½ log(√2β) − ¾`.
pub fn bipartite_sk_free_energy(beta: f64) -> Result<f64> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta must be a finite nonnegative number, got {beta}"
        )));
    }
    let r = std::f64::consts::SQRT_2 * beta;
    Ok(if r <= 1.0 {
        0.5 * beta * beta
    } else {
        r - 0.5 * r.ln() - 0.75
    })
}

pub const M_FLOOR: f64 = 1e-6;
pub const A_CEIL: f64 = 1.0 - 1e-9;

/// `½[β²(1 − (1 − m)a^{p+q}) + (1/m) log(1 + ma/(1 − a)) + log(1 − a)]`.
pub fn pure_bound_bracket(beta: f64, p: usize, q: usize, m: f64, a: f64) -> f64 {
    let n = (p + q) as i32;
    0.5 * (beta * beta * (1.0 - (1.0 - m) * a.powi(n))
        + (m * a / (1.0 - a)).ln_1p() / m
        + (-a).ln_1p())
}

/// Infimum of [`pure_bound_bracket`] over `m ∈ [1e−6, 1]`, `a ∈ [0, 1 − 1e−9]`:
/// a 200 × 200 grid (log-spaced in m) followed by Nelder–Mead from the
/// best grid cells.
pub fn pure_bound_2param(beta: f64, p: usize, q: usize) -> Result<f64> {
    Ok(pure_bound_argmin(beta, p, q)?.2)
}

/// `(m*, a*, value)` for [`pure_bound_2param`].
pub fn pure_bound_argmin(beta: f64, p: usize, q: usize) -> Result<(f64, f64, f64)> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument("p and q must be at least 1".into()));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta must be a finite nonnegative number, got {beta}"
        )));
    }
    let n = 200;
    let log_floor = M_FLOOR.ln();
    let ms: Vec<f64> = (0..n)
        .map(|i| (log_floor * (1.0 - i as f64 / (n - 1) as f64)).exp())
        .collect();
    let as_: Vec<f64> = (0..n).map(|i| A_CEIL * i as f64 / (n - 1) as f64).collect();
    let mut cells: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, &m) in ms.iter().enumerate() {
        for (j, &a) in as_.iter().enumerate() {
            cells.push((pure_bound_bracket(beta, p, q, m, a), i, j));
        }
    }
    cells.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let clamp = |x: &[f64]| {
        let m = x[0].clamp(log_floor, 0.0).exp();
        let a = x[1].clamp(0.0, A_CEIL);
        (m, a)
    };
    let cost = |x: &[f64]| {
        let (m, a) = clamp(x);
        pure_bound_bracket(beta, p, q, m, a)
    };
    let mut best = (ms[cells[0].1], as_[cells[0].2], cells[0].0);
    for &(_, i, j) in cells.iter().take(4) {
        let res = optim::nelder_mead(&cost, &[ms[i].ln(), as_[j]], 0.05, 4000, 1e-15);
        let (m, a) = clamp(&res.x);
        let v = pure_bound_bracket(beta, p, q, m, a);
        if v < best.2 {
            best = (m, a, v);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct E0Options {
    pub alphas: Vec<f64>,
    /// Number of levels of the spherical path.
    pub k: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for E0Options {
    fn default() -> Self {
        E0Options {
            alphas: DEFAULT_ALPHAS.to_vec(),
            k: 2,
            restarts: 4,
            seed: 0,
        }
    }
}

/// Zero-temperature extrapolation of `(1/α) inf P_spherical(α² ξ)` for the
/// pure `p`-spin single-species model. Each α warm-starts from the optimal
/// path at the previous α.
pub fn e0_extrapolation(p: usize, opts: &E0Options) -> Result<Extrapolation> {
    if p < 2 {
        return Err(Error::InvalidArgument("E0 needs p >= 2".into()));
    }
    let mut order: Vec<f64> = opts.alphas.clone();
    order.sort_by(f64::total_cmp);
    let mut warm: Option<ParisiPath> = None;
    let mut values = std::collections::HashMap::new();
    for &alpha in &order {
        let f = MixtureFunction::pure(p, alpha * alpha);
        let run = optimize_path(
            &f,
            Ensemble::Spherical,
            opts.k,
            &OptimizeOptions {
                restarts: opts.restarts,
                seed: opts.seed,
                warm_start: warm.clone(),
                ..Default::default()
            },
        )?;
        values.insert(alpha.to_bits(), run.value.value / alpha);
        warm = Some(run.path);
    }
    gse_from_free_energy(|a| Ok(values[&a.to_bits()]), &opts.alphas)
}

/// Ground-state energy `E₀(p)` of the pure spherical `p`-spin model at
/// β = 1. `E₀(2) = √2`; otherwise the zero-temperature extrapolation.
pub fn e0_pure(p: usize) -> Result<f64> {
    if p == 2 {
        return Ok(std::f64::consts::SQRT_2);
    }
    Ok(e0_extrapolation(p, &E0Options::default())?.limit)
}

/// Jensen bound `ξ(1)/2`.
pub fn annealed_bound(f: &MixtureFunction) -> f64 {
    0.5 * f.value(&vec![1.0; f.species_count()])
}

/// `Σ_{s,t} 2Δ²_{s,t} λ_s λ_t` for a two-spin-only model; 1 on the
/// critical surface.
pub fn sk_critical_check(spec: &ModelSpec) -> Result<f64> {
    if spec.interactions().keys().any(|m| m.degree() != 2) {
        return Err(Error::InvalidModel(
            "critical check needs a two-spin-only model".into(),
        ));
    }
    Ok(2.0 * reduce_beta(spec).get(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::{build_mixture, models};
    use approx::assert_abs_diff_eq;

    #[test]
    fn bipartite_branches() {
        let b = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(bipartite_sk_free_energy(b).unwrap(), 0.25, epsilon = 1e-15);
        assert_eq!(bipartite_sk_free_energy(0.0).unwrap(), 0.0);
        let v = bipartite_sk_free_energy(2f64.sqrt()).unwrap();
        assert_abs_diff_eq!(v, 2.0 - 0.5 * 2f64.ln() - 0.75, epsilon = 1e-15);
        assert!(bipartite_sk_free_energy(-0.1).is_err());
        let right = std::f64::consts::SQRT_2 * b - 0.5 * (std::f64::consts::SQRT_2 * b).ln() - 0.75;
        assert!((0.5 * b * b - right).abs() <= 1e-12);
    }

    #[test]
    fn two_param_bound_reduces_to_bipartite() {
        for beta in [0.2, std::f64::consts::FRAC_1_SQRT_2, 1.0, 2.0, 5.0] {
            let v = pure_bound_2param(beta, 1, 1).unwrap();
            assert_abs_diff_eq!(v, bipartite_sk_free_energy(beta).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn two_param_bound_edges() {
        assert_abs_diff_eq!(pure_bound_2param(0.0, 2, 3).unwrap(), 0.0, epsilon = 1e-12);
        for (beta, p, q) in [(0.5, 1, 2), (1.0, 2, 2), (3.0, 1, 3), (1.7, 2, 1)] {
            assert!(pure_bound_2param(beta, p, q).unwrap() <= 0.5 * beta * beta + 1e-9);
        }
        assert!(pure_bound_2param(1.0, 0, 1).is_err());
    }

    #[test]
    fn annealed_and_critical() {
        let f = build_mixture(&models::bipartite_sk(1.0), None).unwrap();
        assert_abs_diff_eq!(annealed_bound(&f), 0.5, epsilon = 1e-15);
        assert_eq!(annealed_bound(&MixtureFunction::zero(3)), 0.0);
        let f = build_mixture(&models::pure_bipartite(2, 2, 1.3), None).unwrap();
        assert_abs_diff_eq!(annealed_bound(&f), 0.845, epsilon = 1e-12);

        let c = sk_critical_check(&models::bipartite_sk(std::f64::consts::FRAC_1_SQRT_2)).unwrap();
        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            sk_critical_check(&models::sk(1.0)).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        assert!(sk_critical_check(&models::pure(3, 1.0)).is_err());
    }

    #[test]
    fn e0_two_spin() {
        assert_eq!(e0_pure(2).unwrap(), std::f64::consts::SQRT_2);
        let e = e0_extrapolation(2, &E0Options::default()).unwrap();
        assert_abs_diff_eq!(e.limit, std::f64::consts::SQRT_2, epsilon = 1e-6);
        assert!(e.monotone);
    }
}
