use rayon::prelude::*;

use super::{check_dims, increments, theta_correction, FunctionalValue, ParisiPath};
use crate::error::{Error, Result};
use crate::mixture::MixtureFunction;
use crate::quadrature::NormalRule;

pub const DEFAULT_NODES: usize = 40;
/// Largest number of tensor-product quadrature points per species.
pub const DEFAULT_POINT_BUDGET: u128 = 1 << 22;

#[derive(Debug, Clone)]
pub struct IsingOptions {
    /// Gauss–Hermite nodes per level.
    pub nodes: usize,
    pub budget: u128,
    /// Evaluate species in parallel.
    pub parallel: bool,
}

impl Default for IsingOptions {
    fn default() -> Self {
        IsingOptions {
            nodes: DEFAULT_NODES,
            budget: DEFAULT_POINT_BUDGET,
            parallel: false,
        }
    }
}

fn logcosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

struct Levels<'a> {
    rule: &'a NormalRule,
    m: &'a [f64],
    sd: Vec<f64>,
    k: usize,
}

impl Levels<'_> {
    /// `X_j(h)` where `h` is the field accumulated through level `j − 1`.
    fn x(&self, j: usize, h: f64) -> f64 {
        if j == self.k {
            // m_k = 1 and logcosh is the last layer: E cosh(h + σZ) = cosh(h) e^{σ²/2}.
            return logcosh(h) + 0.5 * self.sd[j] * self.sd[j];
        }
        let sd = self.sd[j];
        if sd == 0.0 {
            return self.x(j + 1, h);
        }
        let (z, w) = (self.rule.nodes(), self.rule.weights());
        if j == 0 {
            return z
                .iter()
                .zip(w)
                .map(|(z, w)| w * self.x(1, h + sd * z))
                .sum();
        }
        let m = self.m[j];
        let xs: Vec<f64> = z.iter().map(|z| self.x(j + 1, h + sd * z)).collect();
        let top = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bottom = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        if m * (top - bottom) < 1e-6 {
            // Cumulant expansion; the log form loses everything as m → 0.
            let mean: f64 = xs.iter().zip(w).map(|(x, w)| w * x).sum();
            let var: f64 = xs.iter().zip(w).map(|(x, w)| w * (x - mean).powi(2)).sum();
            return mean + 0.5 * m * var;
        }
        if m * (top - bottom) < 1.0 {
            let s: f64 = xs
                .iter()
                .zip(w)
                .map(|(x, w)| w * (m * (x - top)).exp_m1())
                .sum();
            return top + s.ln_1p() / m;
        }
        let sum: f64 = xs
            .iter()
            .zip(w)
            .map(|(x, w)| w * (m * (x - top)).exp())
            .sum();
        top + sum.ln() / m
    }
}

/// Ising Parisi functional
/// `Σ_s λ_s X_{0,s} − ½ Σ_j m_j (θ(q_{j+1}) − θ(q_j))`,
/// with the nested expectations done by tensor-product Gauss–Hermite
/// quadrature. Levels with zero increment are skipped and the last level
/// is integrated in closed form.
pub fn ising_functional(
    f: &MixtureFunction,
    path: &ParisiPath,
    opts: &IsingOptions,
) -> Result<FunctionalValue> {
    check_dims(f, path)?;
    let rule = NormalRule::cached(opts.nodes)?;
    let k = path.k();
    let incs: Vec<Vec<f64>> = (0..f.species_count())
        .map(|s| increments(f, path, s))
        .collect::<Result<_>>()?;
    for inc in &incs {
        let active = inc[..k].iter().filter(|v| **v > 0.0).count() as u32;
        let required = (opts.nodes as u128).saturating_pow(active);
        if required > opts.budget {
            return Err(Error::BudgetExceeded {
                required,
                budget: opts.budget,
            });
        }
    }
    let species = |inc: &Vec<f64>| {
        let levels = Levels {
            rule: &rule,
            m: path.m(),
            sd: inc.iter().map(|v| v.sqrt()).collect(),
            k,
        };
        levels.x(0, 0.0)
    };
    let per_species: Vec<f64> = if opts.parallel {
        incs.par_iter().map(species).collect()
    } else {
        incs.iter().map(species).collect()
    };
    let theta_sum = theta_correction(f, path);
    let value = f
        .lambda()
        .iter()
        .zip(&per_species)
        .map(|(l, x)| l * x)
        .sum::<f64>()
        + theta_sum;
    Ok(FunctionalValue {
        value,
        per_species,
        theta_sum,
        nodes: Some(opts.nodes),
        inner: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sk(beta: f64) -> MixtureFunction {
        MixtureFunction::pure(2, beta * beta)
    }

    #[test]
    fn high_temperature_is_half_beta_sq() {
        for beta in [0.2, 0.5, 0.9] {
            let path = ParisiPath::single(vec![0.0, 1.0], vec![0.0, 0.0, 1.0]).unwrap();
            let v = ising_functional(&sk(beta), &path, &IsingOptions::default()).unwrap();
            assert_abs_diff_eq!(v.value, 0.5 * beta * beta, epsilon = 1e-14);
        }
    }

    // Replica-symmetric SK: E log cosh(β√(2q) Z) + ½β²(1 − q)² + log 2 − log 2,
    // checked with an independent trapezoid rule on a wide grid.
    #[test]
    fn replica_symmetric_sk_matches_trapezoid() {
        let beta: f64 = 1.3;
        for q in [0.1f64, 0.4, 0.8] {
            let sd = beta * (2.0 * q).sqrt();
            let n = 200_000;
            let (lo, hi) = (-12.0, 12.0);
            let h = (hi - lo) / n as f64;
            let mut acc = 0.0;
            for i in 0..=n {
                let z = lo + i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc += w * (-0.5 * z * z).exp() * logcosh(sd * z);
            }
            let oracle = acc * h / (2.0 * std::f64::consts::PI).sqrt()
                + 0.5 * beta * beta * (1.0 - q).powi(2);
            let path = ParisiPath::single(vec![0.0, 1.0], vec![0.0, q, 1.0]).unwrap();
            let v = ising_functional(
                &sk(beta),
                &path,
                &IsingOptions {
                    nodes: 80,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_abs_diff_eq!(v.value, oracle, epsilon = 1e-7);
        }
    }

    // k = 2 against a brute-force two-dimensional trapezoid of the nested formula.
    #[test]
    fn two_level_matches_trapezoid() {
        let f = MixtureFunction::single_species(&[0.0, 0.8, 0.5]);
        let (m1, q1, q2) = (0.45, 0.3, 0.7);
        let path = ParisiPath::single(vec![0.0, m1, 1.0], vec![0.0, q1, q2, 1.0]).unwrap();
        let d = |q: f64| f.species_derivative(0, &[q]);
        let (s0, s1, s2) = (
            d(q1).sqrt(),
            (d(q2) - d(q1)).sqrt(),
            (d(1.0) - d(q2)).sqrt(),
        );
        let n = 1200;
        let (lo, hi) = (-9.0, 9.0);
        let h = (hi - lo) / n as f64;
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let z = lo + i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                (
                    z,
                    w * h * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt(),
                )
            })
            .collect();
        let mut outer = 0.0;
        for &(z0, w0) in &pts {
            let mut inner = 0.0;
            for &(z1, w1) in &pts {
                let h2 = s0 * z0 + s1 * z1;
                let x2 = logcosh(h2) + 0.5 * s2 * s2;
                inner += w1 * (m1 * x2).exp();
            }
            outer += w0 * inner.ln() / m1;
        }
        let theta = |q: f64| f.theta_unchecked(&[q]);
        let oracle = outer - 0.5 * (m1 * (theta(q2) - theta(q1)) + (theta(1.0) - theta(q2)));
        let v = ising_functional(&f, &path, &IsingOptions::default()).unwrap();
        assert_abs_diff_eq!(v.value, oracle, epsilon = 1e-7);
    }

    #[test]
    fn refinement_preserves_value() {
        let f = MixtureFunction::single_species(&[0.0, 1.1, 0.4]);
        let path = ParisiPath::single(vec![0.0, 0.3, 1.0], vec![0.0, 0.2, 0.6, 1.0]).unwrap();
        let a = ising_functional(&f, &path, &IsingOptions::default())
            .unwrap()
            .value;
        let b = ising_functional(&f, &path.refine(), &IsingOptions::default())
            .unwrap()
            .value;
        assert_abs_diff_eq!(a, b, epsilon = 1e-13);
    }

    #[test]
    fn field_only_model() {
        // ξ(x) = h² x: F = E log cosh(h Z) exactly.
        let h2 = 0.7;
        let f = MixtureFunction::single_species(&[0.0, h2]);
        let path = ParisiPath::replica_symmetric(&[0.4]).unwrap();
        let v = ising_functional(
            &f,
            &path,
            &IsingOptions {
                nodes: 120,
                ..Default::default()
            },
        )
        .unwrap();
        let rule = NormalRule::new(200).unwrap();
        let oracle = rule.expect(|z| logcosh(h2.sqrt() * z));
        assert_abs_diff_eq!(v.value, oracle, epsilon = 1e-9);
    }

    #[test]
    fn budget_is_enforced() {
        let f = MixtureFunction::pure(2, 1.0);
        let path = ParisiPath::single(
            vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0],
        )
        .unwrap();
        let err = ising_functional(&f, &path, &IsingOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(ising_functional(
            &f,
            &path,
            &IsingOptions {
                nodes: 8,
                ..Default::default()
            }
        )
        .is_ok());
    }

    #[test]
    fn dimension_mismatch() {
        let f = MixtureFunction::pure(2, 1.0);
        let path = ParisiPath::replica_symmetric(&[0.1, 0.2]).unwrap();
        assert!(matches!(
            ising_functional(&f, &path, &IsingOptions::default()),
            Err(Error::Dimension(_))
        ));
    }
}
