use serde::Serialize;

use super::{check_dims, increments, theta_correction, FunctionalValue, ParisiPath};
use crate::error::{Error, Result};
use crate::mixture::MixtureFunction;
use crate::optim;

/// Inner minimiser of `X_s(b)` for one species.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SphericalInner {
    pub b: f64,
    pub d1: f64,
    /// `X_s'(b*)`.
    pub derivative: f64,
}

/// `X_s` written in `t = b − d_1 > 0` with gaps `g_j = d_1 − d_j`, which
/// keeps `b − d_j = t + g_j` accurate when `d_1` is large.
struct Inner<'a> {
    m: &'a [f64],
    /// `ξ_s'` increments per level.
    inc: Vec<f64>,
    /// `g_1 = 0, …, g_{k+1} = d_1`.
    g: Vec<f64>,
    xi1: f64,
}

impl Inner<'_> {
    fn d1(&self) -> f64 {
        *self.g.last().unwrap()
    }

    fn x(&self, t: f64) -> f64 {
        let b = t + self.d1();
        let mut v = b - 1.0 - b.ln() + self.xi1 / t;
        // `ln((t + g_j) / (t + g_{j-1})) / m_j` without dividing by m_j,
        // which tends to `inc_j / (t + g_{j-1})` as m_j → 0.
        for j in 1..self.m.len() {
            let lo = t + self.g[j - 1];
            let x = self.m[j] * self.inc[j] / lo;
            if self.inc[j] != 0.0 {
                let h = if x == 0.0 { 1.0 } else { x.ln_1p() / x };
                v += self.inc[j] * h / lo;
            }
        }
        v
    }

    fn dx(&self, t: f64) -> (f64, f64) {
        let b = t + self.d1();
        let mut d1 = 1.0 - 1.0 / b - self.xi1 / (t * t);
        let mut d2 = 1.0 / (b * b) + 2.0 * self.xi1 / (t * t * t);
        for j in 1..self.m.len() {
            let (lo, hi) = (t + self.g[j - 1], t + self.g[j]);
            let inc = self.inc[j];
            d1 -= inc / (hi * lo);
            d2 += inc * (hi + lo) / (lo * lo * hi * hi);
        }
        (d1, d2)
    }

    fn minimise(&self, species: usize) -> Result<(f64, f64)> {
        const T_MIN: f64 = 1e-12;
        let bracket_err = |reason: String| Error::Bracket { species, reason };
        let mut big = 1.0;
        while self.x(2.0 * big) < self.x(big) {
            big *= 2.0;
            if big > 1e12 {
                return Err(bracket_err("X(b) keeps decreasing beyond d1 + 1e12".into()));
            }
        }
        let hi = 2.0 * big;
        let n = 240;
        let ratio = (hi / T_MIN).ln() / n as f64;
        let grid: Vec<f64> = (0..=n).map(|i| T_MIN * (ratio * i as f64).exp()).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| self.x(t)).collect();
        if vals.iter().any(|v| v.is_nan()) {
            return Err(bracket_err("X(b) is not finite on the scan".into()));
        }
        let best = (0..=n)
            .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
            .unwrap();
        let lo = grid[best.saturating_sub(1)];
        let up = grid[(best + 1).min(n)];
        let f = |t: f64| self.x(t);
        let (mut t, mut v) = optim::brent(&f, lo, up, 1e-12);
        if vals[best] < v {
            t = grid[best];
            v = vals[best];
        }
        // Newton polish on X' for the first-order condition.
        for _ in 0..30 {
            let (g, h) = self.dx(t);
            if g == 0.0 || !(h > 0.0) {
                break;
            }
            let next = t - g / h;
            if !(next > 0.0) || next < 0.5 * lo || next > 2.0 * up {
                break;
            }
            let (g_next, _) = self.dx(next);
            let v_next = self.x(next);
            if g_next.abs() >= g.abs() || v_next > v + 1e-12 * v.abs().max(1.0) {
                break;
            }
            t = next;
            v = v_next;
        }
        if !v.is_finite() {
            return Err(bracket_err("minimum value is not finite".into()));
        }
        Ok((t, v))
    }
}

/// Spherical Parisi functional
/// `½ Σ_s λ_s inf_{b > d_{1,s}} X_s(b) − ½ Σ_j m_j (θ(q_{j+1}) − θ(q_j))`.
pub fn spherical_functional(f: &MixtureFunction, path: &ParisiPath) -> Result<FunctionalValue> {
    check_dims(f, path)?;
    let k = path.k();
    let m = path.m();
    let mut per_species = Vec::with_capacity(f.species_count());
    let mut inner = Vec::with_capacity(f.species_count());
    for s in 0..f.species_count() {
        let inc = increments(f, path, s)?;
        let mut g = vec![0.0; k + 1];
        for j in 1..=k {
            g[j] = g[j - 1] + m[j] * inc[j];
        }
        let problem = Inner {
            m,
            inc,
            g,
            xi1: f.species_derivative(s, path.q_level(1)),
        };
        let (t, v) = problem.minimise(s)?;
        let d1 = problem.d1();
        per_species.push(0.5 * v);
        inner.push(SphericalInner {
            b: t + d1,
            d1,
            derivative: problem.dx(t).0,
        });
    }
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
        nodes: None,
        inner: Some(inner),
    })
}
