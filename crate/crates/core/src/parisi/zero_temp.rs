use serde::Serialize;

use crate::error::{Error, Result};

/// `2, 4, …, 128`.
pub const DEFAULT_ALPHAS: [f64; 7] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0];

#[derive(Debug, Clone, Serialize)]
pub struct Extrapolation {
    /// `c₀`, the fitted `α → ∞` limit.
    pub limit: f64,
    /// `[c₀, c₁, c₂]` in `c₀ + c₁ log(α)/α + c₂/α`.
    pub coefficients: [f64; 3],
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub residual_rms: f64,
    /// `F(α)/α` is nondecreasing in α; false if the evaluated values are not.
    pub monotone: bool,
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let r = a[row][col] / a[col][col];
            for c in col..3 {
                a[row][c] -= r * a[col][c];
            }
            b[row] -= r * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Least-squares fit of `c₀ + c₁ log(α)/α + c₂/α` to `evaluator(α)` and
/// return of `c₀`. The evaluator must return `(1/α) F(α)` for the model
/// scaled by `α`.
pub fn gse_from_free_energy<F>(mut evaluator: F, alphas: &[f64]) -> Result<Extrapolation>
where
    F: FnMut(f64) -> Result<f64>,
{
    if alphas.len() < 3 || alphas.iter().any(|a| !(*a > 1.0)) {
        return Err(Error::InvalidArgument(
            "need at least three alphas, all > 1".into(),
        ));
    }
    let values = alphas
        .iter()
        .map(|&a| evaluator(a))
        .collect::<Result<Vec<f64>>>()?;
    let basis = |a: f64| [1.0, a.ln() / a, 1.0 / a];
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (&a, &v) in alphas.iter().zip(&values) {
        let r = basis(a);
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
            atb[i] += r[i] * v;
        }
    }
    let c = solve3(ata, atb)
        .ok_or_else(|| Error::InvalidArgument("alpha grid gives a singular fit".into()))?;
    let residual_rms = (alphas
        .iter()
        .zip(&values)
        .map(|(&a, &v)| {
            let r = basis(a);
            (v - c[0] - c[1] * r[1] - c[2] * r[2]).powi(2)
        })
        .sum::<f64>()
        / alphas.len() as f64)
        .sqrt();
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|&i, &j| alphas[i].total_cmp(&alphas[j]));
    let monotone = order
        .windows(2)
        .all(|w| values[w[1]] >= values[w[0]] - 1e-7 * values[w[0]].abs().max(1.0));
    Ok(Extrapolation {
        limit: c[0],
        coefficients: c,
        alphas: alphas.to_vec(),
        values,
        residual_rms,
        monotone,
    })
}

/// Geometric grid of `n` points from `lo` to `hi`.
pub fn geometric_alphas(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (r * i as f64).exp()).collect()
}
