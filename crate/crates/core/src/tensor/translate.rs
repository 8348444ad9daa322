use serde::Serialize;

use super::gaussian::GaussianTensor;
use super::injective::{injective_norm_estimate, InjectiveOptions};
use crate::error::{Error, Result};
use crate::mixture::{FiniteSizes, Fraction, ModelSpec};
use crate::reference::e0_pure;
use crate::seeding::{self, tag};
use crate::simulate::{spherical_gse_average, GseOptions};
use crate::stats::Summary;

/// The `p`-species spherical model whose ground state has the law of
/// `‖T‖_inj/√d`: `p` blocks of size `d`, `Δ² = p^{p+1}/p!` on the
/// all-distinct multiset, so that `ξ(x) = p x_1 ⋯ x_p`.
pub fn translate_to_model(p: usize, d: usize) -> Result<(ModelSpec, FiniteSizes)> {
    if p == 0 || d == 0 {
        return Err(Error::InvalidArgument("p and d must be at least 1".into()));
    }
    let factorial: f64 = (1..=p).map(|i| i as f64).product();
    let delta_sq = (p as f64).powi(p as i32 + 1) / factorial;
    let spec = ModelSpec::with_numbered_species(
        vec![Fraction::exact(1, p as i64); p],
        vec![((0..p).collect(), delta_sq)],
    )?;
    Ok((spec, FiniteSizes::new(vec![d; p])?))
}

/// `lim ‖T‖_inj/√d = √p E₀(p)`, with `1` for `p = 1` and `2` for `p = 2`.
pub fn asymptote(p: usize) -> Result<f64> {
    match p {
        0 => Err(Error::InvalidArgument("p must be at least 1".into())),
        1 => Ok(1.0),
        _ => Ok((p as f64).sqrt() * e0_pure(p)?),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrespondenceReport {
    pub p: usize,
    pub d: usize,
    pub n_samples: usize,
    /// `‖T‖_inj/√d` over independent tensors.
    pub tensor: Summary,
    /// `max H/N` over independent disorders of the translated model.
    pub spin: Summary,
    /// Difference of means over the pooled standard error.
    pub z: f64,
    pub variance_ratio: f64,
    pub holds: bool,
}

/// Two-sample comparison of `‖T‖_inj/√d` against `max H/N` of the
/// translated model.
pub fn correspondence_check(
    p: usize,
    d: usize,
    n_samples: usize,
    restarts: usize,
    seed: u64,
) -> Result<CorrespondenceReport> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let scale = (d as f64).sqrt();
    let tensor_values: Vec<f64> = (0..n_samples)
        .map(|i| {
            let s = seeding::derive(seed, &[tag::TENSOR, i as u64]);
            let t = GaussianTensor::generate(p, d, s)?;
            let e = injective_norm_estimate(
                &t,
                &InjectiveOptions {
                    restarts: Some(restarts),
                    seed: s,
                    ..Default::default()
                },
            )?;
            Ok(e.value / scale)
        })
        .collect::<Result<_>>()?;
    let (spec, sizes) = translate_to_model(p, d)?;
    let spin = spherical_gse_average(
        &spec,
        &sizes,
        n_samples,
        seed,
        &GseOptions {
            restarts,
            ..Default::default()
        },
    )?;
    let tensor = Summary::of(&tensor_values);
    let pooled = (tensor.stderr.powi(2) + spin.summary.stderr.powi(2)).sqrt();
    let z = if pooled > 0.0 {
        (tensor.mean - spin.summary.mean) / pooled
    } else {
        0.0
    };
    Ok(CorrespondenceReport {
        p,
        d,
        n_samples,
        tensor,
        spin: spin.summary,
        z,
        variance_ratio: tensor.std.powi(2) / spin.summary.std.powi(2),
        holds: z.abs() <= 3.0,
    })
}
