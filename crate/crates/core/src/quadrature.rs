//! Gauss–Hermite rules rescaled to the standard normal distribution.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::hermite::GaussHermite;

use crate::error::{Error, Result};

/// Nodes `z_i` and weights `w_i` with `E f(Z) ≈ Σ w_i f(z_i)`, `Z ~ N(0, 1)`.
#[derive(Debug, Clone)]
pub struct NormalRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl NormalRule {
    pub fn new(n: usize) -> Result<Self> {
        let degree = NonZeroUsize::new(n)
            .ok_or_else(|| Error::InvalidArgument("quadrature needs at least one node".into()))?;
        if n == 1 {
            return Ok(NormalRule {
                nodes: vec![0.0],
                weights: vec![1.0],
            });
        }
        let rule = GaussHermite::new(degree.get())
            .map_err(|e| Error::InvalidArgument(format!("Gauss-Hermite rule of size {n}: {e}")))?;
        let scale = std::f64::consts::SQRT_2;
        let norm = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (x * scale, w / norm)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Symmetrise: the eigen-solver leaves ~1e-16 asymmetry between ±z.
        let len = pairs.len();
        for i in 0..len / 2 {
            let j = len - 1 - i;
            let z = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            pairs[i] = (-z, w);
            pairs[j] = (z, w);
        }
        if len % 2 == 1 {
            pairs[len / 2].0 = 0.0;
        }
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        Ok(NormalRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
        })
    }

    /// Shared rule of size `n`; rules are built once per process.
    pub fn cached(n: usize) -> Result<Arc<NormalRule>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<NormalRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&n) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(NormalRule::new(n)?);
        cache
            .lock()
            .expect("quadrature cache poisoned")
            .insert(n, Arc::clone(&rule));
        Ok(rule)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }
}
