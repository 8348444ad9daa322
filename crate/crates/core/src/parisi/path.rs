use serde::Serialize;

use crate::error::{Error, Result};

/// Discrete order parameter: masses `0 = m_0 < m_1 < … < m_k = 1` and, for
/// every species, overlaps `0 = q_0 ≤ q_1 ≤ … ≤ q_{k+1} = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParisiPath {
    m: Vec<f64>,
    /// `q[j][s]` for `j ∈ 0..=k+1`.
    q: Vec<Vec<f64>>,
}

impl ParisiPath {
    pub fn new(m: Vec<f64>, q: Vec<Vec<f64>>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidPath(msg));
        if m.len() < 2 {
            return bad("need k >= 1 (at least two masses)".into());
        }
        let k = m.len() - 1;
        if m[0] != 0.0 || m[k] != 1.0 {
            return bad(format!("masses must start at 0 and end at 1, got {:?}", m));
        }
        if m.windows(2).any(|w| !(w[1] > w[0])) {
            return bad(format!("masses must be strictly increasing, got {:?}", m));
        }
        if q.len() != k + 2 {
            return bad(format!(
                "expected {} overlap levels, got {}",
                k + 2,
                q.len()
            ));
        }
        let s = q[0].len();
        if s == 0 || q.iter().any(|row| row.len() != s) {
            return bad("every overlap level needs one entry per species".into());
        }
        for col in 0..s {
            if q[0][col] != 0.0 || q[k + 1][col] != 1.0 {
                return bad(format!(
                    "overlaps of species {col} must start at 0 and end at 1"
                ));
            }
            for j in 0..=k {
                let (a, b) = (q[j][col], q[j + 1][col]);
                if !(b >= a) || !a.is_finite() {
                    return bad(format!("overlaps of species {col} must be nondecreasing"));
                }
            }
        }
        Ok(ParisiPath { m, q })
    }

    /// Single-species path from masses and overlaps `q_0..=q_{k+1}`.
    pub fn single(m: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        ParisiPath::new(m, q.into_iter().map(|v| vec![v]).collect())
    }

    /// Replica-symmetric (k = 1) path with overlap `q1` for every species.
    pub fn replica_symmetric(q1: &[f64]) -> Result<Self> {
        let s = q1.len();
        ParisiPath::new(
            vec![0.0, 1.0],
            vec![vec![0.0; s], q1.to_vec(), vec![1.0; s]],
        )
    }

    pub fn k(&self) -> usize {
        self.m.len() - 1
    }

    pub fn species_count(&self) -> usize {
        self.q[0].len()
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    /// All levels `q_j`, each a vector over species.
    pub fn q(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn q_level(&self, j: usize) -> &[f64] {
        &self.q[j]
    }

    pub fn q_column(&self, s: usize) -> Vec<f64> {
        self.q.iter().map(|row| row[s]).collect()
    }

    /// Euclidean norm of the overlap array (restart tie-break key).
    pub fn q_norm(&self) -> f64 {
        self.q.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Copy a single-species path's overlaps to every one of
    /// `species_count` species.
    pub fn lift(&self, species_count: usize) -> Result<Self> {
        if self.species_count() != 1 {
            return Err(Error::InvalidPath(
                "only single-species paths can be lifted".into(),
            ));
        }
        let q = self
            .q
            .iter()
            .map(|row| vec![row[0]; species_count])
            .collect();
        ParisiPath::new(self.m.clone(), q)
    }

    /// The same functional value at `k + 1`: a new mass is inserted below
    /// `m_k = 1` and the top overlap level is duplicated, so the new level
    /// carries zero covariance increment.
    pub fn refine(&self) -> Self {
        let k = self.k();
        let mut m = self.m.clone();
        m.insert(k, 0.5 * (m[k - 1] + 1.0));
        let mut q = self.q.clone();
        q.insert(k + 1, self.q[k].clone());
        ParisiPath { m, q }
    }
}

/// `lift_path`: copy the single-species column to every species.
pub fn lift_path(path: &ParisiPath, species_count: usize) -> Result<ParisiPath> {
    path.lift(species_count)
}
