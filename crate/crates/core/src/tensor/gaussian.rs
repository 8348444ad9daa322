use std::io::{Read, Write};
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::seeding::{self, tag};

/// Largest `p · d^p` accepted.
pub const TENSOR_BUDGET: u128 = 1 << 26;

pub const GTEN_MAGIC: &[u8; 4] = b"GTEN";

/// Order-`p` tensor on `(R^d)^{⊗p}`, entries in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
    seed: Option<u64>,
}

fn check_size(order: usize, dim: usize) -> Result<usize> {
    if order == 0 || dim == 0 {
        return Err(Error::InvalidArgument(
            "tensor order and dimension must be at least 1".into(),
        ));
    }
    let len = (dim as u128).checked_pow(order as u32).unwrap_or(u128::MAX);
    if len.saturating_mul(order as u128) > TENSOR_BUDGET {
        return Err(Error::TooLarge(format!(
            "order {order}, dimension {dim} exceeds the tensor budget"
        )));
    }
    Ok(len as usize)
}

impl GaussianTensor {
    /// I.i.d. standard normal entries from the stream of `seed`.
    pub fn generate(order: usize, dim: usize, seed: u64) -> Result<Self> {
        let len = check_size(order, dim)?;
        let mut rng = seeding::stream(seed, &[tag::TENSOR]);
        let entries = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
        Ok(GaussianTensor {
            order,
            dim,
            entries,
            seed: Some(seed),
        })
    }

    pub fn from_entries(order: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        let len = check_size(order, dim)?;
        if entries.len() != len {
            return Err(Error::Dimension(format!(
                "expected {len} entries, got {}",
                entries.len()
            )));
        }
        Ok(GaussianTensor {
            order,
            dim,
            entries,
            seed: None,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Seed the entries were drawn from; `None` for imported or hand-built tensors.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `⟨T, u⁽¹⁾ ⊗ ⋯ ⊗ u⁽ᵖ⁾⟩`.
    pub fn multilinear(&self, us: &[Vec<f64>]) -> f64 {
        let mut v = super::injective::contract_all_but(self, us, self.order - 1);
        let last = &us[self.order - 1];
        v.iter_mut().zip(last).map(|(a, b)| *a * b).sum()
    }

    /// GTEN binary: `"GTEN"`, u32 order, u32 dimension, u32 reserved (0),
    /// then the entries as little-endian f64.
    pub fn write_gten(&self, mut w: impl Write) -> Result<()> {
        let mut header = [0u8; 16];
        header[..4].copy_from_slice(GTEN_MAGIC);
        header[4..8].copy_from_slice(&(self.order as u32).to_le_bytes());
        header[8..12].copy_from_slice(&(self.dim as u32).to_le_bytes());
        w.write_all(&header)?;
        let mut buf = Vec::with_capacity(self.entries.len() * 8);
        for v in &self.entries {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_gten(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)
            .map_err(|_| Error::Format("GTEN header is truncated".into()))?;
        if &header[..4] != GTEN_MAGIC {
            return Err(Error::Format("missing GTEN magic".into()));
        }
        let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
        let (order, dim, reserved) = (word(4) as usize, word(8) as usize, word(12));
        if reserved != 0 {
            return Err(Error::Format(format!(
                "reserved header word is {reserved}, expected 0"
            )));
        }
        let len = check_size(order, dim)?;
        let mut body = Vec::new();
        r.read_to_end(&mut body)?;
        if body.len() != len * 8 {
            return Err(Error::Format(format!(
                "expected {} bytes of entries, found {}",
                len * 8,
                body.len()
            )));
        }
        let entries = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(GaussianTensor {
            order,
            dim,
            entries,
            seed: None,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_gten(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        GaussianTensor::read_gten(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
