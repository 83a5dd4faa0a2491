//! Named parameter blocks with gradient mirrors, initialisation, and the
//! `WVFP1` checkpoint format.
//!
//! Checkpoint layout (little-endian):
//!
//! ```text
//! magic       5 bytes  "WVFP1"
//! blocks      u32
//! per block:
//!   name_len  u32, name bytes
//!   kind      u8 (bit 0: complex, bit 1: frozen)
//!   ndims     u32, then ndims x u64
//!   values    prod(dims) x width x f64   (complex interleaved re, im)
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;

use crate::error::{NnError, Result};
use crate::tensor::{Kind, Tensor};

pub const CHECKPOINT_MAGIC: &[u8; 5] = b"WVFP1";

#[derive(Debug, Clone, PartialEq)]
pub struct ParamBlock {
    pub name: String,
    pub value: Tensor,
    pub grad: Tensor,
    /// Frozen blocks are stored in checkpoints but never trained.
    pub trainable: bool,
}

/// Index of a block inside a [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockId(pub usize);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelParams {
    pub blocks: Vec<ParamBlock>,
}

impl ModelParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor) -> BlockId {
        let grad = Tensor::zeros(value.shape(), value.kind());
        self.blocks.push(ParamBlock {
            name: name.into(),
            value,
            grad,
            trainable: true,
        });
        BlockId(self.blocks.len() - 1)
    }

    /// Adds a block that is saved with the model but excluded from training,
    /// gradients and the flat parameter vector.
    pub fn add_frozen(&mut self, name: impl Into<String>, value: Tensor) -> BlockId {
        let id = self.add(name, value);
        self.blocks[id.0].trainable = false;
        id
    }

    fn trainable(&self) -> impl Iterator<Item = &ParamBlock> {
        self.blocks.iter().filter(|b| b.trainable)
    }

    /// Adds a block drawn uniformly from `[-bound, bound]` on every stored value.
    pub fn add_uniform(
        &mut self,
        name: impl Into<String>,
        shape: &[usize],
        kind: Kind,
        bound: f64,
        rng: &mut impl Rng,
    ) -> BlockId {
        let mut t = Tensor::zeros(shape, kind);
        if bound > 0.0 {
            for v in t.values_mut() {
                *v = rng.gen_range(-bound..bound);
            }
        }
        self.add(name, t)
    }

    pub fn block(&self, id: BlockId) -> &ParamBlock {
        &self.blocks[id.0]
    }

    pub fn block_mut(&mut self, id: BlockId) -> &mut ParamBlock {
        &mut self.blocks[id.0]
    }

    pub fn value(&self, id: BlockId) -> &[f64] {
        self.blocks[id.0].value.values()
    }

    /// Value and gradient storage of one block.
    pub fn split(&mut self, id: BlockId) -> (&[f64], &mut [f64]) {
        let b = &mut self.blocks[id.0];
        (b.value.values(), b.grad.values_mut())
    }

    /// Number of learnable real scalars (a complex entry counts twice).
    pub fn scalar_count(&self) -> usize {
        self.trainable().map(|b| b.value.values().len()).sum()
    }

    pub fn zero_grad(&mut self) {
        for b in &mut self.blocks {
            b.grad.values_mut().fill(0.0);
        }
    }

    pub fn flat_values(&self) -> Vec<f64> {
        self.trainable().flat_map(|b| b.value.values().iter().copied()).collect()
    }

    pub fn flat_grads(&self) -> Vec<f64> {
        self.trainable().flat_map(|b| b.grad.values().iter().copied()).collect()
    }

    pub fn set_flat_values(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.scalar_count() {
            return Err(NnError::Shape {
                context: "flat parameter vector",
                expected: vec![self.scalar_count()],
                got: vec![flat.len()],
            });
        }
        let mut offset = 0;
        for b in self.blocks.iter_mut().filter(|b| b.trainable) {
            let n = b.value.values().len();
            b.value.values_mut().copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        }
        Ok(())
    }

    /// First block whose gradient holds a non-finite value.
    pub fn check_grads(&self) -> Result<()> {
        match self.blocks.iter().find(|b| !b.grad.is_finite()) {
            Some(b) => Err(NnError::NonFiniteGradient { block: b.name.clone() }),
            None => Ok(()),
        }
    }

    /// Exact size in bytes of the checkpoint [`ModelParams::to_bytes`] writes.
    pub fn checkpoint_size(&self) -> u64 {
        let mut n = 5 + 4;
        for b in &self.blocks {
            n += 4 + b.name.len() as u64 + 1 + 4 + 8 * b.value.shape().len() as u64;
            n += 8 * b.value.values().len() as u64;
        }
        n
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.checkpoint_size() as usize);
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&(self.blocks.len() as u32).to_le_bytes());
        for b in &self.blocks {
            out.extend_from_slice(&(b.name.len() as u32).to_le_bytes());
            out.extend_from_slice(b.name.as_bytes());
            let kind = match b.value.kind() {
                Kind::Real => 0u8,
                Kind::Complex => 1,
            };
            out.push(kind | if b.trainable { 0 } else { 2 });
            out.extend_from_slice(&(b.value.shape().len() as u32).to_le_bytes());
            for &d in b.value.shape() {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for v in b.value.values() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Parses a checkpoint into fresh blocks (gradients zeroed).
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        let mut take = |n: usize, what: &str| -> Result<&[u8]> {
            if bytes.len() - pos < n {
                return Err(NnError::Checkpoint(format!("truncated while reading {what}")));
            }
            let s = &bytes[pos..pos + n];
            pos += n;
            Ok(s)
        };
        let magic = take(5, "magic")?;
        if magic != CHECKPOINT_MAGIC {
            return Err(NnError::Checkpoint(format!("bad magic {magic:?}")));
        }
        let count = u32::from_le_bytes(take(4, "block count")?.try_into().unwrap());
        let mut params = ModelParams::new();
        for _ in 0..count {
            let len = u32::from_le_bytes(take(4, "name length")?.try_into().unwrap()) as usize;
            let name = String::from_utf8(take(len, "name")?.to_vec())
                .map_err(|e| NnError::Checkpoint(format!("block name is not UTF-8: {e}")))?;
            let flags = take(1, "kind")?[0];
            if flags > 3 {
                return Err(NnError::Checkpoint(format!("unknown block kind {flags}")));
            }
            let kind = if flags & 1 == 1 { Kind::Complex } else { Kind::Real };
            let ndims = u32::from_le_bytes(take(4, "rank")?.try_into().unwrap()) as usize;
            let mut shape = Vec::with_capacity(ndims);
            for _ in 0..ndims {
                shape.push(u64::from_le_bytes(take(8, "dimension")?.try_into().unwrap()) as usize);
            }
            let n = shape.iter().product::<usize>() * kind.width();
            let raw = take(8 * n, "values")?;
            let values = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            let id = params.add(name, Tensor::from_values(&shape, kind, values)?);
            params.blocks[id.0].trainable = flags & 2 == 0;
        }
        if pos != bytes.len() {
            return Err(NnError::Checkpoint(format!("{} trailing bytes", bytes.len() - pos)));
        }
        Ok(params)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| NnError::Io {
            path: path.to_path_buf(),
            source: e,
        };
        let tmp = path.with_extension("wvfp.tmp");
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&self.to_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, path).map_err(io)
    }

    /// Loads checkpoint values into this (already constructed) model,
    /// checking names, kinds and shapes block by block.
    pub fn load_into(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| NnError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let loaded = Self::from_bytes(&bytes)?;
        self.assign(&loaded)
    }

    pub fn assign(&mut self, other: &ModelParams) -> Result<()> {
        if other.blocks.len() != self.blocks.len() {
            return Err(NnError::CheckpointMismatch {
                name: "<all>".into(),
                reason: format!("{} blocks, model has {}", other.blocks.len(), self.blocks.len()),
            });
        }
        for (mine, theirs) in self.blocks.iter_mut().zip(&other.blocks) {
            if mine.name != theirs.name
                || mine.trainable != theirs.trainable
                || mine.value.kind() != theirs.value.kind()
                || mine.value.shape() != theirs.value.shape()
            {
                return Err(NnError::CheckpointMismatch {
                    name: theirs.name.clone(),
                    reason: format!(
                        "expected {} {:?} {:?}",
                        mine.name,
                        mine.value.kind(),
                        mine.value.shape()
                    ),
                });
            }
            mine.value = theirs.value.clone();
        }
        Ok(())
    }
}

/// Uniform initialisation bound `sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn checkpoint_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = ModelParams::new();
        p.add_uniform("w", &[3, 2], Kind::Complex, 0.5, &mut rng);
        p.add_uniform("b", &[3], Kind::Real, 0.5, &mut rng);
        p.add_frozen("f", Tensor::from_values(&[2], Kind::Real, vec![1.0, 2.0]).unwrap());
        let bytes = p.to_bytes();
        assert_eq!(bytes.len() as u64, p.checkpoint_size());
        assert_eq!(ModelParams::from_bytes(&bytes).unwrap(), p);
        assert_eq!(p.scalar_count(), 12 + 3);
        assert!(ModelParams::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
