//! Binary parameter checkpoints.
//!
//! Layout (little-endian throughout, documented in docs/checkpoint-format.md):
//!   magic "QADRACP1" (8 bytes)
//!   u32  format version (currently 1)
//!   u64  parameter version
//!   u32  count + u32 sizes   for encoder dense dims
//!   u32  count + u32 sizes   for encoder gru dims
//!   u32  count + u32 sizes   for q-network hidden dims
//!   u64  feature saturation bits, u64 feature time cap (0 = uncapped)
//!   u8   has feature stats; if 1: 6 f64 means then 6 f64 stds
//!   f64  parameter data, canonical tensor order, flat
//!
//! The container is lossless: f64 values round-trip bit-exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::sortmdp::{FeatureLimits, FeatureStats, FEATURE_DIM};

use super::params::{ParamSet, PolicyArch, PolicyParams};

const MAGIC: &[u8; 8] = b"QADRACP1";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic; not a checkpoint file")]
    BadMagic,
    #[error("unsupported checkpoint format version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub arch: PolicyArch,
    pub params: ParamSet,
    pub limits: FeatureLimits,
    pub stats: Option<FeatureStats>,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&self.params.version.to_le_bytes())?;
        write_dims(&mut w, &self.arch.encoder_dense)?;
        write_dims(&mut w, &self.arch.encoder_gru)?;
        write_dims(&mut w, &self.arch.q_hidden)?;
        w.write_all(&self.limits.saturation_bits.to_le_bytes())?;
        w.write_all(&self.limits.time_cap_ttis.to_le_bytes())?;
        match &self.stats {
            Some(stats) => {
                w.write_all(&[1u8])?;
                for v in stats.mean.iter().chain(stats.std.iter()) {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            None => w.write_all(&[0u8])?,
        }
        for tensor in self.params.weights.tensors() {
            for v in tensor {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let format = read_u32(&mut r)?;
        if format != FORMAT_VERSION {
            return Err(CheckpointError::UnsupportedVersion(format));
        }
        let version = read_u64(&mut r)?;
        let arch = PolicyArch {
            encoder_dense: read_dims(&mut r)?,
            encoder_gru: read_dims(&mut r)?,
            q_hidden: read_dims(&mut r)?,
        };
        arch.validate().map_err(CheckpointError::Corrupt)?;
        let limits = FeatureLimits {
            saturation_bits: read_u64(&mut r)?,
            time_cap_ttis: read_u64(&mut r)?,
        };
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let stats = if flag[0] == 1 {
            let mut mean = [0.0; FEATURE_DIM];
            let mut std = [0.0; FEATURE_DIM];
            for m in mean.iter_mut() {
                *m = read_f64(&mut r)?;
            }
            for s in std.iter_mut() {
                *s = read_f64(&mut r)?;
            }
            Some(FeatureStats { mean, std })
        } else {
            None
        };
        let mut weights: PolicyParams = arch.zeros();
        for tensor in weights.tensors_mut() {
            for v in tensor.iter_mut() {
                *v = read_f64(&mut r)?;
            }
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(CheckpointError::Corrupt("trailing bytes".into()));
        }
        Ok(Checkpoint {
            arch,
            params: ParamSet { weights, version },
            limits,
            stats,
        })
    }
}

fn write_dims<W: Write>(w: &mut W, dims: &[usize]) -> Result<(), CheckpointError> {
    w.write_all(&(dims.len() as u32).to_le_bytes())?;
    for &d in dims {
        w.write_all(&(d as u32).to_le_bytes())?;
    }
    Ok(())
}

fn read_dims<R: Read>(r: &mut R) -> Result<Vec<usize>, CheckpointError> {
    let n = read_u32(r)?;
    if n > 64 {
        return Err(CheckpointError::Corrupt(format!("{n} layers")));
    }
    (0..n).map(|_| Ok(read_u32(r)? as usize)).collect()
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, CheckpointError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, CheckpointError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, CheckpointError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
