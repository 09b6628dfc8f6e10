//! Checkpoint serialization.
//!
//! A checkpoint is one file: a single-line JSON header naming the model
//! kind, shape, seed, and tensor layout, followed by each tensor as raw
//! little-endian `f64` in declared field order. Saving identical
//! parameters always yields identical bytes.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{zero_params, ModelKind, ModelParams};
use crate::Result;

pub const CHECKPOINT_FORMAT: &str = "cprec-checkpoint-v1";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    model: String,
    k: usize,
    n_users: usize,
    n_items: usize,
    seed: u64,
    tensors: Vec<TensorMeta>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
struct TensorMeta {
    name: String,
    len: usize,
}

fn bad(path: &Path, reason: impl Into<String>) -> Error {
    Error::BadCheckpoint {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Writes `params` to `path`. `seed` records the training seed for the
/// run manifest; it does not affect the tensors.
pub fn save_checkpoint(path: &Path, params: &ModelParams, seed: u64) -> Result<()> {
    let tensors = params.tensors();
    let header = Header {
        format: CHECKPOINT_FORMAT.to_string(),
        model: params.kind().name().to_string(),
        k: params.k(),
        n_users: params.n_users().unwrap_or(0),
        n_items: params.n_items(),
        seed,
        tensors: tensors
            .iter()
            .map(|(name, t)| TensorMeta {
                name: name.to_string(),
                len: t.len(),
            })
            .collect(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for (_, t) in &tensors {
        for &v in *t {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a checkpoint back into parameters plus the recorded seed.
pub fn load_checkpoint(path: &Path) -> Result<(ModelParams, u64)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad(path, "missing header line"))?;
    let header: Header = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| bad(path, format!("unreadable header: {e}")))?;
    if header.format != CHECKPOINT_FORMAT {
        return Err(bad(path, format!("unknown format {:?}", header.format)));
    }
    let kind: ModelKind = header
        .model
        .parse()
        .map_err(|e: String| bad(path, e))?;
    let mut params = zero_params(kind, header.n_users, header.n_items, header.k);

    let expected: Vec<TensorMeta> = params
        .tensors()
        .iter()
        .map(|(name, t)| TensorMeta {
            name: name.to_string(),
            len: t.len(),
        })
        .collect();
    if expected != header.tensors {
        return Err(bad(
            path,
            format!(
                "tensor layout mismatch: header {:?}, expected {:?}",
                header.tensors, expected
            ),
        ));
    }

    let body = &bytes[newline + 1..];
    let total: usize = expected.iter().map(|t| t.len).sum();
    if body.len() != total * 8 {
        return Err(bad(
            path,
            format!("body holds {} bytes, expected {}", body.len(), total * 8),
        ));
    }
    let mut offset = 0;
    for (_, t) in params.tensors_mut() {
        for v in t.iter_mut() {
            let chunk: [u8; 8] = body[offset..offset + 8].try_into().expect("length checked");
            *v = f64::from_le_bytes(chunk);
            offset += 8;
        }
    }
    Ok((params, header.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::init_params;

    #[test]
    fn checkpoints_round_trip_every_model() {
        let dir = tempfile::tempdir().unwrap();
        for kind in ModelKind::ALL {
            let params = init_params(kind, 6, 9, 5, 31);
            let path = dir.path().join(format!("{kind}.ckpt"));
            save_checkpoint(&path, &params, 31).unwrap();
            let (back, seed) = load_checkpoint(&path).unwrap();
            assert_eq!(back, params, "{kind}");
            assert_eq!(seed, 31);
        }
    }

    #[test]
    fn checkpoint_bytes_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let params = init_params(ModelKind::CpRec, 4, 7, 3, 2);
        let a = dir.path().join("a.ckpt");
        let b = dir.path().join("b.ckpt");
        save_checkpoint(&a, &params, 2).unwrap();
        save_checkpoint(&b, &params, 2).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    #[test]
    fn truncated_checkpoint_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.ckpt");
        let params = init_params(ModelKind::BprMf, 3, 3, 2, 0);
        save_checkpoint(&path, &params, 0).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 5);
        std::fs::write(&path, bytes).unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(matches!(err, Error::BadCheckpoint { .. }), "{err:?}");
    }

    #[test]
    fn foreign_format_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.ckpt");
        std::fs::write(&path, b"{\"format\":\"something-else\"}\n").unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(matches!(err, Error::BadCheckpoint { .. }), "{err:?}");
    }
}
