//! Versioned binary format for head parameters.
//!
//! Layout (little endian): magic `SPHD`, format version `u32`, dim `u32`,
//! hidden `u32`, parameter count `u64`, the parameters as `f64` in
//! [`ScoringHead::tensors`] order, then the SHA-256 digest of every preceding
//! byte.

use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{MatcherError, ScoringHead};

pub const HEAD_MAGIC: [u8; 4] = *b"SPHD";
pub const HEAD_FORMAT_VERSION: u32 = 1;

pub fn head_to_bytes(head: &ScoringHead) -> Vec<u8> {
    let mut buf = Vec::with_capacity(24 + 8 * head.param_count() + 32);
    buf.extend_from_slice(&HEAD_MAGIC);
    buf.extend_from_slice(&HEAD_FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(head.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(head.hidden() as u32).to_le_bytes());
    buf.extend_from_slice(&(head.param_count() as u64).to_le_bytes());
    for t in head.tensors() {
        for p in t {
            buf.extend_from_slice(&p.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

pub fn head_from_bytes(bytes: &[u8]) -> Result<ScoringHead, MatcherError> {
    let bad = |reason: &str| MatcherError::HeadFormat(reason.to_string());
    if bytes.len() < 24 + 32 {
        return Err(bad("file too short"));
    }
    if bytes[..4] != HEAD_MAGIC {
        return Err(bad("bad magic"));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let version = u32_at(4);
    if version != HEAD_FORMAT_VERSION {
        return Err(MatcherError::HeadFormat(format!("unsupported version {version}")));
    }
    let (dim, hidden) = (u32_at(8) as usize, u32_at(12) as usize);
    let count = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes")) as usize;
    let mut head = ScoringHead::zeros(dim, hidden);
    if count != head.param_count() {
        return Err(MatcherError::HeadFormat(format!(
            "{count} parameters recorded, shape {dim}x{hidden} needs {}",
            head.param_count()
        )));
    }
    let body_end = 24 + 8 * count;
    if bytes.len() != body_end + 32 {
        return Err(bad("length does not match the header"));
    }
    if Sha256::digest(&bytes[..body_end]).as_slice() != &bytes[body_end..] {
        return Err(bad("checksum mismatch"));
    }
    let params: Vec<f64> = bytes[24..body_end]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    head.set_params(&params);
    Ok(head)
}

pub fn write_head(head: &ScoringHead, mut w: impl Write) -> std::io::Result<()> {
    w.write_all(&head_to_bytes(head))
}

pub fn read_head(mut r: impl Read) -> Result<ScoringHead, MatcherError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    head_from_bytes(&buf)
}

pub fn save_head(head: &ScoringHead, path: impl AsRef<Path>) -> Result<(), MatcherError> {
    std::fs::write(path, head_to_bytes(head))?;
    Ok(())
}

pub fn load_head(path: impl AsRef<Path>) -> Result<ScoringHead, MatcherError> {
    head_from_bytes(&std::fs::read(path)?)
}
