//! Binary cache for sieved `S_r` tables.
//!
//! Layout, all integers little-endian:
//! `magic[8] | version u32 | r u64 | lo u64 | hi u64 | count u64 | values u64 * count | sha256[32]`
//! where the digest covers every preceding byte. A file that fails any check is reported as
//! invalid and the caller recomputes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use schemmel::arith::SrTable;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const CACHE_DIR_ENV: &str = "SCHEMMEL_CACHE_DIR";

const MAGIC: &[u8; 8] = b"SRTABLE\0";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 * 4;
const DIGEST_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("cache invalid: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> CacheError {
    CacheError::Invalid(msg.into())
}

/// Cache directory from the environment, if set.
pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

pub fn cache_path(dir: &Path, r: u64, lo: u64, hi: u64) -> PathBuf {
    dir.join(format!("sr-r{r}-{lo}-{hi}.bin"))
}

pub fn encode(table: &SrTable) -> Vec<u8> {
    let values = table.values();
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * values.len() + DIGEST_LEN);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    for x in [table.r(), table.lo(), table.hi(), values.len() as u64] {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

fn u64_at(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

/// Decodes a cache image and checks it against the requested `(r, lo, hi)`.
pub fn decode(bytes: &[u8], r: u64, lo: u64, hi: u64) -> Result<SrTable, CacheError> {
    if bytes.len() < HEADER_LEN + DIGEST_LEN {
        return Err(invalid("file shorter than header"));
    }
    let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
    if Sha256::digest(body).as_slice() != digest {
        return Err(invalid("checksum mismatch"));
    }
    if &body[..8] != MAGIC {
        return Err(invalid("bad magic"));
    }
    let version = u32::from_le_bytes(body[8..12].try_into().expect("4-byte slice"));
    if version != VERSION {
        return Err(invalid(format!("version {version}, expected {VERSION}")));
    }
    let (cr, clo, chi, count) = (u64_at(body, 12), u64_at(body, 20), u64_at(body, 28), u64_at(body, 36));
    if (cr, clo, chi) != (r, lo, hi) {
        return Err(invalid(format!("header is r={cr} [{clo}, {chi}], requested r={r} [{lo}, {hi}]")));
    }
    let payload = &body[HEADER_LEN..];
    if payload.len() as u64 != count.saturating_mul(8) {
        return Err(invalid("value count does not match payload"));
    }
    let values = payload.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    SrTable::from_parts(r, lo, hi, values).map_err(|e| invalid(e.to_string()))
}

pub fn write(table: &SrTable, path: &Path) -> Result<(), CacheError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    // write-then-rename so a crashed writer never leaves a half file under the real name
    let tmp = path.with_extension("bin.tmp");
    fs::write(&tmp, encode(table))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read(path: &Path, r: u64, lo: u64, hi: u64) -> Result<SrTable, CacheError> {
    decode(&fs::read(path)?, r, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use schemmel::arith::sieve_sr_range;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let table = sieve_sr_range(1, 1000, 2).unwrap();
        let path = cache_path(dir.path(), 2, 1, 1000);
        write(&table, &path).unwrap();
        assert_eq!(read(&path, 2, 1, 1000).unwrap(), table);
    }

    #[test]
    fn truncated_is_invalid() {
        let bytes = encode(&sieve_sr_range(1, 1000, 2).unwrap());
        for cut in [0, 10, HEADER_LEN + 5, bytes.len() - 1] {
            assert!(matches!(decode(&bytes[..cut], 2, 1, 1000), Err(CacheError::Invalid(_))), "cut={cut}");
        }
    }

    #[test]
    fn header_mismatch_is_invalid() {
        let bytes = encode(&sieve_sr_range(1, 1000, 2).unwrap());
        assert!(matches!(decode(&bytes, 3, 1, 1000), Err(CacheError::Invalid(m)) if m.contains("header")));
        assert!(matches!(decode(&bytes, 2, 1, 999), Err(CacheError::Invalid(_))));
    }

    #[test]
    fn flipped_bit_is_invalid() {
        let mut bytes = encode(&sieve_sr_range(1, 100, 1).unwrap());
        bytes[HEADER_LEN + 3] ^= 1;
        assert!(matches!(decode(&bytes, 1, 1, 100), Err(CacheError::Invalid(m)) if m.contains("checksum")));
    }

    #[test]
    fn version_bump_is_invalid() {
        let table = sieve_sr_range(1, 100, 1).unwrap();
        let mut bytes = encode(&table);
        bytes.truncate(bytes.len() - DIGEST_LEN);
        bytes[8] = 2;
        let digest = Sha256::digest(&bytes);
        bytes.extend_from_slice(&digest);
        assert!(matches!(decode(&bytes, 1, 1, 100), Err(CacheError::Invalid(m)) if m.contains("version")));
    }

    #[test]
    fn missing_file_is_io() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read(&dir.path().join("none.bin"), 1, 1, 2), Err(CacheError::Io(_))));
    }
}
