//! Jacobsthal function on primorials, `J_r = J(r#)`.
//!
//! `J(m)` is the least `a` such that every run of `a` consecutive integers contains one
//! coprime to `m`. Coprimality to `m` is periodic mod `m`, so one scan of the gaps between
//! consecutive coprime residues over `[1, m + 1]` is exhaustive. For `m = r#` those
//! residues are exactly the elements of `B_r`, so `J_r` is also the largest gap in `B_r`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{primorial, ArithError, PrimeTable};

/// Largest modulus the period scan accepts. `29# ~ 6.5e9` is the last primorial below it.
pub const MAX_SCAN_MODULUS: u64 = 1 << 33;

const CHUNK: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum JacobsthalError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("r# = {modulus} is above the scan limit {limit}")]
    ScanTooLarge { modulus: u64, limit: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobsthalRecord {
    pub r: u64,
    /// `r#`
    pub modulus: u64,
    #[serde(rename = "J_r")]
    pub j_r: u64,
    /// Smallest `a0 >= 0` with `a0 + 1, ..., a0 + J_r - 1` all sharing a factor with `r#`.
    pub witness_start: u64,
}

impl JacobsthalRecord {
    /// The maximal coprime-free window `a0 + 1 ..= a0 + J_r - 1` (empty when `J_r = 1`).
    pub fn witness_window(&self) -> std::ops::RangeInclusive<u64> {
        self.witness_start + 1..=self.witness_start + self.j_r - 1
    }
}

/// `J(r#)` with its smallest witness, by a full-period gap scan.
pub fn jacobsthal_of_primorial(r: u64) -> Result<JacobsthalRecord, JacobsthalError> {
    assert!(r >= 1);
    let modulus = primorial(r)?;
    if modulus > MAX_SCAN_MODULUS {
        return Err(JacobsthalError::ScanTooLarge { modulus, limit: MAX_SCAN_MODULUS });
    }
    let mut table = PrimeTable::with_limit(r)?;
    let primes = table.up_to(r)?.to_vec();

    // 1 is always coprime; scan (1, modulus + 1] for the rest.
    let mut last = 1u64;
    let mut best = (1u64, 0u64);
    let mut mask = Vec::with_capacity(CHUNK as usize);
    let mut lo = 2u64;
    let end = modulus + 1;
    while lo <= end {
        let hi = (lo + CHUNK - 1).min(end);
        mask.clear();
        mask.resize((hi - lo + 1) as usize, true);
        for &p in &primes {
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                mask[(m - lo) as usize] = false;
                m += p;
            }
        }
        for (i, &coprime) in mask.iter().enumerate() {
            if coprime {
                let x = lo + i as u64;
                let gap = x - last;
                if gap > best.0 {
                    best = (gap, last);
                }
                last = x;
            }
        }
        lo = hi + 1;
    }
    Ok(JacobsthalRecord { r, modulus, j_r: best.0, witness_start: best.1 })
}
