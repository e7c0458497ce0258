//! Segmented multiplicative sieve for `S_r` over a range.
//!
//! Each segment starts from `S = 1`, `acc = 1` and, for every base prime `p <= sqrt(hi)`,
//! walks the multiples of `p, p^2, p^3, ...` inside the segment: the first hit multiplies
//! `S` by `p - r` (or zeroes it when `p <= r`), each further power multiplies by `p`, and
//! `acc` collects the prime powers found. Whatever is left, `n / acc`, is 1 or a single prime
//! above `sqrt(hi)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::primes::PrimeTable;
use super::ArithError;

/// Default segment length in entries.
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 22;
/// Default cap on the size of a materialized [`SrTable`].
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Entries sieved per segment.
    pub segment_len: usize,
    /// Largest range [`sieve_sr_range_with`] will materialize.
    pub max_entries: usize,
    /// Worker threads; 1 sieves on the calling thread.
    pub threads: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig { segment_len: DEFAULT_SEGMENT_LEN, max_entries: DEFAULT_MAX_ENTRIES, threads: 1 }
    }
}

/// `S_r(n)` for every `n` in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrTable {
    r: u64,
    lo: u64,
    hi: u64,
    values: Vec<u64>,
}

impl SrTable {
    /// Assembles a table from raw parts; `values.len()` must equal `hi - lo + 1`.
    pub fn from_parts(r: u64, lo: u64, hi: u64, values: Vec<u64>) -> Result<Self, ArithError> {
        if r == 0 || lo == 0 || lo > hi || values.len() as u64 != hi - lo + 1 {
            return Err(ArithError::InvalidRange { lo, hi });
        }
        Ok(SrTable { r, lo, hi, values })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// `S_r(n)` if `n` is inside the table.
    pub fn get(&self, n: u64) -> Option<u64> {
        if n < self.lo || n > self.hi {
            return None;
        }
        Some(self.values[(n - self.lo) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (self.lo..=self.hi).zip(self.values.iter().copied())
    }
}

/// Base primes and order for sieving segments anywhere in `[1, hi_max]`.
#[derive(Debug, Clone)]
pub struct SegmentSieve {
    r: u64,
    hi_max: u64,
    base: Vec<u64>,
}

impl SegmentSieve {
    pub fn new(r: u64, hi_max: u64) -> Result<Self, ArithError> {
        assert!(r >= 1);
        let root = hi_max.isqrt();
        let table = PrimeTable::with_limit(root)?;
        Ok(SegmentSieve { r, hi_max, base: table.primes().to_vec() })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn hi_max(&self) -> u64 {
        self.hi_max
    }

    /// Largest base prime used; every prime `<= sqrt(hi_max)`.
    pub fn base_limit(&self) -> u64 {
        self.hi_max.isqrt()
    }

    /// Writes `S_r(lo..=hi)` into `out`, using `acc` as scratch.
    pub fn fill(&self, lo: u64, hi: u64, out: &mut Vec<u64>, acc: &mut Vec<u64>) {
        assert!(lo >= 1 && lo <= hi && hi <= self.hi_max);
        let len = (hi - lo + 1) as usize;
        out.clear();
        out.resize(len, 1);
        acc.clear();
        acc.resize(len, 1);
        let r = self.r;
        for &p in &self.base {
            if p * p > hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            if p <= r {
                let mut m = first;
                while m <= hi {
                    out[(m - lo) as usize] = 0;
                    m += p;
                }
                continue;
            }
            let mut m = first;
            while m <= hi {
                let i = (m - lo) as usize;
                out[i] *= p - r;
                acc[i] *= p;
                m += p;
            }
            let mut pk = p;
            while let Some(next) = pk.checked_mul(p).filter(|&q| q <= hi) {
                pk = next;
                let mut m = lo.div_ceil(pk) * pk;
                while m <= hi {
                    let i = (m - lo) as usize;
                    out[i] *= p;
                    acc[i] *= p;
                    m += pk;
                }
            }
        }
        for (i, (s, &a)) in out.iter_mut().zip(acc.iter()).enumerate() {
            if *s == 0 {
                continue;
            }
            let rest = (lo + i as u64) / a;
            if rest > 1 {
                // rest is a prime above sqrt(hi)
                *s = if rest <= r { 0 } else { *s * (rest - r) };
            }
        }
    }
}

fn check_range(lo: u64, hi: u64) -> Result<(), ArithError> {
    if lo == 0 || lo > hi {
        return Err(ArithError::InvalidRange { lo, hi });
    }
    Ok(())
}

/// [`sieve_sr_range_with`] under the default configuration.
pub fn sieve_sr_range(lo: u64, hi: u64, r: u64) -> Result<SrTable, ArithError> {
    sieve_sr_range_with(lo, hi, r, &SieveConfig::default())
}

/// `S_r(n)` for all `n` in `[lo, hi]` via the segmented sieve.
///
/// With `threads > 1` the segments are filled on a dedicated pool; the result is identical.
pub fn sieve_sr_range_with(lo: u64, hi: u64, r: u64, config: &SieveConfig) -> Result<SrTable, ArithError> {
    assert!(r >= 1);
    check_range(lo, hi)?;
    let len = hi - lo + 1;
    if len > config.max_entries as u64 {
        return Err(ArithError::BudgetExceeded { requested: len, budget: config.max_entries as u64 });
    }
    let sieve = SegmentSieve::new(r, hi)?;
    let seg = config.segment_len.max(1);
    let mut values = vec![0u64; len as usize];
    let fill_chunk = |(ci, chunk): (usize, &mut [u64])| {
        let a = lo + (ci * seg) as u64;
        let b = a + chunk.len() as u64 - 1;
        let mut out = Vec::new();
        let mut acc = Vec::new();
        sieve.fill(a, b, &mut out, &mut acc);
        chunk.copy_from_slice(&out);
    };
    if config.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| ArithError::ThreadPool(e.to_string()))?;
        pool.install(|| values.par_chunks_mut(seg).enumerate().for_each(fill_chunk));
    } else {
        values.chunks_mut(seg).enumerate().for_each(fill_chunk);
    }
    Ok(SrTable { r, lo, hi, values })
}
