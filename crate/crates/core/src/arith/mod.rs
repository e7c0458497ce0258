//! Prime infrastructure, factorization and exact `S_r`, pointwise and over sieved ranges.
//!
//! `S_r` is multiplicative with `S_r(p^a) = 0` for `p <= r` and `p^(a-1) (p - r)` otherwise,
//! so its support is `B_r`: the positive integers whose smallest prime factor exceeds `r`,
//! together with 1.

mod factor;
mod primes;
mod sieve;

use thiserror::Error;

pub use factor::{factorize, in_coprimality_class, schemmel, schemmel_by_count, FactoredInteger};
pub use primes::{
    base_index, is_prime, next_prime, nth_prime, primorial, primorial_wide, PrimeTable, PRIME_TABLE_CAP,
};
pub use sieve::{
    sieve_sr_range, sieve_sr_range_with, SegmentSieve, SieveConfig, SrTable, DEFAULT_MAX_ENTRIES,
    DEFAULT_SEGMENT_LEN,
};

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("prime indices start at 1")]
    ZeroIndex,
    #[error("prime table would need limit {requested}, above the cap {cap}")]
    PrimeTableExhausted { requested: u64, cap: u64 },
    #[error("{what}({arg}) overflows 64 bits")]
    Overflow { what: &'static str, arg: u64 },
    #[error("invalid range [{lo}, {hi}]: need 1 <= lo <= hi")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("range of {requested} entries exceeds the memory budget of {budget}; sieve smaller segments")]
    BudgetExceeded { requested: u64, budget: u64 },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn coprime(a: u64, b: u64) -> bool {
        primes::gcd(a, b) == 1
    }

    proptest! {
        #[test]
        fn multiplicative_on_coprime_pairs(a in 1u64..4_000_000_000, b in 1u64..4_000_000_000, r in 1u64..=10) {
            prop_assume!(coprime(a, b));
            let ab = a.checked_mul(b);
            prop_assume!(ab.is_some());
            prop_assert_eq!(schemmel(ab.unwrap(), r), schemmel(a, r) * schemmel(b, r));
        }

        #[test]
        fn sieve_segment_agrees_with_pointwise(lo in 1u64..5_000_000, len in 1u64..2000, r in 1u64..=12) {
            let t = sieve_sr_range(lo, lo + len - 1, r).unwrap();
            for (n, v) in t.iter() {
                prop_assert_eq!(v, schemmel(n, r));
            }
        }

        #[test]
        fn positivity_iff_in_class(n in 1u64..u64::MAX, r in 1u64..=200) {
            prop_assert_eq!(schemmel(n, r) > 0, in_coprimality_class(n, r));
        }
    }
}
