//! Prime-divisor profiles of members, the `lambda_k(r)` root, exact checks of the proved
//! inequalities and structure results on certified output, conjecture scans and the
//! asymptotic ratio reports.

mod lambda;
mod report;
mod verify;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factorize, next_prime, ArithError, FactoredInteger};
use crate::jacobsthal::JacobsthalError;

pub use lambda::{
    lambda_root, lambda_root_with, root_polynomial, LambdaRoot, RootComparison, RootEnclosure,
    LAMBDA_RESIDUAL_TOL,
};
pub use report::{ratio_report, RatioReport, RatioRow, RatioSource, RATIO_CSV_HEADER};
pub use verify::{
    scan_conjectures, verify_prime_divisor_bounds, verify_prime_power_structure, verify_prime_ratio_bound,
    BoundKind, BoundViolation, ConjectureReport, DivisorBoundReport, PrimeRatioReport, RatioEntry,
    StructureReport, PRIME_RATIO_EXCEPTIONS,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Jacobsthal(#[from] JacobsthalError),
    #[error("{n} is not in B_{r}")]
    NotInClass { n: u64, r: u64 },
    #[error("profiles need n >= 2, got {0}")]
    TooSmall(u64),
    #[error("root index k must be at least 2, got {0}")]
    InvalidK(u32),
    #[error("ratio report needs K >= 2 and L >= 1")]
    InvalidReportIndex,
    #[error("input is for r = {found}, expected r = {expected}")]
    OrderMismatch { expected: u64, found: u64 },
}

/// Prime-divisor data of a member `n` of `F_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeProfile {
    pub n: u64,
    pub r: u64,
    /// Distinct prime divisors, largest first: `P_1 > P_2 > ...`.
    pub top_primes: Vec<u64>,
    /// Smallest primes above `r` not dividing `n`, increasing: `Q_1 < Q_2 < ...`.
    pub missing_primes: Vec<u64>,
    /// `n` over its radical.
    pub cofactor: u64,
    /// Exponent of `P_1` in `n`.
    pub top_exponent: u32,
}

impl PrimeProfile {
    /// `P_k`, 1-based.
    pub fn p(&self, k: usize) -> Option<u64> {
        k.checked_sub(1).and_then(|i| self.top_primes.get(i).copied())
    }

    /// `Q_k`, 1-based.
    pub fn q(&self, k: usize) -> Option<u64> {
        k.checked_sub(1).and_then(|i| self.missing_primes.get(i).copied())
    }

    pub fn omega(&self) -> usize {
        self.top_primes.len()
    }
}

/// First `depth` primes above `r` for which `divides` is false.
pub(crate) fn missing_primes(r: u64, depth: usize, divides: impl Fn(u64) -> bool) -> Result<Vec<u64>, ArithError> {
    let mut out = Vec::with_capacity(depth);
    let mut p = r;
    while out.len() < depth {
        p = next_prime(p).ok_or(ArithError::Overflow { what: "next_prime", arg: p })?;
        if !divides(p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Profile of `n >= 2` in `B_r`, with `q_depth` entries of `Q`.
pub fn profile(n: u64, r: u64, q_depth: usize) -> Result<PrimeProfile, AnalysisError> {
    profile_of(&factorize(n), r, q_depth)
}

/// [`profile`] from an existing factorization.
pub fn profile_of(f: &FactoredInteger, r: u64, q_depth: usize) -> Result<PrimeProfile, AnalysisError> {
    let n = f.n();
    if n < 2 {
        return Err(AnalysisError::TooSmall(n));
    }
    if f.spf().is_some_and(|p| p <= r) {
        return Err(AnalysisError::NotInClass { n, r });
    }
    let top_primes: Vec<u64> = f.primes().rev().collect();
    let missing = missing_primes(r, q_depth, |p| n.is_multiple_of(p))?;
    Ok(PrimeProfile {
        n,
        r,
        top_exponent: f.valuation(top_primes[0]),
        top_primes,
        missing_primes: missing,
        cofactor: n / f.radical(),
    })
}

/// `(p_{b+1} - r)(p_{b+2} - r) + r`: a prime `p` is in `F_r` iff `r < p` and `p` is below this.
pub fn prime_membership_threshold(r: u64) -> u64 {
    assert!(r >= 1);
    let p1 = next_prime(r).expect("order within 64-bit range");
    let p2 = next_prime(p1).expect("order within 64-bit range");
    (p1 - r) * (p2 - r) + r
}
