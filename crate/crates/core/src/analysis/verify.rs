//! Exact checks of the proved prime-divisor inequalities and structure results against a
//! certified enumeration, plus report-only scans for the open conjectures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lambda::{lambda_root_with, LambdaRoot};
use super::{prime_membership_threshold, profile_of, AnalysisError};
use crate::arith::{next_prime, ArithError, PrimeTable};
use crate::certify::EnumerationCertificate;
use crate::jacobsthal::jacobsthal_of_primorial;

/// Indices `j` at which `p_{j+1} / p_j > 7 / 5`.
pub const PRIME_RATIO_EXCEPTIONS: [usize; 3] = [1, 2, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioEntry {
    pub j: usize,
    pub p_j: u64,
    pub p_next: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRatioReport {
    pub limit: u64,
    /// Consecutive pairs examined, exceptions included.
    pub checked: usize,
    /// Every pair with `5 p_{j+1} > 7 p_j`.
    pub failures: Vec<RatioEntry>,
    /// Failures outside [`PRIME_RATIO_EXCEPTIONS`].
    pub violations: Vec<RatioEntry>,
}

impl PrimeRatioReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn failing_indices(&self) -> Vec<usize> {
        self.failures.iter().map(|e| e.j).collect()
    }
}

/// `5 p_{j+1} <= 7 p_j` for every `j` with `p_{j+1} <= limit`.
pub fn verify_prime_ratio_bound(limit: u64) -> Result<PrimeRatioReport, AnalysisError> {
    let mut table = PrimeTable::with_limit(limit)?;
    let primes = table.up_to(limit)?;
    let mut failures = Vec::new();
    for (i, w) in primes.windows(2).enumerate() {
        if 5 * w[1] > 7 * w[0] {
            failures.push(RatioEntry { j: i + 1, p_j: w[0], p_next: w[1] });
        }
    }
    let violations = failures.iter().filter(|e| !PRIME_RATIO_EXCEPTIONS.contains(&e.j)).copied().collect();
    Ok(PrimeRatioReport { limit, checked: primes.len().saturating_sub(1), failures, violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum BoundKind {
    /// `Q_{k-1} > lambda_k(r) (P_k - r)`
    GapSeparation { k: u32 },
    /// `r P_1 < Q_1 (r - r J_r + J_r Q_1)`
    TopPrime,
    /// `r R < J_r Q_1 (Q_1 - r)`
    Cofactor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub n: u64,
    #[serde(flatten)]
    pub kind: BoundKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorBoundReport {
    pub r: u64,
    pub upto: u64,
    #[serde(rename = "J_r")]
    pub j_r: u64,
    pub members_checked: usize,
    pub gap_checks: usize,
    pub top_prime_checks: usize,
    pub cofactor_checks: usize,
    /// Gap comparisons the dyadic enclosure could not settle alone.
    pub exact_fallbacks: usize,
    pub violations: Vec<BoundViolation>,
}

impl DivisorBoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Default)]
struct MemberTally {
    gap: usize,
    top: usize,
    cofactor: usize,
    fallbacks: usize,
    violations: Vec<BoundViolation>,
}

/// Checks the gap-separation, top-prime and cofactor bounds on every member `n >= 2`.
pub fn verify_prime_divisor_bounds(cert: &EnumerationCertificate) -> Result<DivisorBoundReport, AnalysisError> {
    let r = cert.r;
    let j_r = jacobsthal_of_primorial(r)?.j_r;
    let max_omega = cert.members.iter().map(|m| m.factors.omega()).max().unwrap_or(0) as u32;
    let roots: Vec<LambdaRoot> =
        (2..=max_omega.max(2)).map(|k| lambda_root_with(k, r, j_r)).collect::<Result<_, _>>()?;

    let members: Vec<_> = cert.members.iter().filter(|m| m.n >= 2).collect();
    let tallies: Vec<MemberTally> = members
        .par_iter()
        .map(|m| {
            let omega = m.factors.omega();
            let prof = profile_of(&m.factors, r, omega.saturating_sub(1).max(1))?;
            let mut t = MemberTally::default();
            for k in 2..=omega {
                let root = &roots[k - 2];
                let q = prof.q(k - 1).expect("profile depth covers k - 1");
                let p = prof.p(k).expect("k <= omega");
                let (cmp, exact) = root.compare(q, p - r);
                t.gap += 1;
                t.fallbacks += exact as usize;
                if cmp != super::RootComparison::Above {
                    t.violations.push(BoundViolation {
                        n: m.n,
                        kind: BoundKind::GapSeparation { k: k as u32 },
                        detail: format!("Q_{}={q}, P_{k}={p}, lambda={}", k - 1, root.value),
                    });
                }
            }
            let (r_i, j_i) = (r as i128, j_r as i128);
            let q1 = prof.q(1).expect("depth >= 1") as i128;
            let p1 = prof.p(1).expect("n >= 2") as i128;
            if omega >= 2 {
                t.top += 1;
                let rhs = q1 * (r_i - r_i * j_i + j_i * q1);
                if r_i * p1 >= rhs {
                    t.violations.push(BoundViolation {
                        n: m.n,
                        kind: BoundKind::TopPrime,
                        detail: format!("r*P_1={} >= {rhs}", r_i * p1),
                    });
                }
            }
            t.cofactor += 1;
            let rhs = j_i * q1 * (q1 - r_i);
            if r_i * prof.cofactor as i128 >= rhs {
                t.violations.push(BoundViolation {
                    n: m.n,
                    kind: BoundKind::Cofactor,
                    detail: format!("r*R={} >= {rhs}", r_i * prof.cofactor as i128),
                });
            }
            Ok(t)
        })
        .collect::<Result<_, AnalysisError>>()?;

    let mut report = DivisorBoundReport {
        r,
        upto: cert.upto,
        j_r,
        members_checked: members.len(),
        gap_checks: 0,
        top_prime_checks: 0,
        cofactor_checks: 0,
        exact_fallbacks: 0,
        violations: Vec::new(),
    };
    for t in tallies {
        report.gap_checks += t.gap;
        report.top_prime_checks += t.top;
        report.cofactor_checks += t.cofactor;
        report.exact_fallbacks += t.fallbacks;
        report.violations.extend(t.violations);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub r: u64,
    pub upto: u64,
    pub threshold: u64,
    /// Prime members, increasing.
    pub prime_members: Vec<u64>,
    /// Primes `p` with `r < p < threshold` and `p <= upto`.
    pub expected_primes: Vec<u64>,
    /// Members equal to `p_{b+1}^2` or to a prime cube.
    pub forbidden_powers: Vec<u64>,
    /// `(n, n / p)` where `p^2 | n` but `n / p` is missing.
    pub closure_failures: Vec<(u64, u64)>,
    /// Members with `P_1(n)^4 | n`; informational, expected to be few.
    pub top_fourth_powers: Vec<u64>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.prime_members == self.expected_primes
            && self.forbidden_powers.is_empty()
            && self.closure_failures.is_empty()
    }
}

/// Prime membership, excluded prime powers and downward closure under `p^a -> p^(a-1)`.
pub fn verify_prime_power_structure(cert: &EnumerationCertificate) -> Result<StructureReport, AnalysisError> {
    let r = cert.r;
    let threshold = prime_membership_threshold(r);
    let first = next_prime(r).ok_or(ArithError::Overflow { what: "next_prime", arg: r })?;
    let square_of_first = first.checked_mul(first);

    let mut expected_primes = Vec::new();
    let mut p = r;
    loop {
        p = next_prime(p).ok_or(ArithError::Overflow { what: "next_prime", arg: p })?;
        if p >= threshold || p > cert.upto {
            break;
        }
        expected_primes.push(p);
    }

    let mut report = StructureReport {
        r,
        upto: cert.upto,
        threshold,
        prime_members: Vec::new(),
        expected_primes,
        forbidden_powers: Vec::new(),
        closure_failures: Vec::new(),
        top_fourth_powers: Vec::new(),
    };
    for m in cert.members.iter().filter(|m| m.n >= 2) {
        let f = &m.factors;
        let factors = f.factors();
        if factors.len() == 1 {
            let (p, a) = factors[0];
            if a == 1 {
                report.prime_members.push(p);
            }
            if a == 3 || Some(m.n) == square_of_first {
                report.forbidden_powers.push(m.n);
            }
        }
        for &(p, a) in factors {
            if a >= 2 && !cert.contains(m.n / p) {
                report.closure_failures.push((m.n, m.n / p));
            }
        }
        let top = f.largest_prime().expect("n >= 2");
        if f.valuation(top) >= 4 {
            report.top_fourth_powers.push(m.n);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub r: u64,
    pub upto: u64,
    /// Members of the form `p^2`.
    pub prime_squares: Vec<u64>,
    /// Members with `P_1(n)^3 | n`.
    pub top_cubes: Vec<u64>,
}

impl ConjectureReport {
    pub fn counterexamples(&self) -> usize {
        self.prime_squares.len() + self.top_cubes.len()
    }
}

/// Lists members that would contradict the two open conjectures. Never fails on a hit.
pub fn scan_conjectures(cert: &EnumerationCertificate) -> ConjectureReport {
    let mut report = ConjectureReport { r: cert.r, upto: cert.upto, prime_squares: Vec::new(), top_cubes: Vec::new() };
    for m in cert.members.iter().filter(|m| m.n >= 2) {
        let f = &m.factors;
        if let [(_, 2)] = f.factors() {
            report.prime_squares.push(m.n);
        }
        let top = f.largest_prime().expect("n >= 2");
        if f.valuation(top) >= 3 {
            report.top_cubes.push(m.n);
        }
    }
    report
}
