//! Certified enumeration of sparsely Schemmel totient numbers.
//!
//! `n` belongs to `F_r` when `n` is in `B_r` and `S_r(n) < S_r(m)` for every larger `m` in
//! `B_r`. The quantifier over all `m > n` is closed in two parts: a sieve settles every
//! `m` up to a horizon `Y`, and [`TailBound`] gives a proven lower bound `T(Y)` on `S_r(m)`
//! for all `m > Y` in `B_r`.
//!
//! # Tail bound
//!
//! Let `P_t = p_{b+1} ... p_t` and `D_t = (p_{b+1} - r) ... (p_t - r)` where `b = b(r)`, and
//! fix `t` maximal with `P_t <= Y`. Take `m > Y` in `B_r` and `t'` with
//! `P_{t'} <= m < P_{t'+1}`, so `t' >= t`. Every prime factor of `m` exceeds `r` and `m`
//! has at most `t' - b` of them, so `S_r(m)/m >= D_{t'}/P_{t'}`.
//!
//! * `t' = t`: `S_r(m) >= m D_t / P_t > Y D_t / P_t`.
//! * `t' > t`: `S_r(m) >= P_{t'} D_{t'} / P_{t'} = D_{t'} >= D_{t+1}`, each factor being `>= 1`.
//!
//! Hence `T(Y) = min(floor(Y D_t / P_t), D_{t+1})` is a valid bound. It is nondecreasing in
//! `Y` and tends to infinity, so the horizon-growth loop terminates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    base_index, factorize, in_coprimality_class, next_prime, schemmel, ArithError, FactoredInteger,
    SegmentSieve, DEFAULT_SEGMENT_LEN,
};

/// Default hard cap on the certification horizon.
pub const DEFAULT_HORIZON_CAP: u64 = 1 << 34;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("horizon {horizon} is below p_(b(r)+1) = {min}")]
    HorizonTooSmall { horizon: u64, min: u64 },
    #[error("tail bound overflows at horizon {horizon}")]
    Overflow { horizon: u64 },
    #[error(
        "inconclusive: horizon {horizon} reached the cap {cap} with {} undecided candidate(s) {undecided:?}",
        undecided.len()
    )]
    Inconclusive { horizon: u64, cap: u64, undecided: Vec<u64> },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateConfig {
    pub segment_len: usize,
    pub horizon_cap: u64,
    pub threads: usize,
    /// Overrides [`initial_horizon`]; clamped to at least `max(X, p_{b+1})`.
    pub start_horizon: Option<u64>,
}

impl Default for EnumerateConfig {
    fn default() -> Self {
        EnumerateConfig {
            segment_len: DEFAULT_SEGMENT_LEN,
            horizon_cap: DEFAULT_HORIZON_CAP,
            threads: 1,
            start_horizon: None,
        }
    }
}

/// A lower bound on `S_r(m)` valid for every `m > horizon` in `B_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailBound {
    pub r: u64,
    pub horizon: u64,
    /// `b(r)`
    pub base: usize,
    /// Largest prime index `t` with `p_{b+1} ... p_t <= horizon`.
    pub t: usize,
    pub bound: u64,
}

impl TailBound {
    /// Number of primes in the interval product, `t - b(r)`.
    pub fn interval_len(&self) -> usize {
        self.t - self.base
    }
}

/// Products over the primes above `r` that cover a horizon.
struct IntervalWalk {
    t: usize,
    /// `P_t`
    prod: u128,
    /// `D_t`
    dprod: u128,
    /// `p_{t+1}`
    next: u64,
}

fn walk_intervals(y: u64, r: u64) -> Result<(usize, IntervalWalk), CertifyError> {
    let b = base_index(r);
    let first = next_prime(r).ok_or(CertifyError::Overflow { horizon: y })?;
    if y < first {
        return Err(CertifyError::HorizonTooSmall { horizon: y, min: first });
    }
    let mut w = IntervalWalk { t: b, prod: 1, dprod: 1, next: first };
    while w.prod * w.next as u128 <= y as u128 {
        w.prod *= w.next as u128;
        w.dprod *= (w.next - r) as u128;
        w.t += 1;
        w.next = next_prime(w.next).ok_or(CertifyError::Overflow { horizon: y })?;
    }
    Ok((b, w))
}

/// `T(Y)` for horizon `y` and order `r`.
pub fn tail_lower_bound(y: u64, r: u64) -> Result<TailBound, CertifyError> {
    assert!(r >= 1);
    let (base, w) = walk_intervals(y, r)?;
    // dprod <= prod <= y, so both products fit in 128 bits
    let scaled = y as u128 * w.dprod / w.prod;
    let next_interval = w.dprod * (w.next - r) as u128;
    let bound = scaled.min(next_interval) as u64;
    Ok(TailBound { r, horizon: y, base, t: w.t, bound })
}

/// Smallest interval product `p_{b+1} ... p_t` exceeding `x`, saturated to `u64::MAX`.
fn first_boundary_above(x: u64, r: u64) -> u64 {
    let mut prod: u128 = 1;
    let mut p = r;
    while prod <= x as u128 {
        match next_prime(p) {
            Some(q) => {
                prod *= q as u128;
                p = q;
            }
            None => return u64::MAX,
        }
    }
    u64::try_from(prod).unwrap_or(u64::MAX)
}

/// `max(2X, first interval boundary > X)`.
pub fn initial_horizon(r: u64, x: u64) -> u64 {
    x.saturating_mul(2).max(first_boundary_above(x, r))
}

/// Next horizon after `y`: the smaller of `2y` and `p_{b+1} ... p_{t+2}`.
fn grow_horizon(y: u64, r: u64) -> Result<u64, CertifyError> {
    let (_, w) = walk_intervals(y, r)?;
    let after = next_prime(w.next).ok_or(CertifyError::Overflow { horizon: y })?;
    let boundary = w.prod.saturating_mul(w.next as u128).saturating_mul(after as u128);
    let boundary = u64::try_from(boundary).unwrap_or(u64::MAX);
    Ok(boundary.min(y.saturating_mul(2)))
}

/// A certified member of `F_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrRecord {
    pub n: u64,
    pub s_r: u64,
    pub factors: FactoredInteger,
    /// Horizon `Y` of the certificate: every `m` in `(n, Y]` was sieved, and `T(Y) > s_r`.
    pub horizon: u64,
}

impl FrRecord {
    /// `n = 1` is admitted only through the literal definition (`1` is in `F_r` iff `r + 1`
    /// is not prime); callers flag it.
    pub fn is_degenerate(&self) -> bool {
        self.n == 1
    }
}

/// `F_r` intersected with `[1, upto]`, with the horizon and tail bound that prove it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationCertificate {
    pub r: u64,
    pub upto: u64,
    pub horizon: u64,
    pub tail: TailBound,
    /// Strictly increasing in `n`.
    pub members: Vec<FrRecord>,
    /// Sieve passes performed, including the first.
    pub rounds: u32,
}

impl EnumerationCertificate {
    pub fn values(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.n).collect()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search_by_key(&n, |m| m.n).is_ok()
    }

    pub fn get(&self, n: u64) -> Option<&FrRecord> {
        self.members.binary_search_by_key(&n, |m| m.n).ok().map(|i| &self.members[i])
    }
}

struct ScanOutcome {
    /// `(n, S_r(n))`, decreasing in `n`
    members: Vec<(u64, u64)>,
    undecided: Vec<u64>,
}

/// Backward pass over `[1, y]` carrying the suffix minimum of `S_r` on `B_r`.
fn scan_backward(r: u64, x: u64, y: u64, tail: u64, cfg: &EnumerateConfig) -> Result<ScanOutcome, CertifyError> {
    let sieve = SegmentSieve::new(r, y)?;
    let seg = cfg.segment_len.max(1) as u64;
    let mut ranges = Vec::new();
    let mut hi = y;
    loop {
        let lo = hi.saturating_sub(seg - 1).max(1);
        ranges.push((lo, hi));
        if lo == 1 {
            break;
        }
        hi = lo - 1;
    }

    let mut out = ScanOutcome { members: Vec::new(), undecided: Vec::new() };
    let mut suffix_min = u64::MAX;
    let mut absorb = |lo: u64, values: &[u64]| {
        let above_x = lo > x;
        for (i, &s) in values.iter().enumerate().rev() {
            if s == 0 {
                continue;
            }
            if !above_x && s < suffix_min {
                let n = lo + i as u64;
                if n <= x {
                    if s < tail {
                        out.members.push((n, s));
                    } else {
                        out.undecided.push(n);
                    }
                }
            }
            suffix_min = suffix_min.min(s);
        }
    };

    if cfg.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| CertifyError::ThreadPool(e.to_string()))?;
        for batch in ranges.chunks(cfg.threads) {
            let filled: Vec<Vec<u64>> = pool.install(|| {
                batch
                    .par_iter()
                    .map(|&(lo, hi)| {
                        let (mut v, mut acc) = (Vec::new(), Vec::new());
                        sieve.fill(lo, hi, &mut v, &mut acc);
                        v
                    })
                    .collect()
            });
            for (&(lo, _), v) in batch.iter().zip(&filled) {
                absorb(lo, v);
            }
        }
    } else {
        let (mut v, mut acc) = (Vec::new(), Vec::new());
        for &(lo, hi) in &ranges {
            sieve.fill(lo, hi, &mut v, &mut acc);
            absorb(lo, &v);
        }
    }
    Ok(out)
}

/// [`enumerate_sparsely_with`] under the default configuration.
pub fn enumerate_sparsely(r: u64, x: u64) -> Result<EnumerationCertificate, CertifyError> {
    enumerate_sparsely_with(r, x, &EnumerateConfig::default())
}

/// Exact `F_r` intersected with `[1, x]`.
///
/// `n <= x` is accepted iff `S_r(n)` is below both the suffix minimum over `(n, Y]` and
/// `T(Y)`. Candidates that beat the suffix minimum but not `T(Y)` force a larger horizon.
/// Fails with [`CertifyError::Inconclusive`] rather than answer past `horizon_cap`.
pub fn enumerate_sparsely_with(r: u64, x: u64, cfg: &EnumerateConfig) -> Result<EnumerationCertificate, CertifyError> {
    assert!(r >= 1 && x >= 1);
    let cap = cfg.horizon_cap;
    let floor = x.max(next_prime(r).unwrap_or(u64::MAX));
    if cap < floor {
        return Err(CertifyError::Inconclusive { horizon: floor, cap, undecided: Vec::new() });
    }
    let start = cfg.start_horizon.map_or_else(|| initial_horizon(r, x), |h| h.max(floor));
    let mut y = start.min(cap);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let tail = tail_lower_bound(y, r)?;
        let scan = scan_backward(r, x, y, tail.bound, cfg)?;
        if scan.undecided.is_empty() {
            let members = scan
                .members
                .into_iter()
                .rev()
                .map(|(n, s_r)| FrRecord { n, s_r, factors: factorize(n), horizon: y })
                .collect();
            return Ok(EnumerationCertificate { r, upto: x, horizon: y, tail, members, rounds });
        }
        if y >= cap {
            let mut undecided = scan.undecided;
            undecided.reverse();
            return Err(CertifyError::Inconclusive { horizon: y, cap, undecided });
        }
        y = grow_horizon(y, r)?.min(cap);
    }
}

/// Outcome of a single membership query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(FrRecord),
    NotInClass,
    /// Smallest `m > n` in `B_r` with `S_r(m) <= S_r(n)`.
    Refuted { refuter: u64, refuter_s_r: u64 },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

/// [`is_sparsely_with`] under the default configuration.
pub fn is_sparsely(n: u64, r: u64) -> Result<Membership, CertifyError> {
    is_sparsely_with(n, r, &EnumerateConfig::default())
}

/// Decides `n in F_r` by a forward scan that stops at the first refuter or once the tail
/// bound at the scanned horizon exceeds `S_r(n)`.
pub fn is_sparsely_with(n: u64, r: u64, cfg: &EnumerateConfig) -> Result<Membership, CertifyError> {
    assert!(n >= 1 && r >= 1);
    if !in_coprimality_class(n, r) {
        return Ok(Membership::NotInClass);
    }
    let s = schemmel(n, r);
    let first = next_prime(r).ok_or(CertifyError::Overflow { horizon: n })?;
    let cap = cfg.horizon_cap;
    let seg = cfg.segment_len.max(1) as u64;
    let mut len = seg.min(1024);
    let mut lo = n.checked_add(1).ok_or(CertifyError::Inconclusive { horizon: n, cap, undecided: vec![n] })?;
    let mut sieve: Option<SegmentSieve> = None;
    let (mut v, mut acc) = (Vec::new(), Vec::new());
    loop {
        if lo > cap {
            return Err(CertifyError::Inconclusive { horizon: lo - 1, cap, undecided: vec![n] });
        }
        let hi = lo.saturating_add(len - 1).min(cap);
        if sieve.as_ref().is_none_or(|sv| sv.hi_max() < hi) {
            let want = hi.saturating_mul(4).min(cap.max(hi));
            sieve = Some(SegmentSieve::new(r, want)?);
        }
        sieve.as_ref().expect("sieve built above").fill(lo, hi, &mut v, &mut acc);
        if let Some((i, &sm)) = v.iter().enumerate().find(|&(_, &sm)| sm > 0 && sm <= s) {
            return Ok(Membership::Refuted { refuter: lo + i as u64, refuter_s_r: sm });
        }
        if hi >= first && tail_lower_bound(hi, r)?.bound > s {
            return Ok(Membership::Member(FrRecord { n, s_r: s, factors: factorize(n), horizon: hi }));
        }
        lo = hi + 1;
        len = (len * 2).min(seg);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bound_examples() {
        let tb = tail_lower_bound(9_699_690, 1).unwrap();
        assert_eq!(tb.bound, 1_658_880);
        assert_eq!(tb.t, 8);
        let tb = tail_lower_bound(30, 3).unwrap();
        assert_eq!((tb.base, tb.t, tb.interval_len(), tb.bound), (2, 3, 1, 8));
    }

    #[test]
    fn tail_bound_monotone_within_and_across_intervals() {
        for r in 1..=5 {
            let mut last = 0;
            let start = next_prime(r).unwrap();
            for y in start..200_000 {
                let b = tail_lower_bound(y, r).unwrap().bound;
                assert!(b >= last, "r={r} y={y}");
                last = b;
            }
        }
    }

    #[test]
    fn tail_bound_one_below_boundary() {
        // 30030 = 2*3*5*7*11*13 starts a new interval for r = 1
        let before = tail_lower_bound(30_029, 1).unwrap();
        let at = tail_lower_bound(30_030, 1).unwrap();
        assert_eq!(before.t + 1, at.t);
        assert!(before.bound <= at.bound);
        assert_eq!(before.bound, tail_lower_bound(30_029, 1).unwrap().bound);
    }

    #[test]
    fn tail_bound_rejects_tiny_horizon() {
        assert!(matches!(tail_lower_bound(4, 5), Err(CertifyError::HorizonTooSmall { horizon: 4, min: 7 })));
    }

    #[test]
    fn first_members() {
        assert_eq!(enumerate_sparsely(1, 30).unwrap().values(), vec![2, 6, 12, 18, 30]);
        assert_eq!(enumerate_sparsely(2, 105).unwrap().values(), vec![3, 15, 21, 45, 105]);
        let f3 = enumerate_sparsely(3, 10).unwrap();
        assert!(f3.contains(5) && f3.contains(7));
        assert!(f3.members[0].is_degenerate());
    }

    #[test]
    fn initial_horizon_rule() {
        assert_eq!(initial_horizon(1, 30), 210);
        assert_eq!(initial_horizon(1, 1000), 2310);
        assert_eq!(initial_horizon(1, 2000), 4000);
    }

    #[test]
    fn membership_queries() {
        assert_eq!(is_sparsely(9, 2).unwrap(), Membership::Refuted { refuter: 15, refuter_s_r: 3 });
        assert_eq!(is_sparsely(4, 1).unwrap(), Membership::Refuted { refuter: 6, refuter_s_r: 2 });
        assert!(is_sparsely(2, 1).unwrap().is_member());
        assert_eq!(is_sparsely(6, 2).unwrap(), Membership::NotInClass);
        assert!(is_sparsely(1, 3).unwrap().is_member());
        assert_eq!(is_sparsely(1, 1).unwrap(), Membership::Refuted { refuter: 2, refuter_s_r: 1 });
    }

    #[test]
    fn membership_agrees_with_enumeration() {
        for r in 1..=4 {
            let cert = enumerate_sparsely(r, 3000).unwrap();
            for n in 1..=3000 {
                assert_eq!(is_sparsely(n, r).unwrap().is_member(), cert.contains(n), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn small_cap_is_inconclusive() {
        let cfg = EnumerateConfig { horizon_cap: 1000, ..EnumerateConfig::default() };
        match enumerate_sparsely_with(1, 1000, &cfg) {
            Err(CertifyError::Inconclusive { undecided, cap, .. }) => {
                assert_eq!(cap, 1000);
                assert!(undecided.contains(&1000));
            }
            other => panic!("expected inconclusive, got {other:?}"),
        }
        let cfg = EnumerateConfig { horizon_cap: 10, ..EnumerateConfig::default() };
        assert!(matches!(is_sparsely_with(630, 1, &cfg), Err(CertifyError::Inconclusive { .. })));
    }

    #[test]
    fn growth_rounds_do_not_change_answer() {
        // starting at Y = X leaves the top candidates undecided
        let wide = enumerate_sparsely(2, 5000).unwrap();
        assert_eq!(wide.rounds, 1);
        let cfg = EnumerateConfig { segment_len: 333, start_horizon: Some(5000), ..EnumerateConfig::default() };
        let narrow = enumerate_sparsely_with(2, 5000, &cfg).unwrap();
        assert!(narrow.rounds > 1);
        assert_eq!(wide.values(), narrow.values());
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let base = EnumerateConfig { segment_len: 4096, ..EnumerateConfig::default() };
        let one = enumerate_sparsely_with(3, 50_000, &base).unwrap();
        let four = enumerate_sparsely_with(3, 50_000, &EnumerateConfig { threads: 4, ..base }).unwrap();
        assert_eq!(one, four);
    }
}
