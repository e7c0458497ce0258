//! Factorization and pointwise Schemmel totients.

use serde::{Deserialize, Serialize};

use super::primes::{gcd, is_prime, pollard_brent};

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(p, alpha)` pairs, increasing in `p`.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Smallest prime factor, `None` for `n = 1`.
    pub fn spf(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    /// Largest prime factor, `None` for `n = 1`.
    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    /// Exponent of `p` in `n`; zero when `p` does not divide `n`.
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// Product of the distinct primes dividing `n`.
    pub fn radical(&self) -> u64 {
        self.factors.iter().map(|&(p, _)| p).product()
    }

    pub fn primes(&self) -> impl DoubleEndedIterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// `S_r(n)` from the factorization.
    pub fn schemmel(&self, r: u64) -> u64 {
        let mut acc = 1u64;
        for &(p, a) in &self.factors {
            if p <= r {
                return 0;
            }
            // p^(a-1) (p - r) <= p^a, so the running product never exceeds n.
            acc *= p.pow(a - 1) * (p - r);
        }
        acc
    }
}

/// Full prime factorization of `n >= 1`.
///
/// Trial division strips small primes, then Pollard-Brent splits the rest.
pub fn factorize(n: u64) -> FactoredInteger {
    assert!(n >= 1, "factorize needs a positive integer");
    let mut primes = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5] {
        while m.is_multiple_of(p) {
            primes.push(p);
            m /= p;
        }
    }
    // 6k +- 1 wheel up to a small bound
    let mut d = 7u64;
    let mut step = 4;
    while d <= 1000 && d * d <= m {
        while m.is_multiple_of(d) {
            primes.push(d);
            m /= d;
        }
        d += step;
        step = 6 - step;
    }
    if m > 1 {
        if d * d > m {
            primes.push(m);
        } else {
            split(m, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, a)) if *q == p => *a += 1,
            _ => factors.push((p, 1)),
        }
    }
    FactoredInteger { n, factors }
}

fn split(m: u64, out: &mut Vec<u64>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    let f = pollard_brent(m);
    split(f, out);
    split(m / f, out);
}

/// Whether `n` lies in `B_r`: `n = 1`, or the smallest prime factor of `n` exceeds `r`.
pub fn in_coprimality_class(n: u64, r: u64) -> bool {
    assert!(n >= 1 && r >= 1);
    if n == 1 {
        return true;
    }
    if r < 64 {
        // a composite divisor <= r implies a prime divisor <= r
        return (2..=r.min(n)).all(|d| !n.is_multiple_of(d));
    }
    factorize(n).spf().is_some_and(|p| p > r)
}

/// `S_r(n)` via factorization and multiplicativity.
///
/// `S_r(1) = 1`, and the result is zero exactly when `n` is outside `B_r`. Since
/// `S_r(n) <= n` this cannot overflow.
pub fn schemmel(n: u64, r: u64) -> u64 {
    assert!(n >= 1 && r >= 1);
    factorize(n).schemmel(r)
}

/// `S_r(n)` by its counting definition: the number of `k` in `1..=n` with
/// `gcd(k + j, n) = 1` for every `j` in `0..r`.
///
/// Quadratic-ish; meant as an oracle for small `n`.
pub fn schemmel_by_count(n: u64, r: u64) -> u64 {
    assert!(n >= 1 && r >= 1);
    // gcd(k + j, n) depends only on (k + j) mod n
    let coprime: Vec<bool> = (0..n).map(|x| gcd(x, n) == 1).collect();
    let n_us = n as usize;
    let span = r.min(n) as usize;
    (1..=n_us)
        .filter(|&k| {
            if r > n {
                // r consecutive integers cover every residue, including 0
                return n == 1;
            }
            (0..span).all(|j| coprime[(k + j) % n_us])
        })
        .count() as u64
}
