//! Prime tables, primality and primorials.

use super::ArithError;

/// Largest sieve limit a [`PrimeTable`] will grow to.
pub const PRIME_TABLE_CAP: u64 = 1 << 32;

/// An ordered table of all primes up to `limit`.
///
/// Indexing is 1-based to match the usual `p_i` convention: `nth(1) == 2`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    primes: Vec<u64>,
    limit: u64,
}

impl Default for PrimeTable {
    fn default() -> Self {
        Self::new()
    }
}

impl PrimeTable {
    pub fn new() -> Self {
        Self::with_limit(1 << 10).expect("small table")
    }

    /// Table of all primes `<= limit`.
    pub fn with_limit(limit: u64) -> Result<Self, ArithError> {
        if limit > PRIME_TABLE_CAP {
            return Err(ArithError::PrimeTableExhausted { requested: limit, cap: PRIME_TABLE_CAP });
        }
        Ok(PrimeTable { primes: eratosthenes(limit), limit })
    }

    /// Largest integer covered: every prime `<= limit` is present.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Grows the table so it covers at least `limit`.
    pub fn extend_to(&mut self, limit: u64) -> Result<(), ArithError> {
        if limit <= self.limit {
            return Ok(());
        }
        *self = Self::with_limit(limit)?;
        Ok(())
    }

    /// `p_i` without growing the table.
    pub fn get(&self, i: usize) -> Option<u64> {
        i.checked_sub(1).and_then(|j| self.primes.get(j).copied())
    }

    /// `p_i`, growing the table as needed.
    pub fn nth(&mut self, i: usize) -> Result<u64, ArithError> {
        if i == 0 {
            return Err(ArithError::ZeroIndex);
        }
        while self.primes.len() < i {
            let next = self.limit.max(nth_prime_upper_estimate(i)).saturating_mul(2);
            if self.limit >= PRIME_TABLE_CAP {
                return Err(ArithError::PrimeTableExhausted { requested: next, cap: PRIME_TABLE_CAP });
            }
            self.extend_to(next.min(PRIME_TABLE_CAP))?;
        }
        Ok(self.primes[i - 1])
    }

    /// The `i` with `p_i == p`, if `p` is a prime inside the table.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|j| j + 1)
    }

    /// All primes `<= x`, growing the table as needed.
    pub fn up_to(&mut self, x: u64) -> Result<&[u64], ArithError> {
        self.extend_to(x)?;
        let end = self.primes.partition_point(|&p| p <= x);
        Ok(&self.primes[..end])
    }

    /// `pi(x)`, the number of primes `<= x`.
    pub fn count_up_to(&mut self, x: u64) -> Result<usize, ArithError> {
        Ok(self.up_to(x)?.len())
    }
}

/// Rosser-type upper bound for `p_i`, loose for small `i`.
fn nth_prime_upper_estimate(i: usize) -> u64 {
    if i < 6 {
        return 13;
    }
    let n = i as f64;
    (n * (n.ln() + n.ln().ln())).ceil() as u64 + 3
}

/// Odd-only sieve of Eratosthenes.
fn eratosthenes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // slot i stands for 2i + 1
    let slots = (limit as usize - 1) / 2 + 1;
    let mut composite = vec![false; slots];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < slots {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(slots / 4 + 1);
    primes.push(2);
    primes.extend((1..slots).filter(|&i| !composite[i]).map(|i| 2 * i as u64 + 1));
    primes
}

/// `p_i` (1-based).
pub fn nth_prime(i: usize) -> Result<u64, ArithError> {
    if i == 0 {
        return Err(ArithError::ZeroIndex);
    }
    let mut table = PrimeTable::with_limit(nth_prime_upper_estimate(i).min(PRIME_TABLE_CAP))?;
    table.nth(i)
}

/// `b(r)`: the number of primes `<= r`, so that `p_{b(r)} <= r < p_{b(r)+1}`.
///
/// `b(1) = 0`.
pub fn base_index(r: u64) -> usize {
    assert!(r >= 1, "order must be positive");
    if r < 1 << 24 {
        return eratosthenes(r).len();
    }
    (2..=r).filter(|&n| is_prime(n)).count()
}

/// Product of all primes `<= x`; `0# = 1# = 1`.
pub fn primorial(x: u64) -> Result<u64, ArithError> {
    let wide = primorial_wide(x)?;
    u64::try_from(wide).map_err(|_| ArithError::Overflow { what: "primorial", arg: x })
}

/// Double-width primorial.
pub fn primorial_wide(x: u64) -> Result<u128, ArithError> {
    let mut acc: u128 = 1;
    let mut p = 1;
    while let Some(q) = next_prime(p) {
        if q > x {
            break;
        }
        acc = acc
            .checked_mul(q as u128)
            .ok_or(ArithError::Overflow { what: "primorial", arg: x })?;
        p = q;
    }
    Ok(acc)
}

/// Smallest prime strictly greater than `n`, or `None` past the 64-bit range.
pub fn next_prime(n: u64) -> Option<u64> {
    if n < 2 {
        return Some(2);
    }
    let mut c = if n.is_multiple_of(2) { n.checked_add(1)? } else { n.checked_add(2)? };
    loop {
        if is_prime(c) {
            return Some(c);
        }
        c = c.checked_add(2)?;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // The first twelve prime bases are a proven witness set below 3.3 * 10^24.
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Some nontrivial factor of the odd composite `n` (Brent's variant of rho).
pub(crate) fn pollard_brent(n: u64) -> u64 {
    debug_assert!(n % 2 == 1 && !is_prime(n));
    let mut c = 1u64;
    loop {
        let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut q = 1u64;
        let mut g = 1u64;
        let mut len = 1u64;
        const BLOCK: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..len {
                y = f(y);
            }
            let mut k = 0;
            while k < len && g == 1 {
                ys = y;
                for _ in 0..BLOCK.min(len - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BLOCK;
            }
            len *= 2;
        }
        if g == n {
            // backtrack one step at a time from the last block start
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}
