//! Independent reference implementations. Nothing here calls into the sieve, the certified
//! enumerator or the tail bound under test.

#![allow(dead_code)]

/// `S_r(n)` by trial division.
pub fn schemmel_naive(n: u64, r: u64) -> u64 {
    let mut m = n;
    let mut out = 1u64;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            if p <= r {
                return 0;
            }
            let mut a = 0;
            while m.is_multiple_of(p) {
                m /= p;
                a += 1;
            }
            out *= p.pow(a - 1) * (p - r);
        }
        p += 1;
    }
    if m > 1 {
        if m <= r {
            return 0;
        }
        out *= m - r;
    }
    out
}

pub fn in_class_naive(n: u64, r: u64) -> bool {
    (2..=r.min(n)).all(|d| !n.is_multiple_of(d))
}

pub fn primes_upto(x: u64) -> Vec<u64> {
    let mut composite = vec![false; x as usize + 1];
    let mut out = Vec::new();
    for i in 2..=x as usize {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= x as usize {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// `S_r` on `[0, y]` by a plain (unsegmented) product sieve; index 0 is unused.
pub fn schemmel_table(y: u64, r: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (0..=y).collect();
    for p in primes_upto(y) {
        let mut m = p;
        while m <= y {
            v[m as usize] = if p <= r { 0 } else { v[m as usize] / p * (p - r) };
            m += p;
        }
    }
    v
}

/// Tail bound `min(floor(y D_t / P_t), D_{t+1})` over the primes above `r`.
pub fn tail_bound_naive(y: u64, r: u64) -> u64 {
    let primes: Vec<u64> = primes_upto(1000).into_iter().filter(|&p| p > r).collect();
    let (mut prod, mut dprod) = (1u128, 1u128);
    let mut i = 0;
    while prod * primes[i] as u128 <= y as u128 {
        prod *= primes[i] as u128;
        dprod *= (primes[i] - r) as u128;
        i += 1;
    }
    assert!(i >= 1, "horizon below the first interval");
    let next = dprod * (primes[i] - r) as u128;
    ((y as u128 * dprod / prod).min(next)) as u64
}

/// Members of `F_r` up to `x` by a direct double loop: `n` survives unless some `m` in
/// `(n, big_m]` has `S_r(m) <= S_r(n)`, where `big_m` is grown until the tail bound exceeds
/// every candidate value.
pub fn sparsely_naive(r: u64, x: u64) -> Vec<u64> {
    let max_s = (1..=x).map(|n| schemmel_naive(n, r)).max().unwrap();
    let first = primes_upto(1000).into_iter().find(|&p| p > r).unwrap();
    let mut big_m = (2 * x).max(first);
    while tail_bound_naive(big_m, r) <= max_s {
        big_m *= 2;
    }
    let s = schemmel_table(big_m, r);
    let class = |n: u64| n == 1 || s[n as usize] > 0;
    (1..=x)
        .filter(|&n| class(n))
        .filter(|&n| {
            let sn = s[n as usize];
            (n + 1..=big_m).all(|m| !class(m) || s[m as usize] > sn)
        })
        .collect()
}
