//! The positive root `lambda_k(r)` of `A(x) = (J_r / r) x^k + k x - (k - 1)`.
//!
//! `A(0) = -(k - 1) < 0`, `A(1) = J_r / r + 1 > 0` and `A` is strictly increasing on
//! `x >= 0`, so the root is unique and lies in `(0, 1)`. Besides the float value, every root
//! carries a dyadic enclosure `a / 2^s < lambda <= (a + 1) / 2^s` whose endpoints are checked
//! with exact integer arithmetic; comparisons against the root go through that enclosure.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::jacobsthal::jacobsthal_of_primorial;

/// Target bound on `|A(value)|`.
pub const LAMBDA_RESIDUAL_TOL: f64 = 1e-12;

const ENCLOSURE_SHIFT: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootEnclosure {
    /// `a` in `a / 2^shift < lambda <= (a + 1) / 2^shift`
    pub lower: u64,
    pub shift: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRoot {
    pub k: u32,
    pub r: u64,
    #[serde(rename = "J_r")]
    pub j_r: u64,
    pub value: f64,
    /// `A(value)` evaluated in floating point.
    pub residual: f64,
    pub enclosure: RootEnclosure,
}

/// `A(x)` in floating point.
pub fn root_polynomial(k: u32, r: u64, j_r: u64, x: f64) -> f64 {
    let c = j_r as f64 / r as f64;
    let k_f = k as f64;
    c * x.powi(k as i32) + k_f * x - (k_f - 1.0)
}

/// Sign of `r den^k A(num / den) = J num^k + r k num den^(k-1) - r (k-1) den^k`.
fn exact_sign(k: u32, r: u64, j_r: u64, num: &BigInt, den: &BigInt) -> i8 {
    let v = BigInt::from(j_r) * num.pow(k) + BigInt::from(r) * BigInt::from(k) * num * den.pow(k - 1)
        - BigInt::from(r) * BigInt::from(k - 1) * den.pow(k);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Where a rational sits relative to the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootComparison {
    Above,
    Equal,
    Below,
}

impl LambdaRoot {
    /// Exact comparison of `num / den` against the root. `used_exact` reports whether the
    /// enclosure alone was too coarse and the polynomial sign had to be evaluated.
    pub fn compare(&self, num: u64, den: u64) -> (RootComparison, bool) {
        assert!(den > 0);
        let scaled = (num as u128) << self.enclosure.shift;
        let lo = self.enclosure.lower as u128 * den as u128;
        let hi = (self.enclosure.lower as u128 + 1) * den as u128;
        if scaled > hi {
            return (RootComparison::Above, false);
        }
        if scaled < lo {
            return (RootComparison::Below, false);
        }
        let cmp = match exact_sign(self.k, self.r, self.j_r, &BigInt::from(num), &BigInt::from(den)) {
            1 => RootComparison::Above,
            0 => RootComparison::Equal,
            _ => RootComparison::Below,
        };
        (cmp, true)
    }

    /// Whether `num / den > lambda`.
    pub fn is_exceeded_by(&self, num: u64, den: u64) -> bool {
        self.compare(num, den).0 == RootComparison::Above
    }
}

/// `lambda_k(r)` using `J_r` from the period scan.
pub fn lambda_root(k: u32, r: u64) -> Result<LambdaRoot, AnalysisError> {
    let j_r = jacobsthal_of_primorial(r)?.j_r;
    lambda_root_with(k, r, j_r)
}

/// Root of `(j_r / r) x^k + k x - (k - 1)` by bisection on `[0, 1]`.
pub fn lambda_root_with(k: u32, r: u64, j_r: u64) -> Result<LambdaRoot, AnalysisError> {
    if k < 2 {
        return Err(AnalysisError::InvalidK(k));
    }
    assert!(r >= 1 && j_r >= 1);
    let a = |x: f64| root_polynomial(k, r, j_r, x);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if a(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = if a(hi).abs() < a(lo).abs() { hi } else { lo };

    // Tighten a dyadic enclosure around the float with exact signs.
    let den = BigInt::from(1u64) << ENCLOSURE_SHIFT;
    let sign_at = |num: u64| exact_sign(k, r, j_r, &BigInt::from(num), &den);
    let mut lower = (value * (1u64 << ENCLOSURE_SHIFT) as f64).floor() as u64;
    while sign_at(lower) >= 0 {
        lower -= 1;
    }
    while sign_at(lower + 1) < 0 {
        lower += 1;
    }
    Ok(LambdaRoot {
        k,
        r,
        j_r,
        value,
        residual: a(value),
        enclosure: RootEnclosure { lower, shift: ENCLOSURE_SHIFT },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_k2() {
        let root = lambda_root(2, 1).unwrap();
        assert!((root.value - (2f64.sqrt() - 1.0)).abs() <= 1e-12);
        let root = lambda_root(2, 2).unwrap();
        assert!((root.value - (2f64.sqrt() - 1.0)).abs() <= 1e-12);
        assert_eq!(root.j_r, 2);
    }

    #[test]
    fn k3_r1_solves_cubic() {
        let root = lambda_root(3, 1).unwrap();
        let x = root.value;
        assert!((x * x * x + 3.0 * x - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn residual_and_sign_change() {
        for r in 1..=13 {
            for k in 2..=10 {
                let root = lambda_root(k, r).unwrap();
                assert!(root.residual.abs() <= LAMBDA_RESIDUAL_TOL, "k={k} r={r}");
                assert!(root.value > 0.0 && root.value < 1.0);
                let a = |x| root_polynomial(k, r, root.j_r, x);
                assert!(a(root.value - 1e-9) < 0.0 && a(root.value + 1e-9) > 0.0);
                let e = root.enclosure;
                let scale = (1u64 << e.shift) as f64;
                assert!(e.lower as f64 / scale <= root.value && root.value <= (e.lower + 1) as f64 / scale);
            }
        }
    }

    #[test]
    fn increasing_in_k() {
        // the reciprocal, used as the P_K reference line, therefore decreases
        for r in 1..=13 {
            let vals: Vec<f64> = (2..=10).map(|k| lambda_root(k, r).unwrap().value).collect();
            assert!(vals.windows(2).all(|w| w[0] < w[1]), "r={r} {vals:?}");
        }
    }

    #[test]
    fn exact_comparison() {
        let root = lambda_root(2, 1).unwrap();
        // sqrt(2) - 1 = 0.41421356...
        assert_eq!(root.compare(41, 100).0, RootComparison::Below);
        assert_eq!(root.compare(42, 100).0, RootComparison::Above);
        // a convergent of sqrt(2) - 1 this close forces the exact path
        let (cmp, exact) = root.compare(15_994_428, 38_613_965);
        assert!(exact);
        assert_eq!(cmp, RootComparison::Below);
        assert!(root.is_exceeded_by(1, 2));
    }

    #[test]
    fn rejects_k_below_two() {
        assert!(matches!(lambda_root(1, 1), Err(AnalysisError::InvalidK(1))));
    }
}
