//! Explicit members of `F_r`.
//!
//! For `k >= b(r) + 2`, `ell >= 0` and `d` in `B_r` with `d < p_{k+1} - r` and
//! `d (p_{k+ell} - r) < (d + 1)(p_k - r)`, the integer
//! `n = d * p_{k+ell} * p_{b+1} * ... * p_{k-1}` is sparsely Schemmel totient of order `r`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{base_index, in_coprimality_class, ArithError, PrimeTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub r: u64,
    /// Prime index `k`.
    pub k: usize,
    pub ell: usize,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum ParamViolation {
    /// `k < b(r) + 2`
    IndexTooSmall { k: usize, min_k: usize },
    /// `d` has a prime factor `<= r`.
    MultiplierNotInClass { d: u64 },
    /// `d >= p_{k+1} - r`
    MultiplierTooLarge { d: u64, limit: u64 },
    /// `d (p_{k+ell} - r) >= (d + 1)(p_k - r)`
    GapTooWide { lhs: u128, rhs: u128 },
}

impl std::fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamViolation::IndexTooSmall { k, min_k } => write!(f, "k = {k} is below b(r) + 2 = {min_k}"),
            ParamViolation::MultiplierNotInClass { d } => write!(f, "d = {d} has a prime factor <= r"),
            ParamViolation::MultiplierTooLarge { d, limit } => write!(f, "d = {d} is not below p_(k+1) - r = {limit}"),
            ParamViolation::GapTooWide { lhs, rhs } => {
                write!(f, "d (p_(k+ell) - r) = {lhs} is not below (d + 1)(p_k - r) = {rhs}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub params: ConstructionParams,
    pub violations: Vec<ParamViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("invalid construction parameters: {0}")]
    InvalidParams(ValidationReport),
    #[error("constructed member overflows 64 bits")]
    Overflow,
    #[error("order and prime index must be positive")]
    NonPositive,
}

/// Checks every hypothesis of the construction; the report names each failed one.
pub fn validate_params(params: &ConstructionParams) -> Result<ValidationReport, ConstructError> {
    let ConstructionParams { r, k, ell, d } = *params;
    if r == 0 || k == 0 || d == 0 {
        return Err(ConstructError::NonPositive);
    }
    let b = base_index(r);
    let mut table = PrimeTable::new();
    let mut violations = Vec::new();
    if k < b + 2 {
        violations.push(ParamViolation::IndexTooSmall { k, min_k: b + 2 });
    }
    if !in_coprimality_class(d, r) {
        violations.push(ParamViolation::MultiplierNotInClass { d });
    }
    // p_k <= r when k <= b; saturate so the remaining conditions still get reported
    let pk = table.nth(k)?;
    let pk1 = table.nth(k + 1)?;
    let pkl = table.nth(k + ell)?;
    let limit = pk1.saturating_sub(r);
    if d >= limit {
        violations.push(ParamViolation::MultiplierTooLarge { d, limit });
    }
    let lhs = d as u128 * pkl.saturating_sub(r) as u128;
    let rhs = (d as u128 + 1) * pk.saturating_sub(r) as u128;
    if lhs >= rhs {
        violations.push(ParamViolation::GapTooWide { lhs, rhs });
    }
    Ok(ValidationReport { params: *params, violations })
}

/// `d * p_{k+ell} * p_{b+1} * ... * p_{k-1}` for valid parameters.
pub fn build_member(params: &ConstructionParams) -> Result<u64, ConstructError> {
    let report = validate_params(params)?;
    if !report.is_valid() {
        return Err(ConstructError::InvalidParams(report));
    }
    let ConstructionParams { r, k, ell, d } = *params;
    let b = base_index(r);
    let mut table = PrimeTable::new();
    let mut n = d.checked_mul(table.nth(k + ell)?).ok_or(ConstructError::Overflow)?;
    for i in b + 1..k {
        n = n.checked_mul(table.nth(i)?).ok_or(ConstructError::Overflow)?;
    }
    Ok(n)
}

/// One member `n(k) = p_{k+ell(k)} * p_{b+1} * ... * p_{k-1}` of the doubling family, where
/// `ell(k)` is the largest offset with `p_{k+ell(k)} < 2 p_k - r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub r: u64,
    pub k: usize,
    pub ell: usize,
    /// Distinct prime factors in increasing order; every exponent is 1.
    pub primes: Vec<u64>,
    /// `ln n(k)` as a sum of prime logarithms.
    pub log_n: f64,
    /// `n(k)` when it fits in 64 bits.
    pub n: Option<u64>,
}

impl FamilyMember {
    /// `p_{k+ell(k)}`, the largest prime factor.
    pub fn top_prime(&self) -> u64 {
        *self.primes.last().expect("family members have at least one prime")
    }
}

/// The family for `k` in `b(r) + 2 ..= k_max`, in increasing `k`.
pub fn doubling_family(r: u64, k_max: usize) -> Result<Vec<FamilyMember>, ConstructError> {
    if r == 0 {
        return Err(ConstructError::NonPositive);
    }
    let b = base_index(r);
    let mut table = PrimeTable::new();
    if k_max < b + 2 {
        return Ok(Vec::new());
    }
    // p_{k+ell+1} >= 2 p_k - r needs primes a little past 2 p_{k_max}
    let top = table.nth(k_max)?;
    table.extend_to(2 * top + 2)?;
    let primes = table.primes();
    let mut out = Vec::with_capacity(k_max - b - 1);
    // running p_{b+1} ... p_{k-1}
    let mut log_prefix = (primes[b] as f64).ln();
    let mut prod_prefix = Some(primes[b]);
    for k in b + 2..=k_max {
        let pk = primes[k - 1];
        let bound = 2 * pk - r;
        // index (0-based) of the largest prime < bound
        let j = primes.partition_point(|&p| p < bound) - 1;
        let ell = j + 1 - k;
        let top = primes[j];
        let mut factors: Vec<u64> = primes[b..k - 1].to_vec();
        factors.push(top);
        out.push(FamilyMember {
            r,
            k,
            ell,
            primes: factors,
            log_n: log_prefix + (top as f64).ln(),
            n: prod_prefix.and_then(|p| p.checked_mul(top)),
        });
        log_prefix += (pk as f64).ln();
        prod_prefix = prod_prefix.and_then(|p| p.checked_mul(pk));
    }
    Ok(out)
}

/// Guard band for the floating-point product comparison.
pub const PRODUCT_INEQUALITY_EPS: f64 = 1e-9;

/// Real numbers `r < x_i <= y_i` with `y_lead >= max x_i` and
/// `x_lead * prod x_i < y_lead * prod y_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductInstance {
    pub r: u64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_lead: f64,
    pub y_lead: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum PreconditionError {
    #[error("x and y have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need r < x_i <= y_i, violated at index {0}")]
    Ordering(usize),
    #[error("y_lead is below max x_i")]
    LeadTooSmall,
    #[error("x_lead * prod x_i is not below y_lead * prod y_i")]
    ProductNotSmaller,
    #[error("non-finite input")]
    NonFinite,
}

/// Whether `(x_lead - r) prod (x_i - r) < (y_lead - r) prod (y_i - r)` holds, up to a relative
/// guard band of [`PRODUCT_INEQUALITY_EPS`]. For property testing only.
pub fn check_product_inequality(inst: &ProductInstance) -> Result<bool, PreconditionError> {
    let r = inst.r as f64;
    if inst.x.len() != inst.y.len() {
        return Err(PreconditionError::LengthMismatch(inst.x.len(), inst.y.len()));
    }
    let all = inst.x.iter().chain(&inst.y).chain([&inst.x_lead, &inst.y_lead]);
    if all.into_iter().any(|v| !v.is_finite()) {
        return Err(PreconditionError::NonFinite);
    }
    for (i, (&xi, &yi)) in inst.x.iter().zip(&inst.y).enumerate() {
        if !(r < xi && xi <= yi) {
            return Err(PreconditionError::Ordering(i));
        }
    }
    if inst.x.iter().any(|&xi| inst.y_lead < xi) {
        return Err(PreconditionError::LeadTooSmall);
    }
    let px: f64 = inst.x.iter().product();
    let py: f64 = inst.y.iter().product();
    if inst.x_lead * px >= inst.y_lead * py {
        return Err(PreconditionError::ProductNotSmaller);
    }
    let lhs = (inst.x_lead - r) * inst.x.iter().map(|v| v - r).product::<f64>();
    let rhs = (inst.y_lead - r) * inst.y.iter().map(|v| v - r).product::<f64>();
    Ok(lhs < rhs + PRODUCT_INEQUALITY_EPS * rhs.abs().max(lhs.abs()))
}
