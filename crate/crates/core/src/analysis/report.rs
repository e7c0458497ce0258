//! Descriptive ratio tables for the growth of `P_1`, `Q_L`, `P_K` and `omega` against `log n`.
//! Nothing here is a pass/fail gate: the reference lines are asymptotic.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::lambda::lambda_root_with;
use super::{missing_primes, profile_of, AnalysisError};
use crate::certify::EnumerationCertificate;
use crate::construct::FamilyMember;
use crate::jacobsthal::jacobsthal_of_primorial;

pub const RATIO_CSV_HEADER: &str =
    "n,log_n,omega,P1,Q1,ratio_p1_logn,ratio_qL_logn,ratio_pK_logn,ratio_p1_log2n";

const ABSENT: &str = "NA";

pub enum RatioSource<'a> {
    Certificate(&'a EnumerationCertificate),
    Family(&'a [FamilyMember]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    /// `None` for family members too large for 64 bits.
    pub n: Option<u64>,
    pub log_n: f64,
    pub omega: usize,
    pub p1: u64,
    pub q1: u64,
    pub ratio_p1_logn: f64,
    pub ratio_ql_logn: f64,
    /// `None` when `K > omega`.
    pub ratio_pk_logn: Option<f64>,
    pub ratio_p1_log2n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub r: u64,
    pub k: u32,
    pub l: usize,
    /// Reference line for `P_K / log n`.
    pub lambda_inv: f64,
    /// Reference line for `P_1 / log^2 n`.
    pub j_over_r: f64,
    pub rows: Vec<RatioRow>,
}

impl RatioReport {
    /// Rows whose `P_K / log n` is above `lambda_K(r)^{-1}`. Finite-n excess is expected.
    pub fn pk_exceedances(&self) -> usize {
        self.rows.iter().filter(|row| row.ratio_pk_logn.is_some_and(|v| v > self.lambda_inv)).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(RATIO_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let n = row.n.map_or(ABSENT.to_string(), |n| n.to_string());
            let pk = row.ratio_pk_logn.map_or(ABSENT.to_string(), |v| v.to_string());
            writeln!(
                out,
                "{n},{},{},{},{},{},{},{pk},{}",
                row.log_n, row.omega, row.p1, row.q1, row.ratio_p1_logn, row.ratio_ql_logn, row.ratio_p1_log2n
            )
            .expect("writing to a String");
        }
        out
    }
}

fn row(n: Option<u64>, log_n: f64, desc: &[u64], q: &[u64], k: usize, l: usize) -> RatioRow {
    let p1 = desc[0];
    RatioRow {
        n,
        log_n,
        omega: desc.len(),
        p1,
        q1: q[0],
        ratio_p1_logn: p1 as f64 / log_n,
        ratio_ql_logn: q[l - 1] as f64 / log_n,
        ratio_pk_logn: desc.get(k - 1).map(|&p| p as f64 / log_n),
        ratio_p1_log2n: p1 as f64 / (log_n * log_n),
    }
}

/// One row per member `n >= 2` (certificate) or per family member, in source order.
pub fn ratio_report(source: RatioSource<'_>, r: u64, k: u32, l: usize) -> Result<RatioReport, AnalysisError> {
    if k < 2 || l < 1 {
        return Err(AnalysisError::InvalidReportIndex);
    }
    let q_depth = l.max(k as usize - 1).max(2);
    let j_r = jacobsthal_of_primorial(r)?.j_r;
    let lambda = lambda_root_with(k, r, j_r)?;
    let ku = k as usize;
    let mut rows = Vec::new();
    match source {
        RatioSource::Certificate(cert) => {
            if cert.r != r {
                return Err(AnalysisError::OrderMismatch { expected: r, found: cert.r });
            }
            for m in cert.members.iter().filter(|m| m.n >= 2) {
                let prof = profile_of(&m.factors, r, q_depth)?;
                rows.push(row(Some(m.n), (m.n as f64).ln(), &prof.top_primes, &prof.missing_primes, ku, l));
            }
        }
        RatioSource::Family(family) => {
            for m in family {
                if m.r != r {
                    return Err(AnalysisError::OrderMismatch { expected: r, found: m.r });
                }
                let desc: Vec<u64> = m.primes.iter().rev().copied().collect();
                let q = missing_primes(r, q_depth, |p| m.primes.binary_search(&p).is_ok())?;
                rows.push(row(m.n, m.log_n, &desc, &q, ku, l));
            }
        }
    }
    Ok(RatioReport { r, k, l, lambda_inv: 1.0 / lambda.value, j_over_r: j_r as f64 / r as f64, rows })
}
