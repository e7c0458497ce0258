use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use schemmel::analysis::{
    lambda_root, ratio_report, scan_conjectures, verify_prime_divisor_bounds, verify_prime_power_structure,
    verify_prime_ratio_bound, RatioSource,
};
use schemmel::arith::{
    schemmel, schemmel_by_count, sieve_sr_range_with, SieveConfig, SrTable, DEFAULT_MAX_ENTRIES, PRIME_TABLE_CAP,
};
use schemmel::certify::{enumerate_sparsely_with, is_sparsely_with, EnumerateConfig, EnumerationCertificate, Membership};
use schemmel::construct::{build_member, doubling_family, validate_params, ConstructionParams};
use schemmel::jacobsthal::jacobsthal_of_primorial;

use crate::cache::{self, CacheError};
use crate::manifest::{manifest_path, sha256_hex, OutputDigest, RunManifest};
use crate::{Cli, Command, Format, Method, UsageError, VerificationFailed};

/// Consecutive primes are checked against the 7/5 ratio up to here; beyond it the bound
/// follows from published explicit prime-gap results.
const PRIME_RATIO_LIMIT: u64 = 396_738;

/// What a command produced, before it is written anywhere.
#[derive(Default)]
pub struct Produced {
    pub bytes: Vec<u8>,
    pub findings: Vec<String>,
    /// Set when a verification suite failed; the bytes still hold the full report.
    pub failure: Option<String>,
}

impl Produced {
    fn text(s: String) -> Self {
        Produced { bytes: s.into_bytes(), ..Default::default() }
    }
}

fn json_line(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string(v)?;
    s.push('\n');
    Ok(s)
}

fn enumerate_config(cli: &Cli) -> EnumerateConfig {
    EnumerateConfig {
        segment_len: cli.global.segment_len as usize,
        horizon_cap: cli.global.horizon_cap,
        threads: cli.global.threads as usize,
        start_horizon: None,
    }
}

fn certify(cli: &Cli, r: u64, upto: u64) -> Result<EnumerationCertificate> {
    let cert = enumerate_sparsely_with(r, upto, &enumerate_config(cli))?;
    eprintln!(
        "certified {} member(s) of F_{r} up to {upto}: horizon {}, tail bound {}, {} round(s)",
        cert.members.len(),
        cert.horizon,
        cert.tail.bound,
        cert.rounds
    );
    Ok(cert)
}

/// Runs the command and writes its output to `--out` (plus a manifest) or standard output.
pub fn run(cli: &Cli, write_manifest: bool) -> Result<()> {
    let produced = produce(cli)?;
    match &cli.global.out {
        Some(path) => {
            fs::write(path, &produced.bytes).with_context(|| format!("writing {}", path.display()))?;
            if write_manifest {
                let manifest = RunManifest {
                    command: cli.command.name().to_string(),
                    parameters: cli.parameters(),
                    artifact_version: env!("CARGO_PKG_VERSION").to_string(),
                    prime_table_limit: PRIME_TABLE_CAP,
                    outputs: vec![OutputDigest {
                        path: path.to_string_lossy().into_owned(),
                        sha256: sha256_hex(&produced.bytes),
                    }],
                    findings: produced.findings.clone(),
                };
                manifest.write(&manifest_path(path))?;
            }
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&produced.bytes)?;
            stdout.flush()?;
        }
    }
    match produced.failure {
        Some(msg) => Err(VerificationFailed(msg).into()),
        None => Ok(()),
    }
}

pub fn produce(cli: &Cli) -> Result<Produced> {
    match &cli.command {
        Command::Eval(a) => {
            let v = match a.method {
                Method::Formula => schemmel(a.n, a.r),
                Method::Count => schemmel_by_count(a.n, a.r),
            };
            Ok(Produced::text(format!("{v}\n")))
        }
        Command::Sieve(a) => {
            let table = sieve_table(cli, a.r, a.lo, a.hi)?;
            let mut out = String::with_capacity(24 * table.values().len());
            if a.format == Format::Csv {
                out.push_str("n,s_r\n");
            }
            for (n, s) in table.iter() {
                match a.format {
                    Format::Json => writeln!(out, "{{\"n\":{n},\"s_r\":{s}}}")?,
                    Format::Csv => writeln!(out, "{n},{s}")?,
                }
            }
            Ok(Produced::text(out))
        }
        Command::Enumerate(a) => {
            let cert = certify(cli, a.r, a.upto)?;
            Ok(Produced::text(format_members(&cert, a.format)?))
        }
        Command::IsMember(a) => {
            let v = match is_sparsely_with(a.n, a.r, &enumerate_config(cli))? {
                Membership::Member(rec) => json!({
                    "n": rec.n, "r": a.r, "member": true, "s_r": rec.s_r,
                    "horizon": rec.horizon, "degenerate": rec.is_degenerate(),
                }),
                Membership::NotInClass => json!({ "n": a.n, "r": a.r, "member": false, "reason": "not_in_class" }),
                Membership::Refuted { refuter, refuter_s_r } => json!({
                    "n": a.n, "r": a.r, "member": false, "reason": "refuted",
                    "s_r": schemmel(a.n, a.r), "refuter": refuter, "refuter_s_r": refuter_s_r,
                }),
            };
            Ok(Produced::text(json_line(&v)?))
        }
        Command::Construct(a) => {
            let params = ConstructionParams { r: a.r, k: a.k, ell: a.ell, d: a.d };
            let report = validate_params(&params)?;
            if !report.is_valid() {
                return Err(UsageError(format!("invalid construction parameters: {report}")).into());
            }
            let n = build_member(&params)?;
            Ok(Produced::text(json_line(&json!({ "r": a.r, "k": a.k, "ell": a.ell, "d": a.d, "n": n }))?))
        }
        Command::ConstructFamily(a) => {
            let mut out = String::new();
            for m in doubling_family(a.r, a.k_max)? {
                out.push_str(&json_line(&m)?);
            }
            Ok(Produced::text(out))
        }
        Command::Jacobsthal(a) => Ok(Produced::text(json_line(&jacobsthal_of_primorial(a.r)?)?)),
        Command::Lambda(a) => Ok(Produced::text(json_line(&lambda_root(a.k, a.r)?)?)),
        Command::Verify(a) => verify(cli, a.r, a.upto),
        Command::Report(a) => {
            let cert = certify(cli, a.r, a.upto)?;
            let rep = ratio_report(RatioSource::Certificate(&cert), a.r, a.big_k, a.big_l as usize)?;
            eprintln!(
                "P_{}/log n above 1/lambda_{}({}) = {:.6} in {} of {} row(s) (informational)",
                a.big_k,
                a.big_k,
                a.r,
                rep.lambda_inv,
                rep.pk_exceedances(),
                rep.rows.len()
            );
            Ok(Produced::text(rep.to_csv()))
        }
        Command::Replay(a) => replay(&a.manifest),
    }
}

fn sieve_table(cli: &Cli, r: u64, lo: u64, hi: u64) -> Result<SrTable> {
    let config = SieveConfig {
        segment_len: cli.global.segment_len as usize,
        max_entries: DEFAULT_MAX_ENTRIES,
        threads: cli.global.threads as usize,
    };
    let Some(dir) = cache::cache_dir() else {
        return Ok(sieve_sr_range_with(lo, hi, r, &config)?);
    };
    let path = cache::cache_path(&dir, r, lo, hi);
    match cache::read(&path, r, lo, hi) {
        Ok(table) => return Ok(table),
        Err(CacheError::Invalid(msg)) => eprintln!("warning: cache invalid ({}): {msg}; recomputing", path.display()),
        Err(CacheError::Io(e)) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(e).with_context(|| format!("reading cache {}", path.display())),
    }
    let table = sieve_sr_range_with(lo, hi, r, &config)?;
    cache::write(&table, &path).with_context(|| format!("writing cache {}", path.display()))?;
    Ok(table)
}

#[derive(Serialize)]
struct MemberLine<'a> {
    n: u64,
    s_r: u64,
    factors: &'a [(u64, u32)],
    horizon: u64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    degenerate: bool,
}

fn format_members(cert: &EnumerationCertificate, format: Format) -> Result<String> {
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str("n,s_r,factors,horizon,degenerate\n");
    }
    for rec in &cert.members {
        let factors = rec.factors.factors();
        match format {
            Format::Json => out.push_str(&json_line(&MemberLine {
                n: rec.n,
                s_r: rec.s_r,
                factors,
                horizon: rec.horizon,
                degenerate: rec.is_degenerate(),
            })?),
            Format::Csv => {
                let f: Vec<String> =
                    factors.iter().map(|&(p, a)| if a == 1 { p.to_string() } else { format!("{p}^{a}") }).collect();
                writeln!(out, "{},{},{},{},{}", rec.n, rec.s_r, f.join("*"), rec.horizon, rec.is_degenerate())?;
            }
        }
    }
    Ok(out)
}

fn verify(cli: &Cli, r: u64, upto: u64) -> Result<Produced> {
    let cert = certify(cli, r, upto)?;
    let bounds = verify_prime_divisor_bounds(&cert)?;
    let structure = verify_prime_power_structure(&cert)?;
    let ratio = verify_prime_ratio_bound(PRIME_RATIO_LIMIT)?;
    let conjectures = scan_conjectures(&cert);

    let mut failed = Vec::new();
    if !bounds.passed() {
        failed.push(format!("{} prime-divisor bound violation(s)", bounds.violations.len()));
    }
    if !structure.passed() {
        failed.push("prime-power structure".to_string());
    }
    if !ratio.passed() {
        failed.push(format!("{} consecutive-prime ratio violation(s)", ratio.violations.len()));
    }
    let mut findings = Vec::new();
    if !conjectures.prime_squares.is_empty() {
        findings.push(format!("r={r}: prime-square members {:?}", conjectures.prime_squares));
    }
    if !conjectures.top_cubes.is_empty() {
        findings.push(format!("r={r}: members divisible by P_1^3 {:?}", conjectures.top_cubes));
    }
    if !findings.is_empty() {
        eprintln!("==================== CONJECTURE COUNTEREXAMPLE ====================");
        for f in &findings {
            eprintln!("  {f}");
        }
        eprintln!("====================================================================");
    }

    let doc = json!({
        "r": r,
        "upto": upto,
        "horizon": cert.horizon,
        "members": cert.members.len(),
        "passed": failed.is_empty(),
        "prime_divisor_bounds": bounds,
        "prime_power_structure": structure,
        "prime_ratio": ratio,
        "conjectures": conjectures,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(Produced {
        bytes: text.into_bytes(),
        findings,
        failure: (!failed.is_empty()).then(|| format!("verification failed: {}", failed.join(", "))),
    })
}

fn replay(path: &std::path::Path) -> Result<Produced> {
    use clap::Parser;

    let manifest = RunManifest::read(path)?;
    if manifest.command == "replay" {
        return Err(UsageError("a replay manifest cannot itself be replayed".into()).into());
    }
    let mut outputs = Vec::new();
    let mut all_match = true;
    for output in &manifest.outputs {
        let args = manifest.replay_args(std::path::Path::new(&output.path));
        let cli = Cli::try_parse_from(&args).map_err(|e| UsageError(format!("manifest arguments: {e}")))?;
        let actual = sha256_hex(&produce(&cli)?.bytes);
        let matched = actual == output.sha256;
        all_match &= matched;
        outputs.push(json!({ "path": output.path, "expected": output.sha256, "actual": actual, "reproduced": matched }));
    }
    let doc = json!({
        "manifest": path.to_string_lossy(),
        "command": manifest.command,
        "artifact_version_matches": manifest.artifact_version == env!("CARGO_PKG_VERSION"),
        "outputs": outputs,
        "reproduced": all_match,
    });
    Ok(Produced {
        bytes: json_line(&doc)?.into_bytes(),
        failure: (!all_match).then(|| "replayed output digests differ from the manifest".to_string()),
        ..Default::default()
    })
}
