//! `schemmel`: evaluate, sieve, enumerate and verify Schemmel totient data from the shell.

mod cache;
mod commands;
mod manifest;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use schemmel::analysis::AnalysisError;
use schemmel::arith::{ArithError, DEFAULT_SEGMENT_LEN};
use schemmel::certify::{CertifyError, DEFAULT_HORIZON_CAP};
use schemmel::construct::ConstructError;
use schemmel::jacobsthal::JacobsthalError;

pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "schemmel", version, about = "Schemmel totients and sparsely Schemmel totient numbers")]
#[command(after_help = "Exit codes: 0 success, 1 verification failure, 2 inconclusive (horizon cap), \
64 usage or unsupported input, 74 I/O failure.\n\
Set SCHEMMEL_CACHE_DIR to cache sieved tables between `sieve` runs.")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GlobalOpts {
    /// Worker threads; 1 gives the single-threaded baseline (output is identical either way).
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub threads: u64,
    /// Entries per sieve segment.
    #[arg(long, global = true, default_value_t = DEFAULT_SEGMENT_LEN as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub segment_len: u64,
    /// Hard cap on the certification horizon.
    #[arg(long, global = true, default_value_t = DEFAULT_HORIZON_CAP, value_parser = clap::value_parser!(u64).range(2..))]
    pub horizon_cap: u64,
    /// Write the result here instead of standard output, with a manifest beside it.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Count,
}

fn order() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(1..)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EvalArgs {
    #[arg(long, value_parser = order())]
    pub r: u64,
    #[arg(long, value_parser = order())]
    pub n: u64,
    /// `formula` multiplies prime-power factors; `count` counts admissible residues.
    #[arg(long, value_enum, default_value_t = Method::Formula)]
    pub method: Method,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SieveArgs {
    #[arg(long, value_parser = order())]
    pub r: u64,
    #[arg(long, default_value_t = 1, value_parser = order())]
    pub lo: u64,
    #[arg(long, value_parser = order())]
    pub hi: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EnumerateArgs {
    #[arg(long, value_parser = order())]
    pub r: u64,
    #[arg(long, value_parser = order())]
    pub upto: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MemberArgs {
    #[arg(long, value_parser = order())]
    pub n: u64,
    #[arg(long, value_parser = order())]
    pub r: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConstructArgs {
    #[arg(long, value_parser = order())]
    pub r: u64,
    /// Prime index; must be at least b(r) + 2.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub ell: usize,
    #[arg(long, default_value_t = 1, value_parser = order())]
    pub d: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FamilyArgs {
    #[arg(long, value_parser = order())]
    pub r: u64,
    #[arg(long)]
    pub k_max: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OrderArgs {
    #[arg(long, value_parser = order())]
    pub r: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LambdaArgs {
    #[arg(long, value_parser = order())]
    pub r: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub k: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_parser = order())]
    pub r: u64,
    #[arg(long, value_parser = order())]
    pub upto: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReportArgs {
    #[arg(long, value_parser = order())]
    pub r: u64,
    #[arg(long, value_parser = order())]
    pub upto: u64,
    /// Index of the `P_K` column.
    #[arg(long = "K", value_name = "K", default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
    #[serde(rename = "K")]
    pub big_k: u32,
    /// Index of the `Q_L` column.
    #[arg(long = "L", value_name = "L", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    #[serde(rename = "L")]
    pub big_l: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// S_r(n) for one n.
    Eval(EvalArgs),
    /// S_r over [lo, hi], one value per line.
    Sieve(SieveArgs),
    /// Certified members of F_r up to a bound.
    Enumerate(EnumerateArgs),
    /// Decide whether n is in F_r, with a refuter if not.
    IsMember(MemberArgs),
    /// Build the member d * p_(k+ell) * p_(b+1) * ... * p_(k-1).
    Construct(ConstructArgs),
    /// The doubling family n(k) for b(r)+2 <= k <= k-max.
    ConstructFamily(FamilyArgs),
    /// J(r#) with its smallest witness.
    Jacobsthal(OrderArgs),
    /// The root lambda_k(r).
    Lambda(LambdaArgs),
    /// Check the prime-divisor bounds and structure results on a certified enumeration.
    Verify(VerifyArgs),
    /// CSV table of prime-divisor growth ratios for certified members.
    Report(ReportArgs),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Sieve(_) => "sieve",
            Command::Enumerate(_) => "enumerate",
            Command::IsMember(_) => "is-member",
            Command::Construct(_) => "construct",
            Command::ConstructFamily(_) => "construct-family",
            Command::Jacobsthal(_) => "jacobsthal",
            Command::Lambda(_) => "lambda",
            Command::Verify(_) => "verify",
            Command::Report(_) => "report",
            Command::Replay(_) => "replay",
        }
    }

    fn args_value(&self) -> serde_json::Result<serde_json::Value> {
        match self {
            Command::Eval(a) => serde_json::to_value(a),
            Command::Sieve(a) => serde_json::to_value(a),
            Command::Enumerate(a) => serde_json::to_value(a),
            Command::IsMember(a) => serde_json::to_value(a),
            Command::Construct(a) => serde_json::to_value(a),
            Command::ConstructFamily(a) => serde_json::to_value(a),
            Command::Jacobsthal(a) => serde_json::to_value(a),
            Command::Lambda(a) => serde_json::to_value(a),
            Command::Verify(a) => serde_json::to_value(a),
            Command::Report(a) => serde_json::to_value(a),
            Command::Replay(a) => serde_json::to_value(a),
        }
    }
}

impl Cli {
    /// Every flag of this invocation as `long name -> value`.
    pub fn parameters(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for value in [serde_json::to_value(&self.global), self.command.args_value()] {
            let serde_json::Value::Object(map) = value.expect("flag structs serialize") else {
                unreachable!("flag structs serialize to objects")
            };
            for (k, v) in map {
                let v = match v {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                out.insert(k, v);
            }
        }
        out
    }
}

/// A flag combination the library rejects as a precondition failure.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// A verification suite reported a failure; the report itself has already been written.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct VerificationFailed(pub String);

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if cause.is::<VerificationFailed>() {
            return EXIT_VERIFICATION;
        }
        if let Some(e) = cause.downcast_ref::<CertifyError>() {
            return match e {
                CertifyError::Inconclusive { .. } => EXIT_INCONCLUSIVE,
                CertifyError::ThreadPool(_) | CertifyError::Arith(ArithError::ThreadPool(_)) => EXIT_INTERNAL,
                _ => EXIT_USAGE,
            };
        }
        if let Some(e) = cause.downcast_ref::<ArithError>() {
            return if matches!(e, ArithError::ThreadPool(_)) { EXIT_INTERNAL } else { EXIT_USAGE };
        }
        if cause.is::<JacobsthalError>() || cause.is::<ConstructError>() || cause.is::<AnalysisError>() {
            return EXIT_USAGE;
        }
        if cause.is::<std::io::Error>() || cause.is::<cache::CacheError>() {
            return EXIT_IO;
        }
    }
    EXIT_INTERNAL
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli, true) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
