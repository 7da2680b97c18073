//! `minvec`: verification suites, tables, and sup-norm scans.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit status 2, raised before any computation.
    Config(String),
    /// A check failed; exit status 1.
    Verification(String),
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<minvec::Error> for CliError {
    fn from(e: minvec::Error) -> Self {
        use minvec::Error as E;
        match e {
            E::Config(_) | E::UnsupportedPrime(_) | E::NotInert(..) | E::Parse { .. } | E::Ramanujan { .. } => {
                CliError::Config(e.to_string())
            }
            E::Verification(_) => CliError::Verification(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// TOML file of `key = value` settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for report.json and samples.csv.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated `p:n` list, e.g. `3:1,5:1`.
    #[arg(long, global = true)]
    pub levels: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the invariant suites at each (p, n).
    Verify(commands::VerifyArgs),
    /// Admissible characters theta with their a_theta.
    CharacterTable,
    /// Kirillov supports and values of the minimal vector's Whittaker function.
    Whittaker,
    /// The matrix coefficient Phi_0 on K / K(2n) and its convolution identity.
    MatrixCoeff,
    /// Scan |phi| over the generating domain.
    ScanSupnorm(commands::ScanArgs),
    /// Local QUE periods over a grid of (p, n).
    Que(commands::QueArgs),
}

#[derive(Parser, Debug)]
#[command(name = "minvec", version, about = "Minimal vectors of supercuspidal GL(2) representations")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

fn run(outer: Cli) -> Result<(), CliError> {
    let file = match &outer.common.config {
        Some(p) => config::FileConfig::load(p)?,
        None => config::FileConfig::default(),
    };
    let threads = outer.common.threads.or(file.threads);
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Config("threads must be positive".into()));
        }
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let ctx = commands::Context::new(&outer.common, file)?;
    match outer.command {
        Command::Verify(a) => commands::verify(&ctx, &a),
        Command::CharacterTable => commands::character_table(&ctx),
        Command::Whittaker => commands::whittaker(&ctx),
        Command::MatrixCoeff => commands::matrix_coeff(&ctx),
        Command::ScanSupnorm(a) => commands::scan(&ctx, &a),
        Command::Que(a) => commands::que(&ctx, &a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
