//! Run configuration: a flat TOML file merged with command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use minvec::residue::is_odd_prime;

use crate::CliError;

/// Keys accepted in the configuration file. Every key is optional; a flag
/// given on the command line wins over the file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub levels: Option<String>,
    pub primes: Option<Vec<u64>>,
    pub exponents: Option<Vec<u32>>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub weight: Option<u32>,
    pub maass_t: Option<f64>,
    pub parity: Option<u8>,
    pub coefficients: Option<String>,
    pub delta_pi: Option<f64>,
    pub adjoint_value: Option<f64>,
    pub rows_per_decade: Option<u32>,
    pub x_steps: Option<usize>,
    pub y_max: Option<f64>,
    pub samples: Option<u64>,
    pub oracle_samples: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// `(p, n)` with `p` an odd prime and `n >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Level {
    pub p: u64,
    pub n: u32,
}

/// Parses `"3:1,5:2"`; a bare prime means exponent 1. The empty string is
/// the empty list.
pub fn parse_levels(s: &str) -> Result<Vec<Level>, CliError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (p, n) = match item.split_once(':') {
            Some((p, n)) => (p.trim(), n.trim()),
            None => (item, "1"),
        };
        let p: u64 = p
            .parse()
            .map_err(|_| CliError::Config(format!("bad prime {p:?} in {item:?}")))?;
        let n: u32 = n
            .parse()
            .map_err(|_| CliError::Config(format!("bad exponent {n:?} in {item:?}")))?;
        out.push(check_level(p, n)?);
    }
    Ok(out)
}

pub fn check_level(p: u64, n: u32) -> Result<Level, CliError> {
    if !is_odd_prime(p) {
        return Err(CliError::Config(format!("{p} is not an odd prime")));
    }
    if n == 0 {
        return Err(CliError::Config(format!("exponent at {p} must be positive")));
    }
    Ok(Level { p, n })
}

/// Levels from either `levels = "p:n,..."` or the `primes` x `exponents` grid.
pub fn resolve_levels(
    levels: Option<&str>,
    primes: Option<&[u64]>,
    exponents: Option<&[u32]>,
    default: &str,
) -> Result<Vec<Level>, CliError> {
    match (levels, primes) {
        (Some(_), Some(_)) => Err(CliError::Config("give either levels or primes, not both".into())),
        (Some(l), None) => parse_levels(l),
        (None, Some(ps)) => {
            let ns = exponents.unwrap_or(&[1]);
            let mut out = Vec::new();
            for &p in ps {
                for &n in ns {
                    out.push(check_level(p, n)?);
                }
            }
            Ok(out)
        }
        (None, None) => parse_levels(default),
    }
}

/// The level `N = prod p^n` of a factorization with distinct primes.
pub fn level_of(levels: &[Level]) -> Result<u64, CliError> {
    let mut seen = Vec::new();
    let mut n: u64 = 1;
    for l in levels {
        if seen.contains(&l.p) {
            return Err(CliError::Config(format!("prime {} repeated in the level", l.p)));
        }
        seen.push(l.p);
        n = (l.p as u128)
            .checked_pow(l.n)
            .and_then(|x| (n as u128).checked_mul(x))
            .filter(|x| *x < 1 << 40)
            .ok_or_else(|| CliError::Config("level too large".into()))? as u64;
    }
    Ok(n)
}

/// Lower-case hex SHA-256 of the canonical JSON form of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
