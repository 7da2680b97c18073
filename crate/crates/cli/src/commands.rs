//! Subcommand implementations. Each writes `report.json` and `samples.csv`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use minvec::characters::{a_theta_solutions, all_characters, character_table as char_rows, enumerate_theta};
use minvec::characters::{MinimalVectorSpec, ThetaChar};
use minvec::gl2::{enumerate_k_mod, enumerate_kt_mod, kt_index, Mat2Local, TorusSpec};
use minvec::global::arch::ArchParams;
use minvec::global::coeffs::{CoefficientKind, CoefficientSource};
use minvec::global::expansion::ExpansionConfig;
use minvec::global::ramified::{diagonal_local, unit_classes, RamifiedData};
use minvec::global::scan::{scan_supnorm, GridSpec, ScanReport};
use minvec::minimal_vector::{
    convolution_check, multiplicativity_exhaustive, multiplicativity_sampled, random_support_element,
    support_profile, whittaker_closed, whittaker_oracle, CheckOutcome, MatrixCoefficientTable, OracleConfig,
};
use minvec::que::{distinguished, que_period, watson_ip, TorusMatrixCoefficient};
use minvec::residue::{ipow, LocalElement};

use crate::config::{config_hash, level_of, resolve_levels, FileConfig, Level};
use crate::{CliError, Common};

/// Pair count above which multiplicativity is sampled rather than exhaustive.
const EXHAUSTIVE_PAIRS: u64 = 1_000_000_000;
/// `|K / K(2n)| * |K_T(n) / K(2n)|` above which the convolution check is skipped.
const CONVOLUTION_WORK: u128 = 20_000_000_000;

pub struct Context {
    pub common: Common,
    pub file: FileConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Context {
    pub fn new(common: &Common, file: FileConfig) -> Result<Self, CliError> {
        let out_dir = common
            .out_dir
            .clone()
            .or_else(|| file.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        let seed = common.seed.or(file.seed).unwrap_or(1);
        Ok(Context {
            common: common.clone(),
            file,
            out_dir,
            seed,
        })
    }

    fn levels(&self, default: &str) -> Result<Vec<Level>, CliError> {
        let flag = self.common.levels.as_deref();
        if flag.is_some() {
            return resolve_levels(flag, None, None, default);
        }
        resolve_levels(
            self.file.levels.as_deref(),
            self.file.primes.as_deref(),
            self.file.exponents.as_deref(),
            default,
        )
    }

    fn write<C: Serialize, B: Serialize>(
        &self,
        command: &str,
        config: &C,
        quantities: &[&str],
        passed: Option<bool>,
        body: &B,
        csv: &str,
    ) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Report<'a, C, B> {
            tool: &'static str,
            version: &'static str,
            command: &'a str,
            config_hash: String,
            config: &'a C,
            quantities: &'a [&'a str],
            #[serde(skip_serializing_if = "Option::is_none")]
            passed: Option<bool>,
            result: &'a B,
        }
        let report = Report {
            tool: "minvec",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_hash: config_hash(&(command, config)),
            config,
            quantities,
            passed,
            result: body,
        };
        std::fs::create_dir_all(&self.out_dir)?;
        let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
        std::fs::write(self.out_dir.join("report.json"), json + "\n")?;
        std::fs::write(self.out_dir.join("samples.csv"), csv)?;
        println!("wrote {}", self.out_dir.join("report.json").display());
        Ok(())
    }
}

fn to_levels_string(levels: &[Level]) -> String {
    levels.iter().map(|l| format!("{}:{}", l.p, l.n)).collect::<Vec<_>>().join(",")
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Random pairs for the multiplicativity check when exhaustion is too large.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Random points for the closed-form versus oracle comparison.
    #[arg(long)]
    pub oracle_samples: Option<u64>,
    /// Replace theta by a conductor-1 character (exercises the failure path).
    #[arg(long)]
    pub corrupt_theta: bool,
}

#[derive(Serialize)]
struct VerifyConfig {
    levels: String,
    seed: u64,
    samples: u64,
    oracle_samples: u64,
    corrupt_theta: bool,
}

#[derive(Serialize, Clone)]
struct CheckRecord {
    name: String,
    quantity: &'static str,
    passed: bool,
    checked: u64,
    violations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl CheckRecord {
    fn from_outcome(quantity: &'static str, o: CheckOutcome) -> Self {
        CheckRecord {
            passed: o.passed(),
            name: o.name,
            quantity,
            checked: o.checked,
            violations: o.violations,
            counterexample: o.counterexample,
            detail: None,
        }
    }

    fn simple(name: &str, quantity: &'static str, passed: bool, checked: u64, detail: String) -> Self {
        CheckRecord {
            name: name.to_string(),
            quantity,
            passed,
            checked,
            violations: (!passed) as u64,
            counterexample: None,
            detail: Some(detail),
        }
    }

    fn error(name: &str, quantity: &'static str, e: impl std::fmt::Display) -> Self {
        CheckRecord {
            name: name.to_string(),
            quantity,
            passed: false,
            checked: 0,
            violations: 1,
            counterexample: Some(e.to_string()),
            detail: None,
        }
    }
}

#[derive(Serialize)]
struct LevelResult {
    p: u64,
    n: u32,
    passed: bool,
    checks: Vec<CheckRecord>,
}

const VERIFY_TAGS: &[&str] = &[
    "chi-multiplicativity",
    "a-theta-existence-uniqueness",
    "convolution-idempotence",
    "whittaker-closed-vs-oracle",
    "kirillov-support-profile",
    "kt-volume",
];

pub fn verify(ctx: &Context, args: &VerifyArgs) -> Result<(), CliError> {
    let levels = ctx.levels("3:1")?;
    let cfg = VerifyConfig {
        levels: to_levels_string(&levels),
        seed: ctx.seed,
        samples: args.samples.or(ctx.file.samples).unwrap_or(100_000),
        oracle_samples: args.oracle_samples.or(ctx.file.oracle_samples).unwrap_or(200),
        corrupt_theta: args.corrupt_theta,
    };
    let mut results = Vec::new();
    let mut csv = String::from("p,n,check,quantity,passed,checked,violations\n");
    for l in &levels {
        let checks = verify_level(*l, &cfg)?;
        for c in &checks {
            let _ = writeln!(
                csv,
                "{},{},\"{}\",{},{},{},{}",
                l.p, l.n, c.name, c.quantity, c.passed, c.checked, c.violations
            );
            let mark = if c.passed { "pass" } else { "FAIL" };
            println!("[{mark}] ({}, {}) {}", l.p, l.n, c.name);
        }
        results.push(LevelResult {
            p: l.p,
            n: l.n,
            passed: checks.iter().all(|c| c.passed),
            checks,
        });
    }
    let passed = results.iter().all(|r| r.passed);
    ctx.write("verify", &cfg, VERIFY_TAGS, Some(passed), &results, &csv)?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<String> = results
            .iter()
            .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(move |c| format!("({}, {}) {}", r.p, r.n, c.name)))
            .collect();
        Err(CliError::Verification(failed.join("; ")))
    }
}

fn corrupt_theta(spec: &TorusSpec) -> Result<ThetaChar, CliError> {
    all_characters(spec)?
        .into_iter()
        .find(|t| t.conductor == 1)
        .ok_or_else(|| CliError::Runtime("no conductor-1 character".into()))
}

fn verify_level(l: Level, cfg: &VerifyConfig) -> Result<Vec<CheckRecord>, CliError> {
    let (p, n) = (l.p, l.n);
    let spec = TorusSpec::new(p, n)?;
    let mut checks = Vec::new();

    // a_theta for every admissible theta, or the corrupted one
    let mv = if cfg.corrupt_theta {
        let theta = corrupt_theta(&spec)?;
        match MinimalVectorSpec::new(spec, theta) {
            Ok(mv) => mv,
            Err(e) => {
                checks.push(CheckRecord::error("a_theta exists for the chosen theta", "a-theta-existence-uniqueness", e));
                return Ok(checks);
            }
        }
    } else {
        match enumerate_theta(&spec) {
            Ok(thetas) => {
                let mut bad = Vec::new();
                for t in &thetas {
                    let sols = a_theta_solutions(t, &spec)?;
                    if sols.len() != 1 {
                        bad.push(format!("theta #{}: {} solutions", t.index, sols.len()));
                    }
                }
                checks.push(CheckRecord {
                    name: format!("a_theta unique for all {} admissible theta", thetas.len()),
                    quantity: "a-theta-existence-uniqueness",
                    passed: bad.is_empty() && !thetas.is_empty(),
                    checked: thetas.len() as u64,
                    violations: bad.len() as u64,
                    counterexample: bad.first().cloned(),
                    detail: None,
                });
            }
            Err(e) => checks.push(CheckRecord::error(
                "a_theta for all admissible theta",
                "a-theta-existence-uniqueness",
                e,
            )),
        }
        match MinimalVectorSpec::first(p, n) {
            Ok(mv) => mv,
            Err(e) => {
                checks.push(CheckRecord::error("minimal vector data", "a-theta-existence-uniqueness", e));
                return Ok(checks);
            }
        }
    };

    // volumes and multiplicativity from the K_T(n) table where it fits
    let table = MatrixCoefficientTable::build(&mv).ok();
    let expected_index = kt_index(p, n);
    match &table {
        Some(t) => {
            let delta = t.delta();
            let ok = *delta.numer() == 1 && *delta.denom() == expected_index;
            checks.push(CheckRecord::simple(
                "vol(K_T(n)) = 1/(q^(2n-1)(q-1)) by coset count",
                "kt-volume",
                ok,
                t.kt.k_order,
                format!("delta = {delta}, q^(2n) delta = {}", delta * ipow(p, 2 * n)),
            ));
            let members = t.kt.members.len() as u64;
            if members.saturating_mul(members) <= EXHAUSTIVE_PAIRS {
                checks.push(CheckRecord::from_outcome("chi-multiplicativity", multiplicativity_exhaustive(t)));
            } else {
                checks.push(CheckRecord::from_outcome(
                    "chi-multiplicativity",
                    multiplicativity_sampled(&mv, cfg.samples, cfg.seed)?,
                ));
            }
            let work = t.kt.k_order as u128 * members as u128;
            if work <= CONVOLUTION_WORK {
                let rec = match convolution_check(t) {
                    Ok(r) => CheckRecord::simple(
                        "Phi_0 * Phi_0 = delta Phi_0 on K / K(2n)",
                        "convolution-idempotence",
                        r.delta == r.norm_sq,
                        r.h_checked,
                        format!("delta = {}, int |Phi_0|^2 = {}", r.delta, r.norm_sq),
                    ),
                    Err(e) => CheckRecord::error("Phi_0 * Phi_0 = delta Phi_0", "convolution-idempotence", e),
                };
                checks.push(rec);
            } else {
                println!("skipping the convolution check at ({p}, {n}): {work} group operations");
            }
        }
        None => {
            checks.push(volume_mod_kn(&spec)?);
            checks.push(CheckRecord::from_outcome(
                "chi-multiplicativity",
                multiplicativity_sampled(&mv, cfg.samples, cfg.seed)?,
            ));
        }
    }

    checks.push(oracle_check(&mv, cfg.oracle_samples, cfg.seed)?);
    checks.push(support_check(&mv)?);
    Ok(checks)
}

/// `[K : K_T(n)]` from coset counts mod `K(n)`, for levels too large for the table.
fn volume_mod_kn(spec: &TorusSpec) -> Result<CheckRecord, CliError> {
    let (p, n) = (spec.p, spec.n);
    let k = enumerate_k_mod(p, n, 100_000_000)?.len() as u64;
    let kt = enumerate_kt_mod(spec, n, 100_000_000)?.len() as u64;
    let ok = kt > 0 && k % kt == 0 && k / kt == kt_index(p, n);
    Ok(CheckRecord::simple(
        "vol(K_T(n)) = 1/(q^(2n-1)(q-1)) by coset count",
        "kt-volume",
        ok,
        k,
        format!("[K : K_T(n)] = {k}/{kt}"),
    ))
}

/// Closed form against the integral oracle, up to one fitted scalar.
fn oracle_check(mv: &MinimalVectorSpec, samples: u64, seed: u64) -> Result<CheckRecord, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, n) = (mv.p(), mv.n());
    let prec = 2 * n + 8;
    let cfg = OracleConfig::default();
    let mut scalar: Option<Complex64> = None;
    let mut bad = 0u64;
    let mut first = None;
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let g = if i % 2 == 0 {
            random_support_element(&mut rng, mv, prec)
        } else {
            // a(y) with y of random valuation: mostly off the support
            let big = ipow(p, prec.min(10));
            let u = rng.gen_range(1..big) | 1;
            let u = if u % p == 0 { u + 2 } else { u };
            Mat2Local::a(LocalElement::from_parts(p, rng.gen_range(-4..3), u, prec), prec)
        };
        let closed = whittaker_closed(mv, &g)?.to_complex();
        let oracle = whittaker_oracle(mv, &g, &cfg)?;
        let fail = if closed.norm() == 0.0 {
            oracle.norm() > 1e-9
        } else {
            let s = *scalar.get_or_insert(closed / oracle);
            let dev = (closed - s * oracle).norm() / closed.norm();
            worst = worst.max(dev);
            dev >= 1e-9
        };
        if fail {
            bad += 1;
            first.get_or_insert(format!("g = {g}: closed {closed}, oracle {oracle}"));
        }
    }
    Ok(CheckRecord {
        name: "Whittaker closed form agrees with the integral up to one scalar".into(),
        quantity: "whittaker-closed-vs-oracle",
        passed: bad == 0 && samples > 0,
        checked: samples,
        violations: bad,
        counterexample: first,
        detail: Some(format!(
            "scalar {:.12}, max relative deviation {worst:.2e}",
            scalar.map_or(0.0, |s| s.re)
        )),
    })
}

/// Every `k` in `K / K(n)`: `y -> W(a(y) k)` is supported on one class.
fn support_check(mv: &MinimalVectorSpec) -> Result<CheckRecord, CliError> {
    let (p, n) = (mv.p(), mv.n());
    let prec = mv.torus.prec;
    let pn = ipow(p, n);
    let ks = enumerate_k_mod(p, n, 10_000_000)?;
    let units: Vec<u64> = (1..pn).filter(|u| u % p != 0).collect();
    let mut bad = 0u64;
    let mut first = None;
    for k in &ks {
        let kl = Mat2Local::from_residues(p, *k, prec);
        let b = support_profile(mv, &kl)?;
        let mut classes = Vec::new();
        for v in [-2 * n as i64 - 1, -2 * n as i64, -2 * n as i64 + 1, 0] {
            for &u in &units {
                let g = Mat2Local::a(LocalElement::from_parts(p, v, u, prec), prec) * kl;
                if !whittaker_closed(mv, &g)?.is_zero() {
                    classes.push((v, u));
                }
            }
        }
        if classes != [(-2 * n as i64, b)] {
            bad += 1;
            first.get_or_insert(format!("k = {k:?}: support {classes:?}, profile {b}"));
        }
    }
    Ok(CheckRecord {
        name: "Kirillov support is one class p^(-2n)(b + p^n) for every k in K / K(n)".into(),
        quantity: "kirillov-support-profile",
        passed: bad == 0,
        checked: ks.len() as u64,
        violations: bad,
        counterexample: first,
        detail: None,
    })
}

// ---------------------------------------------------------------------------
// character-table, whittaker, matrix-coeff
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LevelsConfig {
    levels: String,
}

pub fn character_table(ctx: &Context) -> Result<(), CliError> {
    let levels = ctx.levels("3:1")?;
    #[derive(Serialize)]
    struct Table {
        p: u64,
        n: u32,
        alpha: u64,
        rows: Vec<minvec::characters::CharacterRow>,
    }
    let mut tables = Vec::new();
    let mut csv = String::from("p,n,index,conductor,a_theta,exponents\n");
    for l in &levels {
        let spec = TorusSpec::new(l.p, l.n)?;
        let rows = char_rows(&spec)?;
        for r in &rows {
            let e: Vec<String> = r.exponents.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(csv, "{},{},{},{},{},{}", l.p, l.n, r.index, r.conductor, r.a_theta, e.join(" "));
        }
        tables.push(Table {
            p: l.p,
            n: l.n,
            alpha: spec.alpha,
            rows,
        });
    }
    let cfg = LevelsConfig {
        levels: to_levels_string(&levels),
    };
    ctx.write("character-table", &cfg, &["admissible-theta", "a-theta"], None, &tables, &csv)
}

pub fn whittaker(ctx: &Context) -> Result<(), CliError> {
    let levels = ctx.levels("3:1")?;
    #[derive(Serialize)]
    struct Summary {
        p: u64,
        n: u32,
        frak_a: u64,
        magnitude_sq: u64,
        cosets: usize,
        classes_hit: usize,
    }
    let mut out = Vec::new();
    let mut csv = String::from("p,n,k,b,magnitude_sq,phase_num,phase_den\n");
    for l in &levels {
        let mv = MinimalVectorSpec::first(l.p, l.n)?;
        let (p, n) = (l.p, l.n);
        let prec = mv.torus.prec;
        let pn = ipow(p, n);
        let ks = enumerate_k_mod(p, n, 10_000_000)?;
        let mut hit = std::collections::BTreeSet::new();
        for k in &ks {
            let kl = Mat2Local::from_residues(p, *k, prec);
            let b = support_profile(&mv, &kl)?;
            hit.insert(b);
            let y = LocalElement::from_parts(p, -2 * n as i64, b, prec);
            let w = whittaker_closed(&mv, &(Mat2Local::a(y, prec) * kl))?;
            let (num, den) = w.phase.map_or((0, 0), |r| (r.num(), r.den()));
            let _ = writeln!(
                csv,
                "{p},{n},{} {} {} {},{b},{},{num},{den}",
                k[0], k[1], k[2], k[3], w.magnitude_sq
            );
        }
        out.push(Summary {
            p,
            n,
            frak_a: mv.frak_a(),
            magnitude_sq: (p - 1) * ipow(p, n - 1),
            cosets: ks.len(),
            classes_hit: hit.len(),
        });
        debug_assert!(hit.iter().all(|b| b % p != 0 && *b < pn));
    }
    let cfg = LevelsConfig {
        levels: to_levels_string(&levels),
    };
    ctx.write("whittaker", &cfg, &["kirillov-support-profile", "whittaker-closed-form"], None, &out, &csv)
}

pub fn matrix_coeff(ctx: &Context) -> Result<(), CliError> {
    let levels = ctx.levels("3:1")?;
    #[derive(Serialize)]
    struct Summary {
        p: u64,
        n: u32,
        delta: String,
        q2n_delta: String,
        norm_sq: Option<String>,
        h_checked: Option<u64>,
        support_size: usize,
    }
    let mut out = Vec::new();
    let mut csv = String::from("p,n,a,b,c,d,chi_num,chi_den\n");
    for l in &levels {
        let mv = MinimalVectorSpec::first(l.p, l.n)?;
        let table = MatrixCoefficientTable::build(&mv)?;
        let conv = convolution_check(&table).ok();
        for (x, v) in table.kt.members.iter().zip(&table.values) {
            let _ = writeln!(csv, "{},{},{},{},{},{},{v},{}", l.p, l.n, x[0], x[1], x[2], x[3], table.den);
        }
        let delta = table.delta();
        out.push(Summary {
            p: l.p,
            n: l.n,
            delta: delta.to_string(),
            q2n_delta: (delta * ipow(l.p, 2 * l.n)).to_string(),
            norm_sq: conv.as_ref().map(|c| c.norm_sq.to_string()),
            h_checked: conv.as_ref().map(|c| c.h_checked),
            support_size: table.kt.members.len(),
        });
    }
    let cfg = LevelsConfig {
        levels: to_levels_string(&levels),
    };
    ctx.write("matrix-coeff", &cfg, &["matrix-coefficient", "convolution-idempotence"], None, &out, &csv)
}

// ---------------------------------------------------------------------------
// scan-supnorm
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    /// Holomorphic weight k (even).
    #[arg(long)]
    pub weight: Option<u32>,
    /// Spectral parameter t of a Maass form; overrides the weight.
    #[arg(long)]
    pub maass_t: Option<f64>,
    #[arg(long)]
    pub parity: Option<u8>,
    /// `all-ones`, `sato-tate`, `zero`, or `file:<path>`.
    #[arg(long)]
    pub coefficients: Option<String>,
    #[arg(long)]
    pub delta_pi: Option<f64>,
    #[arg(long)]
    pub adjoint_value: Option<f64>,
    #[arg(long)]
    pub rows_per_decade: Option<u32>,
    #[arg(long)]
    pub x_steps: Option<usize>,
    #[arg(long)]
    pub y_max: Option<f64>,
}

#[derive(Serialize)]
struct ScanConfig {
    levels: String,
    level: u64,
    arch: ArchParams,
    coefficients: CoefficientKind,
    delta_pi: f64,
    adjoint_value: f64,
    grid: GridSpec,
}

fn coefficient_source(spec: &str, seed: u64, delta: f64) -> Result<CoefficientSource, CliError> {
    match spec {
        "all-ones" => Ok(CoefficientSource::all_ones(delta)),
        "sato-tate" => Ok(CoefficientSource::sato_tate(seed, delta)),
        "zero" => Ok(CoefficientSource::zero()),
        s => match s.strip_prefix("file:") {
            Some(path) => Ok(CoefficientSource::from_file(path).map_err(|e| match e {
                minvec::Error::Io(io) => CliError::Config(format!("{path}: {io}")),
                e => CliError::Config(format!("{path}: {e}")),
            })?),
            None => Err(CliError::Config(format!("unknown coefficient source {s:?}"))),
        },
    }
}

pub fn scan(ctx: &Context, args: &ScanArgs) -> Result<(), CliError> {
    let levels = ctx.levels("")?;
    let level = level_of(&levels)?;
    let f = &ctx.file;
    let arch = match args.maass_t.or(f.maass_t) {
        Some(t) => ArchParams::Maass {
            t,
            parity: args.parity.or(f.parity).unwrap_or(0),
        },
        None => ArchParams::Holomorphic {
            k: args.weight.or(f.weight).unwrap_or(12),
        },
    };
    arch.validate()?;
    let delta = args.delta_pi.or(f.delta_pi).unwrap_or_else(|| arch.default_delta_pi());
    let kind = args
        .coefficients
        .clone()
        .or_else(|| f.coefficients.clone())
        .unwrap_or_else(|| "sato-tate".into());
    let primes: Vec<u64> = levels.iter().map(|l| l.p).collect();
    let source = coefficient_source(&kind, ctx.seed, delta)?.with_ramified(&primes);
    let mut grid = GridSpec::standard(level, &arch);
    if let Some(r) = args.rows_per_decade.or(f.rows_per_decade) {
        grid.rows_per_decade = r;
    }
    if let Some(x) = args.x_steps.or(f.x_steps) {
        grid.x_steps = x;
    }
    if let Some(y) = args.y_max.or(f.y_max) {
        grid.y_max = y;
    }
    grid.validate()?;
    let exp_cfg = ExpansionConfig {
        adjoint_value: args.adjoint_value.or(f.adjoint_value).unwrap_or(1.0),
        ..Default::default()
    };
    let cfg = ScanConfig {
        levels: to_levels_string(&levels),
        level,
        arch,
        coefficients: source.kind.clone(),
        delta_pi: source.delta_pi,
        adjoint_value: exp_cfg.adjoint_value,
        grid: grid.clone(),
    };

    let classes = scan_classes(&levels)?;
    let report: ScanReport = scan_supnorm(&grid, &classes, &source, &arch, &exp_cfg)?;
    if report.sup < report.witness.value {
        return Err(CliError::Verification("sup below the single-term witness".into()));
    }
    println!(
        "N = {level}: sup {:.6} at (x, y) = ({:.4}, {:.4}), ratio {:.4}, witness {:.6}",
        report.sup, report.argmax.x, report.argmax.y, report.ratio, report.witness.value
    );
    let csv = report.rows_csv();
    ctx.write(
        "scan-supnorm",
        &cfg,
        &["sup-norm", "sup-over-conductor-and-weight", "single-term-witness", "kernel-peak"],
        None,
        &report,
        &csv,
    )
}

/// Every combination of local cosets `a(z_p)`, `z_p` a unit mod `p^{n_p}`.
fn scan_classes(levels: &[Level]) -> Result<Vec<RamifiedData>, CliError> {
    if levels.is_empty() {
        return Ok(vec![RamifiedData::unramified()]);
    }
    let mut combos: Vec<Vec<u64>> = vec![vec![]];
    for l in levels {
        let zs = unit_classes(l.p, l.n);
        combos = combos
            .into_iter()
            .flat_map(|c| zs.iter().map(move |z| [c.clone(), vec![*z]].concat()))
            .collect();
    }
    let mvs: Vec<MinimalVectorSpec> = levels
        .iter()
        .map(|l| MinimalVectorSpec::first(l.p, l.n))
        .collect::<Result<_, _>>()?;
    combos
        .into_iter()
        .map(|zs| {
            let locals = mvs
                .iter()
                .zip(&zs)
                .map(|(mv, z)| diagonal_local(mv.clone(), *z))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(RamifiedData::new(locals)?)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// que
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Clone)]
pub struct QueArgs {
    /// Primes of the grid, e.g. `3,5,7`.
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// Exponents of the grid, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub exponents: Option<Vec<u32>>,
}

#[derive(Serialize)]
struct QueRow {
    p: u64,
    n: u32,
    vol_kt: String,
    h: String,
    normalized: String,
    ip_normalized: f64,
    distinguished_a3_0: bool,
    distinguished_a3_1: bool,
    distinguished_a3_2: bool,
}

pub fn que(ctx: &Context, args: &QueArgs) -> Result<(), CliError> {
    let levels = if ctx.common.levels.is_some() {
        ctx.levels("")?
    } else {
        let primes = args.primes.clone().or_else(|| ctx.file.primes.clone());
        let exps = args.exponents.clone().or_else(|| ctx.file.exponents.clone());
        match primes {
            Some(ps) => resolve_levels(None, Some(&ps), exps.as_deref(), "")?,
            None => resolve_levels(ctx.file.levels.as_deref(), None, None, "3:1,5:1,7:1")?,
        }
    };
    let mut rows = Vec::new();
    let mut csv = String::from("p,n,vol_kt,h,normalized,ip_normalized,dist_a3_0,dist_a3_1,dist_a3_2\n");
    for l in &levels {
        let mc = TorusMatrixCoefficient::spherical(l.p, l.n)?;
        let rep = que_period(l.p, l.n, &mc)?;
        let w = watson_ip(l.p, l.n, rep.h, Complex64::new(1.0, 0.0))?;
        let exact = |r: Option<num_rational::Ratio<u64>>, f: Complex64| r.map_or(format!("{}", f.re), |r| r.to_string());
        let row = QueRow {
            p: l.p,
            n: l.n,
            vol_kt: rep.vol_kt.to_string(),
            h: exact(rep.h_exact, rep.h),
            normalized: exact(rep.normalized_exact, rep.normalized),
            ip_normalized: w.ip_normalized.re,
            distinguished_a3_0: distinguished(0, l.n)?,
            distinguished_a3_1: distinguished(1, l.n)?,
            distinguished_a3_2: distinguished(2, l.n)?,
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{:.15},{},{},{}",
            row.p,
            row.n,
            row.vol_kt,
            row.h,
            row.normalized,
            row.ip_normalized,
            row.distinguished_a3_0,
            row.distinguished_a3_1,
            row.distinguished_a3_2
        );
        rows.push(row);
    }
    let cfg = LevelsConfig {
        levels: to_levels_string(&levels),
    };
    ctx.write(
        "que",
        &cfg,
        &["kt-volume", "local-que-period", "normalized-que-period", "local-watson-factor", "distinguished-parity"],
        None,
        &rows,
        &csv,
    )
}
