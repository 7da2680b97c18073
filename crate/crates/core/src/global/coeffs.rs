//! Hecke eigenvalues `lambda(m)`: synthetic sources and file ingestion.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack on the Ramanujan-type bound, for values read back from decimal text.
const BOUND_SLACK: f64 = 1e-12;
/// Tolerance on the multiplicativity of ingested tables.
const HECKE_TOL: f64 = 1e-9;
/// Largest table [`CoefficientSource::table`] will build.
pub const MAX_TABLE: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoefficientKind {
    AllOnes,
    SatoTate { seed: u64 },
    File { path: PathBuf },
    /// Identically zero; the expansion of the zero vector.
    Zero,
}

/// Where `lambda(m)` comes from, and the exponent `delta_pi` in
/// `|lambda(m)| <= d(m) m^{delta_pi}`.
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientSource {
    pub kind: CoefficientKind,
    pub delta_pi: f64,
    /// Primes where `lambda(p) = 0` is forced (the primes dividing the level).
    pub ramified: Vec<u64>,
    #[serde(skip)]
    file_values: Option<BTreeMap<u64, f64>>,
}

impl CoefficientSource {
    pub fn all_ones(delta_pi: f64) -> Self {
        Self::synthetic(CoefficientKind::AllOnes, delta_pi)
    }

    pub fn sato_tate(seed: u64, delta_pi: f64) -> Self {
        Self::synthetic(CoefficientKind::SatoTate { seed }, delta_pi)
    }

    pub fn zero() -> Self {
        Self::synthetic(CoefficientKind::Zero, 0.0)
    }

    fn synthetic(kind: CoefficientKind, delta_pi: f64) -> Self {
        CoefficientSource {
            kind,
            delta_pi,
            ramified: Vec::new(),
            file_values: None,
        }
    }

    /// Sets `lambda` to vanish on multiples of the given primes.
    pub fn with_ramified(mut self, primes: &[u64]) -> Self {
        self.ramified = primes.to_vec();
        self
    }

    /// Reads `m <tab> lambda` records after a `# delta_pi <tab> value` header.
    /// Blank lines and further `#` lines are skipped.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let mut src = Self::parse(&text)?;
        src.kind = CoefficientKind::File {
            path: path.as_ref().to_path_buf(),
        };
        Ok(src)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut delta = None;
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut parts = rest.split_whitespace();
                if parts.next() == Some("delta_pi") {
                    let v: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or(Error::Parse {
                        line: line_no,
                        msg: "delta_pi header needs a number".into(),
                    })?;
                    delta = Some(v);
                }
                continue;
            }
            let mut parts = line.split('\t');
            let (m, l) = match (parts.next(), parts.next(), parts.next()) {
                (Some(m), Some(l), None) => (m.trim(), l.trim()),
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected `m<TAB>lambda`".into(),
                    })
                }
            };
            let m: u64 = m.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad index {m:?}"),
            })?;
            let l: f64 = l.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad value {l:?}"),
            })?;
            if m == 0 || !l.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "index must be positive and value finite".into(),
                });
            }
            if values.insert(m, l).is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("duplicate index {m}"),
                });
            }
        }
        let delta_pi = delta.ok_or(Error::Parse {
            line: 1,
            msg: "missing `# delta_pi` header".into(),
        })?;
        for (&m, &l) in &values {
            check_bound(m, l, delta_pi)?;
        }
        if let Some(&l1) = values.get(&1) {
            if (l1 - 1.0).abs() > HECKE_TOL {
                return Err(Error::Verification(format!("lambda(1) = {l1}, expected 1")));
            }
        }
        let src = CoefficientSource {
            kind: CoefficientKind::File {
                path: PathBuf::from("<inline>"),
            },
            delta_pi,
            ramified: Vec::new(),
            file_values: Some(values),
        };
        let max = src.file_values.as_ref().unwrap().keys().next_back().copied().unwrap_or(1);
        // the consistency check runs over everything the file determines
        src.table(max)?;
        Ok(src)
    }

    /// `lambda(m)` for `1 <= m <= max_m`. File sources leave gaps they do not
    /// determine; reading a gap is a [`Error::Coverage`] error.
    pub fn table(&self, max_m: u64) -> Result<CoefficientTable> {
        if max_m > MAX_TABLE {
            return Err(Error::SizeGuard {
                what: "coefficient table".into(),
                size: max_m as u128,
                bound: MAX_TABLE as u128,
            });
        }
        let len = max_m as usize + 1;
        let spf = smallest_prime_factors(max_m);
        let mut values: Vec<Option<f64>> = vec![None; len];
        if len > 1 {
            values[1] = Some(1.0);
        }
        match &self.kind {
            CoefficientKind::Zero => {
                values.iter_mut().skip(1).for_each(|v| *v = Some(0.0));
            }
            CoefficientKind::AllOnes => {
                values.iter_mut().skip(1).for_each(|v| *v = Some(1.0));
            }
            CoefficientKind::SatoTate { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for p in 2..=max_m {
                    if spf[p as usize] as u64 == p {
                        values[p as usize] = Some(2.0 * sample_sato_tate(&mut rng).cos());
                    }
                }
                extend_hecke(&mut values, &spf, HeckeMode::Fill)?;
            }
            CoefficientKind::File { .. } => {
                let given = self
                    .file_values
                    .as_ref()
                    .ok_or_else(|| Error::Config("file source built without its values".into()))?;
                for (&m, &l) in given.range(..=max_m) {
                    values[m as usize] = Some(l);
                }
                extend_hecke(&mut values, &spf, HeckeMode::Check)?;
            }
        }
        for &p in &self.ramified {
            let mut m = p;
            while m <= max_m {
                values[m as usize] = Some(0.0);
                m += p;
            }
        }
        for (m, v) in values.iter().enumerate().skip(1) {
            if let Some(v) = v {
                check_bound(m as u64, *v, self.delta_pi)?;
            }
        }
        Ok(CoefficientTable { values })
    }
}

/// Dense `lambda(m)`, index `m`.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    values: Vec<Option<f64>>,
}

impl CoefficientTable {
    pub fn max_m(&self) -> u64 {
        self.values.len().saturating_sub(1) as u64
    }

    pub fn get(&self, m: u64) -> Result<f64> {
        self.values
            .get(m as usize)
            .copied()
            .flatten()
            .filter(|_| m > 0)
            .ok_or(Error::Coverage(m))
    }
}

fn check_bound(m: u64, value: f64, delta: f64) -> Result<()> {
    let bound = divisor_count(m) as f64 * (m as f64).powf(delta);
    if value.abs() > bound * (1.0 + BOUND_SLACK) {
        return Err(Error::Ramanujan { m, value, bound });
    }
    Ok(())
}

/// `theta` in `[0, pi]` with density `(2/pi) sin^2 theta`.
fn sample_sato_tate<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let theta = rng.gen::<f64>() * std::f64::consts::PI;
        let u: f64 = rng.gen();
        if u <= theta.sin().powi(2) {
            return theta;
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum HeckeMode {
    /// Fill every entry from the values at primes.
    Fill,
    /// Fill gaps where possible and verify given entries.
    Check,
}

/// Extends by `lambda(p^{j+1}) = lambda(p) lambda(p^j) - lambda(p^{j-1})` and
/// multiplicativity, in increasing `m`.
fn extend_hecke(values: &mut [Option<f64>], spf: &[u32], mode: HeckeMode) -> Result<()> {
    for m in 2..values.len() {
        let p = spf[m] as usize;
        let mut pj = p;
        while m % (pj * p) == 0 {
            pj *= p;
        }
        let derived = if pj == m {
            if pj == p {
                None
            } else {
                let prev = m / p;
                let prev2 = prev / p;
                match (values[p], values[prev], values[prev2]) {
                    (Some(a), Some(b), Some(c)) => Some(a * b - c),
                    _ => None,
                }
            }
        } else {
            match (values[pj], values[m / pj]) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            }
        };
        match (values[m], derived) {
            (None, Some(d)) => values[m] = Some(d),
            (Some(v), Some(d)) if mode == HeckeMode::Check => {
                if (v - d).abs() > HECKE_TOL * (1.0 + d.abs()) {
                    return Err(Error::Verification(format!(
                        "lambda({m}) = {v} but the Hecke relations give {d}"
                    )));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Smallest prime factor of every `m <= max`; entries 0 and 1 are 0 and 1.
pub fn smallest_prime_factors(max: u64) -> Vec<u32> {
    let len = max as usize + 1;
    let mut spf = vec![0u32; len.max(2)];
    spf[1] = 1;
    for i in 2..len {
        if spf[i] == 0 {
            let mut j = i;
            while j < len {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf.truncate(len);
    spf
}

/// Number of divisors of `m >= 1`.
pub fn divisor_count(mut m: u64) -> u64 {
    let mut d = 1;
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        d *= e + 1;
        p += 1;
    }
    if m > 1 {
        d *= 2;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn divisor_counts() {
        let expect = [1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6];
        for (i, &d) in expect.iter().enumerate() {
            assert_eq!(divisor_count(i as u64 + 1), d);
        }
    }

    #[test]
    fn sato_tate_is_hecke_and_bounded() {
        let t = CoefficientSource::sato_tate(7, 0.0).table(2000).unwrap();
        for m in 1..=2000u64 {
            assert!(t.get(m).unwrap().abs() <= divisor_count(m) as f64 * (1.0 + 1e-12));
        }
        let (l2, l4, l8) = (t.get(2).unwrap(), t.get(4).unwrap(), t.get(8).unwrap());
        assert!((l4 - (l2 * l2 - 1.0)).abs() < 1e-12);
        assert!((l8 - (l2 * l4 - l2)).abs() < 1e-12);
        assert!((t.get(6).unwrap() - l2 * t.get(3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sato_tate_is_deterministic_and_prefix_stable() {
        let a = CoefficientSource::sato_tate(3, 0.0).table(500).unwrap();
        let b = CoefficientSource::sato_tate(3, 0.0).table(1000).unwrap();
        for m in 1..=500 {
            assert_eq!(a.get(m).unwrap(), b.get(m).unwrap());
        }
        let c = CoefficientSource::sato_tate(4, 0.0).table(500).unwrap();
        assert!((1..=500).any(|m| a.get(m).unwrap() != c.get(m).unwrap()));
    }

    #[test]
    fn sato_tate_second_moment() {
        // E[(2 cos theta)^2] = 1 under the Sato-Tate measure
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let s: f64 = (0..n).map(|_| (2.0 * sample_sato_tate(&mut rng).cos()).powi(2)).sum();
        assert!((s / n as f64 - 1.0).abs() < 0.02);
    }

    #[test]
    fn ramified_primes_vanish() {
        let t = CoefficientSource::all_ones(0.0).with_ramified(&[3]).table(30).unwrap();
        assert_eq!(t.get(9).unwrap(), 0.0);
        assert_eq!(t.get(10).unwrap(), 1.0);
        assert!(matches!(t.get(31), Err(Error::Coverage(31))));
        assert!(t.get(0).is_err());
    }

    #[test]
    fn file_round_trip_and_extension() {
        let text = "# delta_pi\t0\n1\t1\n2\t-1.5\n3\t0.5\n4\t1.25\n";
        let src = CoefficientSource::parse(text).unwrap();
        let t = src.table(6).unwrap();
        assert!((t.get(6).unwrap() + 0.75).abs() < 1e-15);
        assert!(matches!(t.get(5), Err(Error::Coverage(5))));
    }

    #[test]
    fn file_violations() {
        assert!(matches!(
            CoefficientSource::parse("# delta_pi\t0\n2\t2.5\n"),
            Err(Error::Ramanujan { m: 2, .. })
        ));
        assert!(matches!(
            CoefficientSource::parse("# delta_pi\t0\n2\t1\n3\t1\n6\t0.5\n"),
            Err(Error::Verification(_))
        ));
        assert!(matches!(CoefficientSource::parse("2\t1\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            CoefficientSource::parse("# delta_pi\t0\n2 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn multiplicative_on_coprime_pairs(seed in 0u64..50, a in 1u64..60, b in 1u64..60) {
            prop_assume!(num_integer::gcd(a, b) == 1);
            let t = CoefficientSource::sato_tate(seed, 0.0).table(3600).unwrap();
            let lhs = t.get(a * b).unwrap();
            let rhs = t.get(a).unwrap() * t.get(b).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
