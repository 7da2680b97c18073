//! `phi(n(x) a(y) g_f)` from its Whittaker expansion over `m = b mod N`.

use num_complex::Complex64;
use serde::Serialize;

use super::arch::{kappa, log_c_infty, log_kappa_holomorphic, ArchParams};
use super::coeffs::{CoefficientSource, CoefficientTable};
use super::ramified::RamifiedData;
use crate::error::{Error, Result};

/// Lower edge of the generating domain, `sqrt(3)/2`.
pub const Y_FLOOR: f64 = 0.866_025_403_784_438_6;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExpansionConfig {
    /// `L(1, pi, Ad)`; only a normalization.
    pub adjoint_value: f64,
    pub y_floor: f64,
    /// `epsilon` in the cutoff `N^{2 + epsilon} (T + T^{1/3}) / (2 pi y)`.
    pub epsilon: f64,
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig {
            adjoint_value: 1.0,
            y_floor: Y_FLOOR,
            epsilon: 0.1,
            rel_tol: 1e-8,
            max_doublings: 20,
        }
    }
}

/// The terms of the expansion with everything independent of `(x, y)`
/// precomputed.
pub struct Expansion<'a> {
    pub ram: &'a RamifiedData,
    pub arch: ArchParams,
    pub cfg: ExpansionConfig,
    log_prefactor: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhiValue {
    pub value: Complex64,
    /// Final cutoff `R`; the sum runs over `0 < |m| <= R`.
    pub cutoff: u64,
    /// `|S(R) - S(R/2)| / |S(R)|`.
    pub last_change: f64,
}

impl<'a> Expansion<'a> {
    pub fn new(ram: &'a RamifiedData, arch: ArchParams, cfg: ExpansionConfig) -> Result<Self> {
        arch.validate()?;
        if !(cfg.adjoint_value > 0.0) {
            return Err(Error::Config("adjoint value must be positive".into()));
        }
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        let log_prefactor = 0.5 * (2.0 * zeta2 / cfg.adjoint_value).ln() - log_c_infty(&arch)?;
        Ok(Expansion {
            ram,
            arch,
            cfg,
            log_prefactor,
        })
    }

    pub fn prefactor(&self) -> f64 {
        self.log_prefactor.exp()
    }

    fn n_sq(&self) -> f64 {
        (self.ram.level as f64).powi(2)
    }

    /// Initial cutoff `ceil(N^{2+eps} (T + T^{1/3}) / (2 pi y))`.
    pub fn initial_cutoff(&self, y: f64) -> u64 {
        let t = self.arch.big_t();
        let n = self.ram.level as f64;
        let r = n.powf(2.0 + self.cfg.epsilon) * (t + t.cbrt()) / (2.0 * std::f64::consts::PI * y);
        (r.ceil() as u64).max(1)
    }

    pub fn check_y(&self, y: f64) -> Result<()> {
        if !(y >= self.cfg.y_floor) || !y.is_finite() {
            return Err(Error::Config(format!("y = {y} below the floor {}", self.cfg.y_floor)));
        }
        Ok(())
    }

    /// The `m`-th term without the additive character:
    /// `prefactor |m|^{-1/2} kappa(m y / N^2) lambda(|m|) lambda'(m)`.
    pub fn amplitude(&self, m: i64, y: f64, coeffs: &CoefficientTable) -> Result<Complex64> {
        let lp = self.ram.lambda_prime(m);
        if lp == Complex64::new(0.0, 0.0) {
            return Ok(lp);
        }
        let l = coeffs.get(m.unsigned_abs())?;
        if l == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let u = m as f64 * y / self.n_sq();
        let scalar = match self.arch {
            ArchParams::Holomorphic { k } => {
                if m < 0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let log = self.log_prefactor - 0.5 * (m as f64).ln() + log_kappa_holomorphic(k, u);
                log.exp() * l
            }
            ArchParams::Maass { .. } => {
                self.prefactor() * (m.unsigned_abs() as f64).powf(-0.5) * kappa(u, &self.arch)? * l
            }
        };
        Ok(lp * scalar)
    }

    pub fn term(&self, m: i64, x: f64, y: f64, coeffs: &CoefficientTable) -> Result<Complex64> {
        let a = self.amplitude(m, y, coeffs)?;
        Ok(a * additive(m, x, self.ram.modulus()))
    }

    /// Indices with a possibly nonzero term, `0 < |m| <= r`, ascending in `|m|`.
    pub fn support(&self, r: u64) -> Vec<i64> {
        let both = !self.arch.is_holomorphic();
        let mut out = Vec::new();
        for m in 1..=r as i64 {
            if self.ram.in_support(m) {
                out.push(m);
            }
            if both && self.ram.in_support(-m) {
                out.push(-m);
            }
        }
        out
    }

    /// `S(r) = sum_{0 < |m| <= r} term(m)`.
    pub fn partial_sum(&self, x: f64, y: f64, r: u64, coeffs: &CoefficientTable) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for m in self.support(r) {
            s += self.term(m, x, y, coeffs)?;
        }
        Ok(s)
    }

    /// Doubles the cutoff from [`Self::initial_cutoff`] until the relative
    /// change is at most `rel_tol`.
    pub fn evaluate(&self, x: f64, y: f64, coeffs: &CoefficientTable) -> Result<PhiValue> {
        self.check_y(y)?;
        let mut r = self.initial_cutoff(y);
        let mut prev = self.partial_sum(x, y, r, coeffs)?;
        for _ in 0..self.cfg.max_doublings {
            let next = prev + self.range_sum(x, y, r, 2 * r, coeffs)?;
            r *= 2;
            let change = (next - prev).norm();
            if change <= self.cfg.rel_tol * next.norm() || (change == 0.0 && next.norm() == 0.0) {
                let last_change = if next.norm() == 0.0 { 0.0 } else { change / next.norm() };
                return Ok(PhiValue {
                    value: next,
                    cutoff: r,
                    last_change,
                });
            }
            prev = next;
        }
        Err(Error::Unstable(format!(
            "expansion tail at (x, y) = ({x}, {y}) after cutoff {r}"
        )))
    }

    fn range_sum(&self, x: f64, y: f64, lo: u64, hi: u64, coeffs: &CoefficientTable) -> Result<Complex64> {
        let both = !self.arch.is_holomorphic();
        let mut s = Complex64::new(0.0, 0.0);
        for m in lo as i64 + 1..=hi as i64 {
            if self.ram.in_support(m) {
                s += self.term(m, x, y, coeffs)?;
            }
            if both && self.ram.in_support(-m) {
                s += self.term(-m, x, y, coeffs)?;
            }
        }
        Ok(s)
    }
}

/// `e(m x / N^2)`, reducing `m mod N^2` first to keep the argument small.
pub fn additive(m: i64, x: f64, modulus: u64) -> Complex64 {
    let r = m.rem_euclid(modulus as i64) as f64;
    let arg = 2.0 * std::f64::consts::PI * (r * x / modulus as f64).rem_euclid(1.0);
    Complex64::from_polar(1.0, arg)
}

/// One-shot evaluation that grows the coefficient table as the cutoff
/// demands.
pub fn evaluate_phi(
    x: f64,
    y: f64,
    ram: &RamifiedData,
    source: &CoefficientSource,
    arch: &ArchParams,
    cfg: &ExpansionConfig,
) -> Result<PhiValue> {
    let exp = Expansion::new(ram, *arch, *cfg)?;
    let mut size = 4 * exp.initial_cutoff(y.max(cfg.y_floor));
    loop {
        let table = source.table(size)?;
        match exp.evaluate(x, y, &table) {
            Err(Error::Coverage(m)) if m > table.max_m() => size = 2 * m,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn holo(k: u32) -> ArchParams {
        ArchParams::Holomorphic { k }
    }

    #[test]
    fn real_on_the_imaginary_axis() {
        let ram = RamifiedData::unramified();
        let v = evaluate_phi(0.0, 1.0, &ram, &CoefficientSource::all_ones(0.0), &holo(12), &Default::default())
            .unwrap();
        assert!(v.value.im.abs() <= 1e-14 * v.value.re.abs());
        assert!(v.value.re > 0.0);
    }

    #[test]
    fn zero_source_gives_zero() {
        let ram = RamifiedData::standard(&[(3, 1, 1)]).unwrap();
        let v = evaluate_phi(0.3, 1.2, &ram, &CoefficientSource::zero(), &holo(12), &Default::default()).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn doubling_is_stable_at_level_three() {
        let ram = RamifiedData::standard(&[(3, 1, 1)]).unwrap();
        let src = CoefficientSource::sato_tate(1, 0.0).with_ramified(&[3]);
        let exp = Expansion::new(&ram, holo(12), Default::default()).unwrap();
        let table = src.table(100_000).unwrap();
        let v = exp.evaluate(0.0, 1.0, &table).unwrap();
        let w = exp.partial_sum(0.0, 1.0, 2 * v.cutoff, &table).unwrap();
        assert!((v.value - w).norm() <= 1e-8 * v.value.norm());
    }

    #[test]
    fn periodic_in_x() {
        let ram = RamifiedData::standard(&[(5, 1, 2)]).unwrap();
        let src = CoefficientSource::sato_tate(2, 0.0).with_ramified(&[5]);
        let cfg = ExpansionConfig::default();
        for x in [0.0, 0.37, 11.2] {
            let a = evaluate_phi(x, 2.0, &ram, &src, &holo(12), &cfg).unwrap().value;
            let b = evaluate_phi(x + 25.0, 2.0, &ram, &src, &holo(12), &cfg).unwrap().value;
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn only_the_progression_contributes() {
        let ram = RamifiedData::standard(&[(3, 1, 2), (5, 1, 1)]).unwrap();
        let exp = Expansion::new(&ram, ArchParams::Maass { t: 2.0, parity: 0 }, Default::default()).unwrap();
        let table = CoefficientSource::all_ones(0.0).table(400).unwrap();
        for m in -400i64..=400 {
            if m == 0 {
                continue;
            }
            let t = exp.term(m, 0.1, 1.0, &table).unwrap();
            assert_eq!(t != Complex64::new(0.0, 0.0), ram.in_support(m), "m = {m}");
        }
        assert!(exp.support(400).iter().all(|&m| ram.in_support(m)));
    }

    #[test]
    fn maass_value_is_stable() {
        let ram = RamifiedData::standard(&[(3, 1, 1)]).unwrap();
        let src = CoefficientSource::sato_tate(5, 7.0 / 64.0).with_ramified(&[3]);
        let arch = ArchParams::Maass { t: 3.0, parity: 1 };
        let v = evaluate_phi(0.25, 1.0, &ram, &src, &arch, &Default::default()).unwrap();
        assert!(v.value.norm().is_finite() && v.last_change <= 1e-8);
    }

    #[test]
    fn below_floor_rejected() {
        let ram = RamifiedData::unramified();
        let src = CoefficientSource::all_ones(0.0);
        assert!(evaluate_phi(0.0, 0.5, &ram, &src, &holo(12), &Default::default()).is_err());
    }
}
