//! Archimedean data: the kernel `kappa`, the norm `c_infty`, and `h(pi_infty)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::bessel::bessel_k_imag;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ArchParams {
    /// Maass form with spectral parameter `t` and parity `m` in {0, 1}.
    Maass { t: f64, parity: u8 },
    /// Holomorphic form of even weight `k`.
    Holomorphic { k: u32 },
}

impl ArchParams {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ArchParams::Holomorphic { k } if k < 2 || k % 2 != 0 => {
                Err(Error::Config(format!("weight {k} must be even and at least 2")))
            }
            ArchParams::Maass { parity, .. } if parity > 1 => {
                Err(Error::Config(format!("parity {parity} must be 0 or 1")))
            }
            ArchParams::Maass { t, .. } if !t.is_finite() => Err(Error::Config("t must be finite".into())),
            _ => Ok(()),
        }
    }

    /// `T = 1 + |t|` or `T = k`.
    pub fn big_t(&self) -> f64 {
        match *self {
            ArchParams::Maass { t, .. } => 1.0 + t.abs(),
            ArchParams::Holomorphic { k } => k as f64,
        }
    }

    /// `h(pi_infty) = T^{1/6}` or `k^{1/4}`.
    pub fn h(&self) -> f64 {
        match *self {
            ArchParams::Maass { .. } => self.big_t().powf(1.0 / 6.0),
            ArchParams::Holomorphic { k } => (k as f64).powf(0.25),
        }
    }

    /// Default exponent in the coefficient bound `|lambda(m)| <= d(m) m^delta`.
    pub fn default_delta_pi(&self) -> f64 {
        match self {
            ArchParams::Maass { .. } => 7.0 / 64.0,
            ArchParams::Holomorphic { .. } => 0.0,
        }
    }

    pub fn is_holomorphic(&self) -> bool {
        matches!(self, ArchParams::Holomorphic { .. })
    }
}

/// `log kappa(y)` for the holomorphic kernel `y^{k/2} e^{-2 pi y}`, `y > 0`.
pub fn log_kappa_holomorphic(k: u32, y: f64) -> f64 {
    0.5 * k as f64 * y.ln() - 2.0 * std::f64::consts::PI * y
}

/// `kappa(y)`: `|y|^{1/2} K_{it}(2 pi |y|) sgn(y)^m`, or `y^{k/2} e^{-2 pi y}`
/// for `y > 0` and 0 for `y < 0`.
pub fn kappa(y: f64, arch: &ArchParams) -> Result<f64> {
    if y == 0.0 || !y.is_finite() {
        return Err(Error::Config(format!("kappa needs a nonzero finite argument, got {y}")));
    }
    match *arch {
        ArchParams::Holomorphic { k } => {
            if y < 0.0 {
                Ok(0.0)
            } else {
                Ok(log_kappa_holomorphic(k, y).exp())
            }
        }
        ArchParams::Maass { t, parity } => {
            let s = if y < 0.0 && parity == 1 { -1.0 } else { 1.0 };
            Ok(s * y.abs().sqrt() * bessel_k_imag(t, 2.0 * std::f64::consts::PI * y.abs())?)
        }
    }
}

/// `log c_infty` with `c_infty^2 = int_{R^x} |kappa(y)|^2 dy / |y|`.
///
/// Holomorphic: `c_infty = (4 pi)^{-k/2} Gamma(k)^{1/2}`. Maass: the integral
/// `2 int_0^inf K_{it}(2 pi y)^2 dy`, computed by the trapezoid rule in
/// `y = e^s`.
pub fn log_c_infty(arch: &ArchParams) -> Result<f64> {
    arch.validate()?;
    match *arch {
        ArchParams::Holomorphic { k } => {
            let k = k as f64;
            Ok(0.5 * ln_gamma(k) - 0.5 * k * (4.0 * std::f64::consts::PI).ln())
        }
        ArchParams::Maass { t, .. } => Ok(0.5 * maass_norm_sq(t)?.ln()),
    }
}

pub fn c_infty(arch: &ArchParams) -> Result<f64> {
    Ok(log_c_infty(arch)?.exp())
}

fn maass_norm_sq(t: f64) -> Result<f64> {
    // integrand in s: 2 K(2 pi e^s)^2 e^s; the left tail decays like s^2 e^s
    let integrand = |s: f64| -> Result<f64> {
        let y = s.exp();
        let k = bessel_k_imag(t, 2.0 * std::f64::consts::PI * y)?;
        Ok(2.0 * k * k * y)
    };
    let (lo, hi) = (-45.0f64, 2.5f64);
    let mut steps = 64usize;
    let sum = |steps: usize| -> Result<f64> {
        let h = (hi - lo) / steps as f64;
        let mut s = 0.5 * (integrand(lo)? + integrand(hi)?);
        for i in 1..steps {
            s += integrand(lo + i as f64 * h)?;
        }
        Ok(s * h)
    };
    let mut prev = sum(steps)?;
    for _ in 0..8 {
        steps *= 2;
        let next = sum(steps)?;
        if (next - prev).abs() <= 1e-10 * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Unstable(format!("c_infty integral at t = {t}")))
}

/// Lower constant in `c_infty >= c0 e^{-pi t / 2}`, checked on every Maass
/// norm computation.
pub const MAASS_NORM_FLOOR: f64 = 0.5;

/// Verifies the one-sided bound `c_infty e^{pi |t| / 2} >= MAASS_NORM_FLOOR`.
pub fn check_maass_norm(arch: &ArchParams) -> Result<f64> {
    match *arch {
        ArchParams::Maass { t, .. } => {
            let scaled = c_infty(arch)? * (std::f64::consts::PI * t.abs() / 2.0).exp();
            if scaled < MAASS_NORM_FLOOR {
                return Err(Error::Verification(format!(
                    "c_infty e^(pi t/2) = {scaled} below {MAASS_NORM_FLOOR}"
                )));
            }
            Ok(scaled)
        }
        ArchParams::Holomorphic { .. } => Err(Error::Config("not a Maass form".into())),
    }
}

/// Maximum of `kappa / c_infty` over `y > 0`.
pub fn kernel_peak(arch: &ArchParams) -> Result<f64> {
    let lc = log_c_infty(arch)?;
    match *arch {
        ArchParams::Holomorphic { k } => {
            let y = k as f64 / (4.0 * std::f64::consts::PI);
            Ok((log_kappa_holomorphic(k, y) - lc).exp())
        }
        ArchParams::Maass { .. } => {
            // golden-section on log y after a coarse scan
            let f = |s: f64| kappa(s.exp(), arch).map(|v| v.abs());
            let mut best = (f64::NEG_INFINITY, 0.0);
            let mut s = -8.0;
            while s <= 3.0 {
                let v = f(s)?;
                if v > best.0 {
                    best = (v, s);
                }
                s += 0.01;
            }
            let (mut a, mut b) = (best.1 - 0.01, best.1 + 0.01);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..60 {
                let c = b - g * (b - a);
                let d = a + g * (b - a);
                if f(c)? > f(d)? {
                    b = d;
                } else {
                    a = c;
                }
            }
            Ok(f(0.5 * (a + b))? / lc.exp())
        }
    }
}
