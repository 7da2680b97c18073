//! The local QUE period `H(v, v-bar, u)`, its conductor normalization, the
//! parity criterion for distinguished triples, and the local Watson factor.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gl2::kt_index;
use crate::residue::{ipow, unit_enumeration, DEFAULT_ENUMERATION_BOUND};

/// `C(pi x pi-bar) = q^{4n}`.
pub fn conductor_pair(p: u64, n: u32) -> u64 {
    assert!(n >= 1, "level must be positive");
    ipow(p, 4 * n)
}

/// `vol(K_T(n)) = 1 / (q^{2n-1}(q - 1))`.
pub fn vol_kt(p: u64, n: u32) -> Ratio<u64> {
    Ratio::new(1, kt_index(p, n))
}

/// `h -> <h u, u>` on `T(o) / (T(o) cap K(n))`, i.e. on `(o_E / p^n)^x`,
/// together with the exponent of the conductor of the representation `u`
/// lives in.
#[derive(Clone, Debug, Serialize)]
pub struct TorusMatrixCoefficient {
    pub p: u64,
    pub n: u32,
    pub values: BTreeMap<(u64, u64), Complex64>,
    pub a3: u32,
}

impl TorusMatrixCoefficient {
    fn constant(p: u64, n: u32, value: f64) -> Result<Self> {
        let values = unit_enumeration(p, n, true, DEFAULT_ENUMERATION_BOUND)?
            .into_iter()
            .map(|k| (k, Complex64::new(value, 0.0)))
            .collect();
        Ok(TorusMatrixCoefficient { p, n, values, a3: 0 })
    }

    /// The spherical vector: `T(o)`-fixed, so the coefficient is 1.
    pub fn spherical(p: u64, n: u32) -> Result<Self> {
        Self::constant(p, n, 1.0)
    }

    pub fn zero(p: u64, n: u32) -> Result<Self> {
        Self::constant(p, n, 0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QueReport {
    pub p: u64,
    pub n: u32,
    pub vol_kt: Ratio<u64>,
    pub h: Complex64,
    /// `H` as an exact rational when the coefficient is identically 1.
    pub h_exact: Option<Ratio<u64>>,
    /// `q^{2n} H / <u, u>`.
    pub normalized: Complex64,
    pub normalized_exact: Option<Ratio<u64>>,
    pub distinguished: bool,
}

/// `H = vol(K_T(n)) * (average of <h u, u> over T(o))`.
///
/// Only the level `(p, n)` of the minimal vector enters.
pub fn que_period(p: u64, n: u32, mc: &TorusMatrixCoefficient) -> Result<QueReport> {
    if mc.p != p || mc.n != n {
        return Err(Error::Config(format!(
            "torus coefficient given at ({}, {}), minimal vector at ({p}, {n})",
            mc.p, mc.n
        )));
    }
    let cosets = unit_enumeration(p, n, true, DEFAULT_ENUMERATION_BOUND)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in &cosets {
        sum += *mc
            .values
            .get(k)
            .ok_or_else(|| Error::Config(format!("torus coefficient missing at {k:?}")))?;
    }
    let vol = vol_kt(p, n);
    let volf = *vol.numer() as f64 / *vol.denom() as f64;
    let h = sum / cosets.len() as f64 * volf;
    let norm_u = mc.values[&(1, 0)];
    let q2n = ipow(p, 2 * n) as f64;
    // a zero coefficient describes the zero vector; report 0 rather than 0/0
    let normalized = if norm_u.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        h * q2n / norm_u
    };
    let all_one = mc.values.values().all(|v| *v == Complex64::new(1.0, 0.0));
    let h_exact = all_one.then_some(vol);
    let normalized_exact = h_exact.map(|h| h * ipow(p, 2 * n));
    Ok(QueReport {
        p,
        n,
        vol_kt: vol,
        h,
        h_exact,
        normalized,
        normalized_exact,
        distinguished: distinguished(mc.a3, n)?,
    })
}

/// Whether `pi x pi-bar x pi_3` is distinguished: `a(pi_3)` even. Requires
/// `a(pi) = 4n >= 2 a(pi_3)`.
pub fn distinguished(a3: u32, n: u32) -> Result<bool> {
    if 4 * n < 2 * a3 {
        return Err(Error::Hypothesis(format!(
            "a(pi) = {} < 2 a(pi_3) = {}",
            4 * n,
            2 * a3
        )));
    }
    Ok(a3 % 2 == 0)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WatsonFactor {
    pub ip: Complex64,
    /// `I_p * C(pi x pi-bar)^{1/2} = I_p q^{2n}`.
    pub ip_normalized: Complex64,
}

/// `I_p = H / L_ratio`, where `L_ratio` is the ratio of local L-values
/// (1 at the primes dividing the level).
pub fn watson_ip(p: u64, n: u32, h: Complex64, l_ratio: Complex64) -> Result<WatsonFactor> {
    if l_ratio.norm() == 0.0 {
        return Err(Error::Config("L-value ratio must be nonzero".into()));
    }
    let ip = h / l_ratio;
    Ok(WatsonFactor {
        ip,
        ip_normalized: ip * ipow(p, 2 * n) as f64,
    })
}
