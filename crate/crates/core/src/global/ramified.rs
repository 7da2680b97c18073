//! The ramified factor `lambda'(m; g_f) = prod_{p | N} W_p(a(m / N^2) k_p)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::characters::MinimalVectorSpec;
use crate::error::{Error, Result};
use crate::gl2::Mat2Local;
use crate::minimal_vector::{support_profile, units_mod_un, whittaker_closed};
use crate::residue::{inv_mod, ipow, mul_mod, LocalElement, UnitRoot};

/// Largest `N^2` tabulated.
pub const MAX_MODULUS: u64 = 4_000_000;

/// One prime of the level: the minimal vector and the coset `k_p` in `K`.
#[derive(Clone, Debug, Serialize)]
pub struct LocalRamified {
    pub mv: MinimalVectorSpec,
    #[serde(skip)]
    pub k: Mat2Local,
    /// Label for reports, e.g. the `z` of `k = a(z)`.
    pub label: String,
    /// Support class of `y -> W_p(a(y) k_p)`: `y in p^{-2n}(b_p + p^n)`.
    pub b_p: u64,
}

/// `lambda'` tabulated over `m mod N^2`, which is its period.
#[derive(Clone, Debug, Serialize)]
pub struct RamifiedData {
    pub locals: Vec<LocalRamified>,
    /// `N = prod p^{n_p}`.
    pub level: u64,
    /// `m` is in the support iff `m = b mod N`.
    pub b: u64,
    /// `sqrt(phi(N))`.
    pub amplitude: f64,
    #[serde(skip)]
    phases: Vec<Option<UnitRoot>>,
}

impl RamifiedData {
    /// Level 1: `lambda' = 1`.
    pub fn unramified() -> Self {
        RamifiedData {
            locals: Vec::new(),
            level: 1,
            b: 0,
            amplitude: 1.0,
            phases: vec![Some(UnitRoot::ONE)],
        }
    }

    pub fn new(locals: Vec<(MinimalVectorSpec, Mat2Local, String)>) -> Result<Self> {
        let mut level: u64 = 1;
        let mut primes = Vec::new();
        for (mv, _, _) in &locals {
            if primes.contains(&mv.p()) {
                return Err(Error::Config(format!("prime {} given twice", mv.p())));
            }
            primes.push(mv.p());
            level = level
                .checked_mul(ipow(mv.p(), mv.n()))
                .ok_or_else(|| Error::Config("level overflows".into()))?;
        }
        let modulus = level * level;
        if modulus > MAX_MODULUS {
            return Err(Error::SizeGuard {
                what: "N^2".into(),
                size: modulus as u128,
                bound: MAX_MODULUS as u128,
            });
        }
        let mut out = Vec::with_capacity(locals.len());
        let mut b = 0u64;
        let mut amp_sq = 1u64;
        for (mv, k, label) in locals {
            let (p, n) = (mv.p(), mv.n());
            let pn = ipow(p, n);
            let b_p = support_profile(&mv, &k)?;
            // m / N^2 = p^{-2n} m / N'^2, so the class of m is b_p N'^2 mod p^n
            let rest = level / pn;
            let class = mul_mod(b_p, mul_mod(rest % pn, rest % pn, pn), pn);
            // CRT: b = class mod p^n, unchanged mod the other prime powers
            let inv = inv_mod(rest % pn, pn).expect("coprime");
            let lift = mul_mod((class + pn - b % pn) % pn, inv, pn);
            b = (b + rest * lift) % level;
            amp_sq *= units_mod_un(p, n);
            out.push(LocalRamified { mv, k, label, b_p });
        }
        let mut data = RamifiedData {
            locals: out,
            level,
            b: if level == 1 { 0 } else { b },
            amplitude: (amp_sq as f64).sqrt(),
            phases: Vec::new(),
        };
        data.phases = (0..modulus)
            .map(|r| data.local_product(if r == 0 { modulus } else { r } as i128))
            .collect::<Result<_>>()?;
        Ok(data)
    }

    /// Each `p | N` with the first admissible `theta` and `k_p = a(z_p)`.
    pub fn standard(primes: &[(u64, u32, u64)]) -> Result<Self> {
        let mut locals = Vec::new();
        for &(p, n, z) in primes {
            let mv = MinimalVectorSpec::first(p, n)?;
            locals.push(diagonal_local(mv, z)?);
        }
        Self::new(locals)
    }

    pub fn modulus(&self) -> u64 {
        self.level * self.level
    }

    /// `phi(N)`.
    pub fn phi(&self) -> u64 {
        self.locals.iter().map(|l| units_mod_un(l.mv.p(), l.mv.n())).product()
    }

    /// Exact phase of `lambda'(m)`, `None` off the support.
    pub fn phase(&self, m: i64) -> Option<UnitRoot> {
        self.phases[m.rem_euclid(self.modulus() as i64) as usize]
    }

    pub fn lambda_prime(&self, m: i64) -> Complex64 {
        match self.phase(m) {
            Some(r) => r.to_complex() * self.amplitude,
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn in_support(&self, m: i64) -> bool {
        m.rem_euclid(self.level as i64) == self.b as i64
    }

    /// Direct evaluation of the product of local Whittaker values at `m != 0`.
    pub fn local_product(&self, m: i128) -> Result<Option<UnitRoot>> {
        let mut phase = UnitRoot::ONE;
        for l in &self.locals {
            let (p, n) = (l.mv.p(), l.mv.n());
            let prec = l.mv.torus.prec;
            let y = LocalElement::from_ratio(p, m, (self.level as i128).pow(2), prec)?;
            let g = Mat2Local::a(y, prec) * l.k.clone();
            let w = whittaker_closed(&l.mv, &g)?;
            match w.phase {
                Some(r) => {
                    debug_assert_eq!(w.magnitude_sq, units_mod_un(p, n));
                    phase = phase * r;
                }
                None => return Ok(None),
            }
        }
        Ok(Some(phase))
    }
}

/// `(mv, a(z), "z")`.
pub fn diagonal_local(mv: MinimalVectorSpec, z: u64) -> Result<(MinimalVectorSpec, Mat2Local, String)> {
    let (p, prec) = (mv.p(), mv.torus.prec);
    if z % p == 0 {
        return Err(Error::Config(format!("z = {z} is not a unit at {p}")));
    }
    let k = Mat2Local::a(LocalElement::from_int(p, z as i128, prec), prec);
    Ok((mv, k, format!("a({z})")))
}

/// Units mod `p^n`, the representatives `z` of the classes `k_p = a(z)`.
pub fn unit_classes(p: u64, n: u32) -> Vec<u64> {
    (1..ipow(p, n)).filter(|z| z % p != 0).collect()
}
