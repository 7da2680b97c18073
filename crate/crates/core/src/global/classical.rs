//! The classical subgroup `Gamma_{T,D}(N) = {a = d, c = -b D mod N}` of
//! `SL_2(Z)` and its character `chi = prod_{p | N} chi_p^{-1}`.

use rand::Rng;

use super::ramified::RamifiedData;
use crate::characters::chi_theta_t;
use crate::error::{Error, Result};
use crate::gl2::Mat2Local;
use crate::residue::{ipow, reduce, UnitRoot};

/// Integer matrix `[a, b, c, d]`.
pub type IntMat = [i128; 4];

pub fn int_mul(x: &IntMat, y: &IntMat) -> IntMat {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

pub fn int_inv(x: &IntMat) -> IntMat {
    [x[3], -x[1], -x[2], x[0]]
}

/// `Gamma_{T,D}(N)` for the level and tori of `ram`.
#[derive(Clone, Debug)]
pub struct GammaTD<'a> {
    pub ram: &'a RamifiedData,
    pub d: u64,
}

impl<'a> GammaTD<'a> {
    /// `D` must reduce to the torus parameter `alpha_p` mod `p^{n_p}`.
    pub fn new(ram: &'a RamifiedData, d: u64) -> Result<Self> {
        for l in &ram.locals {
            let pn = ipow(l.mv.p(), l.mv.n());
            if d % pn != l.mv.torus.alpha % pn {
                return Err(Error::Config(format!(
                    "D = {d} is not alpha = {} mod {pn}",
                    l.mv.torus.alpha
                )));
            }
        }
        Ok(GammaTD {
            ram,
            d: d % ram.level.max(1),
        })
    }

    /// The `D mod N` matching every `alpha_p`.
    pub fn standard(ram: &'a RamifiedData) -> Result<Self> {
        let n = ram.level;
        let d = (0..n.max(1))
            .find(|d| {
                ram.locals.iter().all(|l| {
                    let pn = ipow(l.mv.p(), l.mv.n());
                    d % pn == l.mv.torus.alpha % pn
                })
            })
            .expect("CRT has a solution");
        Self::new(ram, d)
    }

    pub fn is_member(&self, g: &IntMat) -> Result<bool> {
        if g[0] * g[3] - g[1] * g[2] != 1 {
            return Err(Error::Config(format!("{g:?} is not in SL_2(Z)")));
        }
        let n = self.ram.level;
        let cb = g[2] + g[1] * self.d as i128;
        Ok(reduce(g[0] - g[3], n) == 0 && reduce(cb, n) == 0)
    }

    /// Membership and, for members, `chi(gamma)`.
    pub fn eval(&self, g: &IntMat) -> Result<(bool, Option<UnitRoot>)> {
        if !self.is_member(g)? {
            return Ok((false, None));
        }
        let mut chi = UnitRoot::ONE;
        for l in &self.ram.locals {
            let m = Mat2Local::from_ints(l.mv.p(), *g, l.mv.torus.prec);
            chi = chi * chi_theta_t(&m, &l.mv)?.inv();
        }
        Ok((true, Some(chi)))
    }

    /// A member drawn by rejection from random words in `S` and `T^j`.
    pub fn random_member<R: Rng>(&self, rng: &mut R, word_len: usize) -> Result<IntMat> {
        for _ in 0..100_000 {
            let g = random_word(rng, word_len);
            if self.is_member(&g)? {
                return Ok(g);
            }
        }
        Err(Error::Config("no member found by rejection".into()))
    }
}

/// `prod (T^{j_i} S)` with `|j_i| <= 3`.
pub fn random_word<R: Rng>(rng: &mut R, len: usize) -> IntMat {
    let s: IntMat = [0, -1, 1, 0];
    let mut g: IntMat = [1, 0, 0, 1];
    for _ in 0..len {
        let j = rng.gen_range(-3i128..=3);
        g = int_mul(&g, &int_mul(&[1, j, 0, 1], &s));
    }
    g
}

/// Elements of `Gamma(M)`: `n(M)`, `n^T(M)`, the element
/// `[[1 + M, M], [-M, 1 - M]]`, and their conjugates by `conjugators`.
pub fn principal_congruence_elements(m: i128, conjugators: &[IntMat]) -> Vec<IntMat> {
    let base: Vec<IntMat> = vec![[1, m, 0, 1], [1, 0, m, 1], [1 + m, m, -m, 1 - m]];
    let mut out = base.clone();
    for c in conjugators {
        for b in &base {
            out.push(int_mul(&int_mul(c, b), &int_inv(c)));
        }
    }
    out
}
