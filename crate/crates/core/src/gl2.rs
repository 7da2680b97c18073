//! `GL_2` over truncated `p`-adics: inert tori in canonical form, the
//! congruence subgroups `K(r)`, `K_1(r)`, `B_1(r)`, `K_T(r)`, `Z K_T(r)`, and
//! the factorizations `G = B_1 T = T B_1`.
//!
//! The finite quotients `K / K(r)` are handled separately through
//! [`ResidueMat`] and [`ResidueRing`], which store matrices over
//! `Z / p^r` as plain integers so that exhaustive checks stay cheap.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{
    default_precision, inv_mod, ipow, is_odd_prime, is_unit_nonsquare, max_precision, mul_mod,
    reduce, LocalElement, QuadElement, DEFAULT_ENUMERATION_BOUND,
};

/// A 2x2 matrix over `Q_p` with truncated entries.
#[derive(Clone, Copy, Debug)]
pub struct Mat2Local {
    pub a: LocalElement,
    pub b: LocalElement,
    pub c: LocalElement,
    pub d: LocalElement,
}

impl Mat2Local {
    pub fn new(a: LocalElement, b: LocalElement, c: LocalElement, d: LocalElement) -> Self {
        let p = a.p();
        assert!(b.p() == p && c.p() == p && d.p() == p, "mixed primes");
        Mat2Local { a, b, c, d }
    }

    pub fn from_ints(p: u64, e: [i128; 4], prec: u32) -> Self {
        let f = |x| LocalElement::from_int(p, x, prec);
        Self::new(f(e[0]), f(e[1]), f(e[2]), f(e[3]))
    }

    /// Lift of a residue matrix modulo `p^k`.
    pub fn from_residues(p: u64, e: [u64; 4], k: u32) -> Self {
        let f = |x| LocalElement::from_residue(p, x, k);
        Self::new(f(e[0]), f(e[1]), f(e[2]), f(e[3]))
    }

    pub fn identity(p: u64, prec: u32) -> Self {
        Self::from_ints(p, [1, 0, 0, 1], prec)
    }

    /// `n(x) = [[1, x], [0, 1]]`.
    pub fn n(x: LocalElement, prec: u32) -> Self {
        let p = x.p();
        Self::new(LocalElement::one(p, prec), x, LocalElement::zero(p), LocalElement::one(p, prec))
    }

    /// `a(y) = [[y, 0], [0, 1]]`.
    pub fn a(y: LocalElement, prec: u32) -> Self {
        let p = y.p();
        Self::new(y, LocalElement::zero(p), LocalElement::zero(p), LocalElement::one(p, prec))
    }

    /// `z(t) = [[t, 0], [0, t]]`.
    pub fn z(t: LocalElement) -> Self {
        let p = t.p();
        Self::new(t, LocalElement::zero(p), LocalElement::zero(p), t)
    }

    /// `w_alpha = [[0, 1], [-alpha, 0]]`, the image of `sqrt(-alpha)`.
    pub fn w_alpha(p: u64, alpha: u64, prec: u32) -> Self {
        Self::from_ints(p, [0, 1, -(alpha as i128), 0], prec)
    }

    pub fn p(&self) -> u64 {
        self.a.p()
    }

    pub fn det(&self) -> LocalElement {
        self.a * self.d - self.b * self.c
    }

    pub fn try_inv(&self) -> Result<Self> {
        let di = self.det().try_inv()?;
        Ok(Mat2Local {
            a: self.d * di,
            b: -self.b * di,
            c: -self.c * di,
            d: self.a * di,
        })
    }

    pub fn scale(&self, s: &LocalElement) -> Self {
        Mat2Local {
            a: self.a * *s,
            b: self.b * *s,
            c: self.c * *s,
            d: self.d * *s,
        }
    }

    pub fn entries(&self) -> [LocalElement; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.entries()
            .iter()
            .zip(other.entries().iter())
            .all(|(x, y)| x.eq_to_precision(y))
    }

    /// Residues of the entries modulo `p^k` (entries must be integral).
    pub fn residues(&self, k: u32) -> Result<[u64; 4]> {
        Ok([
            self.a.residue(k)?,
            self.b.residue(k)?,
            self.c.residue(k)?,
            self.d.residue(k)?,
        ])
    }

    /// Smallest valuation among the entries (exact zeros ignored).
    pub fn min_entry_valuation(&self) -> Result<Option<i64>> {
        let mut best: Option<i64> = None;
        for e in self.entries() {
            if let Some(v) = e.valuation()? {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        Ok(best)
    }
}

impl Mul for Mat2Local {
    type Output = Mat2Local;
    fn mul(self, r: Mat2Local) -> Mat2Local {
        Mat2Local {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

impl fmt::Display for Mat2Local {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

// ---------------------------------------------------------------------------
// Tori
// ---------------------------------------------------------------------------

/// The inert torus `T_{alpha,0,1}` at level `n`, with working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusSpec {
    pub p: u64,
    pub n: u32,
    pub alpha: u64,
    pub prec: u32,
}

impl TorusSpec {
    /// Uses the smallest positive `alpha` with `-alpha` a non-square mod `p`.
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::UnsupportedPrime(p));
        }
        let alpha = (1..p)
            .find(|&a| is_unit_nonsquare(-(a as i64), p))
            .expect("odd primes have non-squares");
        Self::with_alpha(p, n, alpha)
    }

    pub fn with_alpha(p: u64, n: u32, alpha: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::UnsupportedPrime(p));
        }
        if n == 0 {
            return Err(Error::Config("level n must be positive".into()));
        }
        if !is_unit_nonsquare(-(alpha as i64), p) {
            return Err(Error::NotInert(-(alpha as i64), p));
        }
        let prec = default_precision(n).min(max_precision(p));
        crate::residue::check_precision(prec, n)?;
        Ok(TorusSpec { p, n, alpha, prec })
    }

    pub fn with_precision(mut self, prec: u32) -> Result<Self> {
        crate::residue::check_precision(prec, self.n)?;
        if prec > max_precision(self.p) {
            return Err(Error::Precision(format!("precision {prec} exceeds word size")));
        }
        self.prec = prec;
        Ok(self)
    }

    pub fn q(&self) -> u64 {
        self.p
    }

    pub fn alpha_local(&self) -> LocalElement {
        LocalElement::from_int(self.p, self.alpha as i128, self.prec)
    }

    pub fn quad(&self, re: LocalElement, im: LocalElement) -> QuadElement {
        QuadElement::new_unchecked(re, im, self.alpha)
    }
}

/// `x + y sqrt(-alpha) -> [[x, y], [-alpha y, x]]`.
pub fn torus_embed(z: &QuadElement, spec: &TorusSpec) -> Result<Mat2Local> {
    if z.alpha() != spec.alpha {
        return Err(Error::DiscriminantMismatch(z.delta(), -(spec.alpha as i64)));
    }
    let alpha = spec.alpha_local();
    Ok(Mat2Local::new(z.re(), z.im(), -(alpha * z.im()), z.re()))
}

/// Inverse of [`torus_embed`] on `T`; `None` if `g` is not in `T` to precision.
pub fn torus_element(g: &Mat2Local, spec: &TorusSpec) -> Option<QuadElement> {
    let alpha = spec.alpha_local();
    let in_t = g.a.eq_to_precision(&g.d) && (g.c + alpha * g.b).eq_to_precision(&LocalElement::zero(spec.p));
    in_t.then(|| spec.quad(g.a, g.b))
}

/// Membership in `T_{alpha,beta,gamma} = { g : g^t S g = det(g) S }`.
pub fn in_general_torus(g: &Mat2Local, s: &[LocalElement; 3]) -> bool {
    let p = g.p();
    let two = LocalElement::from_int(p, 2, max_precision(p));
    let half_beta = s[1].try_div(&two).expect("2 is a unit");
    let sm = Mat2Local::new(s[0], half_beta, half_beta, s[2]);
    let gt = Mat2Local::new(g.a, g.c, g.b, g.d);
    (gt * sm * *g).eq_to_precision(&sm.scale(&g.det()))
}

// ---------------------------------------------------------------------------
// Subgroups
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subgroup {
    /// `GL_2(o)`.
    K,
    /// Principal congruence subgroup `1 + p^r M_2(o)`.
    KLevel(u32),
    /// `[[*, *], [p^r, 1 + p^r]]`.
    K1(u32),
    /// `[[o^x, p^r], [0, 1]]`.
    B1(u32),
    /// `K_T(r) = T(o) K(r)`.
    KT(u32),
    /// `Z K_T(r)`.
    ZKT(u32),
}

fn in_k(g: &Mat2Local) -> Result<bool> {
    for e in g.entries() {
        if !e.val_at_least(0)? {
            return Ok(false);
        }
    }
    g.det().is_unit()
}

fn is_one_mod(x: &LocalElement, r: u32) -> Result<bool> {
    let one = LocalElement::one(x.p(), max_precision(x.p()));
    (*x - one).val_at_least(r as i64)
}

/// Zero at the tracked precision.
fn vanishes(x: &LocalElement) -> bool {
    x.is_exact_zero() || x.is_indistinct()
}

pub fn subgroup_member(g: &Mat2Local, which: Subgroup, spec: &TorusSpec) -> Result<bool> {
    match which {
        Subgroup::ZKT(r) => {
            let v = match g.det().valuation()? {
                Some(v) => v,
                None => return Ok(false),
            };
            if v % 2 != 0 {
                return Ok(false);
            }
            let s = LocalElement::uniformizer_pow(g.p(), -(v / 2), max_precision(g.p()));
            subgroup_member(&g.scale(&s), Subgroup::KT(r), spec)
        }
        _ => {
            if !in_k(g)? {
                return Ok(false);
            }
            let r_i = |r: u32| r as i64;
            Ok(match which {
                Subgroup::K => true,
                Subgroup::KLevel(r) => {
                    is_one_mod(&g.a, r)?
                        && g.b.val_at_least(r_i(r))?
                        && g.c.val_at_least(r_i(r))?
                        && is_one_mod(&g.d, r)?
                }
                Subgroup::K1(r) => g.c.val_at_least(r_i(r))? && is_one_mod(&g.d, r)?,
                Subgroup::B1(r) => {
                    let one = LocalElement::one(g.p(), max_precision(g.p()));
                    vanishes(&g.c) && vanishes(&(g.d - one)) && g.b.val_at_least(r_i(r))?
                }
                Subgroup::KT(r) => {
                    (g.a - g.d).val_at_least(r_i(r))?
                        && (g.c + spec.alpha_local() * g.b).val_at_least(r_i(r))?
                }
                Subgroup::ZKT(_) => unreachable!(),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// B_1 T factorizations
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `g = [[y, m], [0, 1]] t`.
    Left,
    /// `g = t [[y, m], [0, 1]]`.
    Right,
}

#[derive(Clone, Copy, Debug)]
pub struct B1TDecomposition {
    pub y: LocalElement,
    pub m: LocalElement,
    pub t: Mat2Local,
    /// `t` as an element of `E^x`.
    pub z: QuadElement,
}

impl B1TDecomposition {
    pub fn borel(&self) -> Mat2Local {
        let p = self.y.p();
        Mat2Local::new(self.y, self.m, LocalElement::zero(p), LocalElement::one(p, max_precision(p)))
    }

    pub fn reassemble(&self, side: Side) -> Mat2Local {
        match side {
            Side::Left => self.borel() * self.t,
            Side::Right => self.t * self.borel(),
        }
    }
}

/// Writes `g` as `[[y, m], [0, 1]] t` or `t [[y, m], [0, 1]]` with `t` in
/// the canonical torus.
pub fn decompose_b1t(g: &Mat2Local, spec: &TorusSpec, side: Side) -> Result<B1TDecomposition> {
    let alpha = spec.alpha_local();
    let det = g.det();
    let alpha_det = alpha * det;
    if alpha_det.is_exact_zero() || alpha_det.is_indistinct() {
        return Err(Error::Decomposition("matrix is singular at tracked precision".into()));
    }
    let (y, m, z) = match side {
        Side::Left => {
            // The bottom row of g is the bottom row of t.
            let den = g.c * g.c + alpha * g.d * g.d;
            let y = alpha_det
                .try_div(&den)
                .map_err(|e| Error::Decomposition(format!("c^2 + alpha d^2: {e}")))?;
            let m = (g.a * g.c + alpha * g.b * g.d)
                .try_div(&den)
                .map_err(|e| Error::Decomposition(e.to_string()))?;
            let im = -(g.c.try_div(&alpha)?);
            (y, m, spec.quad(g.d, im))
        }
        Side::Right => {
            let den = alpha * g.a * g.a + g.c * g.c;
            let y = den.try_div(&alpha_det)?;
            let m = (alpha * g.a * g.b + g.c * g.d).try_div(&alpha_det)?;
            // t = g [[u, -m u], [0, 1]] with u = 1/y; its first column is (a u, c u).
            let u = y.try_inv()?;
            let im = -((g.c * u).try_div(&alpha)?);
            (y, m, spec.quad(g.a * u, im))
        }
    };
    let t = torus_embed(&z, spec)?;
    Ok(B1TDecomposition { y, m, t, z })
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

/// Square root of a unit square in `Z_p` by Newton iteration.
pub fn hensel_sqrt(x: &LocalElement, prec: u32) -> Result<LocalElement> {
    let p = x.p();
    if !x.is_unit()? {
        return Err(Error::Hypothesis("square root of a non-unit".into()));
    }
    let r = x.unit_residue(1)?;
    let s0 = (1..p)
        .find(|s| s * s % p == r)
        .ok_or_else(|| Error::Hypothesis(format!("{r} is not a square mod {p}")))?;
    let mut s = LocalElement::from_int(p, s0 as i128, prec);
    let two = LocalElement::from_int(p, 2, prec);
    let iterations = (prec.max(2) as f64).log2().ceil() as u32;
    for _ in 0..iterations {
        // s <- (s + x/s) / 2
        s = (s + x.try_div(&s)?).try_div(&two)?;
    }
    Ok(s.truncate(prec.min(x.precision())))
}

#[derive(Clone, Copy, Debug)]
pub struct Canonicalization {
    /// Conjugator: `g T_S g^{-1} = T_{alpha', 0, 1}`.
    pub g: Mat2Local,
    pub alpha: LocalElement,
}

/// Conjugates `T_{alpha, beta, gamma}` into canonical form. With a
/// `target`, the result is the target's torus `T_{target.alpha, 0, 1}`.
pub fn canonicalize_torus(
    s: &[LocalElement; 3],
    target: Option<&TorusSpec>,
) -> Result<Canonicalization> {
    let [alpha, beta, gamma] = *s;
    let p = alpha.p();
    let prec = alpha.precision().min(max_precision(p));
    for e in s {
        if !e.val_at_least(0)? {
            return Err(Error::Hypothesis("torus parameters must be integral".into()));
        }
    }
    let four = LocalElement::from_int(p, 4, prec);
    let delta = beta * beta - four * alpha * gamma;
    if !delta.is_unit()? {
        return Err(Error::Hypothesis("discriminant is not a unit".into()));
    }
    let dres = delta.unit_residue(1)?;
    if !is_unit_nonsquare(dres as i64, p) {
        return Err(Error::NotInert(dres as i64, p));
    }
    // alpha is a unit since delta is a non-square unit
    let two = LocalElement::from_int(p, 2, prec);
    let x = beta.try_div(&(two * alpha))?;
    let g0 = Mat2Local::n(x, prec);
    let alpha1 = -(four * alpha * alpha).try_div(&delta)?;
    let Some(spec) = target else {
        return Ok(Canonicalization { g: g0, alpha: alpha1 });
    };
    // T_{m^2 a1} = a(m^{-1}) T_{a1} a(m)
    let ratio = spec.alpha_local().try_div(&alpha1)?;
    let m = hensel_sqrt(&ratio, prec)?;
    let g = Mat2Local::a(m.try_inv()?, prec) * g0;
    Ok(Canonicalization {
        g,
        alpha: spec.alpha_local(),
    })
}

// ---------------------------------------------------------------------------
// Finite quotients K / K(r)
// ---------------------------------------------------------------------------

/// Entries `[a, b, c, d]` of a matrix over `Z / p^k`.
pub type ResidueMat = [u64; 4];

/// Arithmetic in `M_2(Z / p^k)` with a dense indexing of all matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
}

impl ResidueRing {
    pub fn new(p: u64, k: u32) -> Self {
        ResidueRing {
            p,
            k,
            modulus: ipow(p, k),
        }
    }

    #[inline]
    pub fn mul(&self, x: &ResidueMat, y: &ResidueMat) -> ResidueMat {
        let m = self.modulus;
        // modulus <= 7^8 keeps the products well inside u64
        debug_assert!(m < (1 << 31));
        [
            (x[0] * y[0] + x[1] * y[2]) % m,
            (x[0] * y[1] + x[1] * y[3]) % m,
            (x[2] * y[0] + x[3] * y[2]) % m,
            (x[2] * y[1] + x[3] * y[3]) % m,
        ]
    }

    #[inline]
    pub fn det(&self, x: &ResidueMat) -> u64 {
        let m = self.modulus;
        (mul_mod(x[0], x[3], m) + m - mul_mod(x[1], x[2], m)) % m
    }

    pub fn inv(&self, x: &ResidueMat) -> Option<ResidueMat> {
        let m = self.modulus;
        let di = inv_mod(self.det(x), m)?;
        Some([
            mul_mod(x[3], di, m),
            mul_mod(m - x[1], di, m),
            mul_mod(m - x[2], di, m),
            mul_mod(x[0], di, m),
        ])
    }

    #[inline]
    pub fn index(&self, x: &ResidueMat) -> usize {
        let m = self.modulus as usize;
        ((x[0] as usize * m + x[1] as usize) * m + x[2] as usize) * m + x[3] as usize
    }

    pub fn dense_size(&self) -> u128 {
        (self.modulus as u128).pow(4)
    }

    pub fn reduce(&self, e: [i128; 4]) -> ResidueMat {
        e.map(|x| reduce(x, self.modulus))
    }

    pub fn to_local(&self, x: &ResidueMat) -> Mat2Local {
        Mat2Local::from_residues(self.p, *x, self.k)
    }

    /// `|GL_2(Z / p^k)|`.
    pub fn gl2_order(&self) -> u128 {
        let p = self.p as u128;
        let m = self.modulus as u128;
        m.pow(4) * (p - 1) * (p * p - 1) / p.pow(3)
    }
}

/// All of `GL_2(Z / p^k)`, i.e. `K / K(k)`, in dense-index order.
pub fn enumerate_k_mod(p: u64, k: u32, bound: u128) -> Result<Vec<ResidueMat>> {
    let ring = ResidueRing::new(p, k);
    if ring.dense_size() > bound {
        return Err(Error::SizeGuard {
            what: format!("M_2(Z/{p}^{k})"),
            size: ring.dense_size(),
            bound,
        });
    }
    let m = ring.modulus;
    let mut out = Vec::with_capacity(ring.gl2_order() as usize);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let x = [a, b, c, d];
                    if ring.det(&x) % p != 0 {
                        out.push(x);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Residue test for `K_T(r)` on a matrix over `Z / p^k`, `r <= k`.
#[inline]
pub fn residue_in_kt(x: &ResidueMat, alpha: u64, p: u64, r: u32) -> bool {
    let pr = ipow(p, r);
    (x[0] + pr - x[3] % pr) % pr == 0 && (x[2] + mul_mod(alpha, x[1], pr)) % pr == 0
}

/// `K_T(n) / K(k)` for `k >= n`, in dense-index order.
pub fn enumerate_kt_mod(spec: &TorusSpec, k: u32, bound: u128) -> Result<Vec<ResidueMat>> {
    let all = enumerate_k_mod(spec.p, k, bound)?;
    Ok(all
        .into_iter()
        .filter(|x| residue_in_kt(x, spec.alpha, spec.p, spec.n))
        .collect())
}

/// `[K : K_T(n)] = q^{2n-1}(q - 1)`.
pub fn kt_index(p: u64, n: u32) -> u64 {
    ipow(p, 2 * n - 1) * (p - 1)
}

pub fn default_bound() -> u128 {
    DEFAULT_ENUMERATION_BOUND
}
