//! The minimal vector through its matrix coefficient (a character on
//! `Z K_T(n)`, zero elsewhere) and through its Whittaker function, the latter
//! both in closed form and via the intertwining integral from the compactly
//! induced model.

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{chi_theta_t, common_denominator, factor_kt, KtFactorization, MinimalVectorSpec};
use crate::error::{Error, Result};
use crate::gl2::{
    decompose_b1t, enumerate_k_mod, residue_in_kt, subgroup_member, Mat2Local, ResidueMat,
    ResidueRing, Side, Subgroup, TorusSpec,
};
use crate::residue::{
    inv_mod, ipow, max_precision, mul_mod, psi, LocalElement, RootSum, UnitRoot,
    DEFAULT_ENUMERATION_BOUND,
};

/// `K_T(n) / K(2n)` with the factorization of each element.
#[derive(Debug)]
pub struct KtTable {
    pub torus: TorusSpec,
    pub ring: ResidueRing,
    /// `|K / K(2n)|`.
    pub k_order: u64,
    pub members: Vec<ResidueMat>,
    pub factors: Vec<KtFactorization>,
    /// Dense index mod `p^{2n}` -> position in `members`, or `u32::MAX`.
    position: Vec<u32>,
}

impl KtTable {
    pub fn build(torus: &TorusSpec, bound: u128) -> Result<Self> {
        let k = 2 * torus.n;
        let ring = ResidueRing::new(torus.p, k);
        if ring.dense_size() > bound {
            return Err(Error::SizeGuard {
                what: format!("K / K({k}) at p = {}", torus.p),
                size: ring.dense_size(),
                bound,
            });
        }
        let m = ring.modulus;
        let mut members = Vec::new();
        let mut k_order = 0u64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let x = [a, b, c, d];
                        if ring.det(&x) % torus.p == 0 {
                            continue;
                        }
                        k_order += 1;
                        if residue_in_kt(&x, torus.alpha, torus.p, torus.n) {
                            members.push(x);
                        }
                    }
                }
            }
        }
        let factors = members
            .iter()
            .map(|x| factor_kt(x, torus))
            .collect::<Result<Vec<_>>>()?;
        let mut position = vec![u32::MAX; ring.dense_size() as usize];
        for (i, x) in members.iter().enumerate() {
            position[ring.index(x)] = i as u32;
        }
        Ok(KtTable {
            torus: *torus,
            ring,
            k_order,
            members,
            factors,
            position,
        })
    }

    #[inline]
    pub fn position(&self, x: &ResidueMat) -> Option<usize> {
        let i = self.position[self.ring.index(x)];
        (i != u32::MAX).then_some(i as usize)
    }

    /// `vol(K_T(n)) = 1 / [K : K_T(n)]`, by counting.
    pub fn delta(&self) -> Ratio<u64> {
        Ratio::new(self.members.len() as u64, self.k_order)
    }
}

/// `Phi_0` on `K / K(2n)`: `chi` on `K_T(n)`, zero elsewhere.
#[derive(Debug, Clone)]
pub struct MatrixCoefficientTable {
    pub mv: MinimalVectorSpec,
    pub kt: Arc<KtTable>,
    /// Values on `kt.members`, numerators over `den`.
    pub values: Vec<u64>,
    pub den: u64,
}

impl MatrixCoefficientTable {
    pub fn new(mv: &MinimalVectorSpec, kt: Arc<KtTable>) -> Self {
        assert_eq!(kt.torus, mv.torus, "table built for a different torus");
        let den = common_denominator(mv);
        let values = kt.factors.iter().map(|f| f.numerator(mv, den)).collect();
        MatrixCoefficientTable {
            mv: mv.clone(),
            kt,
            values,
            den,
        }
    }

    pub fn build(mv: &MinimalVectorSpec) -> Result<Self> {
        let kt = Arc::new(KtTable::build(&mv.torus, DEFAULT_ENUMERATION_BOUND)?);
        Ok(Self::new(mv, kt))
    }

    pub fn delta(&self) -> Ratio<u64> {
        self.kt.delta()
    }

    /// `Phi_0(x)` for `x` in `K / K(2n)`.
    pub fn value(&self, x: &ResidueMat) -> Option<UnitRoot> {
        self.kt
            .position(x)
            .map(|i| UnitRoot::from_ratio(self.values[i] as i128, self.den))
    }
}

/// `Phi_0(g)`: `chi_pi(g)` on `Z K_T(n)` and `None` (zero) elsewhere.
pub fn matrix_coefficient(mv: &MinimalVectorSpec, g: &Mat2Local) -> Result<Option<UnitRoot>> {
    if g.det().valuation()?.is_none() {
        return Err(Error::NotInvertible("singular matrix".into()));
    }
    if !subgroup_member(g, Subgroup::ZKT(mv.n()), &mv.torus)? {
        return Ok(None);
    }
    chi_theta_t(g, mv).map(Some)
}

/// Outcome of one exhaustive or sampled identity check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checked > 0
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::Verification(format!(
                "{}: {} violations in {} checks; first: {}",
                self.name,
                self.violations,
                self.checked,
                self.counterexample.as_deref().unwrap_or("none")
            )))
        }
    }
}

/// `chi(xy) = chi(x) chi(y)` for every pair in `K_T(n) / K(2n)`.
pub fn multiplicativity_exhaustive(table: &MatrixCoefficientTable) -> CheckOutcome {
    let kt = &table.kt;
    let ring = kt.ring;
    let den = table.den;
    let (violations, first) = kt
        .members
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut bad = 0u64;
            let mut first = None;
            for (j, y) in kt.members.iter().enumerate() {
                let xy = ring.mul(x, y);
                let ok = match kt.position(&xy) {
                    Some(k) => (table.values[i] + table.values[j]) % den == table.values[k],
                    None => false,
                };
                if !ok {
                    bad += 1;
                    first.get_or_insert((*x, *y));
                }
            }
            (bad, first)
        })
        .reduce(|| (0, None), |a, b| (a.0 + b.0, a.1.or(b.1)));
    let n = kt.members.len() as u64;
    CheckOutcome {
        name: format!("chi multiplicative on K_T({}) mod K({}) at p = {}", kt.torus.n, 2 * kt.torus.n, kt.torus.p),
        checked: n * n,
        violations,
        counterexample: first.map(|(x, y)| format!("x = {x:?}, y = {y:?}")),
    }
}

/// A uniformly random element of `K_T(n)` modulo `p^{2n}`.
pub fn random_kt_residue<R: rand::Rng>(rng: &mut R, torus: &TorusSpec) -> ResidueMat {
    let ring = ResidueRing::new(torus.p, 2 * torus.n);
    let m = ring.modulus;
    let pn = ipow(torus.p, torus.n);
    loop {
        let a = rng.gen_range(0..m);
        let b = rng.gen_range(0..m);
        let d = (a + pn * rng.gen_range(0..m / pn)) % m;
        let c = (m - mul_mod(torus.alpha, b, m) + pn * rng.gen_range(0..m / pn)) % m;
        let x = [a, b, c, d];
        if ring.det(&x) % torus.p != 0 {
            return x;
        }
    }
}

/// Multiplicativity on random pairs, each value computed from its own
/// factorization (no table).
pub fn multiplicativity_sampled(mv: &MinimalVectorSpec, pairs: u64, seed: u64) -> Result<CheckOutcome> {
    use rand::SeedableRng;
    let ring = ResidueRing::new(mv.p(), 2 * mv.n());
    let den = common_denominator(mv);
    let chunks = 16u64;
    let per = pairs.div_ceil(chunks);
    let results: Vec<Result<(u64, u64, Option<String>)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (c << 32));
            let mut bad = 0;
            let mut first = None;
            for _ in 0..per {
                let x = random_kt_residue(&mut rng, &mv.torus);
                let y = random_kt_residue(&mut rng, &mv.torus);
                let xy = ring.mul(&x, &y);
                let fx = factor_kt(&x, &mv.torus)?.numerator(mv, den);
                let fy = factor_kt(&y, &mv.torus)?.numerator(mv, den);
                let fxy = factor_kt(&xy, &mv.torus)?.numerator(mv, den);
                if (fx + fy) % den != fxy {
                    bad += 1;
                    first.get_or_insert(format!("x = {x:?}, y = {y:?}"));
                }
            }
            Ok((per, bad, first))
        })
        .collect();
    let mut out = CheckOutcome {
        name: format!("chi multiplicative on random pairs at (p, n) = ({}, {})", mv.p(), mv.n()),
        checked: 0,
        violations: 0,
        counterexample: None,
    };
    for r in results {
        let (n, bad, first) = r?;
        out.checked += n;
        out.violations += bad;
        if out.counterexample.is_none() {
            out.counterexample = first;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionReport {
    pub delta: Ratio<u64>,
    pub norm_sq: Ratio<u64>,
    pub h_checked: u64,
    pub support_size: u64,
}

/// Checks `Phi_0 * Phi_0 = delta Phi_0` at every `h` in `K / K(2n)` and
/// `int |Phi_0|^2 = delta`, in exact arithmetic, and returns `delta`.
pub fn convolution_check(table: &MatrixCoefficientTable) -> Result<ConvolutionReport> {
    let kt = &table.kt;
    let ring = kt.ring;
    let m = ring.modulus;
    let den = table.den;
    let k_order = kt.k_order;
    let size = k_order as u128 * kt.members.len() as u128;
    if size > 20_000_000_000 {
        return Err(Error::SizeGuard {
            what: "convolution over K / K(2n)".into(),
            size,
            bound: 20_000_000_000,
        });
    }
    // chi(g)^{-1} as numerators
    let inv: Vec<u64> = table.values.iter().map(|v| (den - v) % den).collect();
    let modtab: Vec<u64> = (0..2 * m * m).map(|x| x % m).collect();
    let mul = |x: &ResidueMat, y: &ResidueMat| -> ResidueMat {
        [
            modtab[(x[0] * y[0] + x[1] * y[2]) as usize],
            modtab[(x[0] * y[1] + x[1] * y[3]) as usize],
            modtab[(x[2] * y[0] + x[3] * y[2]) as usize],
            modtab[(x[2] * y[1] + x[3] * y[3]) as usize],
        ]
    };
    let pn = ipow(ring.p, kt.torus.n);
    let alpha = kt.torus.alpha;
    let red_n: Vec<u64> = (0..(alpha + 2) * m).map(|x| x % pn).collect();
    let hs: Vec<ResidueMat> = enumerate_k_mod(ring.p, ring.k, DEFAULT_ENUMERATION_BOUND)?;
    let delta_q = Ratio::new(kt.members.len() as i64, k_order as i64);
    let failures: Vec<String> = hs
        .par_iter()
        .filter_map(|h| {
            // accumulate chi(g)^{-1} chi(gh) over g in K_T(n)
            let mut sum: Vec<(u64, u64)> = Vec::new();
            for (g, ig) in kt.members.iter().zip(&inv) {
                let gh = mul(g, h);
                // cheap K_T(n) test first; the table lookup only runs on members
                if red_n[(gh[0] + m - gh[3]) as usize] != 0
                    || red_n[(gh[2] + alpha * gh[1]) as usize] != 0
                {
                    continue;
                }
                if let Some(k) = kt.position(&gh) {
                    let key = (ig + table.values[k]) % den;
                    match sum.iter_mut().find(|e| e.0 == key) {
                        Some(e) => e.1 += 1,
                        None => sum.push((key, 1)),
                    }
                }
            }
            let mut lhs = RootSum::zero();
            for (key, count) in sum {
                lhs.add_term(
                    UnitRoot::from_ratio(key as i128, den),
                    Ratio::new(count as i64, k_order as i64),
                );
            }
            let rhs = match table.value(h) {
                Some(v) => RootSum::single(v, delta_q),
                None => RootSum::zero(),
            };
            (lhs != rhs).then(|| format!("h = {h:?}: lhs {lhs:?}, rhs {rhs:?}"))
        })
        .collect();
    if let Some(f) = failures.first() {
        return Err(Error::Verification(format!(
            "convolution identity fails at {} of {} h; first {f}",
            failures.len(),
            hs.len()
        )));
    }
    // |Phi_0|^2 is 1 on the support, so its integral is |support| / |K|.
    let norm_sq = Ratio::new(kt.members.len() as u64, k_order);
    let delta = table.delta();
    if norm_sq != delta {
        return Err(Error::Verification(format!("int |Phi_0|^2 = {norm_sq} != delta = {delta}")));
    }
    Ok(ConvolutionReport {
        delta,
        norm_sq,
        h_checked: hs.len() as u64,
        support_size: kt.members.len() as u64,
    })
}

// ---------------------------------------------------------------------------
// Whittaker function
// ---------------------------------------------------------------------------

/// `W_0(g) / <W_0, W_0>^{1/2}`: `sqrt(magnitude_sq) * phase`, or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WhittakerValue {
    pub magnitude_sq: u64,
    pub phase: Option<UnitRoot>,
}

impl WhittakerValue {
    pub fn zero() -> Self {
        WhittakerValue {
            magnitude_sq: 0,
            phase: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.phase.is_none()
    }

    pub fn to_complex(&self) -> Complex64 {
        match self.phase {
            Some(r) => r.to_complex() * (self.magnitude_sq as f64).sqrt(),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// `|o^x / U_n| = (q - 1) q^{n-1}`.
pub fn units_mod_un(p: u64, n: u32) -> u64 {
    (p - 1) * ipow(p, n - 1)
}

/// Tests `y in p^{-2n} a U_n` for the class `a mod p^n`.
fn in_support_class(y: &LocalElement, a: u64, p: u64, n: u32) -> Result<bool> {
    let v = match y.valuation()? {
        Some(v) => v,
        None => return Ok(false),
    };
    if v != -2 * n as i64 {
        return Ok(false);
    }
    Ok(y.unit_residue(n)? == a % ipow(p, n))
}

/// Closed form: `|o^x/U_n|^{1/2} theta(t) psi(m)` if `y in p^{-2n} a U_n`,
/// zero otherwise, for `g = [[y, m], [0, 1]] t`.
pub fn whittaker_closed(mv: &MinimalVectorSpec, g: &Mat2Local) -> Result<WhittakerValue> {
    let d = decompose_b1t(g, &mv.torus, Side::Left)?;
    if !in_support_class(&d.y, mv.frak_a(), mv.p(), mv.n())? {
        return Ok(WhittakerValue::zero());
    }
    let phase = mv.theta.eval(&d.z)? * psi(&d.m)?;
    Ok(WhittakerValue {
        magnitude_sq: units_mod_un(mv.p(), mv.n()),
        phase: Some(phase),
    })
}

/// The unique `b mod p^n` with `W_0(a(y) k) != 0` iff `y in p^{-2n}(b + p^n)`.
pub fn support_profile(mv: &MinimalVectorSpec, k: &Mat2Local) -> Result<u64> {
    if !subgroup_member(k, Subgroup::K, &mv.torus)? {
        return Err(Error::Hypothesis("support profile needs k in K".into()));
    }
    let d = decompose_b1t(k, &mv.torus, Side::Left)?;
    let pn = ipow(mv.p(), mv.n());
    let z = d.y.unit_residue(mv.n())?;
    let zi = inv_mod(z, pn).expect("z is a unit");
    Ok(mul_mod(zi, mv.frak_a(), pn))
}

/// Oracle settings for [`whittaker_oracle`].
#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Extra refinement levels tried before giving up.
    pub max_refinements: u32,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_refinements: 4,
            tolerance: 1e-12,
        }
    }
}

/// `phi(h)`: `chi_pi(h)` on `Z K_T(n)`, zero elsewhere.
fn induced_function(mv: &MinimalVectorSpec, h: &Mat2Local) -> Result<Complex64> {
    match chi_theta_t(h, mv) {
        Ok(v) => Ok(v.to_complex()),
        Err(Error::NotInSupport) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// `W(g) = int_F phi(a(c) n(x) g) psi(-x) dx` with
/// `c = -p^{2n} / (a_theta alpha)`, as a finite sum over cells of `p^L o`.
///
/// The integrand vanishes outside a ball determined by `g`; inside it is
/// locally constant, and the level is raised until two consecutive levels
/// agree.
pub fn whittaker_oracle(mv: &MinimalVectorSpec, g: &Mat2Local, cfg: &OracleConfig) -> Result<Complex64> {
    let p = mv.p();
    let n = mv.n() as i64;
    let prec = max_precision(p);
    let a = LocalElement::from_int(p, mv.a_theta as i128, prec);
    let c = -(LocalElement::uniformizer_pow(p, 2 * n, prec)
        .try_div(&(a * mv.torus.alpha_local()))?);
    let vc = 2 * n;
    let vdet = g.det().finite_valuation()? + vc;
    if vdet % 2 != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let j = vdet / 2;
    // second row of a(c) n(x) g is the second row of g
    if !g.c.val_at_least(j)? || !g.d.val_at_least(j)? {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // first row: c (g11 + x g21) and c (g12 + x g22) must lie in p^j o
    let need = j - vc;
    let mut ball: Option<(LocalElement, i64)> = None;
    for (top, bottom) in [(g.a, g.c), (g.b, g.d)] {
        if bottom.is_exact_zero() || bottom.is_indistinct() {
            if !top.val_at_least(need)? {
                return Ok(Complex64::new(0.0, 0.0));
            }
            continue;
        }
        let center = -(top.try_div(&bottom)?);
        let r = need - bottom.finite_valuation()?;
        if ball.map_or(true, |(_, r0)| r > r0) {
            ball = Some((center, r));
        }
    }
    let (center, r0) = ball.ok_or_else(|| {
        Error::Decomposition("integration domain is unbounded for a singular bottom row".into())
    })?;
    // the other condition must hold at the center, otherwise the balls are disjoint
    for (top, bottom) in [(g.a, g.c), (g.b, g.d)] {
        if !(top + center * bottom).val_at_least(need)? {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    let level_sum = |level: i64| -> Result<Complex64> {
        let cells = ipow(p, (level - r0) as u32);
        let cellvol = (p as f64).powi(-(level as i32));
        let step = LocalElement::uniformizer_pow(p, r0, prec);
        let ac = Mat2Local::a(c, prec);
        let mut total = Complex64::new(0.0, 0.0);
        for s in 0..cells {
            let x = center + step * LocalElement::from_int(p, s as i128, prec);
            let h = ac * Mat2Local::n(x, prec) * *g;
            let f = induced_function(mv, &h)?;
            if f.norm() > 0.0 {
                total += f * psi(&(-x))?.to_complex() * cellvol;
            }
        }
        Ok(total)
    };
    let mut level = n.max(r0);
    let mut prev = level_sum(level)?;
    for _ in 0..=cfg.max_refinements {
        level += 1;
        let next = level_sum(level)?;
        let scale = next.norm().max(prev.norm()).max(1.0);
        if (next - prev).norm() <= cfg.tolerance * scale {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Unstable(format!(
        "Whittaker integral did not settle by level {level}"
    )))
}

/// A random `g = n(m) a(y) t z` with `y` in the support class.
pub fn random_support_element<R: rand::Rng>(rng: &mut R, mv: &MinimalVectorSpec, prec: u32) -> Mat2Local {
    let p = mv.p();
    let n = mv.n();
    let spec = mv.torus;
    let pn = ipow(p, n);
    let big = ipow(p, prec.min(12));
    // y = p^{-2n} (frak_a + p^n s)
    let unit = mv.frak_a() + pn * rng.gen_range(0..big / pn);
    let y = LocalElement::from_parts(p, -2 * n as i64, unit, prec);
    let mnum = rng.gen_range(0..big) as i128;
    let m = LocalElement::from_int(p, mnum, prec)
        * LocalElement::uniformizer_pow(p, rng.gen_range(-3 * n as i64..2), prec);
    let t = loop {
        let a = rng.gen_range(0..big);
        let b = rng.gen_range(0..big);
        if a % p != 0 || b % p != 0 {
            let z = crate::residue::QuadElement::from_residues(p, a, b, prec, spec.alpha);
            break crate::gl2::torus_embed(&z, &spec).expect("same alpha");
        }
    };
    let zc = LocalElement::uniformizer_pow(p, rng.gen_range(-2..3), prec);
    Mat2Local::n(m, prec) * Mat2Local::a(y, prec) * t * Mat2Local::z(zc)
}
