//! Characters of `(o_E / p^{2n})^x`, the admissible `theta`, the constant
//! `a_{theta,T}`, and the character `chi_{theta,T}` of `Z K_T(n)`.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gl2::{
    decompose_b1t, subgroup_member, Mat2Local, ResidueMat, ResidueRing, Side, Subgroup, TorusSpec,
};
use crate::residue::{
    ipow, max_precision, mul_mod, psi, psi_fraction, LocalElement, QuadElement, UnitRoot,
};

/// Default bound on group sizes handled by [`abelian_structure`].
pub const GROUP_BOUND: usize = 100_000;

/// A finite abelian group written as a product of cyclic groups.
#[derive(Clone, Debug)]
pub struct AbelianPresentation<T> {
    pub generators: Vec<T>,
    pub orders: Vec<u64>,
    /// Group elements in canonical (sorted) order.
    pub elements: Vec<T>,
    /// Exponent vector of `elements[i]`.
    pub exponents: Vec<Vec<u64>>,
    index: HashMap<T, usize>,
}

impl<T: Copy + Eq + Hash + Ord> AbelianPresentation<T> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Least common multiple of the cyclic orders.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, o| acc.lcm(o))
    }

    pub fn position(&self, x: &T) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn dlog(&self, x: &T) -> Option<&[u64]> {
        self.position(x).map(|i| self.exponents[i].as_slice())
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn power<T: Copy>(x: T, mut e: u64, identity: T, mul: &impl Fn(&T, &T) -> T) -> T {
    let mut acc = identity;
    let mut base = x;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    acc
}

/// Decomposes a finite abelian group, given as its full element list, into
/// cyclic factors of prime-power order.
///
/// Generators are chosen greedily inside each Sylow subgroup: at each step
/// the element of largest order modulo the span so far, ties going to the
/// smallest element.
pub fn abelian_structure<T, F>(
    elements: &[T],
    identity: T,
    mul: F,
    bound: usize,
) -> Result<AbelianPresentation<T>>
where
    T: Copy + Eq + Hash + Ord + std::fmt::Debug,
    F: Fn(&T, &T) -> T,
{
    if elements.len() > bound {
        return Err(Error::SizeGuard {
            what: "abelian group".into(),
            size: elements.len() as u128,
            bound: bound as u128,
        });
    }
    let mut sorted = elements.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != elements.len() {
        return Err(Error::NotAGroup("repeated elements".into()));
    }
    if sorted.binary_search(&identity).is_err() {
        return Err(Error::NotAGroup("identity missing".into()));
    }
    let n = sorted.len() as u64;
    let members: std::collections::HashSet<T> = sorted.iter().copied().collect();
    let primes = prime_factors(n);

    // element orders, computed from the divisors of |G|
    let mut orders = Vec::with_capacity(sorted.len());
    for x in &sorted {
        if power(*x, n, identity, &mul) != identity {
            return Err(Error::NotAGroup(format!("{x:?}^|G| is not the identity")));
        }
        let mut ord = n;
        for &l in &primes {
            while ord % l == 0 && power(*x, ord / l, identity, &mul) == identity {
                ord /= l;
            }
        }
        orders.push(ord);
    }

    let mut generators = Vec::new();
    let mut gen_orders = Vec::new();
    // Each Sylow factor as (elements, exponent vectors over its own generators).
    let mut factors: Vec<(Vec<T>, Vec<Vec<u64>>)> = Vec::new();
    for &l in &primes {
        let sylow: Vec<T> = sorted
            .iter()
            .zip(&orders)
            .filter(|(_, &o)| prime_factors(o).iter().all(|&q| q == l))
            .map(|(x, _)| *x)
            .collect();
        let mut span: HashMap<T, Vec<u64>> = HashMap::from([(identity, Vec::new())]);
        let mut basis: Vec<(T, u64)> = Vec::new();
        while span.len() < sylow.len() {
            let mut best: Option<(u64, T, T)> = None;
            for x in &sylow {
                if span.contains_key(x) {
                    continue;
                }
                let mut r = 1;
                let mut y = *x;
                while !span.contains_key(&y) {
                    y = mul(&y, x);
                    r += 1;
                    if r > n {
                        return Err(Error::NotAGroup("coset order overflow".into()));
                    }
                }
                if best.map_or(true, |(br, _, _)| r > br) {
                    best = Some((r, *x, y));
                }
            }
            let (r, x, xr) = best.expect("span is a proper subset");
            // x^r = prod g_i^{e_i}; shift x so that its r-th power is trivial
            let e = span[&xr].clone();
            let mut shifted = x;
            for (i, &(g, og)) in basis.iter().enumerate() {
                if e[i] % r != 0 {
                    return Err(Error::NotAGroup("greedy basis step failed".into()));
                }
                let k = (og - e[i] / r % og) % og;
                shifted = mul(&shifted, &power(g, k, identity, &mul));
            }
            let mut next = HashMap::with_capacity(span.len() * r as usize);
            for (s, ev) in &span {
                let mut y = *s;
                for j in 0..r {
                    let mut v = ev.clone();
                    v.resize(basis.len(), 0);
                    v.push(j);
                    if !members.contains(&y) {
                        return Err(Error::NotAGroup(format!("{y:?} outside the element list")));
                    }
                    if next.insert(y, v).is_some() {
                        return Err(Error::NotAGroup("span is not a direct product".into()));
                    }
                    y = mul(&y, &shifted);
                }
            }
            for v in span.values_mut() {
                v.resize(basis.len(), 0);
            }
            basis.push((shifted, r));
            span = next;
        }
        let mut elems: Vec<(T, Vec<u64>)> = span.into_iter().collect();
        elems.sort_by(|a, b| a.0.cmp(&b.0));
        for (g, o) in &basis {
            generators.push(*g);
            gen_orders.push(*o);
        }
        let width = basis.len();
        factors.push((
            elems.iter().map(|e| e.0).collect(),
            elems
                .into_iter()
                .map(|mut e| {
                    e.1.resize(width, 0);
                    e.1
                })
                .collect(),
        ));
    }

    // Combine the Sylow factors.
    let mut combined: Vec<(T, Vec<u64>)> = vec![(identity, Vec::new())];
    for (elems, exps) in &factors {
        let mut next = Vec::with_capacity(combined.len() * elems.len());
        for (x, ex) in &combined {
            for (y, ey) in elems.iter().zip(exps) {
                let mut v = ex.clone();
                v.extend_from_slice(ey);
                next.push((mul(x, y), v));
            }
        }
        combined = next;
    }
    combined.sort_by(|a, b| a.0.cmp(&b.0));
    let elems: Vec<T> = combined.iter().map(|e| e.0).collect();
    if elems != sorted {
        return Err(Error::NotAGroup("Sylow factors do not recover the group".into()));
    }
    let index = elems.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    Ok(AbelianPresentation {
        generators,
        orders: gen_orders,
        elements: elems,
        exponents: combined.into_iter().map(|e| e.1).collect(),
        index,
    })
}

// ---------------------------------------------------------------------------
// (o_E / p^k)^x
// ---------------------------------------------------------------------------

/// `(o_E / p^k)^x` with pairs `(a, b)` meaning `a + b sqrt(-alpha)`.
#[derive(Debug)]
pub struct QuadUnitGroup {
    pub p: u64,
    pub k: u32,
    pub alpha: u64,
    pub modulus: u64,
    pub presentation: AbelianPresentation<(u64, u64)>,
    dense: Vec<u32>,
}

impl QuadUnitGroup {
    pub fn new(p: u64, k: u32, alpha: u64) -> Result<Self> {
        let modulus = ipow(p, k);
        let elements = crate::residue::unit_enumeration(p, k, true, GROUP_BOUND as u128)?;
        let mul = |x: &(u64, u64), y: &(u64, u64)| quad_mul(*x, *y, alpha, modulus);
        let presentation = abelian_structure(&elements, (1 % modulus, 0), mul, GROUP_BOUND)?;
        let mut dense = vec![u32::MAX; (modulus * modulus) as usize];
        for (i, (a, b)) in presentation.elements.iter().enumerate() {
            dense[(a * modulus + b) as usize] = i as u32;
        }
        Ok(QuadUnitGroup {
            p,
            k,
            alpha,
            modulus,
            presentation,
            dense,
        })
    }

    pub fn order(&self) -> usize {
        self.presentation.order()
    }

    pub fn exponent(&self) -> u64 {
        self.presentation.exponent()
    }

    #[inline]
    pub fn position(&self, a: u64, b: u64) -> Option<usize> {
        let i = self.dense[(a % self.modulus * self.modulus + b % self.modulus) as usize];
        (i != u32::MAX).then_some(i as usize)
    }

    pub fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        quad_mul(x, y, self.alpha, self.modulus)
    }
}

#[inline]
pub fn quad_mul(x: (u64, u64), y: (u64, u64), alpha: u64, m: u64) -> (u64, u64) {
    let re = (mul_mod(x.0, y.0, m) + m - mul_mod(alpha, mul_mod(x.1, y.1, m), m)) % m;
    let im = (mul_mod(x.0, y.1, m) + mul_mod(x.1, y.0, m)) % m;
    (re, im)
}

/// A character of `(o_E / p^{2n})^x`, extended to `E^x` by `theta(p) = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaChar {
    pub p: u64,
    pub n: u32,
    /// Position in the enumeration of all characters of the group.
    pub index: usize,
    /// `theta(g_i) = e(exponents[i] / orders[i])` on the presentation generators.
    pub exponents: Vec<u64>,
    /// Smallest `j` with `theta` trivial on `1 + p^j o_E`.
    pub conductor: u32,
    pub trivial_on_f: bool,
    #[serde(skip)]
    group: Arc<QuadUnitGroup>,
    /// `theta` on each group element, as a numerator over the group exponent.
    #[serde(skip)]
    values: Arc<Vec<u32>>,
}

impl ThetaChar {
    fn from_exponents(group: &Arc<QuadUnitGroup>, n: u32, index: usize, exponents: Vec<u64>) -> Self {
        let pres = &group.presentation;
        let ex = pres.exponent();
        let values: Vec<u32> = pres
            .exponents
            .iter()
            .map(|ev| {
                let mut s = 0u64;
                for ((e, c), o) in ev.iter().zip(&exponents).zip(&pres.orders) {
                    s = (s + e * c % o * (ex / o)) % ex;
                }
                s as u32
            })
            .collect();
        let mut theta = ThetaChar {
            p: group.p,
            n,
            index,
            exponents,
            conductor: 0,
            trivial_on_f: false,
            group: group.clone(),
            values: Arc::new(values),
        };
        theta.trivial_on_f = (1..group.modulus)
            .filter(|a| a % group.p != 0)
            .all(|a| theta.numerator(a, 0) == 0);
        theta.conductor = theta.compute_conductor();
        theta
    }

    fn compute_conductor(&self) -> u32 {
        let g = &self.group;
        let trivial_on = |j: u32| {
            g.presentation.elements.iter().all(|&(a, b)| {
                let in_uj = j == 0 || {
                    let pj = ipow(g.p, j);
                    (a + g.modulus - 1) % pj == 0 && b % pj == 0
                };
                !in_uj || self.numerator(a, b) == 0
            })
        };
        (0..=g.k).find(|&j| trivial_on(j)).unwrap_or(g.k)
    }

    pub fn group(&self) -> &Arc<QuadUnitGroup> {
        &self.group
    }

    /// Common denominator of all values.
    pub fn denominator(&self) -> u64 {
        self.group.exponent()
    }

    /// `theta(a + b sqrt(-alpha))` as a numerator over [`Self::denominator`].
    #[inline]
    pub fn numerator(&self, a: u64, b: u64) -> u64 {
        let i = self
            .group
            .position(a, b)
            .unwrap_or_else(|| panic!("({a}, {b}) is not a unit"));
        self.values[i] as u64
    }

    pub fn eval_residue(&self, a: u64, b: u64) -> Result<UnitRoot> {
        let i = self
            .group
            .position(a, b)
            .ok_or_else(|| Error::NotInvertible(format!("({a}, {b}) mod p^{}", self.group.k)))?;
        Ok(UnitRoot::from_ratio(self.values[i] as i128, self.denominator()))
    }

    /// `theta` on `E^x`.
    pub fn eval(&self, z: &QuadElement) -> Result<UnitRoot> {
        let (_, unit) = z.split_uniformizer()?;
        let (a, b) = unit.residue_pair(self.group.k)?;
        self.eval_residue(a, b)
    }

    pub fn inverse(&self) -> ThetaChar {
        let exps = self
            .exponents
            .iter()
            .zip(&self.group.presentation.orders)
            .map(|(e, o)| (o - e) % o)
            .collect();
        let mut t = ThetaChar::from_exponents(&self.group, self.n, usize::MAX, exps);
        t.index = character_index(&t.exponents, &self.group.presentation.orders);
        t
    }

    pub fn is_admissible(&self) -> bool {
        self.trivial_on_f && self.conductor == 2 * self.n
    }
}

fn character_index(exps: &[u64], orders: &[u64]) -> usize {
    exps.iter()
        .zip(orders)
        .fold(0usize, |acc, (e, o)| acc * (*o as usize) + *e as usize)
}

/// Every character of `(o_E / p^{2n})^x`, in mixed-radix order of exponent vectors.
pub fn all_characters(spec: &TorusSpec) -> Result<Vec<ThetaChar>> {
    let group = Arc::new(QuadUnitGroup::new(spec.p, 2 * spec.n, spec.alpha)?);
    let orders = group.presentation.orders.clone();
    let total: usize = orders.iter().map(|o| *o as usize).product();
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut exps = vec![0u64; orders.len()];
        for i in (0..orders.len()).rev() {
            exps[i] = (rest % orders[i] as usize) as u64;
            rest /= orders[i] as usize;
        }
        out.push(ThetaChar::from_exponents(&group, spec.n, idx, exps));
    }
    Ok(out)
}

/// The characters with `theta|_{F^x} = 1` and `a(theta) = 2n`.
pub fn enumerate_theta(spec: &TorusSpec) -> Result<Vec<ThetaChar>> {
    Ok(all_characters(spec)?
        .into_iter()
        .filter(|t| t.is_admissible())
        .collect())
}

/// `(q + 1) q^{2n-1} - (q + 1) q^{2n-2}`.
pub fn expected_theta_count(p: u64, n: u32) -> u64 {
    (p + 1) * ipow(p, 2 * n - 1) - (p + 1) * ipow(p, 2 * n - 2)
}

/// Unique `a mod p^n` with `psi_E(p^{-n} a sqrt(-alpha) u) = theta(1 + p^n u)`
/// for every `u` in `o_E / p^n`.
pub fn solve_a_theta(theta: &ThetaChar, spec: &TorusSpec) -> Result<u64> {
    let solutions = a_theta_solutions(theta, spec)?;
    match solutions.as_slice() {
        [a] => Ok(*a),
        [] => Err(Error::NoSolution(format!(
            "theta #{} (conductor {}, trivial on F: {})",
            theta.index, theta.conductor, theta.trivial_on_f
        ))),
        many => Err(Error::NoSolution(format!(
            "theta #{} has {} solutions",
            theta.index,
            many.len()
        ))),
    }
}

/// All `a` in `(Z/p^n)^x` satisfying the defining identity, by exhaustion.
pub fn a_theta_solutions(theta: &ThetaChar, spec: &TorusSpec) -> Result<Vec<u64>> {
    let (p, n) = (spec.p, spec.n);
    let pn = ipow(p, n);
    let big = ipow(p, 2 * n);
    // theta(1 + p^n u) for all u = x + y sqrt(-alpha)
    let mut rhs = Vec::with_capacity((pn * pn) as usize);
    for x in 0..pn {
        for y in 0..pn {
            rhs.push(theta.eval_residue((1 + pn * x) % big, pn * y % big)?);
        }
    }
    let mut out = Vec::new();
    for a in (1..pn).filter(|a| a % p != 0) {
        // tr(sqrt(-alpha) (x + y sqrt(-alpha))) = -2 alpha y
        let ok = (0..pn).all(|x| {
            (0..pn).all(|y| {
                let lhs = psi_fraction(-2 * (spec.alpha * a * y) as i128, p, n);
                lhs == rhs[(x * pn + y) as usize]
            })
        });
        if ok {
            out.push(a);
        }
    }
    Ok(out)
}

/// The data determining a minimal vector: torus, `theta`, and `a_{theta,T}`.
#[derive(Clone, Debug, Serialize)]
pub struct MinimalVectorSpec {
    pub torus: TorusSpec,
    pub theta: ThetaChar,
    pub a_theta: u64,
}

impl MinimalVectorSpec {
    pub fn new(torus: TorusSpec, theta: ThetaChar) -> Result<Self> {
        let a_theta = solve_a_theta(&theta, &torus)?;
        Ok(MinimalVectorSpec {
            torus,
            theta,
            a_theta,
        })
    }

    /// Uses the first admissible `theta`.
    pub fn first(p: u64, n: u32) -> Result<Self> {
        let torus = TorusSpec::new(p, n)?;
        let theta = enumerate_theta(&torus)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::NoSolution("no admissible theta".into()))?;
        Self::new(torus, theta)
    }

    pub fn p(&self) -> u64 {
        self.torus.p
    }

    pub fn n(&self) -> u32 {
        self.torus.n
    }

    /// `frak_a = -a_theta alpha mod p^n`, the support class of the Kirillov function.
    pub fn frak_a(&self) -> u64 {
        let pn = ipow(self.p(), self.n());
        (pn - mul_mod(self.a_theta, self.torus.alpha, pn)) % pn
    }

    /// `theta` on an element of `T` given as a matrix.
    pub fn theta_on_torus(&self, t: &QuadElement) -> Result<UnitRoot> {
        self.theta.eval(t)
    }
}

/// A `K_T(n)` element written as `t [[y, m], [0, 1]]` with the torus part
/// as a unit residue mod `p^{2n}` and `m` as a residue mod `p^{2n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KtFactorization {
    pub t: (u64, u64),
    pub m: u64,
}

/// Factors an element of `K_T(n)` (as a matrix over `Z/p^{2n}`).
pub fn factor_kt(x: &ResidueMat, spec: &TorusSpec) -> Result<KtFactorization> {
    let k = 2 * spec.n;
    let ring = ResidueRing::new(spec.p, k);
    let g = ring.to_local(x);
    let d = decompose_b1t(&g, spec, Side::Right)?;
    Ok(KtFactorization {
        t: d.z.residue_pair(k)?,
        m: d.m.residue(k)?,
    })
}

impl KtFactorization {
    /// `chi` as a numerator over `den`, which must be a multiple of both the
    /// group exponent and `p^{2n}`.
    #[inline]
    pub fn numerator(&self, mv: &MinimalVectorSpec, den: u64) -> u64 {
        let th = mv.theta.numerator(self.t.0, self.t.1) * (den / mv.theta.denominator());
        let big = ipow(mv.p(), 2 * mv.n());
        // psi(-a alpha m / p^{2n}) = e(a alpha m / p^{2n})
        let arg = mul_mod(mul_mod(mv.a_theta, mv.torus.alpha, big), self.m, big);
        let ps = (-crate::residue::PSI_SIGN) as i128 * arg as i128;
        let ps = crate::residue::reduce(ps, big) * (den / big);
        (th + ps) % den
    }

    pub fn value(&self, mv: &MinimalVectorSpec) -> UnitRoot {
        let den = common_denominator(mv);
        UnitRoot::from_ratio(self.numerator(mv, den) as i128, den)
    }
}

/// `lcm(exp (o_E/p^{2n})^x, p^{2n})`: every value of `chi` lives over it.
pub fn common_denominator(mv: &MinimalVectorSpec) -> u64 {
    mv.theta.denominator().lcm(&ipow(mv.p(), 2 * mv.n()))
}

/// `chi_{theta,T}(g)` for `g` in `Z K_T(n)`.
pub fn chi_theta_t(g: &Mat2Local, mv: &MinimalVectorSpec) -> Result<UnitRoot> {
    let spec = &mv.torus;
    if !subgroup_member(g, Subgroup::ZKT(spec.n), spec)? {
        return Err(Error::NotInSupport);
    }
    let p = spec.p;
    let j = g.det().finite_valuation()? / 2;
    let g = g.scale(&LocalElement::uniformizer_pow(p, -j, max_precision(p)));
    let d = decompose_b1t(&g, spec, Side::Right)?;
    let th = mv.theta.eval(&d.z)?;
    let alpha = spec.alpha_local();
    let a = LocalElement::from_int(p, mv.a_theta as i128, spec.prec);
    let arg = -(a * alpha * d.m) * LocalElement::uniformizer_pow(p, -2 * spec.n as i64, spec.prec);
    Ok(th * psi(&arg)?)
}

/// `theta(t) psi(p^{-n} a (h_21 - alpha h_12))` for the factorization
/// `g = t (1 + p^n h)`.
pub fn chi_from_factorization(
    t: &QuadElement,
    h: &Mat2Local,
    mv: &MinimalVectorSpec,
) -> Result<UnitRoot> {
    let spec = &mv.torus;
    let p = spec.p;
    let a = LocalElement::from_int(p, mv.a_theta as i128, spec.prec);
    let arg = a * (h.c - spec.alpha_local() * h.b)
        * LocalElement::uniformizer_pow(p, -(spec.n as i64), spec.prec);
    Ok(mv.theta.eval(t)? * psi(&arg)?)
}

/// One row of an exported character table.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterRow {
    pub index: usize,
    pub exponents: Vec<u64>,
    pub conductor: u32,
    pub a_theta: u64,
}

pub fn character_table(spec: &TorusSpec) -> Result<Vec<CharacterRow>> {
    enumerate_theta(spec)?
        .into_iter()
        .map(|t| {
            Ok(CharacterRow {
                index: t.index,
                a_theta: solve_a_theta(&t, spec)?,
                exponents: t.exponents,
                conductor: t.conductor,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_is_cyclic() {
        let g = QuadUnitGroup::new(3, 1, 1).unwrap();
        assert_eq!(g.presentation.orders, vec![8]);
    }

    #[test]
    fn units_mod_9_structure() {
        let g = QuadUnitGroup::new(3, 2, 1).unwrap();
        assert_eq!(g.order(), 72);
        assert_eq!(g.presentation.orders.iter().product::<u64>(), 72);
        let mut o = g.presentation.orders.clone();
        o.sort();
        assert_eq!(o, vec![3, 3, 8]);
    }

    #[test]
    fn trivial_group() {
        let pres = abelian_structure(&[0u8], 0, |_, _| 0, 10).unwrap();
        assert!(pres.generators.is_empty());
        assert_eq!(pres.order(), 1);
    }

    #[test]
    fn cyclic_of_composite_order() {
        let elems: Vec<u64> = (0..12).collect();
        let pres = abelian_structure(&elems, 0, |a, b| (a + b) % 12, 100).unwrap();
        let mut o = pres.orders.clone();
        o.sort();
        assert_eq!(o, vec![3, 4]);
    }

    #[test]
    fn non_closed_input_detected() {
        let elems: Vec<u64> = (0..5).collect();
        let r = abelian_structure(&elems, 0, |a, b| (a + b) % 6, 100);
        assert!(matches!(r, Err(Error::NotAGroup(_))));
    }

    #[test]
    fn reconstruction_from_exponents() {
        let g = QuadUnitGroup::new(5, 2, 2).unwrap();
        let pres = &g.presentation;
        for (x, ev) in pres.elements.iter().zip(&pres.exponents) {
            let mut acc = (1, 0);
            for ((gen, o), e) in pres.generators.iter().zip(&pres.orders).zip(ev) {
                assert!(e < o);
                for _ in 0..*e {
                    acc = g.mul(acc, *gen);
                }
            }
            assert_eq!(acc, *x);
        }
    }

    #[test]
    fn theta_count_3_1() {
        let spec = TorusSpec::new(3, 1).unwrap();
        let all = all_characters(&spec).unwrap();
        assert_eq!(all.iter().filter(|t| t.trivial_on_f).count(), 12);
        let adm = enumerate_theta(&spec).unwrap();
        assert_eq!(adm.len(), 8);
        assert!(adm.iter().all(|t| t.conductor == 2));
    }

    #[test]
    fn theta_counts_match_formula() {
        for (p, n) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let spec = TorusSpec::new(p, n).unwrap();
            assert_eq!(
                enumerate_theta(&spec).unwrap().len() as u64,
                expected_theta_count(p, n),
                "({p},{n})"
            );
        }
    }

    #[test]
    fn theta_list_closed_under_inverse() {
        let spec = TorusSpec::new(5, 1).unwrap();
        let list = enumerate_theta(&spec).unwrap();
        let ids: std::collections::BTreeSet<usize> = list.iter().map(|t| t.index).collect();
        for t in &list {
            let inv = t.inverse();
            assert!(ids.contains(&inv.index));
            assert!(inv.is_admissible());
        }
    }

    #[test]
    fn theta_multiplicative_exhaustive_3_1() {
        let spec = TorusSpec::new(3, 1).unwrap();
        for t in enumerate_theta(&spec).unwrap() {
            let g = t.group().clone();
            for &x in &g.presentation.elements {
                for &y in &g.presentation.elements {
                    let xy = g.mul(x, y);
                    assert_eq!(
                        t.eval_residue(xy.0, xy.1).unwrap(),
                        t.eval_residue(x.0, x.1).unwrap() * t.eval_residue(y.0, y.1).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn a_theta_unique_and_negated_by_inverse() {
        for (p, n) in [(3, 1), (5, 1)] {
            let spec = TorusSpec::new(p, n).unwrap();
            let pn = ipow(p, n);
            for t in enumerate_theta(&spec).unwrap() {
                let sols = a_theta_solutions(&t, &spec).unwrap();
                assert_eq!(sols.len(), 1);
                let a_inv = solve_a_theta(&t.inverse(), &spec).unwrap();
                assert_eq!((sols[0] + a_inv) % pn, 0);
            }
        }
    }

    #[test]
    fn conductor_one_theta_has_no_solution() {
        let spec = TorusSpec::new(3, 1).unwrap();
        let bad = all_characters(&spec)
            .unwrap()
            .into_iter()
            .find(|t| t.trivial_on_f && t.conductor == 1)
            .unwrap();
        assert!(matches!(solve_a_theta(&bad, &spec), Err(Error::NoSolution(_))));
    }

    #[test]
    fn chi_identity_and_torus() {
        let mv = MinimalVectorSpec::first(3, 1).unwrap();
        let spec = mv.torus;
        let id = Mat2Local::identity(3, spec.prec);
        assert!(chi_theta_t(&id, &mv).unwrap().is_one());
        for (a, b) in crate::residue::unit_enumeration(3, 2, true, 1000).unwrap() {
            let z = QuadElement::from_residues(3, a, b, spec.prec, spec.alpha);
            let t = crate::gl2::torus_embed(&z, &spec).unwrap();
            assert_eq!(chi_theta_t(&t, &mv).unwrap(), mv.theta.eval(&z).unwrap());
        }
        let a = Mat2Local::a(LocalElement::uniformizer_pow(3, 1, spec.prec), spec.prec);
        assert!(matches!(chi_theta_t(&a, &mv), Err(Error::NotInSupport)));
    }

    #[test]
    fn chi_trivial_on_k2n_3_1() {
        let mv = MinimalVectorSpec::first(3, 1).unwrap();
        let spec = mv.torus;
        // K(2) mod K(4): 1 + 9 x for x mod 9
        let ring = ResidueRing::new(3, 4);
        let mut count = 0;
        for e in 0..9u64.pow(4) {
            let x = [e % 9, e / 9 % 9, e / 81 % 9, e / 729];
            let m = ring.reduce([1 + 9 * x[0] as i128, 9 * x[1] as i128, 9 * x[2] as i128, 1 + 9 * x[3] as i128]);
            let g = ring.to_local(&m);
            assert!(chi_theta_t(&g, &mv).unwrap().is_one());
            count += 1;
        }
        assert_eq!(count, 6561);
        let _ = spec;
    }

    #[test]
    fn residue_factorization_matches_padic_chi() {
        let mv = MinimalVectorSpec::first(5, 1).unwrap();
        let kt = crate::gl2::enumerate_kt_mod(&mv.torus, 2, 10_000_000).unwrap();
        let ring = ResidueRing::new(5, 2);
        for x in kt.iter().step_by(37) {
            let f = factor_kt(x, &mv.torus).unwrap();
            assert_eq!(f.value(&mv), chi_theta_t(&ring.to_local(x), &mv).unwrap());
        }
    }

    #[test]
    fn character_table_rows() {
        let spec = TorusSpec::new(3, 1).unwrap();
        let rows = character_table(&spec).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.a_theta % 3 != 0));
    }
}
