//! Truncated arithmetic in `F = Q_p` and in its unramified quadratic
//! extension `E = F(sqrt(-alpha))`, together with the additive characters
//! `psi` and `psi_E = psi o tr_{E/F}`.
//!
//! A [`LocalElement`] is `p^v * u` with `u` a unit known modulo `p^M`
//! (relative precision `M`), so the element itself is known modulo
//! `p^(v+M)`. Exact zero has `v = +inf`. Cancellation in a sum can produce
//! an element that is zero at the available precision; such an element is
//! kept with `M = 0` and only records that it lies in `p^v o`.
//!
//! Character values are exact [`UnitRoot`]s, elements of `Q/Z`, until they
//! are complexified at the numeric boundary.

use std::cmp::{max, min};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the local additive character: `psi(x) = exp(PSI_SIGN * 2 pi i frac_p(x))`.
///
/// The global character is `e^{2 pi i x}` at the real place and unramified
/// elsewhere, which forces the negative sign at every finite place.
pub const PSI_SIGN: i128 = -1;

const VAL_INF: i64 = i64::MAX;

/// Default bound on the size of explicit enumerations.
pub const DEFAULT_ENUMERATION_BOUND: u128 = 10_000_000;

pub fn ipow(p: u64, k: u32) -> u64 {
    p.checked_pow(k)
        .unwrap_or_else(|| panic!("{p}^{k} overflows u64"))
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

#[inline]
pub fn reduce(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// `p`-adic valuation of a nonzero integer.
pub fn int_valuation(mut x: i128, p: u64) -> u32 {
    assert!(x != 0, "valuation of zero");
    let p = p as i128;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Largest relative precision for which residues and their products fit
/// comfortably in machine words.
pub fn max_precision(p: u64) -> u32 {
    let mut k = 0;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 62) {
        acc *= p as u128;
        k += 1;
    }
    k
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler criterion: `a` is a unit and not a square modulo the odd prime `p`.
pub fn is_unit_nonsquare(a: i64, p: u64) -> bool {
    let r = reduce(a as i128, p);
    r != 0 && pow_mod(r, (p - 1) / 2, p) == p - 1
}

// ---------------------------------------------------------------------------
// Roots of unity
// ---------------------------------------------------------------------------

/// An exact root of unity `e^{2 pi i r}` stored as `r = num/den` in `Q/Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnitRoot {
    num: u64,
    den: u64,
}

impl UnitRoot {
    pub const ONE: UnitRoot = UnitRoot { num: 0, den: 1 };

    pub fn from_ratio(num: i128, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let n = reduce(num, den);
        let g = n.gcd(&den);
        if n == 0 {
            return Self::ONE;
        }
        UnitRoot {
            num: n / g,
            den: den / g,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Multiplicative order of the root.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn inv(self) -> Self {
        Self::from_ratio(-(self.num as i128), self.den)
    }

    pub fn pow(self, e: i64) -> Self {
        Self::from_ratio(self.num as i128 * e as i128, self.den)
    }

    /// Numerator of this root over a common denominator `den` (which must be
    /// a multiple of the root's own denominator).
    pub fn numerator_over(&self, den: u64) -> u64 {
        assert!(den % self.den == 0, "{den} is not a multiple of {}", self.den);
        self.num * (den / self.den)
    }

    pub fn to_complex(self) -> Complex64 {
        let angle = std::f64::consts::TAU * (self.num as f64) / (self.den as f64);
        Complex64::from_polar(1.0, angle)
    }
}

impl Mul for UnitRoot {
    type Output = UnitRoot;
    fn mul(self, rhs: UnitRoot) -> UnitRoot {
        let l = self.den.lcm(&rhs.den);
        let n = self.num as i128 * (l / self.den) as i128 + rhs.num as i128 * (l / rhs.den) as i128;
        UnitRoot::from_ratio(n, l)
    }
}

impl Div for UnitRoot {
    type Output = UnitRoot;
    fn div(self, rhs: UnitRoot) -> UnitRoot {
        self * rhs.inv()
    }
}

impl fmt::Display for UnitRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({}/{})", self.num, self.den)
    }
}

/// A formal rational combination of roots of unity.
///
/// Equality of formal sums implies equality of the complex numbers they
/// denote; that is the direction every exact identity check needs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootSum {
    terms: BTreeMap<UnitRoot, Ratio<i64>>,
}

impl RootSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(root: UnitRoot, coeff: Ratio<i64>) -> Self {
        let mut s = Self::zero();
        s.add_term(root, coeff);
        s
    }

    pub fn add_term(&mut self, root: UnitRoot, coeff: Ratio<i64>) {
        let entry = self.terms.entry(root).or_insert_with(|| Ratio::from_integer(0));
        *entry += coeff;
        if *entry.numer() == 0 {
            self.terms.remove(&root);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UnitRoot, &Ratio<i64>)> {
        self.terms.iter()
    }

    pub fn to_complex(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(r, c)| r.to_complex() * (*c.numer() as f64 / *c.denom() as f64))
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Elements of F
// ---------------------------------------------------------------------------

/// A truncated element `p^v * u` of `Q_p`.
#[derive(Clone, Copy, Debug)]
pub struct LocalElement {
    p: u64,
    val: i64,
    unit: u64,
    prec: u32,
}

impl LocalElement {
    pub fn zero(p: u64) -> Self {
        LocalElement {
            p,
            val: VAL_INF,
            unit: 0,
            prec: 0,
        }
    }

    /// An element known only to lie in `p^v o`.
    fn indistinct(p: u64, v: i64) -> Self {
        LocalElement {
            p,
            val: v,
            unit: 0,
            prec: 0,
        }
    }

    pub fn from_parts(p: u64, val: i64, unit: u64, prec: u32) -> Self {
        let prec = min(prec, max_precision(p));
        let m = ipow(p, prec);
        let unit = unit % m;
        assert!(prec == 0 || unit % p != 0, "unit part {unit} divisible by {p}");
        LocalElement { p, val, unit, prec }
    }

    pub fn from_int(p: u64, x: i128, prec: u32) -> Self {
        if x == 0 {
            return Self::zero(p);
        }
        let v = int_valuation(x, p);
        let prec = min(prec, max_precision(p));
        let u = x / (p as i128).pow(v);
        Self::from_parts(p, v as i64, reduce(u, ipow(p, prec)), prec)
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::from_int(p, 1, prec)
    }

    /// `p^e` exactly, carried at relative precision `prec`.
    pub fn uniformizer_pow(p: u64, e: i64, prec: u32) -> Self {
        Self::from_parts(p, e, 1, prec)
    }

    pub fn from_ratio(p: u64, num: i128, den: i128, prec: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::NotInvertible("zero denominator".into()));
        }
        Self::from_int(p, num, prec).try_div(&Self::from_int(p, den, prec))
    }

    /// The element of `o` represented by the residue `r mod p^k`.
    pub fn from_residue(p: u64, r: u64, k: u32) -> Self {
        let m = ipow(p, k);
        let r = r % m;
        if r == 0 {
            return Self::indistinct(p, k as i64);
        }
        let v = int_valuation(r as i128, p);
        Self::from_parts(p, v as i64, r / ipow(p, v), k - v)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Relative precision: number of known digits after the leading one.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_exact_zero(&self) -> bool {
        self.val == VAL_INF
    }

    /// True when the element is zero at its tracked precision without being
    /// exact zero.
    pub fn is_indistinct(&self) -> bool {
        !self.is_exact_zero() && self.prec == 0
    }

    /// `Ok(None)` for exact zero, `Ok(Some(v))` for a known valuation.
    pub fn valuation(&self) -> Result<Option<i64>> {
        if self.is_exact_zero() {
            Ok(None)
        } else if self.prec == 0 {
            Err(Error::Precision(format!(
                "valuation unknown: element is O({}^{})",
                self.p, self.val
            )))
        } else {
            Ok(Some(self.val))
        }
    }

    /// Finite valuation; exact zero and indistinct elements are errors.
    pub fn finite_valuation(&self) -> Result<i64> {
        match self.valuation()? {
            Some(v) => Ok(v),
            None => Err(Error::NotInvertible("valuation of exact zero".into())),
        }
    }

    /// Absolute precision `v + M`; `None` for exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        (!self.is_exact_zero()).then(|| self.val + self.prec as i64)
    }

    /// Decides `v(x) >= r` at the tracked precision.
    pub fn val_at_least(&self, r: i64) -> Result<bool> {
        if self.is_exact_zero() || self.val >= r {
            Ok(true)
        } else if self.prec > 0 {
            Ok(false)
        } else {
            Err(Error::Precision(format!(
                "cannot decide v(x) >= {r} for O({}^{})",
                self.p, self.val
            )))
        }
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.valuation()? == Some(0))
    }

    /// Unit part modulo `p^k`.
    pub fn unit_residue(&self, k: u32) -> Result<u64> {
        if self.prec == 0 || k > self.prec {
            return Err(Error::Precision(format!(
                "unit part wanted mod {}^{k}, known mod {}^{}",
                self.p, self.p, self.prec
            )));
        }
        Ok(self.unit % ipow(self.p, k))
    }

    /// `x mod p^k` for integral `x`.
    pub fn residue(&self, k: u32) -> Result<u64> {
        if self.is_exact_zero() || (self.val >= k as i64) {
            return Ok(0);
        }
        if self.val < 0 {
            if self.prec == 0 {
                return Err(Error::Precision("integrality undecided".into()));
            }
            return Err(Error::Decomposition(format!(
                "element of valuation {} is not integral",
                self.val
            )));
        }
        let abs = self.val + self.prec as i64;
        if abs < k as i64 {
            return Err(Error::Precision(format!(
                "residue mod {}^{k} wanted, element known mod {}^{abs}",
                self.p, self.p
            )));
        }
        let m = ipow(self.p, k);
        Ok(mul_mod(self.unit % m, ipow(self.p, self.val as u32), m))
    }

    /// Truncate to relative precision at most `prec`.
    pub fn truncate(&self, prec: u32) -> Self {
        if self.is_exact_zero() || prec >= self.prec {
            return *self;
        }
        LocalElement {
            p: self.p,
            val: self.val,
            unit: self.unit % ipow(self.p, prec),
            prec,
        }
    }

    /// Fractional part `num / den` (with `den` a power of `p`), the class of
    /// `x` in `F / o`.
    pub fn frac(&self) -> Result<(u64, u64)> {
        if self.is_exact_zero() || self.val >= 0 {
            return Ok((0, 1));
        }
        let depth = (-self.val) as u32;
        if self.prec < depth {
            return Err(Error::Precision(format!(
                "fractional part needs {depth} digits, {} known",
                self.prec
            )));
        }
        let den = ipow(self.p, depth);
        Ok((self.unit % den, den))
    }

    pub fn try_inv(&self) -> Result<Self> {
        if self.is_exact_zero() {
            return Err(Error::NotInvertible("exact zero".into()));
        }
        if self.prec == 0 {
            return Err(Error::Precision(format!(
                "cannot invert O({}^{})",
                self.p, self.val
            )));
        }
        let m = ipow(self.p, self.prec);
        let inv = inv_mod(self.unit, m).expect("unit part is invertible");
        Ok(LocalElement {
            p: self.p,
            val: -self.val,
            unit: inv,
            prec: self.prec,
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        Ok(*self * other.try_inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.p, max_precision(self.p));
        for _ in 0..e {
            acc = acc * *self;
        }
        acc
    }

    /// True when `self - other` vanishes at the tracked precision.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        let d = *self - *other;
        d.is_exact_zero() || d.is_indistinct()
    }

    /// Rational approximation, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        if self.is_exact_zero() || self.prec == 0 {
            return 0.0;
        }
        let m = ipow(self.p, self.prec);
        let u = if self.unit > m / 2 {
            self.unit as f64 - m as f64
        } else {
            self.unit as f64
        };
        u * (self.p as f64).powi(self.val as i32)
    }
}

impl Add for LocalElement {
    type Output = LocalElement;
    fn add(self, rhs: LocalElement) -> LocalElement {
        assert_eq!(self.p, rhs.p, "mixed primes");
        if self.is_exact_zero() {
            return rhs;
        }
        if rhs.is_exact_zero() {
            return self;
        }
        let p = self.p;
        let abs = min(self.val + self.prec as i64, rhs.val + rhs.prec as i64);
        let vmin = min(self.val, rhs.val);
        if vmin >= abs {
            return LocalElement::indistinct(p, abs);
        }
        let k = (abs - vmin) as u32;
        let m = ipow(p, k);
        let shifted = |e: &LocalElement| -> u64 {
            let s = e.val - vmin;
            if s >= k as i64 {
                0
            } else {
                mul_mod(e.unit, ipow(p, s as u32), m)
            }
        };
        let s = (shifted(&self) + shifted(&rhs)) % m;
        if s == 0 {
            return LocalElement::indistinct(p, abs);
        }
        let e = int_valuation(s as i128, p);
        LocalElement {
            p,
            val: vmin + e as i64,
            unit: s / ipow(p, e),
            prec: k - e,
        }
    }
}

impl Neg for LocalElement {
    type Output = LocalElement;
    fn neg(self) -> LocalElement {
        if self.is_exact_zero() || self.prec == 0 {
            return self;
        }
        let m = ipow(self.p, self.prec);
        LocalElement {
            unit: (m - self.unit) % m,
            ..self
        }
    }
}

impl Sub for LocalElement {
    type Output = LocalElement;
    fn sub(self, rhs: LocalElement) -> LocalElement {
        self + (-rhs)
    }
}

impl Mul for LocalElement {
    type Output = LocalElement;
    fn mul(self, rhs: LocalElement) -> LocalElement {
        assert_eq!(self.p, rhs.p, "mixed primes");
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return LocalElement::zero(self.p);
        }
        let prec = min(self.prec, rhs.prec);
        let val = self.val + rhs.val;
        if prec == 0 {
            return LocalElement::indistinct(self.p, val);
        }
        let m = ipow(self.p, prec);
        LocalElement {
            p: self.p,
            val,
            unit: mul_mod(self.unit, rhs.unit, m),
            prec,
        }
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            write!(f, "0")
        } else if self.prec == 0 {
            write!(f, "O({}^{})", self.p, self.val)
        } else {
            write!(
                f,
                "{}^{} * {} + O({}^{})",
                self.p,
                self.val,
                self.unit,
                self.p,
                self.val + self.prec as i64
            )
        }
    }
}

/// `psi(x) = e^{-2 pi i frac_p(x)}`.
pub fn psi(x: &LocalElement) -> Result<UnitRoot> {
    let (num, den) = x.frac()?;
    Ok(UnitRoot::from_ratio(PSI_SIGN * num as i128, den))
}

/// `psi(num / p^k)` for an integer numerator.
pub fn psi_fraction(num: i128, p: u64, k: u32) -> UnitRoot {
    UnitRoot::from_ratio(PSI_SIGN * num, ipow(p, k))
}

// ---------------------------------------------------------------------------
// Elements of E
// ---------------------------------------------------------------------------

/// `re + im * sqrt(-alpha)` in the unramified quadratic extension.
#[derive(Clone, Copy, Debug)]
pub struct QuadElement {
    re: LocalElement,
    im: LocalElement,
    alpha: u64,
}

impl QuadElement {
    pub fn new(re: LocalElement, im: LocalElement, alpha: u64) -> Result<Self> {
        let p = re.p();
        assert_eq!(p, im.p(), "mixed primes");
        if !is_odd_prime(p) {
            return Err(Error::UnsupportedPrime(p));
        }
        if !is_unit_nonsquare(-(alpha as i64), p) {
            return Err(Error::NotInert(-(alpha as i64), p));
        }
        Ok(QuadElement { re, im, alpha })
    }

    pub(crate) fn new_unchecked(re: LocalElement, im: LocalElement, alpha: u64) -> Self {
        QuadElement { re, im, alpha }
    }

    pub fn from_residues(p: u64, a: u64, b: u64, k: u32, alpha: u64) -> Self {
        QuadElement {
            re: LocalElement::from_residue(p, a, k),
            im: LocalElement::from_residue(p, b, k),
            alpha,
        }
    }

    pub fn from_local(x: LocalElement, alpha: u64) -> Self {
        QuadElement {
            re: x,
            im: LocalElement::zero(x.p()),
            alpha,
        }
    }

    pub fn p(&self) -> u64 {
        self.re.p()
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    /// The discriminant tag `Delta = -alpha`.
    pub fn delta(&self) -> i64 {
        -(self.alpha as i64)
    }

    pub fn re(&self) -> LocalElement {
        self.re
    }

    pub fn im(&self) -> LocalElement {
        self.im
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.alpha, other.alpha, "quadratic elements with different discriminants");
    }

    pub fn conj(&self) -> Self {
        QuadElement {
            im: -self.im,
            ..*self
        }
    }

    /// `N(re + im sqrt(Delta)) = re^2 - Delta im^2`.
    pub fn norm(&self) -> LocalElement {
        let alpha = LocalElement::from_int(self.p(), self.alpha as i128, max_precision(self.p()));
        self.re * self.re + alpha * self.im * self.im
    }

    pub fn trace(&self) -> LocalElement {
        self.re + self.re
    }

    pub fn scale(&self, c: &LocalElement) -> Self {
        QuadElement {
            re: self.re * *c,
            im: self.im * *c,
            alpha: self.alpha,
        }
    }

    pub fn try_inv(&self) -> Result<Self> {
        let n = self.norm().try_inv()?;
        Ok(self.conj().scale(&n))
    }

    /// `v(z) = min(v(re), v(im))`, which is exact because `E/F` is unramified.
    /// A coordinate that vanishes at its precision is harmless as long as
    /// its lower bound exceeds the other coordinate's valuation.
    pub fn valuation(&self) -> Result<Option<i64>> {
        let known: Vec<i64> = [self.re, self.im]
            .iter()
            .filter(|x| !x.is_exact_zero() && !x.is_indistinct())
            .map(|x| x.finite_valuation())
            .collect::<Result<_>>()?;
        let v = known.iter().copied().min();
        for x in [self.re, self.im] {
            if x.is_indistinct() && v.map_or(true, |v| x.abs_precision().unwrap() <= v) {
                return Err(Error::Precision(format!("valuation of {x} undecided in E")));
            }
        }
        Ok(v)
    }

    /// Residues of both coordinates modulo `p^k`.
    pub fn residue_pair(&self, k: u32) -> Result<(u64, u64)> {
        Ok((self.re.residue(k)?, self.im.residue(k)?))
    }

    /// Writes `z = p^e * z0` with `z0` a unit and returns `(e, z0)`.
    pub fn split_uniformizer(&self) -> Result<(i64, QuadElement)> {
        let e = self
            .valuation()?
            .ok_or_else(|| Error::NotInvertible("zero in E".into()))?;
        let s = LocalElement::uniformizer_pow(self.p(), -e, max_precision(self.p()));
        Ok((e, self.scale(&s)))
    }

    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.re.eq_to_precision(&other.re) && self.im.eq_to_precision(&other.im)
    }
}

impl Add for QuadElement {
    type Output = QuadElement;
    fn add(self, rhs: QuadElement) -> QuadElement {
        self.check(&rhs);
        QuadElement {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
            alpha: self.alpha,
        }
    }
}

impl Sub for QuadElement {
    type Output = QuadElement;
    fn sub(self, rhs: QuadElement) -> QuadElement {
        self.check(&rhs);
        QuadElement {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
            alpha: self.alpha,
        }
    }
}

impl Mul for QuadElement {
    type Output = QuadElement;
    fn mul(self, rhs: QuadElement) -> QuadElement {
        self.check(&rhs);
        let p = self.p();
        let delta = LocalElement::from_int(p, self.delta() as i128, max_precision(p));
        QuadElement {
            re: self.re * rhs.re + delta * self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
            alpha: self.alpha,
        }
    }
}

/// `psi_E(z) = psi(tr z)`.
pub fn psi_e(z: &QuadElement) -> Result<UnitRoot> {
    psi(&z.trace())
}

/// Units of `o / p^m` (as pairs `(a, 0)`) or of `o_E / p^m o_E` (pairs
/// `(a, b)` meaning `a + b sqrt(Delta)`), in lexicographic order.
pub fn unit_enumeration(p: u64, m: u32, quadratic: bool, bound: u128) -> Result<Vec<(u64, u64)>> {
    if !is_odd_prime(p) {
        return Err(Error::UnsupportedPrime(p));
    }
    assert!(m >= 1, "level must be positive");
    let size = (p as u128).pow(if quadratic { 2 * m } else { m });
    if size > bound {
        return Err(Error::SizeGuard {
            what: format!("residue ring mod {p}^{m}"),
            size,
            bound,
        });
    }
    let modulus = ipow(p, m);
    let mut out = Vec::new();
    if quadratic {
        for a in 0..modulus {
            for b in 0..modulus {
                if a % p != 0 || b % p != 0 {
                    out.push((a, b));
                }
            }
        }
    } else {
        out.extend((0..modulus).filter(|a| a % p != 0).map(|a| (a, 0)));
    }
    Ok(out)
}

/// Precision used at level `n` unless configured otherwise.
pub fn default_precision(n: u32) -> u32 {
    2 * n + 4
}

pub fn check_precision(prec: u32, n: u32) -> Result<()> {
    if prec < 2 * n + 1 {
        return Err(Error::Precision(format!(
            "working precision {prec} below 2n+1 = {}",
            2 * n + 1
        )));
    }
    Ok(())
}

#[allow(dead_code)]
pub(crate) fn max_i64(a: i64, b: i64) -> i64 {
    max(a, b)
}
