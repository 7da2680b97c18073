//! `K_{it}(x)` for real `t` and `x > 0`.

use crate::error::{Error, Result};

/// Largest `|t|` accepted by [`bessel_k_imag`]. Beyond it the cancellation in
/// the oscillatory integral (size `e^{-pi t / 2}` against an integrand of
/// size 1) eats most of the double-precision budget.
pub const DEFAULT_T_BOUND: f64 = 8.0;

/// Truncation: the integrand is dropped once `e^{-x (cosh u - 1)} < e^{-TAIL}`,
/// i.e. 1e-18 relative to its value at `u = 0`.
const TAIL: f64 = 41.5;

const REL_TOL: f64 = 1e-12;
const MAX_HALVINGS: u32 = 24;

/// `K_{it}(x) = int_0^inf e^{-x cosh u} cos(t u) du`.
///
/// The integrand is even and analytic in `u`, so the trapezoid rule on
/// `[0, U]` converges geometrically; the step is halved until two
/// consecutive sums agree to `1e-12` relative to `int_0^U e^{-x cosh u} du`.
pub fn bessel_k_imag(t: f64, x: f64) -> Result<f64> {
    bessel_k_imag_bounded(t, x, DEFAULT_T_BOUND)
}

pub fn bessel_k_imag_bounded(t: f64, x: f64, t_bound: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Config(format!("K_it(x) needs x > 0, got {x}")));
    }
    if !(t.abs() <= t_bound) {
        return Err(Error::Config(format!("|t| = {} exceeds the bound {t_bound}", t.abs())));
    }
    // scaled integrand e^{-x (cosh u - 1)} cos(t u); the e^{-x} goes back at the end
    let upper = (1.0 + TAIL / x).acosh();
    let f = |u: f64| (-x * (u.cosh() - 1.0)).exp() * (t * u).cos();
    let g = |u: f64| (-x * (u.cosh() - 1.0)).exp();
    let mut h = (upper / 8.0).min(0.5).min(1.0 / (t.abs() + 1.0));
    let mut steps = (upper / h).ceil() as usize;
    h = upper / steps as f64;
    let trap = |h: f64, steps: usize, f: &dyn Fn(f64) -> f64| -> f64 {
        let mut s = 0.5 * (f(0.0) + f(upper));
        for i in 1..steps {
            s += f(i as f64 * h);
        }
        s * h
    };
    let mut prev = trap(h, steps, &f);
    let scale = trap(h, steps, &g);
    for _ in 0..MAX_HALVINGS {
        // add the midpoints of the current grid
        let mut mid = 0.0;
        for i in 0..steps {
            mid += f((i as f64 + 0.5) * h);
        }
        let next = 0.5 * prev + 0.5 * h * mid;
        h *= 0.5;
        steps *= 2;
        if (next - prev).abs() <= REL_TOL * scale.max(next.abs()) {
            return Ok(next * (-x).exp());
        }
        prev = next;
    }
    Err(Error::Unstable(format!("K_it(x) quadrature at t = {t}, x = {x}")))
}

/// Coefficients `a_k(nu)` of `K_nu(x) ~ sqrt(pi/(2x)) e^{-x} sum a_k x^{-k}` for
/// `nu = it`: `a_k = prod_{j <= k} (4 nu^2 - (2j - 1)^2) / (k! 8^k)`.
pub fn hankel_coefficients(t: f64, terms: usize) -> Vec<f64> {
    let mu = -4.0 * t * t;
    let mut out = Vec::with_capacity(terms);
    let mut a = 1.0;
    out.push(a);
    for k in 1..terms {
        let j = k as f64;
        a *= (mu - (2.0 * j - 1.0).powi(2)) / (j * 8.0);
        out.push(a);
    }
    out
}

/// `K_{it}(x) sqrt(2x/pi) e^x` from the large-argument expansion, summed up
/// to its smallest term.
pub fn hankel_ratio(t: f64, x: f64) -> f64 {
    let coeffs = hankel_coefficients(t, 60);
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for (k, a) in coeffs.iter().enumerate() {
        let term = a / x.powi(k as i32);
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
    }
    sum
}
