//! Multiprecision quadrature rules: double-exponential (exp-sinh) for half
//! lines and adaptive Gauss–Legendre panels for finite intervals.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Float;

use crate::error::{Error, Result};
use crate::numeric::{pi, Cx};

/// Largest number of step halvings attempted by [`exp_sinh`].
const MAX_LEVELS: u32 = 14;

/// Integrate `f` over `[0, ∞)` with the exp-sinh substitution
/// `s = exp(π/2 · sinh τ)`, halving the trapezoid step until two successive
/// levels agree.
///
/// `tol` is the relative target; `s_max` optionally truncates the upper end
/// (the integrand is assumed negligible beyond it).
pub fn exp_sinh<F>(f: F, bits: u32, tol: f64, s_max: Option<f64>) -> Result<Cx>
where
    F: Fn(&Float) -> Cx,
{
    let half_pi = pi(bits) / 2u32;
    let term = |tau: f64| -> Cx {
        let tau = Float::with_val(bits, tau);
        let sh = Float::with_val(bits, tau.sinh_ref());
        let ch = Float::with_val(bits, tau.cosh_ref());
        let s = Float::with_val(bits, &half_pi * &sh).exp();
        let w = Float::with_val(bits, &half_pi * &ch) * &s;
        f(&s).mul_real(&w)
    };

    // Truncation window in τ: walk outwards until the weighted integrand is
    // below tol·(largest term seen) for two consecutive unit steps.
    let tau_cap_hi = match s_max {
        Some(sm) if sm > 1.0 => (sm.ln() * 2.0 / std::f64::consts::PI).asinh(),
        _ => 6.5,
    };
    let mut scale = term(0.0).abs_f64();
    let mut tau_hi = 0.0;
    let mut quiet = 0;
    while tau_hi < tau_cap_hi && quiet < 2 {
        tau_hi = (tau_hi + 0.5f64).min(tau_cap_hi);
        let m = term(tau_hi).abs_f64();
        scale = scale.max(m);
        quiet = if m <= tol * 1e-3 * scale { quiet + 1 } else { 0 };
    }
    let mut tau_lo = 0.0;
    quiet = 0;
    while tau_lo > -6.5 && quiet < 2 {
        tau_lo -= 0.5;
        let m = term(tau_lo).abs_f64();
        scale = scale.max(m);
        quiet = if m <= tol * 1e-3 * scale { quiet + 1 } else { 0 };
    }

    // Level 0: unit step on the integer grid inside [tau_lo, tau_hi].
    let mut h = 0.5f64;
    let mut sum = Cx::zero(bits);
    let j_lo = (tau_lo / h).floor() as i64;
    let j_hi = (tau_hi / h).ceil() as i64;
    for j in j_lo..=j_hi {
        sum += &term(j as f64 * h);
    }
    let mut estimate = sum.mul_real(&Float::with_val(bits, h));
    for _ in 0..MAX_LEVELS {
        h /= 2.0;
        let j_lo = (tau_lo / h).floor() as i64;
        let j_hi = (tau_hi / h).ceil() as i64;
        let mut odd = Cx::zero(bits);
        let mut j = if j_lo.rem_euclid(2) == 1 { j_lo } else { j_lo + 1 };
        while j <= j_hi {
            odd += &term(j as f64 * h);
            j += 2;
        }
        sum += &odd;
        let next = sum.mul_real(&Float::with_val(bits, h));
        let diff = next.abs_diff(&estimate);
        let mag = next.abs_f64().max(f64::MIN_POSITIVE);
        estimate = next;
        // Double-exponential rules square the error per halving, so once the
        // change is below sqrt(tol) the new estimate is good to ~tol.
        if diff <= mag * tol.sqrt() * 1e-2 {
            return Ok(estimate);
        }
    }
    Err(Error::NoConvergence(format!("exp-sinh quadrature did not reach relative tolerance {tol:e}")))
}

type GlKey = (usize, u32);
type GlRule = Arc<(Vec<Float>, Vec<Float>)>;

fn gl_cache() -> &'static Mutex<HashMap<GlKey, GlRule>> {
    static CACHE: OnceLock<Mutex<HashMap<GlKey, GlRule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on `P_n` at the requested precision (cached).
pub fn gauss_legendre(n: usize, bits: u32) -> GlRule {
    if let Some(rule) = gl_cache().lock().expect("gl cache").get(&(n, bits)) {
        return rule.clone();
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let eps = Float::with_val(bits, Float::u_exp(1, -(bits as i32) + 8));
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(bits, guess);
        let mut dp = Float::new(bits);
        for _ in 0..100 {
            let (p, d) = legendre(n, &x);
            let dx = Float::with_val(bits, &p / &d);
            x -= &dx;
            dp = d;
            if dx.abs() < eps {
                let (_, d) = legendre(n, &x);
                dp = d;
                break;
            }
        }
        let one_minus_x2 = Float::with_val(bits, 1) - Float::with_val(bits, x.square_ref());
        let w = Float::with_val(bits, 2) / (one_minus_x2 * Float::with_val(bits, dp.square_ref()));
        nodes.push(x);
        weights.push(w);
    }
    let rule = Arc::new((nodes, weights));
    gl_cache().lock().expect("gl cache").insert((n, bits), rule.clone());
    rule
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let bits = x.prec();
    let mut p0 = Float::with_val(bits, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = k as u32;
        let mut p2 = Float::with_val(bits, x * &p1) * (2 * kf - 1);
        p2 -= Float::with_val(bits, &p0 * (kf - 1));
        p2 /= kf;
        p0 = p1;
        p1 = p2;
    }
    let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
    let mut d = Float::with_val(bits, x * &p1) - &p0;
    d *= n as u32;
    d /= &x2m1;
    (p1, d)
}

/// Fixed `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn gl_panel<F>(f: &F, a: &Float, b: &Float, n: usize) -> Cx
where
    F: Fn(&Float) -> Cx,
{
    let bits = a.prec();
    let rule = gauss_legendre(n, bits);
    let half = Float::with_val(bits, b - a) / 2u32;
    let mid = Float::with_val(bits, a + b) / 2u32;
    let mut acc = Cx::zero(bits);
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        let node = Float::with_val(bits, &half * x) + &mid;
        acc += &f(&node).mul_real(w);
    }
    acc.mul_real(&half)
}

/// Adaptive bisection of Gauss–Legendre panels until each panel agrees with
/// the sum over its two halves to `tol` relative to `scale`.
pub fn adaptive_gl<F>(f: &F, a: &Float, b: &Float, n: usize, tol: f64) -> Result<Cx>
where
    F: Fn(&Float) -> Cx,
{
    let whole = gl_panel(f, a, b, n);
    let scale = whole.abs_f64().max(1e-300);
    refine(f, a, b, n, tol, scale, whole, 0)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(f: &F, a: &Float, b: &Float, n: usize, tol: f64, scale: f64, whole: Cx, depth: u32) -> Result<Cx>
where
    F: Fn(&Float) -> Cx,
{
    let bits = a.prec();
    let mid = Float::with_val(bits, a + b) / 2u32;
    let left = gl_panel(f, a, &mid, n);
    let right = gl_panel(f, &mid, b, n);
    let halves = &left + &right;
    if halves.abs_diff(&whole) <= tol * scale {
        return Ok(halves);
    }
    if depth >= 24 {
        return Err(Error::NoConvergence("adaptive Gauss–Legendre exceeded depth 24".into()));
    }
    let l = refine(f, a, &mid, n, tol / 2.0, scale, left, depth + 1)?;
    let r = refine(f, &mid, b, n, tol / 2.0, scale, right, depth + 1)?;
    Ok(&l + &r)
}
