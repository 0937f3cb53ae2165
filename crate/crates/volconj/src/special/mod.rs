//! Classical dilogarithm, Lobachevsky function and the quantum dilogarithm.

mod qdilog;
pub mod quadrature;

pub use qdilog::{pochhammer_via_qdilog, qd_corner_factor, qd_shift_ratio, quantum_dilog, ContourConfig};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::numeric::{pi, Cx};

// ───────────────────────────────────────────────────────────────────────────
// Dilogarithm
// ───────────────────────────────────────────────────────────────────────────

/// Coefficients `(−1)^{k+1}·2ζ(2k)/((2k+1)(2π)^{2k})` of the Bernoulli
/// expansion `Li₂(w) = u − u²/4 + Σ_k c_k u^{2k+1}`, `u = −log(1−w)`,
/// cached per precision.
fn bernoulli_coeffs(bits: u32) -> Arc<Vec<Float>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Float>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("bernoulli cache").get(&bits) {
        return c.clone();
    }
    // |u| ≤ 3.3 in the region where the expansion is used, so the terms fall
    // by at least (3.3/2π)² ≈ 0.28 per step.
    let n_terms = (f64::from(bits) / 1.8) as u32 + 8;
    let two_pi_sq = {
        let tp = Float::with_val(bits, Constant::Pi) * 2u32;
        Float::with_val(bits, tp.square_ref())
    };
    let mut coeffs = Vec::with_capacity(n_terms as usize);
    let mut denom = Float::with_val(bits, 1);
    for k in 1..=n_terms {
        denom *= &two_pi_sq;
        let zeta = Float::with_val(bits, Float::zeta_u(2 * k));
        let mut c = zeta * 2u32 / (2 * k + 1);
        c /= &denom;
        if k % 2 == 0 {
            c = -c;
        }
        coeffs.push(c);
    }
    let coeffs = Arc::new(coeffs);
    cache.lock().expect("bernoulli cache").insert(bits, coeffs.clone());
    coeffs
}

fn dilog_series(z: &Cx) -> Cx {
    let bits = z.prec();
    let eps = Float::with_val(bits, Float::u_exp(1, -(bits as i32)));
    let mut power = z.clone();
    let mut sum = z.clone();
    for n in 2u64.. {
        power *= z;
        let nn = Float::with_val(bits, n * n);
        let term = Cx { re: Float::with_val(bits, &power.re / &nn), im: Float::with_val(bits, &power.im / &nn) };
        sum += &term;
        if term.abs() < eps {
            break;
        }
    }
    sum
}

fn dilog_bernoulli(w: &Cx) -> Cx {
    let bits = w.prec();
    let one = Cx::one(bits);
    let u = -(&one - w).ln();
    let u2 = &u * &u;
    let coeffs = bernoulli_coeffs(bits);
    let eps = Float::with_val(bits, Float::u_exp(1, -(bits as i32)));
    let mut quarter = u2.clone();
    quarter.scale_pow2(-2);
    let mut sum = &u - &quarter;
    let mut power = u.clone();
    for c in coeffs.iter() {
        power *= &u2;
        let term = power.mul_real(c);
        sum += &term;
        if term.abs() < eps {
            break;
        }
    }
    sum
}

/// `Li₂(w)` for `|w| ≤ 1`.
fn dilog_unit_disk(w: &Cx) -> Cx {
    let bits = w.prec();
    let half = Float::with_val(bits, 0.5);
    if w.re > half {
        // Li₂(w) = π²/6 − log w · log(1−w) − Li₂(1−w)
        let one = Cx::one(bits);
        let omw = &one - w;
        let pi2_6 = Float::with_val(bits, pi(bits).square_ref()) / 6u32;
        let mut v = Cx::from_real(pi2_6);
        if !omw.is_zero() {
            v -= &(&w.ln() * &omw.ln());
            v -= &dilog_core(&omw);
        }
        v
    } else {
        dilog_core(w)
    }
}

fn dilog_core(w: &Cx) -> Cx {
    if w.abs() <= 0.5 {
        dilog_series(w)
    } else {
        dilog_bernoulli(w)
    }
}

/// Principal-branch dilogarithm `Li₂(z)`, analytic on `ℂ ∖ (1, ∞)`.
///
/// Points on the cut are rejected with [`Error::BranchCut`]; use
/// [`dilog_upper_edge`] to evaluate the limit from above.
pub fn dilog(z: &Cx) -> Result<Cx> {
    if z.im.is_zero() && z.re > 1 {
        return Err(Error::BranchCut(format!("Li2 at real {} > 1", z.re.to_f64())));
    }
    Ok(dilog_unchecked(z))
}

/// Limit of `Li₂(x + i0)` for real `x`, including the cut `x > 1`.
pub fn dilog_upper_edge(x: &Float) -> Cx {
    let bits = x.prec();
    if *x <= 1 {
        return dilog_unchecked(&Cx::from_real(x.clone()));
    }
    // Im Li₂(x + i0) = π log x on the cut; the real part is continuous.
    let mut v = dilog_unchecked(&Cx::from_real(x.clone()));
    v.im = pi(bits) * Float::with_val(bits, x.ln_ref());
    v
}

fn dilog_unchecked(z: &Cx) -> Cx {
    let bits = z.prec();
    if z.is_zero() {
        return Cx::zero(bits);
    }
    let modulus = z.abs();
    if modulus > 1 {
        // Li₂(z) = −π²/6 − ½ log²(−z) − Li₂(1/z)
        let pi2_6 = Float::with_val(bits, pi(bits).square_ref()) / 6u32;
        let lg = (-z).ln();
        let mut half_sq = &lg * &lg;
        half_sq.scale_pow2(-1);
        let inv = z.recip();
        let mut v = Cx::from_real(-pi2_6);
        v -= &half_sq;
        v -= &dilog_unit_disk(&inv);
        // On the cut the principal log of −z picks the lower edge; keep the
        // real-axis case continuous from above.
        v
    } else {
        dilog_unit_disk(z)
    }
}

/// Double-precision dilogarithm using the same reductions as [`dilog`].
///
/// Used by the potential-function machinery, where f64 accuracy
/// (~1e-15 relative) is ample.
pub fn dilog_c64(z: Complex64) -> Complex64 {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    let coeffs = COEFFS.get_or_init(|| bernoulli_coeffs(96).iter().take(40).map(Float::to_f64).collect());
    let pi2_6 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    let core = |w: Complex64| -> Complex64 {
        if w.norm() <= 0.5 {
            let mut power = w;
            let mut sum = w;
            for n in 2..200u32 {
                power *= w;
                let term = power / f64::from(n * n);
                sum += term;
                if term.norm() < 1e-18 {
                    break;
                }
            }
            sum
        } else {
            let u = -(Complex64::new(1.0, 0.0) - w).ln();
            let u2 = u * u;
            let mut sum = u - u2 / 4.0;
            let mut power = u;
            for c in coeffs {
                power *= u2;
                let term = power * *c;
                sum += term;
                if term.norm() < 1e-18 {
                    break;
                }
            }
            sum
        }
    };
    let disk = |w: Complex64| -> Complex64 {
        if w.re > 0.5 {
            let omw = Complex64::new(1.0, 0.0) - w;
            if omw.norm() == 0.0 {
                return Complex64::new(pi2_6, 0.0);
            }
            Complex64::new(pi2_6, 0.0) - w.ln() * omw.ln() - core(omw)
        } else {
            core(w)
        }
    };
    if z.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z.norm() > 1.0 {
        let lg = (-z).ln();
        Complex64::new(-pi2_6, 0.0) - lg * lg / 2.0 - disk(1.0 / z)
    } else {
        disk(z)
    }
}

// ───────────────────────────────────────────────────────────────────────────
// Lobachevsky function
// ───────────────────────────────────────────────────────────────────────────

/// Lobachevsky function `Λ(θ) = −∫₀^θ log|2 sin u| du = ½ Σ sin(2nθ)/n²`.
///
/// The Fourier series is summed in closed form as `½ Im Li₂(e^{2iθ})`.
pub fn lobachevsky(theta: f64) -> f64 {
    0.5 * dilog_c64(Complex64::from_polar(1.0, 2.0 * theta)).im
}

/// High-precision Lobachevsky function.
pub fn lobachevsky_hp(theta: &Float) -> Float {
    let bits = theta.prec();
    let two_theta = Float::with_val(bits, theta * 2u32);
    let v = dilog_unchecked(&Cx::cis(&two_theta));
    v.im / 2u32
}
