//! The quantum dilogarithm
//! `φ_r(z) = (4πi/r) ∫_Ω e^{(2z−π)x} / (4x sinh(πx) sinh(2πx/r)) dx`
//! over `Ω = (−∞, −ε] ∪ {|x| = ε, Im x > 0} ∪ [ε, ∞)`.
//!
//! The only poles of the integrand sit on the imaginary axis, so each tail
//! may be rotated off the real axis.  Rotating the right tail by
//! `−arg(2π + 2π/r − 2z)` and the left by `−arg(2z + 2π/r)` turns the
//! asymptotic behaviour into pure exponential decay for every `z` in the
//! strip, which the exp-sinh rule then integrates to full precision.

use rug::Float;
use serde::{Deserialize, Serialize};

use super::quadrature::{adaptive_gl, exp_sinh};
use crate::error::{Error, Result};
use crate::numeric::{pi, Cx};

/// Largest tail rotation in radians; keeps the rays well inside the right
/// and left half planes.
const MAX_ROTATION: f64 = 1.2;

/// Contour and quadrature settings for [`quantum_dilog`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourConfig {
    /// Radius of the semicircular detour around the origin, in `(0, 1)`.
    pub epsilon: f64,
    /// Gauss–Legendre nodes per semicircle panel.
    pub quad_points: usize,
    /// Optional hard truncation of each tail (in units of the ray
    /// parameter).  `None` derives the truncation from the decay rate and
    /// the working precision, which is always sufficient.
    pub cutoff: Option<f64>,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self { epsilon: 0.5, quad_points: 40, cutoff: None }
    }
}

impl ContourConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidInput(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        if self.quad_points < 4 {
            return Err(Error::InvalidInput("quad_points must be at least 4".into()));
        }
        Ok(())
    }

    /// Tail truncation for a ray with exponential decay rate `rate`, such that
    /// the neglected integrand is below `2^{-bits}·10^{-10}`.
    pub fn derived_cutoff(bits: u32, rate: f64) -> f64 {
        let nats = f64::from(bits) * std::f64::consts::LN_2 + 10.0 * std::f64::consts::LN_10;
        (nats / rate.max(1e-12)).max(50.0)
    }
}

/// The integrand `e^{(2z−π)x} / (4x sinh(πx) sinh(2πx/r))`.
fn integrand(z: &Cx, r: u32, x: &Cx) -> Cx {
    let bits = z.prec();
    let p = pi(bits);
    let mut a = z.clone();
    a.scale_pow2(1);
    a.re -= &p;
    let num = (&a * x).exp();
    let s1 = x.mul_real(&p).sinh();
    let two_pi_over_r = Float::with_val(bits, &p * 2u32) / r;
    let s2 = x.mul_real(&two_pi_over_r).sinh();
    let mut den = &(x * &s1) * &s2;
    den.scale_pow2(2);
    &num / &den
}

/// Quantum dilogarithm `φ_r(z)` for `−π/r < Re z < π + π/r`.
///
/// The working precision is that of `z`.
pub fn quantum_dilog(z: &Cx, r: u32, cfg: &ContourConfig) -> Result<Cx> {
    cfg.validate()?;
    if r < 3 || r % 2 == 0 {
        return Err(Error::InvalidInput(format!("level r = {r} must be odd and at least 3")));
    }
    let bits = z.prec();
    let p = pi(bits);
    let pi_r = Float::with_val(bits, &p / r);
    let lower = -pi_r.clone();
    let upper = Float::with_val(bits, &p + &pi_r);
    if z.re <= lower || z.re >= upper {
        return Err(Error::Domain(format!("Re z = {} outside the strip (−π/{r}, π + π/{r})", z.re.to_f64())));
    }
    // Relative target a few digits beyond the requested precision, leaving
    // the 32 guard bits as headroom.
    let tol = 2f64.powi(-(bits as i32) + 40).max(1e-300);
    let eps = Float::with_val(bits, cfg.epsilon);
    let zc = z.to_c64();
    let rf = f64::from(r);
    let two_pi = 2.0 * std::f64::consts::PI;

    // Right tail: x = ε + e^{iθ}s.
    let right_dir = num_complex::Complex64::new(two_pi + two_pi / rf, 0.0) - 2.0 * zc;
    let theta_r = (-right_dir.arg()).clamp(-MAX_ROTATION, MAX_ROTATION);
    let rate_r = -(num_complex::Complex64::from_polar(1.0, theta_r) * -right_dir).re;
    let rot_r = Cx::cis(&Float::with_val(bits, theta_r));
    let cut_r = cfg.cutoff.unwrap_or_else(|| ContourConfig::derived_cutoff(bits, rate_r));
    let right = exp_sinh(
        |s: &Float| {
            let mut x = rot_r.mul_real(s);
            x.re += &eps;
            integrand(z, r, &x)
        },
        bits,
        tol,
        Some(cut_r),
    )?;
    let right = &right * &rot_r;

    // Left tail: x = −ε − e^{iθ}s, so ∫_{−∞}^{−ε} f = e^{iθ} ∫_0^∞ f(−ε − e^{iθ}s) ds.
    let left_dir = 2.0 * zc + num_complex::Complex64::new(two_pi / rf, 0.0);
    let theta_l = (-left_dir.arg()).clamp(-MAX_ROTATION, MAX_ROTATION);
    let rate_l = (num_complex::Complex64::from_polar(1.0, theta_l) * left_dir).re;
    let rot_l = Cx::cis(&Float::with_val(bits, theta_l));
    let cut_l = cfg.cutoff.unwrap_or_else(|| ContourConfig::derived_cutoff(bits, rate_l));
    let left = exp_sinh(
        |s: &Float| {
            let mut x = -rot_l.mul_real(s);
            x.re -= &eps;
            integrand(z, r, &x)
        },
        bits,
        tol,
        Some(cut_l),
    )?;
    let left = &left * &rot_l;

    // Upper semicircle traversed from φ = π to φ = 0.
    let arc = adaptive_gl(
        &|phi: &Float| {
            let e = Cx::cis(phi).mul_real(&eps);
            let dx = e.mul_i();
            &integrand(z, r, &e) * &dx
        },
        &Float::new(bits),
        &p,
        cfg.quad_points,
        tol,
    )?;

    let mut total = &right + &left;
    total -= &arc;
    let four_pi_over_r = Float::with_val(bits, &p * 4u32) / r;
    Ok(total.mul_i().mul_real(&four_pi_over_r))
}

/// `exp(−i·scale·x)`, i.e. `exp(scale·x / i)`.
fn exp_div_i(x: &Cx, scale: &Float) -> Cx {
    let y = x.mul_real(scale);
    Cx::from_parts(y.im.clone(), -y.re).exp()
}

/// Left-hand side of the functional equation
/// `exp((N+½)/(2πi)·(φ_r(z − π/r) − φ_r(z + π/r))) = 1 − e^{2iz}`.
pub fn qd_shift_ratio(z: &Cx, r: u32, cfg: &ContourConfig) -> Result<Cx> {
    let bits = z.prec();
    let p = pi(bits);
    let pi_r = Float::with_val(bits, &p / r);
    let mut lo = z.clone();
    lo.re -= &pi_r;
    let mut hi = z.clone();
    hi.re += &pi_r;
    let diff = &quantum_dilog(&lo, r, cfg)? - &quantum_dilog(&hi, r, cfg)?;
    // (N + ½)/(2π) = r/(4π)
    let scale = Float::with_val(bits, r) / (p * 4u32);
    Ok(exp_div_i(&diff, &scale))
}

/// `(t)_n` at `t = e^{4πi/r}` reconstructed from the quantum dilogarithm as
/// `exp((r/4πi)(φ_r(π/r) − φ_r(2πn/r + π/r)))`.
///
/// The right-hand argument leaves the strip once `n > (r−1)/2`; those
/// indices use the reflection `(t)_n = r / conj((t)_{r−1−n})`, which follows
/// from `(t)_{r−1} = r` and `1 − t^{r−j} = conj(1 − t^j)`.
pub fn pochhammer_via_qdilog(n: u32, r: u32, cfg: &ContourConfig, bits: u32) -> Result<Cx> {
    if r < 3 || r % 2 == 0 {
        return Err(Error::InvalidInput(format!("level r = {r} must be odd and at least 3")));
    }
    if n > r - 2 {
        return Err(Error::IndexOutOfRange(format!("index {n} exceeds r − 2 = {}", r - 2)));
    }
    let half = (r - 1) / 2;
    if n > half {
        let m = pochhammer_via_qdilog(r - 1 - n, r, cfg, bits)?;
        return Ok(&Cx::from_int(bits, i64::from(r)) / &m.conj());
    }
    let p = pi(bits);
    let pi_r = Float::with_val(bits, &p / r);
    let mut arg = Float::with_val(bits, &p * (2 * n));
    arg /= r;
    arg += &pi_r;
    let diff = &quantum_dilog(&Cx::from_real(pi_r), r, cfg)? - &quantum_dilog(&Cx::from_real(arg), r, cfg)?;
    let scale = Float::with_val(bits, r) / (p * 4u32);
    Ok(exp_div_i(&diff, &scale))
}

/// Corner factor `exp(−(r/4πi) φ_r(π/r))`, or with `mirror` the factor
/// `exp(+(r/4πi) φ_r(π − π/r))`, at `bits` of precision.
pub fn qd_corner_factor(r: u32, mirror: bool, cfg: &ContourConfig, bits: u32) -> Result<Cx> {
    if r < 3 || r % 2 == 0 {
        return Err(Error::InvalidInput(format!("level r = {r} must be odd and at least 3")));
    }
    let p = pi(bits);
    let pi_r = Float::with_val(bits, &p / r);
    let arg = if mirror { Float::with_val(bits, &p - &pi_r) } else { pi_r };
    let phi = quantum_dilog(&Cx::from_real(arg), r, cfg)?;
    let mut scale = Float::with_val(bits, r) / (p * 4u32);
    if !mirror {
        scale = -scale;
    }
    Ok(exp_div_i(&phi, &scale))
}
