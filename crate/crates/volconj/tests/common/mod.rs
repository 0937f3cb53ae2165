//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rug::Float;
use volconj::special::dilog_c64;

/// `Vol(S³∖4₁)` and `Vol(S³∖WL)` (mpmath Clausen function, 40 digits).
pub const VOL_FIG8: f64 = 2.029883212819307250042405108549040571883;
pub const VOL_WL: f64 = 3.663862376708876060218414059729536443097;

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// `Li₂(e^{2πiw})`.
fn li(w: Complex64) -> Complex64 {
    dilog_c64((TWO_PI_I * w).exp())
}

/// The deformed Whitehead potential written out term by term:
/// `(1/2πi)[−(2πi(s−1))(2πi(z₁+z₂)) + Li(s−1−z₁−z₂) − Li(s−1−z₂) + Li(z₂) − Li(z₁+z₂) + Li(z₁)]`.
pub fn deformed_whitehead(s: f64, z1: Complex64, z2: Complex64) -> Complex64 {
    let e = Complex64::new(s - 1.0, 0.0);
    let bracket =
        -(TWO_PI_I * e) * (TWO_PI_I * (z1 + z2)) + li(e - z1 - z2) - li(e - z2) + li(z2) - li(z1 + z2) + li(z1);
    bracket / TWO_PI_I
}

/// Golden-section minimum of a unimodal `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

/// `2π·Re Φ^{(s)}(WL)` at its saddle near `(½, ¼)`, located by brute force:
/// for each real part of `z₂` on a grid the real part of the potential is
/// minimized over the imaginary direction, and the resulting profile is
/// maximized (grid search followed by golden-section refinement).
pub fn deformed_volume_by_grid(s: f64) -> f64 {
    let z1 = Complex64::new(0.5, 0.0);
    let profile = |x: f64| golden_min(|y| deformed_whitehead(s, z1, Complex64::new(x, y)).re, -0.1, 0.1, 1e-12).1;
    let grid: Vec<f64> = (0..=200).map(|k| 0.15 + 0.2 * f64::from(k) / 200.0).collect();
    let best = grid.iter().copied().fold((0.0, f64::NEG_INFINITY), |acc, x| {
        let v = profile(x);
        if v > acc.1 {
            (x, v)
        } else {
            acc
        }
    });
    let (_, neg) = golden_min(|x| -profile(x), best.0 - 0.001, best.0 + 0.001, 1e-12);
    -2.0 * PI * neg
}

/// `|[n]|` at `t = e^{4πi/r}` from sines, `|sin(2πn/r) / sin(2π/r)|`.
pub fn qint(n: u32, r: u32, bits: u32) -> Float {
    let p = Float::with_val(bits, rug::float::Constant::Pi);
    // sin(2πx/r) only depends on x mod r.
    let s = |x: u64| {
        let k = (x % u64::from(r)) as u32;
        (Float::with_val(bits, &p * (2 * k)) / r).sin()
    };
    Float::with_val(bits, s(u64::from(n)) / s(1)).abs()
}
