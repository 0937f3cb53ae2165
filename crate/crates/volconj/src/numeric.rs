//! Arbitrary-precision complex arithmetic, root-of-unity evaluation points,
//! quantum integers and q-Pochhammer tables.
//!
//! Everything downstream works at the odd level `r = 2N + 1` with
//! `t = exp(2πi/(N + 1/2))` and its principal square root
//! `t_half = exp(2πi/r)`.  Both are primitive `r`-th roots of unity, so every
//! power is reduced modulo `r` before it is looked up in a precomputed table;
//! exponents as large as `r²` never touch the floating-point exponent.

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard bits carried on top of the requested decimal precision.
const GUARD_BITS: u32 = 32;

/// Smallest precision accepted anywhere in the crate.
pub const MIN_DIGITS: u32 = 30;

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 64;

/// Working precision for all high-precision complex arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precision {
    decimal_digits: u32,
}

impl Precision {
    /// Validated constructor; fewer than [`MIN_DIGITS`] digits is rejected
    /// because the nested sums cancel too much below that.
    pub fn new(decimal_digits: u32) -> Result<Self> {
        if decimal_digits < MIN_DIGITS {
            return Err(Error::InvalidInput(format!(
                "precision must be at least {MIN_DIGITS} decimal digits, got {decimal_digits}"
            )));
        }
        Ok(Self { decimal_digits })
    }

    pub fn decimal_digits(self) -> u32 {
        self.decimal_digits
    }

    /// Mantissa bits handed to MPFR, including guard bits.
    pub fn bits(self) -> u32 {
        (f64::from(self.decimal_digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// `10^(-decimal_digits + slack)`, the natural "exact to working precision" tolerance.
    pub fn tolerance(self, slack: i32) -> f64 {
        10f64.powi(-(self.decimal_digits as i32) + slack)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self { decimal_digits: DEFAULT_DIGITS }
    }
}

// ───────────────────────────────────────────────────────────────────────────
// Complex numbers over MPFR
// ───────────────────────────────────────────────────────────────────────────

/// A complex number with MPFR real and imaginary parts of equal precision.
#[derive(Clone, PartialEq)]
pub struct Cx {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {:+}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(f, "{}", self.re.to_string_radix(10, Some(digits)))?;
        let im = self.im.to_string_radix(10, Some(digits));
        if im.starts_with('-') {
            write!(f, " - {}i", &im[1..])
        } else {
            write!(f, " + {im}i")
        }
    }
}

impl Cx {
    pub fn zero(bits: u32) -> Self {
        Self { re: Float::new(bits), im: Float::new(bits) }
    }

    pub fn one(bits: u32) -> Self {
        Self { re: Float::with_val(bits, 1), im: Float::new(bits) }
    }

    pub fn i(bits: u32) -> Self {
        Self { re: Float::new(bits), im: Float::with_val(bits, 1) }
    }

    pub fn from_f64(bits: u32, re: f64, im: f64) -> Self {
        Self { re: Float::with_val(bits, re), im: Float::with_val(bits, im) }
    }

    pub fn from_real(re: Float) -> Self {
        let bits = re.prec();
        Self { re, im: Float::new(bits) }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_int(bits: u32, n: i64) -> Self {
        Self { re: Float::with_val(bits, n), im: Float::new(bits) }
    }

    pub fn from_c64(bits: u32, z: Complex64) -> Self {
        Self::from_f64(bits, z.re, z.im)
    }

    /// `exp(i·theta)` for a real angle.
    pub fn cis(theta: &Float) -> Self {
        let bits = theta.prec();
        let (s, c) = theta.clone().sin_cos(Float::new(bits));
        Self { re: c, im: s }
    }

    /// `exp(2πi·num/den)` evaluated without forming a large angle.
    pub fn root_of_unity(bits: u32, num: i64, den: i64) -> Self {
        let k = num.rem_euclid(den);
        let mut theta = Float::with_val(bits, Constant::Pi);
        theta *= 2 * k;
        theta /= den;
        Self::cis(&theta)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut n = Float::with_val(self.prec(), self.re.square_ref());
        n += Float::with_val(self.prec(), self.im.square_ref());
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// `ln|z|` as f64, safe for magnitudes far outside the f64 range.
    pub fn ln_abs_f64(&self) -> f64 {
        self.abs().ln().to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Self { re: Float::with_val(self.prec(), &self.re / &n), im: -Float::with_val(self.prec(), &self.im / &n) }
    }

    pub fn exp(&self) -> Self {
        let bits = self.prec();
        let m = Float::with_val(bits, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(bits));
        Self { re: c * &m, im: s * &m }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Self { re: self.abs().ln(), im: self.arg() }
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> Self {
        let bits = self.prec();
        if self.is_zero() {
            return Self::zero(bits);
        }
        let r = self.abs();
        let a = Float::with_val(bits, &r + &self.re) / 2u32;
        let b = Float::with_val(bits, &r - &self.re) / 2u32;
        let re = a.sqrt();
        let mut im = b.sqrt();
        if self.im.is_sign_negative() {
            im = -im;
        }
        Self { re, im }
    }

    pub fn sinh(&self) -> Self {
        let e = self.exp();
        let mut d = e.clone();
        d -= &e.recip();
        d.scale_pow2(-1);
        d
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc *= &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiply by `2^k` exactly.
    pub fn scale_pow2(&mut self, k: i32) {
        self.re <<= k;
        self.im <<= k;
    }

    pub fn mul_real(&self, x: &Float) -> Self {
        Self { re: Float::with_val(self.prec(), &self.re * x), im: Float::with_val(self.prec(), &self.im * x) }
    }

    pub fn mul_i(&self) -> Self {
        Self { re: -self.im.clone(), im: self.re.clone() }
    }

    /// `|a - b| / max(|b|, tiny)`, as f64.
    pub fn rel_diff(&self, other: &Cx) -> f64 {
        let d = (self - other).abs();
        let m = other.abs();
        if m.is_zero() {
            d.to_f64()
        } else {
            (d / m).to_f64()
        }
    }

    pub fn abs_diff(&self, other: &Cx) -> f64 {
        (self - other).abs().to_f64()
    }
}

impl Add<&Cx> for &Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        Cx { re: Float::with_val(self.prec(), &self.re + &o.re), im: Float::with_val(self.prec(), &self.im + &o.im) }
    }
}

impl Sub<&Cx> for &Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        Cx { re: Float::with_val(self.prec(), &self.re - &o.re), im: Float::with_val(self.prec(), &self.im - &o.im) }
    }
}

impl Mul<&Cx> for &Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        let bits = self.prec();
        let mut re = Float::with_val(bits, &self.re * &o.re);
        re -= Float::with_val(bits, &self.im * &o.im);
        let mut im = Float::with_val(bits, &self.re * &o.im);
        im += Float::with_val(bits, &self.im * &o.re);
        Cx { re, im }
    }
}

impl Div<&Cx> for &Cx {
    type Output = Cx;
    fn div(self, o: &Cx) -> Cx {
        self * &o.recip()
    }
}

impl Add<&Cx> for Cx {
    type Output = Cx;
    fn add(mut self, o: &Cx) -> Cx {
        self += o;
        self
    }
}

impl Sub<&Cx> for Cx {
    type Output = Cx;
    fn sub(mut self, o: &Cx) -> Cx {
        self -= o;
        self
    }
}

impl Mul<&Cx> for Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        &self * o
    }
}

impl Div<&Cx> for Cx {
    type Output = Cx;
    fn div(self, o: &Cx) -> Cx {
        &self / o
    }
}

impl AddAssign<&Cx> for Cx {
    fn add_assign(&mut self, o: &Cx) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&Cx> for Cx {
    fn sub_assign(&mut self, o: &Cx) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&Cx> for Cx {
    fn mul_assign(&mut self, o: &Cx) {
        *self = &*self * o;
    }
}

impl DivAssign<&Cx> for Cx {
    fn div_assign(&mut self, o: &Cx) {
        *self = &*self / o;
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re, im: -self.im }
    }
}

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl std::iter::Sum for Cx {
    /// Panics on an empty iterator because the precision would be unknown;
    /// callers fold from an explicit zero instead when emptiness is possible.
    fn sum<I: Iterator<Item = Cx>>(mut iter: I) -> Cx {
        let mut acc = iter.next().expect("sum of an empty Cx iterator");
        for x in iter {
            acc += &x;
        }
        acc
    }
}

/// `π` at the given precision.
pub fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

// ───────────────────────────────────────────────────────────────────────────
// Evaluation points
// ───────────────────────────────────────────────────────────────────────────

/// The level `r = 2N + 1` root-of-unity data shared by all evaluators.
///
/// Immutable after construction and `Sync`, so it can be shared across
/// worker threads.
#[derive(Clone)]
pub struct EvalPoint {
    n: u32,
    r: u32,
    prec: Precision,
    conjugated: bool,
    /// `t_half^j` for `j = 0..r`.
    th_pows: Vec<Cx>,
    /// `(t)_k` for `k = 0..r`; entry `r − 1` equals `r` (cyclotomic closure).
    poch: Vec<Cx>,
    /// Reciprocals of `poch`.
    poch_inv: Vec<Cx>,
    /// `1 / (t_half − t_half^{-1})`.
    qint_den_inv: Cx,
}

impl fmt::Debug for EvalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvalPoint")
            .field("N", &self.n)
            .field("r", &self.r)
            .field("digits", &self.prec.decimal_digits())
            .field("conjugated", &self.conjugated)
            .finish()
    }
}

/// Build the evaluation point for colour bound `N` (level `r = 2N + 1`).
pub fn make_eval_point(n: u32, prec: Precision) -> Result<EvalPoint> {
    EvalPoint::build(n, prec, false)
}

impl EvalPoint {
    /// Build either at `t` or at its complex conjugate `t̄` (used to check the
    /// integrality/conjugation invariants independently of [`Cx::conj`]).
    pub fn build(n: u32, prec: Precision, conjugated: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        let r = 2 * n + 1;
        let bits = prec.bits();
        let sign = if conjugated { -1 } else { 1 };
        let th_pows: Vec<Cx> = (0..r as i64).map(|j| Cx::root_of_unity(bits, sign * j, r as i64)).collect();
        let one = Cx::one(bits);
        let mut poch = Vec::with_capacity(r as usize);
        poch.push(one.clone());
        for k in 1..r as usize {
            let tk = &th_pows[(2 * k) % r as usize];
            let factor = &one - tk;
            let next = &poch[k - 1] * &factor;
            poch.push(next);
        }
        let poch_inv = poch.iter().map(Cx::recip).collect();
        let th = &th_pows[1 % r as usize];
        let qint_den_inv = (th - &th.recip()).recip();
        Ok(Self { n, r, prec, conjugated, th_pows, poch, poch_inv, qint_den_inv })
    }

    /// The same level evaluated at `t̄ = t^{-1}`.
    pub fn conjugate(&self) -> Result<Self> {
        Self::build(self.n, self.prec, !self.conjugated)
    }

    #[allow(non_snake_case)]
    pub fn N(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn bits(&self) -> u32 {
        self.prec.bits()
    }

    pub fn is_conjugated(&self) -> bool {
        self.conjugated
    }

    /// `N + 1/2` as f64.
    pub fn half_level(&self) -> f64 {
        f64::from(self.n) + 0.5
    }

    /// `t = exp(±2πi/(N+1/2))`.
    pub fn t(&self) -> &Cx {
        self.t_pow(1)
    }

    /// `t_half = exp(±2πi/r)`, the principal square root of `t`.
    pub fn t_half(&self) -> &Cx {
        self.th_pow(1)
    }

    /// `t_half^m` for any integer `m`, by reduction mod `r`.
    pub fn th_pow(&self, m: i64) -> &Cx {
        &self.th_pows[m.rem_euclid(self.r as i64) as usize]
    }

    /// `t^m` for any integer `m`, by reduction mod `r`.
    pub fn t_pow(&self, m: i64) -> &Cx {
        &self.th_pows[(2 * m).rem_euclid(self.r as i64) as usize]
    }

    /// The stored table `(t)_0 .. (t)_{r−2}`.
    pub fn pochhammer(&self) -> &[Cx] {
        &self.poch[..self.r as usize - 1]
    }

    /// `(t)_n` for `0 ≤ n ≤ r − 2`.
    pub fn q_pochhammer(&self, n: i64) -> Result<&Cx> {
        if n < 0 || n > self.r as i64 - 2 {
            return Err(Error::IndexOutOfRange(format!("q_pochhammer index {n} outside [0, {}]", self.r - 2)));
        }
        Ok(&self.poch[n as usize])
    }

    /// Quantum integer `[n] = (t^{n/2} − t^{−n/2}) / (t^{1/2} − t^{−1/2})`.
    pub fn quantum_int(&self, n: i64) -> Cx {
        let num = self.th_pow(n) - self.th_pow(-n);
        &num * &self.qint_den_inv
    }

    /// `∏_{j=b+1}^{a} (1 − t^j)` for `a ≥ b ≥ −1` (1 when `a = b`).
    ///
    /// Exactly zero when the range contains a multiple of `r`; otherwise both
    /// ends are reduced into one period and read off the table, which is why
    /// the table carries the extra entry `(t)_{r−1} = r`.
    pub fn prod_range(&self, a: i64, b: i64) -> Cx {
        debug_assert!(a >= b && b >= -1, "prod_range({a}, {b})");
        if a == b {
            return Cx::one(self.bits());
        }
        let r = self.r as i64;
        let lo = b + 1;
        let q = lo.div_euclid(r);
        if lo.rem_euclid(r) == 0 || a >= (q + 1) * r {
            return Cx::zero(self.bits());
        }
        let hi = (a - q * r) as usize;
        let below = (lo - 1 - q * r) as usize;
        &self.poch[hi] * &self.poch_inv[below]
    }

    /// Whether [`Self::prod_range`] vanishes identically at this level.
    pub fn prod_range_is_zero(&self, a: i64, b: i64) -> bool {
        if a == b {
            return false;
        }
        let r = self.r as i64;
        let lo = b + 1;
        let q = lo.div_euclid(r);
        lo.rem_euclid(r) == 0 || a >= (q + 1) * r
    }

    /// Gaussian binomial `[a choose b]_t` via the q-Lucas theorem.
    pub fn qbinom(&self, a: i64, b: i64) -> Cx {
        let bits = self.bits();
        if b < 0 || b > a {
            return Cx::zero(bits);
        }
        let r = self.r as i64;
        let (a1, a0) = (a / r, a % r);
        let (b1, b0) = (b / r, b % r);
        if b0 > a0 {
            return Cx::zero(bits);
        }
        let mut v = &self.poch[a0 as usize] * &self.poch_inv[b0 as usize];
        v *= &self.poch_inv[(a0 - b0) as usize];
        if a1 > 0 {
            let c = binomial(a1 as u64, b1 as u64);
            v = v.mul_real(&Float::with_val(bits, c));
        }
        v
    }
}

/// Ordinary binomial coefficient as f64-exact integer (small arguments only).
fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Free-function form of [`EvalPoint::quantum_int`].
pub fn quantum_int(n: i64, ep: &EvalPoint) -> Cx {
    ep.quantum_int(n)
}

/// Free-function form of [`EvalPoint::q_pochhammer`].
pub fn q_pochhammer(n: i64, ep: &EvalPoint) -> Result<Cx> {
    ep.q_pochhammer(n).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(n: u32) -> EvalPoint {
        make_eval_point(n, Precision::default()).unwrap()
    }

    #[test]
    fn rejects_zero_level_and_low_precision() {
        assert!(make_eval_point(0, Precision::default()).is_err());
        assert!(Precision::new(29).is_err());
        assert!(Precision::new(30).is_ok());
    }

    #[test]
    fn first_pochhammer_entry_at_n1() {
        let e = ep(1);
        let p1 = e.q_pochhammer(1).unwrap().to_c64();
        // 1 − e^{4πi/3} = 3/2 + (√3/2)i
        assert!((p1.re - 1.5).abs() < 1e-15);
        assert!((p1.im - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(e.q_pochhammer(0).unwrap().to_c64(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cyclotomic_closure_at_r25() {
        let e = ep(12);
        let last = e.q_pochhammer(23).unwrap();
        let closed = last * &(&Cx::one(e.bits()) - e.t_pow(24));
        let expect = Cx::from_int(e.bits(), 25);
        assert!(closed.abs_diff(&expect) < 1e-55);
        assert!(e.q_pochhammer(24).is_err());
    }

    #[test]
    fn t_half_squares_to_t_and_is_primitive() {
        let e = ep(7);
        let sq = e.t_half() * e.t_half();
        assert!(sq.abs_diff(e.t()) < 1e-60);
        assert!((e.t().abs_f64() - 1.0).abs() < 1e-15);
        for k in 1..e.r() as i64 {
            assert!(e.t_pow(k).abs_diff(&Cx::one(e.bits())) > 1e-3);
        }
    }

    #[test]
    fn quantum_integers_vanish_at_level() {
        let e = ep(12);
        assert!(e.quantum_int(1).abs_diff(&Cx::one(e.bits())) < 1e-60);
        assert!(e.quantum_int(25).is_zero());
        assert!(e.quantum_int(400).is_zero());
    }

    #[test]
    fn prod_range_matches_direct_products() {
        let e = ep(5);
        let r = e.r() as i64;
        for a in -1..(3 * r) {
            for b in -1..=a.min(2 * r) {
                let mut direct = Cx::one(e.bits());
                for j in (b + 1)..=a {
                    direct *= &(&Cx::one(e.bits()) - e.t_pow(j));
                }
                let fast = e.prod_range(a, b);
                assert!(fast.abs_diff(&direct) < 1e-50, "a={a} b={b}");
                assert_eq!(e.prod_range_is_zero(a, b), (b + 1..=a).any(|j| j % r == 0));
            }
        }
    }

    #[test]
    fn qbinom_matches_product_definition() {
        let e = ep(3);
        let r = e.r() as i64;
        for a in 0..(2 * r) {
            for b in 0..=a {
                // Product form ∏_{j=1}^{b} (1 − t^{a−b+j}) / (1 − t^j), valid
                // whenever the denominator does not vanish.
                if b >= r {
                    continue;
                }
                let mut num = Cx::one(e.bits());
                let mut den = Cx::one(e.bits());
                for j in 1..=b {
                    num *= &(&Cx::one(e.bits()) - e.t_pow(a - b + j));
                    den *= &(&Cx::one(e.bits()) - e.t_pow(j));
                }
                let direct = &num / &den;
                assert!(e.qbinom(a, b).abs_diff(&direct) < 1e-45, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn complex_helpers_round_trip() {
        let bits = 200;
        let z = Cx::from_f64(bits, 0.3, -1.7);
        assert!(z.ln().exp().abs_diff(&z) < 1e-55);
        let s = z.sqrt();
        assert!((&s * &s).abs_diff(&z) < 1e-55);
        assert!(s.re > 0);
        assert!(z.powi(-3).abs_diff(&(&z * &z * &z).recip()) < 1e-55);
    }
}
