//! Fully nested transcriptions of the closed formulas.
//!
//! These loop over every index tuple, accumulate the complete exponent of
//! `t` along the way and multiply the q-Pochhammer ratios directly; nothing
//! is factorized or cached.  They are exponentially more expensive than the
//! main engine and exist to cross-check it at small `N`.

use super::{check_budget, K_RATIO, L_RATIO, N_RATIO};
use crate::error::Result;
use crate::jones::SumWindow;
use crate::numeric::{Cx, EvalPoint};

/// `(t)_{K−l−1}(t)_{l+n} / ((t)_n (t)_{K−l−n−1} (t)_l)`, read off the
/// table while all indices are in range.
fn clasp_ratio(k: i64, n: i64, l: i64, ep: &EvalPoint) -> Cx {
    let top = i64::from(ep.r()) - 2;
    if k - 1 <= top && l + n <= top {
        let p = |i: i64| ep.q_pochhammer(i).expect("index checked against the table");
        let num = p(k - l - 1) * p(l + n);
        let den = &(p(n) * p(k - l - n - 1)) * p(l);
        &num / &den
    } else {
        &ep.prod_range(k - l - 1, k - l - n - 1) * &ep.qbinom(l + n, n)
    }
}

/// `(t)_{2n+1+k} / (t)_{2n−k}`.
fn fig8_ratio(n: i64, k: i64, ep: &EvalPoint) -> Cx {
    ep.prod_range(2 * n + 1 + k, 2 * n - k)
}

fn one_minus_t(ep: &EvalPoint) -> Cx {
    &Cx::one(ep.bits()) - ep.t()
}

/// The triple sum for `J_N(W_{0,1,1,0}(4₁))`:
/// `t^{(N²−1)/2+N(N−1)/2}/(1−t) Σ_{n,l,k} t^{−n−k} t^{−N(l+n)} ratio(n,l) t^{−2nk} (t)_{2n+1+k}/(t)_{2n−k}`.
pub fn triple_sum(ep: &EvalPoint, win: &SumWindow, budget: f64) -> Result<Cx> {
    win.validate()?;
    check_budget(3, ep.N(), win, budget)?;
    let big_n = i64::from(ep.N());
    let h = ep.half_level();
    let mut acc = Cx::zero(ep.bits());
    let (n_lo, n_hi) = win.range(N_RATIO, h, big_n - 1);
    for n in n_lo..=n_hi {
        let (l_lo, l_hi) = win.range(L_RATIO, h, big_n - 1 - n);
        let (k_lo, k_hi) = win.range(K_RATIO, h, 2 * n);
        for l in l_lo..=l_hi {
            let clasp = clasp_ratio(big_n, n, l, ep);
            for k in k_lo..=k_hi {
                let expo = -n - k - big_n * (l + n) - 2 * n * k;
                let mut term = &clasp * &fig8_ratio(n, k, ep);
                term *= ep.t_pow(expo);
                acc += &term;
            }
        }
    }
    let pref = ep.th_pow(2 * big_n * big_n - big_n - 1);
    Ok(&(&acc * pref) / &one_minus_t(ep))
}

/// The `(c+d+2)`-fold sum for `J_N(W_{a,1,c,d}(4₁))` with every clasp and
/// mirror clasp carrying its own summation index.
pub fn cabled_chain(a: i64, c: u32, d: u32, ep: &EvalPoint, win: &SumWindow, budget: f64) -> Result<Cx> {
    win.validate()?;
    check_budget(c + d + 2, ep.N(), win, budget)?;
    let big_n = i64::from(ep.N());
    let h = ep.half_level();
    let clasps = (c + d) as usize;
    let mut acc = Cx::zero(ep.bits());
    let (n_lo, n_hi) = win.range(N_RATIO, h, big_n - 1);
    for n in n_lo..=n_hi {
        let (l_lo, l_hi) = win.range(L_RATIO, h, big_n - 1 - n);
        let (k_lo, k_hi) = win.range(K_RATIO, h, 2 * n);
        if l_lo > l_hi {
            continue;
        }
        // Odometer over (l_1, …, l_c, l'_1, …, l'_d).
        let mut ls = vec![l_lo; clasps];
        loop {
            let mut prod = Cx::one(ep.bits());
            let mut expo = a * n * (n + 1);
            for (i, &l) in ls.iter().enumerate() {
                let ratio = clasp_ratio(big_n, n, l, ep);
                if i < c as usize {
                    prod *= &ratio;
                    expo -= big_n * (l + n);
                } else {
                    prod *= &ratio.conj();
                    expo += big_n * (l + n);
                }
            }
            for k in k_lo..=k_hi {
                let mut term = &prod * &fig8_ratio(n, k, ep);
                term *= ep.t_pow(expo - n - k - 2 * n * k);
                acc += &term;
            }
            let mut i = 0;
            while i < clasps {
                ls[i] += 1;
                if ls[i] <= l_hi {
                    break;
                }
                ls[i] = l_lo;
                i += 1;
            }
            if i == clasps {
                break;
            }
        }
    }
    let cd = i64::from(c) - i64::from(d);
    let pref = ep.th_pow(big_n * big_n - 1 + cd * big_n * (big_n - 1));
    Ok(&(&acc * pref) / &one_minus_t(ep))
}

/// The `(2p+3)`-fold sum for the `(p+1)`-fold iterated double at colour `N`,
/// with the exponent
/// `−N(l₁+n₁) + Σ_{γ≤p} [(2n_γ)² + 3n_γ − (2n_γ+1)(l_{γ+1}+n_{γ+1})] − n_{p+1} − k − 2n_{p+1}k`.
pub fn iterated_double(p: u32, ep: &EvalPoint, win: &SumWindow, budget: f64) -> Result<Cx> {
    win.validate()?;
    check_budget(2 * p + 3, ep.N(), win, budget)?;
    let big_n = i64::from(ep.N());
    let mut acc = Cx::zero(ep.bits());
    descend(p as usize + 1, big_n, -big_n, 0, Cx::one(ep.bits()), ep, win, &mut acc);
    let pref = ep.th_pow(2 * big_n * big_n - big_n - 1);
    Ok(&(&acc * pref) / &one_minus_t(ep))
}

/// One clasp level of [`iterated_double`]: `color` is the colour entering the
/// clasp and `mult` the coefficient of `(l + n)` in the exponent.
#[allow(clippy::too_many_arguments)]
fn descend(
    levels_left: usize,
    color: i64,
    mult: i64,
    expo: i64,
    prod: Cx,
    ep: &EvalPoint,
    win: &SumWindow,
    acc: &mut Cx,
) {
    let h = ep.half_level();
    let (n_lo, n_hi) = win.range(N_RATIO, h, color - 1);
    for n in n_lo..=n_hi {
        let (l_lo, l_hi) = win.range(L_RATIO, h, color - 1 - n);
        for l in l_lo..=l_hi {
            let here = &prod * &clasp_ratio(color, n, l, ep);
            let e = expo + mult * (l + n);
            if levels_left == 1 {
                let (k_lo, k_hi) = win.range(K_RATIO, h, 2 * n);
                for k in k_lo..=k_hi {
                    let mut term = &here * &fig8_ratio(n, k, ep);
                    term *= ep.t_pow(e - n - k - 2 * n * k);
                    *acc += &term;
                }
            } else {
                let e = e + 4 * n * n + 3 * n;
                descend(levels_left - 1, 2 * n + 1, -(2 * n + 1), e, here, ep, win, acc);
            }
        }
    }
}

/// The double sum for the Whitehead link with colours `(M1, M2)`:
/// `t^{(M₂²−1)/2+M₂(M₂−1)/2} Σ_{n,l} [M₁(2n+1)] t^{−M₂(l+n)} ratio(n,l)`.
pub fn whitehead_link(m1: u32, m2: u32, ep: &EvalPoint) -> Cx {
    let (m1, m2) = (i64::from(m1), i64::from(m2));
    let mut acc = Cx::zero(ep.bits());
    for n in 0..m2 {
        for l in 0..m2 - n {
            let mut term = &ep.quantum_int(m1 * (2 * n + 1)) * &clasp_ratio(m2, n, l, ep);
            term *= ep.t_pow(-m2 * (l + n));
            acc += &term;
        }
    }
    &acc * ep.th_pow(2 * m2 * m2 - m2 - 1)
}

/// Leaves of one doubled side of `W^α_β`: every index tuple
/// `(n₁, l₁, …, n_α, l_α)` with its innermost colour, summand and
/// `t_half`-exponent.
fn side_leaves(alpha: u32, m: i64, ep: &EvalPoint, win: &SumWindow) -> Vec<(i64, Cx, i64)> {
    let mut out = Vec::new();
    side_rec(alpha, m, Cx::one(ep.bits()), 0, ep, win, &mut out);
    out
}

fn side_rec(
    levels_left: u32,
    color: i64,
    prod: Cx,
    expo: i64,
    ep: &EvalPoint,
    win: &SumWindow,
    out: &mut Vec<(i64, Cx, i64)>,
) {
    if levels_left == 0 {
        out.push((color, prod, expo));
        return;
    }
    let h = ep.half_level();
    let expo = expo + 2 * color * color - color - 1;
    let (n_lo, n_hi) = win.range(N_RATIO, h, color - 1);
    for n in n_lo..=n_hi {
        let (l_lo, l_hi) = win.range(L_RATIO, h, color - 1 - n);
        for l in l_lo..=l_hi {
            let here = &prod * &clasp_ratio(color, n, l, ep);
            let e = expo - 2 * color * (l + n);
            side_rec(levels_left - 1, 2 * n + 1, here, e, ep, win, out);
        }
    }
}

/// The `2(α+β)`-fold sum for `W^α_β`, pairing every pair of innermost
/// colours `(A, B)` through `[A·B]`.
pub fn w_alpha_beta(
    alpha: u32,
    beta: u32,
    m1: u32,
    m2: u32,
    ep: &EvalPoint,
    win: &SumWindow,
    budget: f64,
) -> Result<Cx> {
    win.validate()?;
    check_budget(2 * (alpha + beta), m1.max(m2), win, budget)?;
    let left = side_leaves(alpha, i64::from(m1), ep, win);
    let right = side_leaves(beta, i64::from(m2), ep, win);
    let mut acc = Cx::zero(ep.bits());
    for (a, va, ea) in &left {
        for (b, vb, eb) in &right {
            let mut term = &(va * vb) * &ep.quantum_int(a * b);
            term *= ep.th_pow(ea + eb);
            acc += &term;
        }
    }
    Ok(acc)
}
