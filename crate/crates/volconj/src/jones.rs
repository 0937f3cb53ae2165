//! Colored Jones evaluators for every supported family at `t = e^{4πi/r}`.
//!
//! The nested multi-sums of the closed formulas are evaluated level by level:
//! each Whitehead-doubling level contributes the clasp coefficients
//! `C(n; K)` of one pattern, contracted against the colored Jones values of
//! the inner pattern at colour `2n + 1`.  This is the same sum as the fully
//! nested transcription, but costs `O(N³)` per level instead of
//! `O(N^{2p+3})`.  The nested transcriptions live in [`literal`] and serve as
//! oracles.
//!
//! All kernels are exact Laurent-polynomial identities, so colours beyond the
//! table range are handled by [`EvalPoint::prod_range`] and
//! [`EvalPoint::qbinom`] without any division by a vanishing factor.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::links::{simplicial_volume, LinkFamily, VolumeConstants};
use crate::numeric::{Cx, EvalPoint, Precision};

pub mod literal;

/// Default cap on the estimated number of nested-sum terms.
pub const DEFAULT_TERM_BUDGET: f64 = 2e8;

/// Critical ratio of the clasp summation index `n`.
pub const N_RATIO: f64 = 0.5;
/// Critical ratio of the inner clasp index `l`.
pub const L_RATIO: f64 = 0.25;
/// Critical ratio of the figure-eight index `k`.
pub const K_RATIO: f64 = 5.0 / 6.0;

/// Which index tuples of a nested sum are kept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SumWindow {
    Full,
    /// Keep only indices within `eta·(N+½)` of their critical ratio.
    Restricted {
        eta: f64,
    },
}

impl SumWindow {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Restricted { eta } if !(eta > 0.0 && eta < 0.25) => {
                Err(Error::InvalidInput(format!("window eta {eta} outside (0, 1/4)")))
            }
            _ => Ok(()),
        }
    }

    /// Inclusive index range `lo..=hi` kept for an index with critical ratio
    /// `center` and admissible range `0..=max`.  Boundaries are rounded
    /// outwards; the range may be empty (`lo > hi`).
    pub fn range(&self, center: f64, h: f64, max: i64) -> (i64, i64) {
        match *self {
            Self::Full => (0, max),
            Self::Restricted { eta } => {
                let lo = ((center - eta) * h).floor() as i64;
                let hi = ((center + eta) * h).ceil() as i64;
                (lo.max(0), hi.min(max))
            }
        }
    }

    /// Number of indices per coordinate, for budgeting.
    fn width(&self, n: u32) -> f64 {
        match *self {
            Self::Full => f64::from(n),
            Self::Restricted { eta } => (2.0 * eta * (f64::from(n) + 0.5)).ceil() + 2.0,
        }
    }
}

/// Estimated number of index tuples of a `dim`-fold nested sum at colour
/// bound `n`: `N^dim / dim!` in full mode, the window box otherwise.
pub fn estimated_terms(dim: u32, n: u32, win: &SumWindow) -> f64 {
    match win {
        SumWindow::Full => {
            let fact: f64 = (1..=dim).map(f64::from).product();
            f64::from(n).powi(dim as i32) / fact
        }
        SumWindow::Restricted { .. } => win.width(n).powi(dim as i32),
    }
}

pub(crate) fn check_budget(dim: u32, n: u32, win: &SumWindow, budget: f64) -> Result<()> {
    let estimated = estimated_terms(dim, n, win);
    if estimated > budget {
        return Err(Error::BudgetExceeded { estimated, budget });
    }
    Ok(())
}

/// One colour per link component, each in `[1, N]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorAssignment {
    pub colors: Vec<u32>,
}

impl ColorAssignment {
    pub fn new(colors: Vec<u32>, link: &LinkFamily, ep: &EvalPoint) -> Result<Self> {
        if colors.len() != link.components() as usize {
            return Err(Error::InvalidInput(format!(
                "{link} has {} components but {} colours were given",
                link.components(),
                colors.len()
            )));
        }
        // The Hopf pairing [M₁M₂] is defined for every colour below r; the
        // knot factors then decide whether they support colours above N.
        let max = match link {
            LinkFamily::HopfUnion { .. } => ep.r() - 1,
            _ => ep.N(),
        };
        if let Some(&m) = colors.iter().find(|&&m| m == 0 || m > max) {
            return Err(Error::InvalidInput(format!("colour {m} outside [1, {max}]")));
        }
        Ok(Self { colors })
    }

    /// All components coloured `N`.
    pub fn diagonal(link: &LinkFamily, ep: &EvalPoint) -> Self {
        Self { colors: vec![ep.N(); link.components() as usize] }
    }
}

fn check_color(m: u32, ep: &EvalPoint) -> Result<()> {
    if m == 0 || m > ep.N() {
        return Err(Error::InvalidInput(format!("colour {m} outside [1, {}]", ep.N())));
    }
    Ok(())
}

/// Framing factor `t^{(K²−1)/2 + K(K−1)/2} = t_half^{2K² − K − 1}` of one
/// Whitehead-clasp level at colour `K`.
pub fn clasp_prefactor(k: i64, ep: &EvalPoint) -> &Cx {
    ep.th_pow(2 * k * k - k - 1)
}

/// One term `t^{−K(l+n)} (t)_{K−l−1}(t)_{l+n} / ((t)_n (t)_{K−l−n−1} (t)_l)`.
fn clasp_term(n: i64, l: i64, k: i64, ep: &EvalPoint) -> Cx {
    let mut v = ep.prod_range(k - l - 1, k - l - n - 1);
    if v.is_zero() {
        return v;
    }
    v *= &ep.qbinom(l + n, n);
    v *= ep.t_pow(-k * (l + n));
    v
}

/// `C(n, t; K) = Σ_{l=0}^{K−1−n} t^{−K(l+n)} ∏_{j=1}^{n} (1−t^{K−l−j})(1−t^{l+j})/(1−t^j)`,
/// the prefactor-free clasp coefficient, or its mirror `C(n, t^{−1}; K)`.
pub fn cable_coeff(n: i64, k: u32, ep: &EvalPoint, mirrored: bool) -> Result<Cx> {
    let k = i64::from(k);
    if k < 1 || n < 0 || n > k - 1 {
        return Err(Error::IndexOutOfRange(format!("clasp index n = {n} outside [0, {}]", k - 1)));
    }
    let v = clasp_coeff_windowed(n, k, ep, &SumWindow::Full).0;
    Ok(if mirrored { v.conj() } else { v })
}

/// `C(n; K)` with the `l`-sum restricted by the window; returns the value
/// and the number of terms summed.
fn clasp_coeff_windowed(n: i64, k: i64, ep: &EvalPoint, win: &SumWindow) -> (Cx, u64) {
    let (lo, hi) = win.range(L_RATIO, ep.half_level(), k - 1 - n);
    let mut acc = Cx::zero(ep.bits());
    let mut terms = 0;
    for l in lo..=hi {
        acc += &clasp_term(n, l, k, ep);
        terms += 1;
    }
    (acc, terms)
}

/// Sparse clasp vector `{n ↦ C(n; K)}` over the windowed `n`-range.
#[derive(Clone, Debug)]
struct ClaspVector {
    entries: Vec<(i64, Cx)>,
    terms: u64,
}

fn clasp_vector(k: i64, ep: &EvalPoint, win: &SumWindow) -> ClaspVector {
    let (lo, hi) = win.range(N_RATIO, ep.half_level(), k - 1);
    let mut entries = Vec::new();
    let mut terms = 0;
    for n in lo..=hi {
        let (v, t) = clasp_coeff_windowed(n, k, ep, win);
        terms += t;
        entries.push((n, v));
    }
    ClaspVector { entries, terms }
}

/// Clasp vectors for a set of colours, computed in parallel and stored in
/// colour order.
fn clasp_vectors(colors: &BTreeSet<i64>, ep: &EvalPoint, win: &SumWindow) -> HashMap<i64, ClaspVector> {
    let list: Vec<i64> = colors.iter().copied().collect();
    let vecs: Vec<ClaspVector> = list.par_iter().map(|&k| clasp_vector(k, ep, win)).collect();
    list.into_iter().zip(vecs).collect()
}

/// Colours `2n+1` reached from colour `k` through the windowed clasp.
fn child_colors(k: i64, ep: &EvalPoint, win: &SumWindow) -> impl Iterator<Item = i64> {
    let (lo, hi) = win.range(N_RATIO, ep.half_level(), k - 1);
    (lo..=hi).map(|n| 2 * n + 1)
}

/// A colored Jones value with the number of summand evaluations used.
#[derive(Clone, Debug)]
pub struct JonesValue {
    pub value: Cx,
    pub terms: u64,
}

/// Normalized figure-eight invariant
/// `J'_M = Σ_{k=0}^{M−1} t^{−kM}/(1−t^M) · (t)_{M+k}/(t)_{M−k−1}` for `M ≤ N`.
pub fn jones_fig8_normalized(m: u32, ep: &EvalPoint) -> Result<Cx> {
    check_color(m, ep)?;
    let m = i64::from(m);
    let mut acc = Cx::zero(ep.bits());
    for k in 0..m {
        let mut term = ep.q_pochhammer(m + k)?.clone();
        term /= ep.q_pochhammer(m - k - 1)?;
        term *= ep.t_pow(-k * m);
        acc += &term;
    }
    let den = &Cx::one(ep.bits()) - ep.t_pow(m);
    Ok(&acc / &den)
}

/// Unnormalized figure-eight invariant `[M]·J'_M` for any colour `M ≥ 1`,
/// as `t_half^{1−M}/(1−t) · Σ_k t^{−kM} ∏_{j=M−k}^{M+k}(1 − t^j)`, with the
/// `k`-sum restricted by the window.
fn fig8_unnormalized(m: i64, ep: &EvalPoint, win: &SumWindow) -> (Cx, u64) {
    let (lo, hi) = win.range(K_RATIO, ep.half_level(), m - 1);
    let mut acc = Cx::zero(ep.bits());
    let mut terms = 0;
    for k in lo..=hi {
        let mut term = ep.prod_range(m + k, m - k - 1);
        if !term.is_zero() {
            term *= ep.t_pow(-k * m);
            acc += &term;
        }
        terms += 1;
    }
    let den = &Cx::one(ep.bits()) - ep.t();
    acc *= ep.th_pow(1 - m);
    (&acc / &den, terms)
}

/// Unnormalized figure-eight invariant `[M]·J'_M`, `M ≤ N`.
pub fn jones_fig8(m: u32, ep: &EvalPoint) -> Result<Cx> {
    check_color(m, ep)?;
    Ok(fig8_unnormalized(i64::from(m), ep, &SumWindow::Full).0)
}

/// Whitehead link with colours `(M1, M2)`:
/// `t_half^{2M₂²−M₂−1} Σ_{n=0}^{M₂−1} [M₁(2n+1)]·C(n; M₂)`.
pub fn jones_whitehead_link(m1: u32, m2: u32, ep: &EvalPoint) -> Result<Cx> {
    check_color(m1, ep)?;
    check_color(m2, ep)?;
    let k = i64::from(m2);
    let cv = clasp_vector(k, ep, &SumWindow::Full);
    let mut acc = Cx::zero(ep.bits());
    for (n, c) in &cv.entries {
        acc += &(&ep.quantum_int(i64::from(m1) * (2 * n + 1)) * c);
    }
    Ok(&acc * clasp_prefactor(k, ep))
}

/// `W_{a,1,c,d}(4₁)` with all colours `N`:
/// `t_half^{N²−1} t^{(c−d)N(N−1)/2} Σ_n t^{an(n+1)} C(n)^c C̄(n)^d · J_{2n+1}(4₁)`.
pub fn jones_cabled_chain(a: i64, c: u32, d: u32, ep: &EvalPoint, win: SumWindow) -> Result<Cx> {
    Ok(cabled_chain(a, c, d, ep, &win, DEFAULT_TERM_BUDGET)?.value)
}

/// [`jones_cabled_chain`] with an explicit term budget and term count.
pub fn cabled_chain(a: i64, c: u32, d: u32, ep: &EvalPoint, win: &SumWindow, budget: f64) -> Result<JonesValue> {
    LinkFamily::cabled_chain(a, c, d)?;
    win.validate()?;
    check_budget(c + d + 2, ep.N(), win, budget)?;
    let n_top = i64::from(ep.N());
    let cv = clasp_vector(n_top, ep, win);
    if cv.entries.is_empty() {
        return Err(Error::InvalidInput("window leaves no clasp index".into()));
    }
    let mut terms = cv.terms * u64::from(c + d);
    let tails: Vec<(Cx, u64)> = cv.entries.par_iter().map(|(n, _)| fig8_unnormalized(2 * n + 1, ep, win)).collect();
    let mut acc = Cx::zero(ep.bits());
    for ((n, cn), (tail, t)) in cv.entries.iter().zip(tails) {
        terms += t;
        let mut term = tail;
        term *= &cn.powi(i64::from(c));
        term *= &cn.conj().powi(i64::from(d));
        term *= ep.t_pow(a * n * (n + 1));
        acc += &term;
    }
    let cd = i64::from(c) - i64::from(d);
    acc *= ep.th_pow(n_top * n_top - 1 + cd * n_top * (n_top - 1));
    Ok(JonesValue { value: acc, terms })
}

/// `(p+1)`-fold iterated Whitehead double of `4₁` at colour `N`.
pub fn jones_iterated_double(p: u32, ep: &EvalPoint, win: SumWindow) -> Result<Cx> {
    Ok(iterated_double(p, ep.N(), ep, &win, DEFAULT_TERM_BUDGET)?.value)
}

/// Iterated double at top colour `m ≤ N` with explicit budget:
/// `WD_p(M) = t_half^{2M²−M−1} Σ_n C(n; M) WD_{p−1}(2n+1)`, `WD_{−1} = J(4₁)`.
pub fn iterated_double(p: u32, m: u32, ep: &EvalPoint, win: &SumWindow, budget: f64) -> Result<JonesValue> {
    check_color(m, ep)?;
    win.validate()?;
    check_budget(2 * p + 3, m, win, budget)?;
    // Colours needed at each level, top (level p) down to the figure-eight tail.
    let mut levels: Vec<BTreeSet<i64>> = vec![BTreeSet::from([i64::from(m)])];
    for _ in 0..=p {
        let next: BTreeSet<i64> = levels.last().unwrap().iter().flat_map(|&k| child_colors(k, ep, win)).collect();
        levels.push(next);
    }
    if levels.last().unwrap().is_empty() {
        return Err(Error::InvalidInput("window leaves no clasp index".into()));
    }
    let tail_colors: Vec<i64> = levels.last().unwrap().iter().copied().collect();
    let tail_vals: Vec<(Cx, u64)> = tail_colors.par_iter().map(|&k| fig8_unnormalized(k, ep, win)).collect();
    let mut terms = 0;
    let mut below: BTreeMap<i64, Cx> = BTreeMap::new();
    for (k, (v, t)) in tail_colors.into_iter().zip(tail_vals) {
        terms += t;
        below.insert(k, v);
    }
    for level in levels[..=p as usize].iter().rev() {
        let cvs = clasp_vectors(level, ep, win);
        let mut here = BTreeMap::new();
        for &k in level {
            let cv = &cvs[&k];
            terms += cv.terms;
            let mut acc = Cx::zero(ep.bits());
            for (n, c) in &cv.entries {
                acc += &(c * &below[&(2 * n + 1)]);
            }
            here.insert(k, &acc * clasp_prefactor(k, ep));
        }
        below = here;
    }
    Ok(JonesValue { value: below.remove(&i64::from(m)).unwrap(), terms })
}

/// Colour distribution of one side of `W^α_β`: the colored Jones of the
/// pattern inside the solid torus, expanded in the colours of its core.
fn doubled_distribution(alpha: u32, m: i64, ep: &EvalPoint, win: &SumWindow) -> (BTreeMap<i64, Cx>, u64) {
    if alpha == 0 {
        return (BTreeMap::from([(m, Cx::one(ep.bits()))]), 0);
    }
    let cv = clasp_vector(m, ep, win);
    let mut terms = cv.terms;
    let pref = clasp_prefactor(m, ep);
    let inner: Vec<(BTreeMap<i64, Cx>, u64)> =
        cv.entries.par_iter().map(|(n, _)| doubled_distribution(alpha - 1, 2 * n + 1, ep, win)).collect();
    let mut out: BTreeMap<i64, Cx> = BTreeMap::new();
    for ((_, c), (dist, t)) in cv.entries.iter().zip(inner) {
        terms += t;
        let w = c * pref;
        for (color, v) in dist {
            let add = &w * &v;
            out.entry(color).and_modify(|e| *e += &add).or_insert(add);
        }
    }
    (out, terms)
}

/// `W^α_β` with colours `(M1, M2)`: component 1 doubled `α` times,
/// component 2 doubled `β` times, paired through the Hopf link
/// `J(A, B) = [A·B]`.
pub fn jones_w_alpha_beta(alpha: u32, beta: u32, m1: u32, m2: u32, ep: &EvalPoint, win: SumWindow) -> Result<Cx> {
    Ok(w_alpha_beta(alpha, beta, m1, m2, ep, &win, DEFAULT_TERM_BUDGET)?.value)
}

/// [`jones_w_alpha_beta`] with an explicit term budget and term count.
pub fn w_alpha_beta(
    alpha: u32,
    beta: u32,
    m1: u32,
    m2: u32,
    ep: &EvalPoint,
    win: &SumWindow,
    budget: f64,
) -> Result<JonesValue> {
    LinkFamily::w_alpha_beta(alpha, beta)?;
    check_color(m1, ep)?;
    check_color(m2, ep)?;
    win.validate()?;
    check_budget(2 * (alpha + beta), m1.max(m2), win, budget)?;
    let (w1, t1) = doubled_distribution(alpha, i64::from(m1), ep, win);
    let (w2, t2) = doubled_distribution(beta, i64::from(m2), ep, win);
    if w1.is_empty() || w2.is_empty() {
        return Err(Error::InvalidInput("window leaves no clasp index".into()));
    }
    let w2: Vec<(i64, Cx)> = w2.into_iter().collect();
    let rows: Vec<Cx> = w1
        .par_iter()
        .map(|(a, va)| {
            let mut acc = Cx::zero(ep.bits());
            for (b, vb) in &w2 {
                acc += &(&ep.quantum_int(a * b) * vb);
            }
            &acc * va
        })
        .collect();
    let terms = t1 + t2 + (w1.len() * w2.len()) as u64;
    Ok(JonesValue { value: rows.into_iter().sum(), terms })
}

/// `|[M₁M₂] / ([M₁][M₂])| · |J_{M₁}(K₁)| · |J_{M₂}(K₂)|` for unnormalized
/// knot invariants `jm1`, `jm2`.
pub fn jones_hopf_union_abs(jm1: &Cx, jm2: &Cx, m1: u32, m2: u32, ep: &EvalPoint) -> Float {
    let (m1, m2) = (i64::from(m1), i64::from(m2));
    let num = ep.quantum_int(m1 * m2);
    if num.is_zero() {
        return Float::new(ep.bits());
    }
    let ratio = &num / &(&ep.quantum_int(m1) * &ep.quantum_int(m2));
    ratio.abs() * jm1.abs() * jm2.abs()
}

/// `g_M(k) = |(t)_{M+k} / (t)_{M−k−1}|`, `M ≤ N`, `0 ≤ k ≤ M−1`.
pub fn growth_envelope_g(m: u32, k: i64, ep: &EvalPoint) -> Result<f64> {
    check_color(m, ep)?;
    let m = i64::from(m);
    if k < 0 || k > m - 1 {
        return Err(Error::IndexOutOfRange(format!("k = {k} outside [0, {}]", m - 1)));
    }
    Ok(ep.prod_range(m + k, m - k - 1).abs_f64())
}

/// `c_M(n, l) = |(t)_{M−l−1}(t)_{l+n} / ((t)_n (t)_{M−l−n−1} (t)_l)|`,
/// `0 ≤ n ≤ M−1`, `0 ≤ l ≤ M−1−n`.
pub fn growth_envelope_c(m: u32, n: i64, l: i64, ep: &EvalPoint) -> Result<f64> {
    check_color(m, ep)?;
    let m = i64::from(m);
    if n < 0 || n > m - 1 || l < 0 || l > m - 1 - n {
        return Err(Error::IndexOutOfRange(format!("(n, l) = ({n}, {l}) outside the clasp range")));
    }
    Ok(clasp_term(n, l, m, ep).abs_f64())
}

/// `argmax_k g_M(k)` and the maximal value.
pub fn argmax_envelope_g(m: u32, ep: &EvalPoint) -> Result<(i64, f64)> {
    check_color(m, ep)?;
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..i64::from(m) {
        let v = growth_envelope_g(m, k, ep)?;
        if v > best.1 {
            best = (k, v);
        }
    }
    Ok(best)
}

/// `argmax_{n,l} c_M(n, l)` and the maximal value.
pub fn argmax_envelope_c(m: u32, ep: &EvalPoint) -> Result<((i64, i64), f64)> {
    check_color(m, ep)?;
    let mi = i64::from(m);
    let rows: Vec<((i64, i64), f64)> = (0..mi)
        .into_par_iter()
        .map(|n| {
            let mut best = ((n, 0), f64::NEG_INFINITY);
            for l in 0..mi - n {
                let v = clasp_term(n, l, mi, ep).abs_f64();
                if v > best.1 {
                    best = ((n, l), v);
                }
            }
            best
        })
        .collect();
    Ok(rows.into_iter().fold(((0, 0), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a }))
}

/// Result of [`evaluate`]: for Hopf unions only the modulus is known and
/// `value` holds it as a real number.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: Cx,
    pub modulus_only: bool,
    pub terms: u64,
}

impl Evaluation {
    pub fn log_abs(&self) -> f64 {
        if self.value.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.value.ln_abs_f64()
        }
    }
}

/// Unnormalized colored Jones of `link` at the given colours.
///
/// Cabled chains are only available on the diagonal (all colours `N`).
pub fn evaluate(
    link: &LinkFamily,
    colors: &ColorAssignment,
    ep: &EvalPoint,
    win: &SumWindow,
    budget: f64,
) -> Result<Evaluation> {
    let cs = &colors.colors;
    let done = |value: Cx, terms: u64| Ok(Evaluation { value, modulus_only: false, terms });
    match link {
        LinkFamily::Unknot => done(ep.quantum_int(i64::from(cs[0])), 1),
        LinkFamily::FigureEight => {
            let (v, t) = fig8_unnormalized(i64::from(cs[0]), ep, win);
            done(v, t)
        }
        LinkFamily::WhiteheadLink => {
            let v = jones_whitehead_link(cs[0], cs[1], ep)?;
            done(v, u64::from(cs[1]).pow(2))
        }
        LinkFamily::WhiteheadChainCabledFigEight { a, c, d } => {
            if cs.iter().any(|&m| m != ep.N()) {
                return Err(Error::Unsupported("cabled chains are implemented for diagonal colours only".into()));
            }
            let v = cabled_chain(*a, *c, *d, ep, win, budget)?;
            done(v.value, v.terms)
        }
        LinkFamily::IteratedDoubleFigEight { p } => {
            let v = iterated_double(*p, cs[0], ep, win, budget)?;
            done(v.value, v.terms)
        }
        LinkFamily::WAlphaBeta { alpha, beta } => {
            let v = w_alpha_beta(*alpha, *beta, cs[0], cs[1], ep, win, budget)?;
            done(v.value, v.terms)
        }
        LinkFamily::HopfUnion { left, right } => {
            if ep.quantum_int(i64::from(cs[0]) * i64::from(cs[1])).is_zero() {
                return Ok(Evaluation { value: Cx::zero(ep.bits()), modulus_only: true, terms: 0 });
            }
            let l = evaluate(left, &ColorAssignment { colors: vec![cs[0]] }, ep, win, budget)?;
            let r = evaluate(right, &ColorAssignment { colors: vec![cs[1]] }, ep, win, budget)?;
            let m = jones_hopf_union_abs(&l.value, &r.value, cs[0], cs[1], ep);
            Ok(Evaluation { value: Cx::from_real(m), modulus_only: true, terms: l.terms + r.terms })
        }
    }
}

/// `log₁₀` of the expected peak summand magnitude `e^{(N+½)·v/2π}`, with `v`
/// the simplicial volume of `link`.
pub fn peak_log10(link: &LinkFamily, n: u32) -> f64 {
    let v = simplicial_volume(link, &VolumeConstants::new());
    (f64::from(n) + 0.5) * v / (2.0 * std::f64::consts::PI) / std::f64::consts::LN_10
}

/// Refuse evaluations whose peak summand needs more than `prec` digits plus
/// a 20-digit cancellation margin.
pub fn precision_guard(link: &LinkFamily, n: u32, prec: Precision) -> Result<()> {
    let peak = peak_log10(link, n);
    let required = (peak + 20.0).ceil() as u32;
    if prec.decimal_digits() < required {
        return Err(Error::PrecisionInsufficient {
            digits: prec.decimal_digits(),
            required,
            peak_exponent: peak.ceil().max(0.0) as u32,
        });
    }
    Ok(())
}
