//! Turaev–Viro invariants of link complements at `q = exp(2πi/r)`, computed
//! from the colored Jones sum
//! `TV_r = 2^{n−1} (2 sin(2π/r)/√r)² Σ_{1≤M⃗≤N} |J_{M⃗}(t)|²`.

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jones::{evaluate, ColorAssignment, SumWindow, DEFAULT_TERM_BUDGET};
use crate::links::LinkFamily;
use crate::numeric::{pi, EvalPoint};

/// Largest colour lattice enumerated exhaustively; beyond it the
/// single-top-colour lower bound is reported instead.
pub const MAX_COLOR_VECTORS: u64 = 1_000_000;

/// Whether a [`TvResult`] is the full colour sum or only its top-colour term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TvKind {
    FullSum,
    TopColorBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvResult {
    /// Odd level `r = 2N + 1`.
    pub r: u32,
    /// The invariant (or bound); `+∞` if it overflows an `f64`.
    pub value: f64,
    /// Natural logarithm of `value`, finite even when `value` overflows.
    pub ln_value: f64,
    /// Number of colour vectors summed.
    pub terms: u64,
    pub kind: TvKind,
}

impl TvResult {
    /// `(2π/r)·log TV_r`, the quantity compared against the volume.
    pub fn growth_rate(&self) -> f64 {
        2.0 * std::f64::consts::PI / f64::from(self.r) * self.ln_value
    }
}

/// `2^{n−1} (2 sin(2π/r)/√r)²` for an `n`-component link.
fn normalization(components: u32, ep: &EvalPoint) -> Float {
    let bits = ep.bits();
    let r = ep.r();
    let s = Float::with_val(bits, pi(bits) * 2u32 / r).sin();
    let f = Float::with_val(bits, s.square_ref()) * 4u32 / r;
    f << (components - 1)
}

fn finish(sum: Float, components: u32, terms: u64, kind: TvKind, ep: &EvalPoint) -> TvResult {
    let v = sum * normalization(components, ep);
    let ln_value = if v.is_zero() { f64::NEG_INFINITY } else { v.clone().ln().to_f64() };
    TvResult { r: ep.r(), value: v.to_f64(), ln_value, terms, kind }
}

fn full_sum_supported(link: &LinkFamily) -> Result<()> {
    match link {
        LinkFamily::WhiteheadChainCabledFigEight { .. } => Err(Error::Unsupported(
            "cabled chains are implemented for diagonal colours only; use the top-colour bound".into(),
        )),
        LinkFamily::HopfUnion { left, right } => {
            full_sum_supported(left)?;
            full_sum_supported(right)
        }
        _ => Ok(()),
    }
}

/// All colour vectors in `[1, max]^n`, first component varying slowest.
fn color_vectors(n: u32, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (1..=max).map(move |m| {
                    let mut w = v.clone();
                    w.push(m);
                    w
                })
            })
            .collect();
    }
    out
}

/// `Σ |J_{M⃗}|²` over `1 ≤ M⃗ ≤ max_color`, without the normalization factor.
///
/// A restricted `win` is placed relative to the level `N + ½`, not to the
/// individual colours, so it only approximates the sub-diagonal terms.
pub fn color_sum(link: &LinkFamily, max_color: u32, ep: &EvalPoint, win: &SumWindow, budget: f64) -> Result<Float> {
    full_sum_supported(link)?;
    if max_color == 0 || max_color > ep.N() {
        return Err(Error::InvalidInput(format!("colour bound {max_color} outside [1, {}]", ep.N())));
    }
    let n = link.components();
    let vectors = color_vectors(n, max_color);
    let squares: Vec<Float> = vectors
        .into_par_iter()
        .map(|colors| {
            let e = evaluate(link, &ColorAssignment { colors }, ep, win, budget)?;
            Ok(e.value.norm_sqr())
        })
        .collect::<Result<_>>()?;
    // Sequential reduction in enumeration order keeps the result reproducible.
    let mut acc = Float::new(ep.bits());
    for s in &squares {
        acc += s;
    }
    Ok(acc)
}

/// `TV_r(S³∖L)` by the full colour sum with the default term budget.
pub fn turaev_viro(link: &LinkFamily, ep: &EvalPoint, win: &SumWindow) -> Result<TvResult> {
    turaev_viro_with_budget(link, ep, win, DEFAULT_TERM_BUDGET)
}

/// [`turaev_viro`] with an explicit per-evaluation term budget.  Colour
/// lattices larger than [`MAX_COLOR_VECTORS`] fall back to
/// [`tv_lower_bound_from_top_color`] and are marked
/// [`TvKind::TopColorBound`].
pub fn turaev_viro_with_budget(link: &LinkFamily, ep: &EvalPoint, win: &SumWindow, budget: f64) -> Result<TvResult> {
    link.validate()?;
    let n = link.components();
    let count = u64::from(ep.N()).checked_pow(n).unwrap_or(u64::MAX);
    if count > MAX_COLOR_VECTORS {
        return top_color_bound(link, ep, win, budget);
    }
    let sum = color_sum(link, ep.N(), ep, win, budget)?;
    Ok(finish(sum, n, count, TvKind::FullSum, ep))
}

/// `2^{n−1} (2 sin(2π/r)/√r)² |J_{N⃗}|²`, the single top-colour term of the
/// sum, which bounds `TV_r` from below.
pub fn tv_lower_bound_from_top_color(link: &LinkFamily, ep: &EvalPoint, win: &SumWindow) -> Result<TvResult> {
    top_color_bound(link, ep, win, DEFAULT_TERM_BUDGET)
}

fn top_color_bound(link: &LinkFamily, ep: &EvalPoint, win: &SumWindow, budget: f64) -> Result<TvResult> {
    link.validate()?;
    let e = evaluate(link, &ColorAssignment::diagonal(link, ep), ep, win, budget)?;
    Ok(finish(e.value.norm_sqr(), link.components(), 1, TvKind::TopColorBound, ep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{make_eval_point, Precision};

    #[test]
    fn color_vectors_enumerate_the_box() {
        let v = color_vectors(2, 3);
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], vec![1, 1]);
        assert_eq!(v[1], vec![1, 2]);
        assert_eq!(v[8], vec![3, 3]);
    }

    #[test]
    fn cabled_chain_full_sum_is_unsupported() {
        let ep = make_eval_point(4, Precision::default()).unwrap();
        let link = LinkFamily::cabled_chain(0, 1, 0).unwrap();
        let err = turaev_viro(&link, &ep, &SumWindow::Full).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        assert!(tv_lower_bound_from_top_color(&link, &ep, &SumWindow::Full).is_ok());
    }

    #[test]
    fn large_lattices_fall_back_to_the_bound() {
        let ep = make_eval_point(1001, Precision::new(40).unwrap()).unwrap();
        let link = LinkFamily::hopf_union(LinkFamily::Unknot, LinkFamily::Unknot).unwrap();
        let tv = turaev_viro(&link, &ep, &SumWindow::Full).unwrap();
        assert_eq!(tv.kind, TvKind::TopColorBound);
        assert_eq!(tv.terms, 1);
    }
}
