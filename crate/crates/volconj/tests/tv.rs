//! Turaev–Viro invariants from the colored Jones sum.

use std::f64::consts::PI;

use volconj::jones::SumWindow;
use volconj::links::{LinkFamily, VolumeConstants};
use volconj::numeric::{make_eval_point, Precision};
use volconj::tv::{color_sum, turaev_viro, tv_lower_bound_from_top_color, TvKind};

fn ep(n: u32) -> volconj::EvalPoint {
    make_eval_point(n, Precision::default()).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

/// `(2 sin(2π/r)/√r)²`.
fn norm(r: u32) -> f64 {
    let s = 2.0 * (2.0 * PI / f64::from(r)).sin();
    s * s / f64::from(r)
}

/// Figure-eight invariant from the cyclotomic expansion at `q = e^{4πi/r}`,
/// where `{x} = q^{x/2} − q^{−x/2} = 2i sin(2πx/r)`:
/// `[M] Σ_k Π_{j≤k} {M+j}{M−j}`, real because the knot is amphichiral.
fn fig8_oracle(m: u32, r: u32) -> f64 {
    let s = |x: f64| (2.0 * PI * x / f64::from(r)).sin();
    let m = f64::from(m);
    let mut total = 0.0;
    let mut prod = 1.0;
    for j in 0..m as u32 {
        if j > 0 {
            let j = f64::from(j);
            prod *= -4.0 * s(m + j) * s(m - j);
        }
        total += prod;
    }
    total * s(m) / s(1.0)
}

#[test]
fn unknot_at_level_five_by_hand() {
    let e = ep(2);
    let q2 = 2.0 * (2.0 * PI / 5.0).cos();
    let tv = turaev_viro(&LinkFamily::Unknot, &e, &SumWindow::Full).unwrap();
    assert_eq!(tv.kind, TvKind::FullSum);
    assert_eq!((tv.r, tv.terms), (5, 2));
    assert!(close(tv.value, norm(5) * (1.0 + q2 * q2), 1e-14));
    let bound = tv_lower_bound_from_top_color(&LinkFamily::Unknot, &e, &SumWindow::Full).unwrap();
    assert_eq!(bound.kind, TvKind::TopColorBound);
    assert!(close(bound.value, norm(5) * q2 * q2, 1e-14));
}

#[test]
fn figure_eight_matches_the_cyclotomic_oracle() {
    for n in [3u32, 7, 12] {
        let r = 2 * n + 1;
        let tv = turaev_viro(&LinkFamily::FigureEight, &ep(n), &SumWindow::Full).unwrap();
        let want: f64 = (1..=n).map(|m| fig8_oracle(m, r).powi(2)).sum::<f64>() * norm(r);
        assert!(close(tv.value, want, 1e-11), "r={r}: {} vs {want}", tv.value);
        assert!(close(tv.ln_value, want.ln(), 1e-12));
    }
}

#[test]
fn two_component_sums_carry_the_factor_two() {
    // The Hopf-union of two unknots has |J_{M1,M2}| = [M1·M2]; with the
    // factor 2^{n−1} = 2 the sum is 2·norm·Σ [M1 M2]².
    let e = ep(4);
    let r = e.r();
    let link = LinkFamily::hopf_union(LinkFamily::Unknot, LinkFamily::Unknot).unwrap();
    let tv = turaev_viro(&link, &e, &SumWindow::Full).unwrap();
    let q = |x: f64| (2.0 * PI * x / f64::from(r)).sin() / (2.0 * PI / f64::from(r)).sin();
    let mut want = 0.0;
    for a in 1..=4 {
        for b in 1..=4 {
            want += q(f64::from(a * b)).powi(2);
        }
    }
    assert_eq!(tv.terms, 16);
    assert!(close(tv.value, 2.0 * norm(r) * want, 1e-12), "{} vs {}", tv.value, 2.0 * norm(r) * want);
}

#[test]
fn top_color_bound_never_exceeds_the_sum() {
    let links = [
        LinkFamily::Unknot,
        LinkFamily::FigureEight,
        LinkFamily::WhiteheadLink,
        LinkFamily::IteratedDoubleFigEight { p: 0 },
        LinkFamily::WAlphaBeta { alpha: 1, beta: 1 },
        LinkFamily::hopf_union(LinkFamily::FigureEight, LinkFamily::Unknot).unwrap(),
    ];
    for link in &links {
        for n in [3u32, 6] {
            let e = ep(n);
            let tv = turaev_viro(link, &e, &SumWindow::Full).unwrap();
            let b = tv_lower_bound_from_top_color(link, &e, &SumWindow::Full).unwrap();
            assert!(tv.value >= 0.0);
            assert!(b.value <= tv.value * (1.0 + 1e-14), "{link} N={n}");
        }
    }
}

#[test]
fn partial_color_sums_are_nondecreasing() {
    let e = ep(7);
    for link in [LinkFamily::FigureEight, LinkFamily::WhiteheadLink] {
        let sums: Vec<f64> =
            (1..=7).map(|m| color_sum(&link, m, &e, &SumWindow::Full, 1e8).unwrap().to_f64()).collect();
        assert!(sums.windows(2).all(|w| w[1] >= w[0]), "{link}: {sums:?}");
    }
}

#[test]
fn figure_eight_growth_stays_under_the_envelope() {
    let vol = VolumeConstants::new().vol_fig8;
    let mut rates = Vec::new();
    for n in 5..=100u32 {
        let tv = turaev_viro(&LinkFamily::FigureEight, &ep(n), &SumWindow::Full).unwrap();
        let g = tv.growth_rate();
        assert!(g <= vol + 0.8, "r={}: {g}", tv.r);
        rates.push((tv.r, g));
    }
    let at = |r: u32| rates.iter().find(|x| x.0 == r).unwrap().1;
    // The polynomial prefactor is positive in the logarithm, so the rates
    // approach the volume from above.
    let sweep = [at(51), at(101), at(151), at(201)];
    assert!(sweep.windows(2).all(|w| w[1] < w[0]), "{sweep:?}");
    assert!(sweep.iter().all(|&g| g > vol), "{sweep:?}");
    assert!(close(at(201), vol, 0.10), "{}", at(201));
}

#[test]
fn chain_bound_tracks_the_simplicial_volume() {
    let link = LinkFamily::cabled_chain(0, 1, 0).unwrap();
    let b = tv_lower_bound_from_top_color(&link, &ep(40), &SumWindow::Full).unwrap();
    let vol = volconj::links::simplicial_volume(&link, &VolumeConstants::new());
    assert!(close(b.growth_rate(), vol, 0.10), "{} vs {vol}", b.growth_rate());
}
