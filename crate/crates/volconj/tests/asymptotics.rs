//! Growth-rate extrapolation and the saddle-point prediction.

mod common;

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;
use volconj::asymptotics::*;
use volconj::jones::{evaluate, jones_fig8, ColorAssignment};
use volconj::links::LinkFamily;
use volconj::numeric::{make_eval_point, Cx, Precision};
use volconj::potential::{geometry_prediction, Deformation};
use volconj::{SumWindow, DEFAULT_TERM_BUDGET};

use common::{qint, VOL_FIG8, VOL_WL};

fn id0() -> LinkFamily {
    LinkFamily::IteratedDoubleFigEight { p: 0 }
}

fn range(a: u32, b: u32, step: usize) -> Vec<u32> {
    (a..=b).step_by(step).collect()
}

fn table(link: &LinkFamily, rule: ColorRule, ns: &[u32]) -> GrowthTable {
    growth_sequence(link, &rule, ns, &SumWindow::Full, &GrowthOptions::default()).unwrap()
}

#[test]
fn fit_recovers_synthetic_coefficients() {
    let model = |n: f64| 1.25 + 0.7 * n.ln() / n - 3.5 / n;
    let samples: Vec<GrowthSample> = (10..60)
        .step_by(5)
        .map(|n| GrowthSample {
            n,
            colors: vec![n],
            achieved_ratio: vec![1.0],
            log_abs_j: 0.0,
            g: model(f64::from(n)),
            terms: 1,
        })
        .collect();
    let fit = fit_growth(&samples).unwrap();
    assert!((fit.limit - 1.25).abs() < 1e-10);
    assert!((fit.c_logn_over_n - 0.7).abs() < 1e-9);
    assert!((fit.c_over_n + 3.5).abs() < 1e-9);
    assert!(fit.residual < 1e-12);
}

#[test]
fn unknot_growth_vanishes() {
    let t = table(&LinkFamily::Unknot, ColorRule::DiagonalN, &range(20, 200, 20));
    let fit = t.fit.unwrap();
    assert!(fit.limit.abs() < 0.05, "{fit:?}");
    // g(N) = (2π/(N+½))·log|sin(2πN/r)/sin(2π/r)| directly.
    for s in &t.samples {
        let r = f64::from(2 * s.n + 1);
        let q = ((2.0 * PI * f64::from(s.n) / r).sin() / (2.0 * PI / r).sin()).abs();
        assert!((s.g - 2.0 * PI / (f64::from(s.n) + 0.5) * q.ln()).abs() < 1e-12);
    }
}

#[test]
fn double_of_the_figure_eight_converges_to_its_volume() {
    let t = table(&id0(), ColorRule::DiagonalN, &range(20, 80, 10));
    let fit = t.fit.unwrap();
    let want = VOL_FIG8 + VOL_WL;
    assert!((fit.limit - want).abs() < 0.02 * want, "{fit:?}");
    assert_eq!(t.predicted_limit.map(|p| (p - want).abs() < 1e-12), Some(true));
    assert!(t.samples.windows(2).all(|w| w[0].n < w[1].n));
    // The polynomial prefactor of the saddle term is positive in the
    // logarithm, so g(N) decreases to the volume from above and only drops
    // under volume + 0.6 from N = 50 on (g(20) ≈ 6.60).
    assert!(t.samples.windows(2).all(|w| w[1].g < w[0].g));
    for s in &t.samples {
        assert!(s.g > want, "N={}: {}", s.n, s.g);
        if s.n >= 50 {
            assert!(s.g <= 5.69375 + 0.6, "N={}: {}", s.n, s.g);
        }
    }
}

#[test]
fn deformed_colours_track_the_deformed_volume() {
    let t = table(&id0(), ColorRule::RatioTargets(vec![0.95]), &range(30, 90, 10));
    let want = geometry_prediction(&id0(), Some(&Deformation::new(vec![0.95]))).unwrap();
    assert_eq!(t.predicted_limit, Some(want));
    let fit = t.fit.unwrap();
    assert!((fit.limit - want).abs() < 0.03 * want, "{fit:?} vs {want}");
    let s = &t.samples[0];
    assert_eq!(s.colors, vec![29]);
    assert!((s.achieved_ratio[0] - 29.0 / 30.5).abs() < 1e-15);
}

#[test]
fn fit_is_independent_of_sample_order() {
    let t = table(&id0(), ColorRule::DiagonalN, &range(20, 80, 5));
    let base = fit_growth(&t.samples).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let mut s = t.samples.clone();
        s.shuffle(&mut rng);
        let f = fit_growth(&s).unwrap();
        assert!((f.limit - base.limit).abs() <= 1e-12);
    }
    // Passing the N list out of order yields the same sorted table.
    let shuffled = table(&id0(), ColorRule::DiagonalN, &[80, 20, 50, 35, 65, 50]);
    assert_eq!(shuffled.samples.iter().map(|s| s.n).collect::<Vec<_>>(), [20, 35, 50, 65, 80]);
}

#[test]
fn growth_rows_carry_the_csv_columns() {
    let t = table(&id0(), ColorRule::RatioTargets(vec![0.98]), &[30, 40]);
    assert!(t.fit.is_none());
    let rows = t.rows();
    let v = serde_json::to_value(&rows[0]).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["N", "r", "target_ratio", "achieved_ratio", "log_abs_j", "g", "predicted_limit", "gap"] {
        assert!(keys.contains(&k), "{k}");
    }
    assert_eq!(rows[1].r, 81);
    assert_eq!(rows[0].target_ratio, "0.980000");
    let gap = rows[0].gap.unwrap();
    assert!((gap - (rows[0].g - t.predicted_limit.unwrap())).abs() < 1e-15);
}

#[test]
fn empty_input_is_rejected() {
    assert!(growth_sequence(&id0(), &ColorRule::DiagonalN, &[], &SumWindow::Full, &GrowthOptions::default()).is_err());
}

#[test]
fn hopf_union_growth_identity() {
    // g(4₁ ⊔_Hopf 4₁) = 2·g(4₁) + (2π/(N+½))·log|[N²]/[N]²| exactly.
    let link = LinkFamily::hopf_union(LinkFamily::FigureEight, LinkFamily::FigureEight).unwrap();
    for n in [10u32, 25, 40] {
        let ep = make_eval_point(n, Precision::default()).unwrap();
        let bits = ep.bits();
        let e = evaluate(&link, &ColorAssignment::diagonal(&link, &ep), &ep, &SumWindow::Full, DEFAULT_TERM_BUDGET)
            .unwrap();
        assert!(e.modulus_only);
        let scale = Float::with_val(bits, rug::float::Constant::Pi) * 2u32 / (f64::from(n) + 0.5);
        let g_hopf = Float::with_val(bits, e.value.abs().ln() * &scale);
        let knot = jones_fig8(n, &ep).unwrap().abs().ln();
        let corr = qint(n * n, ep.r(), bits).ln() - qint(n, ep.r(), bits).ln() * 2u32;
        let want = Float::with_val(bits, knot * 2u32 + corr) * &scale;
        let diff = Float::with_val(bits, &g_hopf - &want).abs();
        assert!(diff < 1e-20, "N={n}: {diff}");
    }
}

fn direct_and_predicted(ns: &[u32]) -> (Vec<(u32, Cx)>, Vec<(u32, Cx)>) {
    ns.iter()
        .map(|&n| {
            let ep = make_eval_point(n, Precision::new(80).unwrap()).unwrap();
            let link = id0();
            let j = evaluate(&link, &ColorAssignment::diagonal(&link, &ep), &ep, &SumWindow::Full, DEFAULT_TERM_BUDGET)
                .unwrap()
                .value;
            ((n, j), (n, saddle_prediction(&ep).unwrap()))
        })
        .unzip()
}

#[test]
fn saddle_prediction_matches_direct_summation() {
    let ns = [50, 75, 100, 125, 150];
    let (direct, pred) = direct_and_predicted(&ns);
    let rows = compare_report(&direct, &pred).unwrap();
    assert!(rows[0].modulus_ratio > 0.5 && rows[0].modulus_ratio < 2.0);
    assert!((rows[4].modulus_ratio - 1.0).abs() < 0.15, "{:?}", rows[4]);
    let gaps: Vec<f64> = rows.iter().map(|r| (r.modulus_ratio - 1.0).abs()).collect();
    let decreasing = gaps.windows(2).filter(|w| w[1] < w[0]).count();
    assert!(decreasing >= 3, "{gaps:?}");
    // The one-term approximation is phase-coherent across N.
    let phases: Vec<f64> = rows[2..].iter().map(|r| r.phase_diff).collect();
    let spread =
        phases.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - phases.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 0.2, "{phases:?}");
}

#[test]
fn compare_report_edge_cases() {
    let ep = make_eval_point(5, Precision::default()).unwrap();
    let v: Vec<(u32, Cx)> = (1..=3).map(|k| (k, Cx::from_f64(ep.bits(), f64::from(k), -1.0))).collect();
    for row in compare_report(&v, &v).unwrap() {
        assert!((row.ratio_re - 1.0).abs() < 1e-15 && row.ratio_im.abs() < 1e-15);
        assert!((row.modulus_ratio - 1.0).abs() < 1e-15 && row.phase_diff.abs() < 1e-15);
    }
    assert!(compare_report(&[], &[]).unwrap().is_empty());
    assert!(compare_report(&v, &v[..2]).is_err());
}
