//! Potential functions: derivatives, critical points, determinants and
//! deformed volumes.

mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use volconj::links::LinkFamily;
use volconj::numeric::{make_eval_point, Precision};
use volconj::potential::*;
use volconj::Error;

use common::{deformed_volume_by_grid, VOL_FIG8, VOL_WL};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn families() -> Vec<(LinkFamily, Option<Deformation>)> {
    vec![
        (LinkFamily::FigureEight, None),
        (LinkFamily::WhiteheadLink, None),
        (LinkFamily::WhiteheadLink, Some(Deformation::new(vec![1.0, 0.97]))),
        (LinkFamily::cabled_chain(0, 1, 0).unwrap(), None),
        (LinkFamily::cabled_chain(-2, 2, 1).unwrap(), None),
        (LinkFamily::IteratedDoubleFigEight { p: 0 }, None),
        (LinkFamily::IteratedDoubleFigEight { p: 2 }, Some(Deformation::new(vec![0.96]))),
        (LinkFamily::WAlphaBeta { alpha: 1, beta: 0 }, None),
        (LinkFamily::WAlphaBeta { alpha: 1, beta: 1 }, None),
        (LinkFamily::WAlphaBeta { alpha: 3, beta: 2 }, Some(Deformation::new(vec![0.98, 0.95]))),
    ]
}

fn specs() -> Vec<PotentialSpec> {
    let mut out = Vec::new();
    for (link, def) in families() {
        for branch in [Branch::Plus, Branch::Minus] {
            out.push(build_potential_branch(&link, def.as_ref(), branch).unwrap());
        }
    }
    out
}

fn sup(v: impl IntoIterator<Item = Complex64>) -> f64 {
    v.into_iter().map(|x| x.norm()).fold(0.0, f64::max)
}

#[test]
fn analytic_derivatives_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-6;
    for spec in specs() {
        for _ in 0..20 {
            let z: Vec<Complex64> =
                spec.reference.iter().map(|&x| c(x + rng.gen_range(-0.03..0.03), rng.gen_range(-0.03..0.03))).collect();
            let g = spec.grad(&z).unwrap();
            let hs = spec.hess(&z).unwrap();
            for j in 0..spec.dim {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += h;
                zm[j] -= h;
                let fd = (spec.eval(&zp).unwrap() - spec.eval(&zm).unwrap()) / (2.0 * h);
                assert!((fd - g[j]).norm() <= 1e-8 * g[j].norm().max(1.0), "{}: ∂{j} {fd} vs {}", spec.family, g[j]);
                let (gp, gm) = (spec.grad(&zp).unwrap(), spec.grad(&zm).unwrap());
                for i in 0..spec.dim {
                    let fd = (gp[i] - gm[i]) / (2.0 * h);
                    assert!((fd - hs[(i, j)]).norm() <= 1e-6 * hs[(i, j)].norm().max(1.0), "{}: ∂{i}∂{j}", spec.family);
                }
            }
        }
    }
}

#[test]
fn potential_shapes() {
    let wl = build_potential(&LinkFamily::WhiteheadLink, None).unwrap();
    assert_eq!(wl.dim, 2);
    assert_eq!(wl.dilog_terms.iter().map(|t| t.sign).collect::<Vec<_>>(), [1, -1, 1, -1, 1]);
    let chain = build_potential(&LinkFamily::cabled_chain(3, 2, 1).unwrap(), None).unwrap();
    assert_eq!(chain.dim, 5);
    assert_eq!(chain.fourier_shift, [1, 0, 0, 0, 1]);
    // The a-term (a/2πi)[2πi(z₁−½)]² = 2πi·a·(z₁−½)² contributes 2πi·3 to z₁².
    let q = chain.poly.quadratic.iter().find(|q| (q.i, q.j) == (0, 0)).unwrap();
    assert!((q.coeff - c(0.0, 6.0 * PI)).norm() < 1e-14);
    let id0 = build_potential(&LinkFamily::IteratedDoubleFigEight { p: 0 }, None).unwrap();
    assert_eq!(id0.dim, 3);
    assert_eq!(id0.fourier_shift, [1, 0, 1]);
    let id2 = build_potential(&LinkFamily::IteratedDoubleFigEight { p: 2 }, None).unwrap();
    assert_eq!(id2.fourier_shift, [-3, 0, -3, 0, 1, 0, 1]);
    let w = build_potential(&LinkFamily::WAlphaBeta { alpha: 3, beta: 2 }, None).unwrap();
    assert_eq!(w.dim, 10);
    assert_eq!(w.fourier_shift, [-3, 0, 1, 0, -3, 0, -4, 0, 0, 0]);
    assert_eq!(w.labels[4], "z'1");
}

#[test]
fn potentials_serialize_with_rational_pairs() {
    let spec = build_potential(&LinkFamily::IteratedDoubleFigEight { p: 1 }, None).unwrap();
    let json = serde_json::to_value(&spec).unwrap();
    assert_eq!(json["dilog_terms"][0]["arg"]["coeffs"][0], serde_json::json!([-1, 1]));
    let back: PotentialSpec = serde_json::from_value(json).unwrap();
    assert_eq!(back, spec);
}

#[test]
fn raw_gradients_at_the_geometric_point() {
    let wl = build_potential(&LinkFamily::WhiteheadLink, None).unwrap();
    assert!(sup(wl.grad(&[c(0.5, 0.0), c(0.25, 0.0)]).unwrap()) < 1e-14);
    let tail = build_potential(&LinkFamily::FigureEight, None).unwrap();
    let g = tail.grad(&[c(5.0 / 6.0, 0.0)]).unwrap();
    assert!((g[0] - c(0.0, -2.0 * PI)).norm() < 1e-13);
}

#[test]
fn branch_cuts_are_rejected() {
    let wl = build_potential(&LinkFamily::WhiteheadLink, None).unwrap();
    let err = wl.eval(&[c(0.0, 0.0), c(0.25, 0.0)]).unwrap_err();
    assert!(matches!(err, Error::BranchCut(_)));
    // e^{2πi z₁} real and greater than one.
    assert!(matches!(wl.grad(&[c(0.0, -0.1), c(0.25, 0.0)]), Err(Error::BranchCut(_))));
}

#[test]
fn newton_recovers_the_geometric_point_of_the_double() {
    let spec = build_potential(&LinkFamily::IteratedDoubleFigEight { p: 0 }, None).unwrap();
    let start = [c(0.51, 0.01), c(0.26, -0.01), c(5.0 / 6.0 - 0.01, 0.01)];
    let cg = find_critical_point(&spec, &start).unwrap();
    let want = [0.5, 0.25, 5.0 / 6.0];
    for (z, w) in cg.point.iter().zip(want) {
        assert!((z - w).norm() < 1e-12, "{z}");
    }
    assert!(cg.residual <= 1e-12);
    assert!((cg.volume - (VOL_FIG8 + VOL_WL)).abs() < 1e-12);
    // 2π·Im = 2π·(25π/24): the Whitehead clasp gives π/24, the tail π.
    assert!((cg.critical_value.im - 25.0 * PI / 24.0).abs() < 1e-12);
    let h = cg.hessian_matrix();
    assert!((&h - h.transpose()).iter().all(|x| x.norm() < 1e-12));
}

#[test]
fn hessian_of_the_double_by_hand() {
    // Differentiating the five Whitehead dilogarithms and the tail by hand at
    // (½, ¼, 5/6): the clasp contributes 2πi·[[−½+i, i], [i, 2i]] and the
    // tail 2πi·[[4√3 i, 0], [0, √3 i]] on (z₁, z₃); the mixed tail term cancels.
    let s3 = 3f64.sqrt();
    let two_pi_i = c(0.0, 2.0 * PI);
    let want = DMatrix::from_row_slice(
        3,
        3,
        &[
            c(-0.5, 1.0 + 4.0 * s3),
            c(0.0, 1.0),
            c(0.0, 0.0),
            c(0.0, 1.0),
            c(0.0, 2.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, s3),
        ],
    ) * two_pi_i;
    let spec = build_potential(&LinkFamily::IteratedDoubleFigEight { p: 0 }, None).unwrap();
    let cg = critical_geometry(&spec).unwrap();
    assert!((cg.hessian_matrix() - want).iter().all(|x| x.norm() < 1e-10));
}

#[test]
fn cabled_chains_have_volume_independent_of_the_twist() {
    for n in 1..=3u32 {
        for c_count in 0..=n {
            let d = n - c_count;
            let mut vols = Vec::new();
            for a in -2..=2 {
                let spec = build_potential(&LinkFamily::cabled_chain(a, c_count, d).unwrap(), None).unwrap();
                let start: Vec<Complex64> = spec.reference.iter().map(|&x| c(x + 0.01, -0.005)).collect();
                let cg = find_critical_point(&spec, &start).unwrap();
                for (z, w) in cg.point.iter().zip(&spec.reference) {
                    assert!((z - w).norm() < 1e-12);
                }
                vols.push(cg.volume);
            }
            let want = VOL_FIG8 + f64::from(n) * VOL_WL;
            assert!(vols.iter().all(|v| (v - want).abs() < 1e-10), "c={c_count} d={d}: {vols:?}");
        }
    }
}

#[test]
fn closed_form_determinant_arbitration() {
    for (a, cc, d) in [(0i64, 1u32, 0u32), (0, 1, 1), (1, 1, 1), (-2, 0, 2), (2, 2, 1), (3, 2, 0), (-1, 0, 3)] {
        let spec = build_potential(&LinkFamily::cabled_chain(a, cc, d).unwrap(), None).unwrap();
        let numeric = critical_geometry(&spec).unwrap().hess_det;
        let rel = |v| (hess_det_closed_form(a, cc, d, v) - numeric).norm() / numeric.norm();
        assert!(rel(DetVariant::Analytic) < 1e-12, "({a},{cc},{d})");
        assert!(rel(DetVariant::PrintedMatrix) > 1e-3);
        assert!(rel(DetVariant::PrintedFinalLine) > 1e-3);
        assert!(numeric.norm() > 1e-8);
    }
    // The (0,1,0) determinant equals the hand-computed 3×3 determinant
    // (2πi)³·[(−½+(1+4√3)i)(2i) − i²]·√3 i.
    let s3 = 3f64.sqrt();
    let hand = c(0.0, 2.0 * PI).powi(3) * ((c(-0.5, 1.0 + 4.0 * s3) * c(0.0, 2.0) + 1.0) * c(0.0, s3));
    assert!((hess_det_closed_form(0, 1, 0, DetVariant::Analytic) - hand).norm() < 1e-9 * hand.norm());
}

#[test]
fn iterated_double_critical_values() {
    let vc = volconj::VolumeConstants::new();
    for p in 0..=4u32 {
        let spec = build_potential(&LinkFamily::IteratedDoubleFigEight { p }, None).unwrap();
        let start: Vec<Complex64> = spec.reference.iter().map(|&x| c(x - 0.01, 0.01)).collect();
        let cg = find_critical_point(&spec, &start).unwrap();
        assert!((cg.volume - (vc.vol_fig8 + f64::from(p + 1) * vc.vol_wl)).abs() < 1e-10);
        // Each interior clasp lowers the imaginary part by 23π/24.
        let want = f64::from(25i32 - 23 * p as i32) * PI / 24.0;
        assert!((cg.critical_value.im - want).abs() < 1e-10, "p={p}: {}", cg.critical_value.im / PI);
    }
}

fn max_eig_of_real_part(h: &DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(h.map(|x| x.re)).eigenvalues.max()
}

#[test]
fn real_part_of_the_hessian_is_negative_definite() {
    let mut links: Vec<LinkFamily> = (0..=3).map(|p| LinkFamily::IteratedDoubleFigEight { p }).collect();
    for (alpha, beta) in [(1, 0), (0, 2), (1, 1), (2, 1), (2, 2), (3, 1), (1, 3)] {
        links.push(LinkFamily::WAlphaBeta { alpha, beta });
    }
    for link in links {
        let spec = build_potential(&link, None).unwrap();
        let h = spec.hess(&spec.reference_point()).unwrap();
        assert!(max_eig_of_real_part(&h) < 0.0, "{link}");
    }
}

#[test]
fn w_alpha_beta_branches_agree_at_the_critical_point() {
    for (alpha, beta) in [(1, 0), (1, 1), (2, 1), (1, 2), (3, 2)] {
        let link = LinkFamily::WAlphaBeta { alpha, beta };
        let plus = build_potential_branch(&link, None, Branch::Plus).unwrap();
        let minus = build_potential_branch(&link, None, Branch::Minus).unwrap();
        let cp = critical_geometry(&plus).unwrap();
        let cm = critical_geometry(&minus).unwrap();
        assert!((plus.eval(&cp.point).unwrap() - minus.eval(&cp.point).unwrap()).norm() < 1e-12);
        assert!((cp.critical_value - cm.critical_value).norm() < 1e-12);
        assert!((cp.volume - f64::from(alpha + beta) * VOL_WL).abs() < 1e-10, "{link}");
    }
    // W^α_β and W^β_α describe the same link with the components exchanged.
    let a = critical_geometry(&build_potential(&LinkFamily::WAlphaBeta { alpha: 0, beta: 2 }, None).unwrap()).unwrap();
    let b = critical_geometry(&build_potential(&LinkFamily::WAlphaBeta { alpha: 2, beta: 0 }, None).unwrap()).unwrap();
    assert!((a.critical_value - b.critical_value).norm() < 1e-12);
}

#[test]
fn amplitude_factor_is_nonzero() {
    let spec = build_potential(&LinkFamily::IteratedDoubleFigEight { p: 0 }, None).unwrap();
    let cg = critical_geometry(&spec).unwrap();
    let e = e_factor(&cg.point).unwrap();
    assert!(e.norm() > 1e-6);
    assert!(e_factor(&cg.point[..2]).is_err());
}

#[test]
fn deformed_branch() {
    assert!((deformed_branch_z2(1.0).unwrap() - 0.25).norm() < 1e-15);
    let bits = 256;
    let z = deformed_branch_root_hp(0.95, bits).unwrap();
    let b = volconj::Cx::cis(&(rug::Float::with_val(bits, rug::float::Constant::Pi) * 2u32 * 0.95));
    let one = volconj::Cx::one(bits);
    let residual = &(&(&z * &z) + &(&(&one - &b) * &z)) + &b;
    assert!(residual.abs_f64() < 1e-20);
    let lhs = &(&one + &(&b / &z)) * &(&one + &z);
    assert!(lhs.abs_diff(&(&b * &volconj::Cx::from_int(bits, 2))) < 1e-20);
    // The double-precision branch agrees with the exact root.
    assert!((deformed_branch_root(0.95).unwrap() - z.to_c64()).norm() < 1e-14);
    assert!(matches!(deformed_branch_z2(0.7), Err(Error::Domain(_))));
}

#[test]
fn deformed_point_is_critical() {
    for s in [0.99, 0.95, 0.92] {
        let spec = build_potential(&LinkFamily::WhiteheadLink, Some(&Deformation::new(vec![1.0, s]))).unwrap();
        let z = [c(0.5, 0.0), deformed_branch_z2(s).unwrap()];
        assert!(sup(spec.grad(&z).unwrap()) < 1e-13, "s={s}");
    }
}

#[test]
fn deformed_volumes() {
    assert!((deformed_volume_wl(1.0).unwrap() - VOL_WL).abs() < 1e-14);
    // Reference digits from an mpmath evaluation of the same saddle.
    assert!((deformed_volume_wl(0.98).unwrap() - 3.655_971_881_518_169_28).abs() < 1e-13);
    assert!((deformed_volume_wl(0.96).unwrap() - 3.632_362_331_367_507_05).abs() < 1e-13);
    for s in [1.0, 0.98, 0.96] {
        let v = deformed_volume_wl(s).unwrap();
        assert!(v <= VOL_WL + 1e-14);
        assert!((v - deformed_volume_by_grid(s)).abs() < 1e-6, "s={s}");
    }
    assert!(matches!(deformed_volume_wl(0.85), Err(Error::Domain(_))));
}

#[test]
fn predictions() {
    let id0 = LinkFamily::IteratedDoubleFigEight { p: 0 };
    assert!((geometry_prediction(&id0, None).unwrap() - 5.693_745_589_528).abs() < 1e-11);
    let w11 = LinkFamily::WAlphaBeta { alpha: 1, beta: 1 };
    assert!((geometry_prediction(&w11, None).unwrap() - 2.0 * VOL_WL).abs() < 1e-13);
    let w21 = LinkFamily::WAlphaBeta { alpha: 2, beta: 1 };
    let p = geometry_prediction(&w21, Some(&Deformation::new(vec![0.98, 1.0]))).unwrap();
    assert!((p - (deformed_volume_wl(0.98).unwrap() + 2.0 * VOL_WL)).abs() < 1e-13);
    let p = geometry_prediction(&id0, Some(&Deformation::new(vec![0.95]))).unwrap();
    assert!((p - (deformed_volume_wl(0.95).unwrap() + VOL_FIG8)).abs() < 1e-13);
}

#[test]
fn deformed_double_critical_value_matches_prediction() {
    // Newton on the deformed potential reproduces the assembled prediction.
    for s in [0.98, 0.95] {
        for p in 0..=2u32 {
            let link = LinkFamily::IteratedDoubleFigEight { p };
            let spec = build_potential(&link, Some(&Deformation::new(vec![s]))).unwrap();
            let cg = critical_geometry(&spec).unwrap();
            let want = geometry_prediction(&link, Some(&Deformation::new(vec![s]))).unwrap();
            assert!((cg.volume - want).abs() < 1e-10, "p={p} s={s}: {} vs {want}", cg.volume);
        }
    }
}

#[test]
fn envelope_normalization_is_twice_milnor() {
    let ep = make_eval_point(500, Precision::default()).unwrap();
    let cal = envelope_calibration(&ep).unwrap();
    assert!((cal.doubled - VOL_FIG8 / (2.0 * PI)).abs() < 1e-12);
    assert!(cal.prefers_doubled(), "{cal:?}");
    assert!((cal.observed - cal.doubled).abs() < 0.01);
}
