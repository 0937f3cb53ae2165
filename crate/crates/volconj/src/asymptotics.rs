//! Growth rates `g(N) = (2π/(N+½))·log|J|`, their extrapolation to
//! `N → ∞`, and the one-term saddle-point prediction for the Whitehead
//! double of the figure-eight knot.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jones::{evaluate, peak_log10, precision_guard, ColorAssignment, SumWindow, DEFAULT_TERM_BUDGET};
use crate::links::LinkFamily;
use crate::numeric::{make_eval_point, Cx, EvalPoint, Precision};
use crate::potential::{build_potential, critical_geometry, e_factor, geometry_prediction, Deformation};
use crate::special::{qd_corner_factor, ContourConfig};

/// How the colours of each component are chosen at level `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ColorRule {
    /// Every component coloured `N`.
    DiagonalN,
    /// Component `i` coloured `round(s_i·(N+½))`, clamped to `[1, N]`.  A
    /// single ratio applies to every component.
    RatioTargets(Vec<f64>),
}

impl ColorRule {
    fn targets(&self, components: usize) -> Result<Vec<f64>> {
        match self {
            Self::DiagonalN => Ok(vec![1.0; components]),
            Self::RatioTargets(r) if r.len() == 1 => Ok(vec![r[0]; components]),
            Self::RatioTargets(r) if r.len() == components => Ok(r.clone()),
            Self::RatioTargets(r) => {
                Err(Error::InvalidInput(format!("{} ratio targets for a {components}-component link", r.len())))
            }
        }
    }

    fn colors(&self, components: usize, n: u32) -> Result<Vec<u32>> {
        if let Self::DiagonalN = self {
            return Ok(vec![n; components]);
        }
        let h = f64::from(n) + 0.5;
        Ok(self.targets(components)?.iter().map(|s| ((s * h).round().max(1.0) as u32).min(n)).collect())
    }
}

/// Evaluation settings for [`growth_sequence`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthOptions {
    /// Fixed working precision; `None` picks, per `N`, the larger of the
    /// default and what the peak-magnitude guard requires.
    pub precision: Option<Precision>,
    pub budget: f64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        Self { precision: None, budget: DEFAULT_TERM_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub n: u32,
    pub colors: Vec<u32>,
    /// `M_i/(N+½)` actually used.
    pub achieved_ratio: Vec<f64>,
    pub log_abs_j: f64,
    /// `(2π/(N+½))·log|J|`.
    pub g: f64,
    pub terms: u64,
}

/// Least-squares fit `g(N) ≈ limit + c_logn_over_n·log N/N + c_over_n/N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub limit: f64,
    pub c_logn_over_n: f64,
    pub c_over_n: f64,
    /// Root-mean-square deviation of the samples from the fitted curve.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub link: LinkFamily,
    pub rule: ColorRule,
    /// Strictly increasing in `N`.
    pub samples: Vec<GrowthSample>,
    /// Present once there are at least three samples.
    pub fit: Option<GrowthFit>,
    /// The geometric prediction for the limit, when one is available.
    pub predicted_limit: Option<f64>,
}

/// One output row; field names are the CSV header.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub r: u32,
    /// Ratios joined with `;` for multi-component links.
    pub target_ratio: String,
    pub achieved_ratio: String,
    pub log_abs_j: f64,
    pub g: f64,
    pub predicted_limit: Option<f64>,
    /// `g − predicted_limit`.
    pub gap: Option<f64>,
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(";")
}

impl GrowthTable {
    pub fn rows(&self) -> Vec<GrowthRow> {
        let targets = self.rule.targets(self.link.components() as usize).unwrap_or_default();
        self.samples
            .iter()
            .map(|s| GrowthRow {
                n: s.n,
                r: 2 * s.n + 1,
                target_ratio: join(&targets),
                achieved_ratio: join(&s.achieved_ratio),
                log_abs_j: s.log_abs_j,
                g: s.g,
                predicted_limit: self.predicted_limit,
                gap: self.predicted_limit.map(|p| s.g - p),
            })
            .collect()
    }
}

/// Least-squares fit of the model `v + a·log N/N + b/N`, solved by SVD.
/// Samples are sorted by `N` first, so the result does not depend on their
/// order.  Needs at least three distinct `N`.
pub fn fit_growth(samples: &[GrowthSample]) -> Result<GrowthFit> {
    let mut pts: Vec<(u32, f64)> = samples.iter().map(|s| (s.n, s.g)).collect();
    pts.sort_by_key(|p| p.0);
    pts.dedup_by_key(|p| p.0);
    if pts.len() < 3 {
        return Err(Error::InvalidInput(format!("fit needs at least 3 distinct N, got {}", pts.len())));
    }
    if let Some(p) = pts.iter().find(|p| !p.1.is_finite()) {
        return Err(Error::Domain(format!("g({}) is not finite", p.0)));
    }
    let m = pts.len();
    let a = DMatrix::from_fn(m, 3, |i, j| {
        let n = f64::from(pts[i].0);
        match j {
            0 => 1.0,
            1 => n.ln() / n,
            _ => 1.0 / n,
        }
    });
    let y = DVector::from_iterator(m, pts.iter().map(|p| p.1));
    let coef = a.clone().svd(true, true).solve(&y, 1e-14).map_err(|e| Error::Singular(format!("growth fit: {e}")))?;
    let resid = &a * &coef - &y;
    let residual = (resid.norm_squared() / m as f64).sqrt();
    Ok(GrowthFit { limit: coef[0], c_logn_over_n: coef[1], c_over_n: coef[2], residual })
}

/// Evaluation point for `link` at level `n`: with a fixed precision the
/// peak-magnitude guard is enforced, otherwise the precision is raised to
/// cover the expected peak summand plus 30 digits.
pub fn eval_point_for(link: &LinkFamily, n: u32, opts: &GrowthOptions) -> Result<EvalPoint> {
    let prec = match opts.precision {
        Some(p) => {
            precision_guard(link, n, p)?;
            p
        }
        None => {
            let need = (peak_log10(link, n) + 30.0).ceil() as u32;
            Precision::new(need.max(Precision::default().decimal_digits()))?
        }
    };
    make_eval_point(n, prec)
}

/// `g(N)` for every `N` in `n_list` (evaluated concurrently), with the fit
/// and the geometric prediction for the limit.
pub fn growth_sequence(
    link: &LinkFamily,
    rule: &ColorRule,
    n_list: &[u32],
    win: &SumWindow,
    opts: &GrowthOptions,
) -> Result<GrowthTable> {
    link.validate()?;
    win.validate()?;
    if n_list.is_empty() {
        return Err(Error::InvalidInput("empty N list".into()));
    }
    let comps = link.components() as usize;
    let targets = rule.targets(comps)?;
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let samples = ns
        .par_iter()
        .map(|&n| {
            let ep = eval_point_for(link, n, opts)?;
            let colors = rule.colors(comps, n)?;
            let ca = ColorAssignment::new(colors.clone(), link, &ep)?;
            let e = evaluate(link, &ca, &ep, win, opts.budget)?;
            let h = f64::from(n) + 0.5;
            let log_abs_j = e.log_abs();
            Ok(GrowthSample {
                n,
                achieved_ratio: colors.iter().map(|&m| f64::from(m) / h).collect(),
                colors,
                log_abs_j,
                g: 2.0 * PI / h * log_abs_j,
                terms: e.terms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = if samples.len() >= 3 { Some(fit_growth(&samples)?) } else { None };
    let predicted_limit = geometry_prediction(link, Some(&Deformation::new(targets))).ok();
    Ok(GrowthTable { link: link.clone(), rule: rule.clone(), samples, fit, predicted_limit })
}

/// The one-term saddle-point approximation of `J_N(W_{0,1,1,0}(4₁))`
/// (the iterated double `p = 0`, diagonal colour):
///
/// `−(h/π)·e^{−(r/4πi)φ_r(π/r)}·h^{3/2}·e^{−23πi/12}·(2π)^{3/2}·E/√(−det Hess)·e^{h·Φ_c}`
///
/// with `h = N + ½`, `E` the amplitude factor and `Φ_c` the critical value
/// at `(½, ¼, 5/6)`.  The Hessian is that of the potential (see
/// [`crate::potential::DetVariant::Analytic`]); the square root is the
/// principal branch.
pub fn saddle_prediction(ep: &EvalPoint) -> Result<Cx> {
    let bits = ep.bits();
    let spec = build_potential(&LinkFamily::IteratedDoubleFigEight { p: 0 }, None)?;
    let cg = critical_geometry(&spec)?;
    let e = e_factor(&cg.point)?;
    let corner = qd_corner_factor(ep.r(), false, &ContourConfig::default(), bits)?;
    let h = f64::from(ep.N()) + 0.5;
    // Everything except the corner factor is assembled as a logarithm so
    // that large N never overflows.
    let log_rest = Complex64::new(-h / PI, 0.0).ln()
        + 1.5 * h.ln()
        + Complex64::new(0.0, -23.0 * PI / 12.0)
        + 1.5 * (2.0 * PI).ln()
        + e.ln()
        - 0.5 * (-cg.hess_det).ln()
        + h * cg.critical_value;
    Ok(&Cx::from_c64(bits, log_rest).exp() * &corner)
}

/// Direct value versus prediction at one `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub ratio_re: f64,
    pub ratio_im: f64,
    /// `|direct| / |predicted|`.
    pub modulus_ratio: f64,
    /// `arg(direct/predicted)` in `(−π, π]`.
    pub phase_diff: f64,
}

/// Per-`N` comparison of two equally long sequences of `(N, value)`.
pub fn compare_report(direct: &[(u32, Cx)], predicted: &[(u32, Cx)]) -> Result<Vec<CompareRow>> {
    if direct.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} direct vs {} predicted",
            direct.len(),
            predicted.len()
        )));
    }
    direct
        .iter()
        .zip(predicted)
        .map(|((n, d), (m, p))| {
            if n != m {
                return Err(Error::InvalidInput(format!("N mismatch: {n} vs {m}")));
            }
            if p.is_zero() {
                return Err(Error::Domain(format!("prediction vanishes at N = {n}")));
            }
            let ratio = (d / p).to_c64();
            Ok(CompareRow {
                n: *n,
                ratio_re: ratio.re,
                ratio_im: ratio.im,
                modulus_ratio: ratio.norm(),
                phase_diff: ratio.arg(),
            })
        })
        .collect()
}
