//! `volconj selfcheck`: identity suites with a pass/fail table.
//!
//! * `qdilog`    — the quantum dilogarithm's shift equation on random points
//!   of the strip, and the q-Pochhammer reconstruction at every index;
//! * `gradient`  — analytic gradients and Hessians of every potential
//!   against central differences;
//! * `cross`     — the fast colored Jones engines against the literal nested
//!   sums at small `N`;
//! * `precision` — the peak-magnitude guard for `--link` at `--N`.

use anyhow::Result;
use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use volconj::jones::{self, literal, peak_log10, precision_guard};
use volconj::potential::{build_potential_branch, Branch, PotentialSpec};
use volconj::special::{pochhammer_via_qdilog, qd_shift_ratio, ContourConfig};
use volconj::{make_eval_point, Cx, Error, LinkFamily, Precision, SumWindow, DEFAULT_TERM_BUDGET};

use crate::output::{self, Format};
use crate::RunArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Qdilog,
    Gradient,
    Cross,
    Precision,
}

#[derive(Args, Debug)]
pub struct SelfcheckArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Odd levels for the qdilog suite, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [11u32, 25, 51])]
    pub r: Vec<u32>,
    /// Level for the precision guard.
    #[arg(long = "N", default_value_t = 20)]
    pub n: u32,
    /// Link for the precision guard.
    #[arg(long, default_value = "WD^0(4_1)", value_parser = |s: &str| LinkFamily::parse(s).map_err(|e| e.to_string()))]
    pub link: LinkFamily,
    /// Seed for the random sample points.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random points per level (qdilog) or per potential (gradient).
    #[arg(long, default_value_t = 20)]
    pub points: usize,
}

/// One line of the report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub check: String,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(suite: &'static str, check: String, errors: &[f64], tolerance: f64) -> Self {
        let max_error = errors.iter().copied().fold(0.0, f64::max);
        let pass = !errors.is_empty() && errors.iter().all(|e| e.is_finite()) && max_error <= tolerance;
        Self { suite, check, cases: errors.len(), max_error, tolerance, pass }
    }
}

fn precision(run: &RunArgs) -> Result<Precision> {
    Ok(run.precision.map(Precision::new).transpose()?.unwrap_or_default())
}

/// `1 − e^{2iz}` from elementary functions.
fn one_minus_exp_2iz(z: &Cx) -> Cx {
    let two_iz = z.mul_i() + &z.mul_i();
    &Cx::one(z.prec()) - &two_iz.exp()
}

fn qdilog(a: &SelfcheckArgs, prec: Precision) -> Result<Vec<Check>> {
    let cfg = ContourConfig::default();
    let bits = prec.bits();
    // Relative accuracy of the contour integral is about 20 digits short of
    // working precision at the default 64 digits.
    let tol = prec.tolerance(44).min(1e-20);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut out = Vec::new();
    for &r in &a.r {
        if r < 3 || r % 2 == 0 {
            return Err(Error::InvalidInput(format!("level r = {r} must be odd and at least 3")).into());
        }
        let mut shift = Vec::with_capacity(a.points);
        for _ in 0..a.points {
            let z = Cx::from_f64(bits, rng.gen_range(0.1..std::f64::consts::PI - 0.1), rng.gen_range(-0.5..0.5));
            shift.push(qd_shift_ratio(&z, r, &cfg)?.rel_diff(&one_minus_exp_2iz(&z)));
        }
        out.push(Check::new("qdilog", format!("shift equation r={r}"), &shift, tol));
        let ep = make_eval_point((r - 1) / 2, prec)?;
        let bridge = (0..=r - 2)
            .map(|n| Ok(pochhammer_via_qdilog(n, r, &cfg, bits)?.rel_diff(ep.q_pochhammer(i64::from(n))?)))
            .collect::<Result<Vec<f64>, Error>>()?;
        out.push(Check::new("qdilog", format!("pochhammer bridge r={r}"), &bridge, tol));
    }
    Ok(out)
}

/// Every family with a potential, both branches where they differ.
fn potentials() -> Result<Vec<PotentialSpec>> {
    let mut links = vec![LinkFamily::FigureEight, LinkFamily::WhiteheadLink];
    for (a, c, d) in [(0, 1, 0), (1, 1, 1), (-2, 2, 1)] {
        links.push(LinkFamily::cabled_chain(a, c, d)?);
    }
    for p in 0..=2 {
        links.push(LinkFamily::IteratedDoubleFigEight { p });
    }
    for (al, be) in [(1, 1), (2, 1), (0, 2)] {
        links.push(LinkFamily::w_alpha_beta(al, be)?);
    }
    let mut out = Vec::new();
    for link in links {
        let plus = build_potential_branch(&link, None, Branch::Plus)?;
        if matches!(link, LinkFamily::WAlphaBeta { .. }) {
            out.push(build_potential_branch(&link, None, Branch::Minus)?);
        }
        out.push(plus);
    }
    Ok(out)
}

fn gradient(a: &SelfcheckArgs) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let h = 1e-6;
    let mut out = Vec::new();
    for spec in potentials()? {
        let (mut ge, mut he) = (Vec::new(), Vec::new());
        for _ in 0..a.points {
            let z: Vec<Complex64> = spec
                .reference
                .iter()
                .map(|&x| Complex64::new(x + rng.gen_range(-0.03..0.03), rng.gen_range(-0.03..0.03)))
                .collect();
            let g = spec.grad(&z)?;
            let hs = spec.hess(&z)?;
            for j in 0..spec.dim {
                let (mut zp, mut zm) = (z.clone(), z.clone());
                zp[j] += h;
                zm[j] -= h;
                let fd = (spec.eval(&zp)? - spec.eval(&zm)?) / (2.0 * h);
                ge.push((fd - g[j]).norm() / g[j].norm().max(1.0));
                let (gp, gm) = (spec.grad(&zp)?, spec.grad(&zm)?);
                for i in 0..spec.dim {
                    let fd = (gp[i] - gm[i]) / (2.0 * h);
                    he.push((fd - hs[(i, j)]).norm() / hs[(i, j)].norm().max(1.0));
                }
            }
        }
        let name = format!("{} {:?}", spec.family, spec.branch);
        out.push(Check::new("gradient", format!("{name} gradient"), &ge, 1e-8));
        out.push(Check::new("gradient", format!("{name} hessian"), &he, 1e-6));
    }
    Ok(out)
}

fn cross(prec: Precision) -> Result<Vec<Check>> {
    const FULL: SumWindow = SumWindow::Full;
    let tol = prec.tolerance(14);
    let b = DEFAULT_TERM_BUDGET;
    let mut out = Vec::new();
    let mut push = |name: &str, errs: Vec<f64>| out.push(Check::new("cross", name.to_string(), &errs, tol));

    let mut errs = Vec::new();
    for n in 2..=6 {
        let ep = make_eval_point(n, prec)?;
        for (m1, m2) in [(n, n), (1, n), (n, n - 1)] {
            errs.push(jones::jones_whitehead_link(m1, m2, &ep)?.rel_diff(&literal::whitehead_link(m1, m2, &ep)));
        }
    }
    push("whitehead link", errs);

    let mut errs = Vec::new();
    for n in 1..=6 {
        let ep = make_eval_point(n, prec)?;
        errs.push(jones::jones_iterated_double(0, &ep, FULL)?.rel_diff(&literal::triple_sum(&ep, &FULL, b)?));
    }
    push("triple sum", errs);

    let mut errs = Vec::new();
    for n in [3u32, 4] {
        let ep = make_eval_point(n, prec)?;
        for (a, c, d) in [(0, 1, 0), (1, 1, 1), (-2, 2, 0)] {
            let fast = jones::jones_cabled_chain(a, c, d, &ep, FULL)?;
            errs.push(fast.rel_diff(&literal::cabled_chain(a, c, d, &ep, &FULL, b)?));
        }
    }
    push("cabled chain", errs);

    let mut errs = Vec::new();
    for n in [2u32, 3, 4] {
        let ep = make_eval_point(n, prec)?;
        for p in 0..=2 {
            let fast = jones::jones_iterated_double(p, &ep, FULL)?;
            errs.push(fast.rel_diff(&literal::iterated_double(p, &ep, &FULL, b)?));
        }
    }
    push("iterated double", errs);

    let mut errs = Vec::new();
    let ep = make_eval_point(4, prec)?;
    for (al, be) in [(1, 0), (1, 1), (2, 1)] {
        for (m1, m2) in [(4, 4), (3, 2)] {
            let fast = jones::jones_w_alpha_beta(al, be, m1, m2, &ep, FULL)?;
            errs.push(fast.rel_diff(&literal::w_alpha_beta(al, be, m1, m2, &ep, &FULL, b)?));
        }
    }
    push("w alpha beta", errs);
    Ok(out)
}

/// Runs the guard; a refusal is reported and then returned as the error so
/// that the exit status reflects it.
fn precision_suite(a: &SelfcheckArgs, prec: Precision) -> (Check, Option<Error>) {
    let peak = peak_log10(&a.link, a.n);
    let required = (peak + 20.0).ceil();
    let res = precision_guard(&a.link, a.n, prec);
    let check = Check {
        suite: "precision",
        check: format!("{} at N={}: peak term 1e{peak:.1}, {} digits", a.link, a.n, prec.decimal_digits()),
        cases: 1,
        max_error: required,
        tolerance: f64::from(prec.decimal_digits()),
        pass: res.is_ok(),
    };
    (check, res.err())
}

pub fn run(a: &SelfcheckArgs, run: &RunArgs) -> Result<bool> {
    let prec = precision(run)?;
    let want = |s: Suite| a.suite == Suite::All || a.suite == s;
    let mut checks = Vec::new();
    let mut guard_error = None;
    // The guard goes first: at too low a precision the other suites would
    // only report noise.
    if want(Suite::Precision) {
        let (c, e) = precision_suite(a, prec);
        checks.push(c);
        guard_error = e;
    }
    if guard_error.is_none() {
        if want(Suite::Qdilog) {
            checks.extend(qdilog(a, prec)?);
        }
        if want(Suite::Gradient) {
            checks.extend(gradient(a)?);
        }
        if want(Suite::Cross) {
            checks.extend(cross(prec)?);
        }
    }
    output::rows(&checks, run.format_or(Format::Csv), run.out.as_deref())?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    eprintln!("{} checks, {failed} failed", checks.len());
    if let Some(e) = guard_error {
        return Err(e.into());
    }
    Ok(failed == 0)
}
