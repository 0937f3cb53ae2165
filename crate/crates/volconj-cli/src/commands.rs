//! The evaluation subcommands.

use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use volconj::asymptotics::{
    compare_report, eval_point_for, growth_sequence, saddle_prediction, ColorRule, GrowthOptions,
};
use volconj::jones::{evaluate, ColorAssignment};
use volconj::potential::{build_potential_branch, critical_geometry, Branch, Deformation};
use volconj::tv::{turaev_viro_with_budget, tv_lower_bound_from_top_color, TvKind};
use volconj::{Error, EvalPoint, LinkFamily, Precision};

use crate::output::{self, big, Format};
use crate::RunArgs;

/// `a:b:step`, `a:b` (step 1) or a single `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NRange(pub Vec<u32>);

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("'{t}': {e}"));
        let (a, b, step) = match parts.as_slice() {
            [a] => (num(a)?, num(a)?, 1),
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err("expected a:b:step".into()),
        };
        if a == 0 || b < a || step == 0 {
            return Err(format!("empty or invalid range {s}"));
        }
        Ok(Self((a..=b).step_by(step as usize).collect()))
    }
}

fn parse_link(s: &str) -> std::result::Result<LinkFamily, String> {
    LinkFamily::parse(s).map_err(|e| e.to_string())
}

fn options(run: &RunArgs) -> Result<GrowthOptions> {
    let precision = run.precision.map(Precision::new).transpose()?;
    Ok(GrowthOptions { precision, budget: run.budget })
}

/// Evaluation point at level `n`, honouring `--precision` (guarded) or
/// choosing one automatically.
fn eval_point(link: &LinkFamily, n: u32, run: &RunArgs) -> Result<EvalPoint> {
    Ok(eval_point_for(link, n, &options(run)?)?)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

// ---------------------------------------------------------------- jones

#[derive(Args, Debug)]
pub struct JonesArgs {
    /// Link, e.g. `4_1`, `WL`, `WD^1(4_1)`, `W(0,1,1)*4_1`, `W[1,1]`.
    #[arg(long, value_parser = parse_link)]
    pub link: LinkFamily,
    /// Level N (the root of unity is e^{4πi/(2N+1)}).
    #[arg(long = "N")]
    pub n: u32,
    /// One colour per component, comma separated (default: all N).
    #[arg(long, value_delimiter = ',', conflicts_with = "color")]
    pub colors: Option<Vec<u32>>,
    /// The same colour on every component.
    #[arg(long)]
    pub color: Option<u32>,
}

#[derive(Serialize)]
struct JonesRecord {
    link: String,
    colors: String,
    #[serde(rename = "N")]
    n: u32,
    r: u32,
    re: String,
    im: String,
    log_abs_j: f64,
    g: f64,
    terms: u64,
    modulus_only: bool,
}

pub fn jones(a: &JonesArgs, run: &RunArgs) -> Result<bool> {
    let win = run.window()?;
    let ep = eval_point(&a.link, a.n, run)?;
    let comps = a.link.components() as usize;
    let colors = match (&a.colors, a.color) {
        (Some(c), _) => c.clone(),
        (None, Some(m)) => vec![m; comps],
        (None, None) => vec![a.n; comps],
    };
    let ca = ColorAssignment::new(colors, &a.link, &ep)?;
    let start = Instant::now();
    let e = evaluate(&a.link, &ca, &ep, &win, run.budget)?;
    eprintln!("evaluated in {:.3} s at {} digits", start.elapsed().as_secs_f64(), ep.precision().decimal_digits());
    let log_abs_j = e.log_abs();
    let rec = JonesRecord {
        link: a.link.to_string(),
        colors: join(&ca.colors),
        n: a.n,
        r: ep.r(),
        re: big(&e.value.re),
        im: big(&e.value.im),
        log_abs_j,
        g: 2.0 * std::f64::consts::PI / ep.half_level() * log_abs_j,
        terms: e.terms,
        modulus_only: e.modulus_only,
    };
    output::record(&rec, run.format_or(Format::Csv), run.out.as_deref())?;
    Ok(true)
}

// --------------------------------------------------------------- growth

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[arg(long, value_parser = parse_link)]
    pub link: LinkFamily,
    /// Colour ratios M_i/(N+½): one for all components or one per component
    /// (default: every colour equal to N).
    #[arg(long, value_delimiter = ',')]
    pub ratio: Option<Vec<f64>>,
    /// Levels as a:b:step.
    #[arg(long = "N-range")]
    pub n_range: NRange,
}

pub fn growth(a: &GrowthArgs, run: &RunArgs) -> Result<bool> {
    let win = run.window()?;
    let rule = match &a.ratio {
        Some(r) => ColorRule::RatioTargets(r.clone()),
        None => ColorRule::DiagonalN,
    };
    let table = growth_sequence(&a.link, &rule, &a.n_range.0, &win, &options(run)?)?;
    match run.format_or(Format::Csv) {
        Format::Csv => {
            output::rows(&table.rows(), Format::Csv, run.out.as_deref())?;
            match &table.fit {
                Some(f) => eprintln!(
                    "fit: limit {:.6} (log N/N coefficient {:.4}, 1/N coefficient {:.4}, rms {:.2e})",
                    f.limit, f.c_logn_over_n, f.c_over_n, f.residual
                ),
                None => eprintln!("fit: needs at least three levels"),
            }
            if let Some(p) = table.predicted_limit {
                eprintln!("predicted limit {p:.6}");
            }
        }
        Format::Json => output::record(&table, Format::Json, run.out.as_deref())?,
    }
    Ok(true)
}

// ------------------------------------------------------------------- tv

#[derive(Args, Debug)]
pub struct TvArgs {
    #[arg(long, value_parser = parse_link)]
    pub link: LinkFamily,
    /// Odd level r = 2N+1.
    #[arg(long, conflicts_with = "n", required_unless_present = "n")]
    pub r: Option<u32>,
    #[arg(long = "N")]
    pub n: Option<u32>,
    /// Only the top-colour lower bound.
    #[arg(long)]
    pub bound: bool,
}

#[derive(Serialize)]
struct TvRecord {
    link: String,
    r: u32,
    value: f64,
    ln_value: f64,
    growth_rate: f64,
    terms: u64,
    kind: &'static str,
}

pub fn tv(a: &TvArgs, run: &RunArgs) -> Result<bool> {
    let n = match (a.r, a.n) {
        (Some(r), _) if r >= 3 && r % 2 == 1 => (r - 1) / 2,
        (Some(r), _) => return Err(Error::InvalidInput(format!("r = {r} must be odd and at least 3")).into()),
        (None, Some(n)) => n,
        (None, None) => bail!("one of --r or --N is required"),
    };
    let win = run.window()?;
    let ep = eval_point(&a.link, n, run)?;
    let res = if a.bound {
        tv_lower_bound_from_top_color(&a.link, &ep, &win)?
    } else {
        turaev_viro_with_budget(&a.link, &ep, &win, run.budget)?
    };
    let rec = TvRecord {
        link: a.link.to_string(),
        r: res.r,
        value: res.value,
        ln_value: res.ln_value,
        growth_rate: res.growth_rate(),
        terms: res.terms,
        kind: match res.kind {
            TvKind::FullSum => "full",
            TvKind::TopColorBound => "top-color-bound",
        },
    };
    output::record(&rec, run.format_or(Format::Csv), run.out.as_deref())?;
    Ok(true)
}

// ------------------------------------------------------------- critical

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

#[derive(Args, Debug)]
pub struct CriticalArgs {
    #[arg(long, value_parser = parse_link)]
    pub link: LinkFamily,
    /// Deformation ratios (one for all components or one per component).
    #[arg(long, value_delimiter = ',')]
    pub ratio: Option<Vec<f64>>,
    /// Sign branch for W[α,β].
    #[arg(long, value_enum, default_value = "plus")]
    pub branch: BranchArg,
}

#[derive(Serialize)]
struct CriticalRow {
    link: String,
    volume: f64,
    cs_imag: f64,
    critical_re: f64,
    critical_im: f64,
    hess_det_re: f64,
    hess_det_im: f64,
    residual: f64,
    iterations: usize,
    point: String,
}

pub fn critical(a: &CriticalArgs, run: &RunArgs) -> Result<bool> {
    let deformation = a.ratio.as_ref().map(|r| {
        let comps = a.link.components() as usize;
        Deformation::new(if r.len() == 1 { vec![r[0]; comps] } else { r.clone() })
    });
    let branch = match a.branch {
        BranchArg::Plus => Branch::Plus,
        BranchArg::Minus => Branch::Minus,
    };
    let spec = build_potential_branch(&a.link, deformation.as_ref(), branch)?;
    let cg = critical_geometry(&spec)?;
    match run.format_or(Format::Json) {
        Format::Json => output::record(&cg, Format::Json, run.out.as_deref())?,
        Format::Csv => {
            let point = cg.point.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect::<Vec<_>>();
            let row = CriticalRow {
                link: a.link.to_string(),
                volume: cg.volume,
                cs_imag: cg.cs_imag,
                critical_re: cg.critical_value.re,
                critical_im: cg.critical_value.im,
                hess_det_re: cg.hess_det.re,
                hess_det_im: cg.hess_det.im,
                residual: cg.residual,
                iterations: cg.iterations,
                point: point.join(";"),
            };
            output::record(&row, Format::Csv, run.out.as_deref())?;
        }
    }
    Ok(true)
}

// --------------------------------------------------------------- saddle

#[derive(Args, Debug)]
pub struct SaddleArgs {
    /// Levels as a:b:step.
    #[arg(long = "N-range")]
    pub n_range: NRange,
}

pub fn saddle(a: &SaddleArgs, run: &RunArgs) -> Result<bool> {
    use rayon::prelude::*;
    let win = run.window()?;
    let link = LinkFamily::IteratedDoubleFigEight { p: 0 };
    let pairs = a
        .n_range
        .0
        .par_iter()
        .map(|&n| {
            let ep = eval_point(&link, n, run)?;
            let j = evaluate(&link, &ColorAssignment::diagonal(&link, &ep), &ep, &win, run.budget)?.value;
            Ok(((n, j), (n, saddle_prediction(&ep)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (direct, predicted): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let rows = compare_report(&direct, &predicted)?;
    output::rows(&rows, run.format_or(Format::Csv), run.out.as_deref())?;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_range_forms() {
        assert_eq!("10:20:5".parse::<NRange>().unwrap().0, [10, 15, 20]);
        assert_eq!("3:5".parse::<NRange>().unwrap().0, [3, 4, 5]);
        assert_eq!("7".parse::<NRange>().unwrap().0, [7]);
        for bad in ["0:4", "5:4", "1:4:0", "a:b", "1:2:3:4"] {
            assert!(bad.parse::<NRange>().is_err(), "{bad}");
        }
    }
}
