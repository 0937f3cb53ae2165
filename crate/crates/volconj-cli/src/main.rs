//! `volconj`: colored Jones and Turaev–Viro evaluation, growth-rate tables,
//! critical points and saddle-point comparisons from the command line.
//!
//! Exit codes: 0 success, 1 failure (including failed self-checks),
//! 2 invalid arguments or link specification, 3 term budget or precision
//! guard, 4 domain error.

mod commands;
mod output;
mod selfcheck;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use volconj::{Error, SumWindow};

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "volconj",
    version,
    about = "Volume-conjecture numerics for Whitehead doubles and chains of the figure-eight knot"
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Working precision in decimal digits (at least 30).  Without it the
    /// precision is chosen per evaluation from the expected peak magnitude.
    #[arg(long, global = true, env = "VOLCONJ_PRECISION")]
    pub precision: Option<u32>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Keep only summation indices within eta·(N+½) of their critical ratio.
    #[arg(long, global = true, conflicts_with = "full")]
    pub eta: Option<f64>,
    /// Sum over the full index range (the default).
    #[arg(long, global = true)]
    pub full: bool,
    /// Use a restricted window (eta defaults to 0.08).
    #[arg(long, global = true, conflicts_with = "full")]
    pub window: bool,
    /// Maximum estimated number of summand terms per evaluation.
    #[arg(long, global = true, default_value_t = volconj::DEFAULT_TERM_BUDGET)]
    pub budget: f64,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Write the output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl RunArgs {
    pub fn window(&self) -> Result<SumWindow, Error> {
        let win = match (self.eta, self.window) {
            (Some(eta), _) => SumWindow::Restricted { eta },
            (None, true) => SumWindow::Restricted { eta: 0.08 },
            (None, false) => SumWindow::Full,
        };
        win.validate()?;
        Ok(win)
    }

    pub fn format_or(&self, default: Format) -> Format {
        match self.format {
            Some(FormatArg::Csv) => Format::Csv,
            Some(FormatArg::Json) => Format::Json,
            None => default,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one colored Jones polynomial.
    Jones(commands::JonesArgs),
    /// Growth rates g(N) over a range of N, with the extrapolated limit.
    Growth(commands::GrowthArgs),
    /// Turaev–Viro invariant of the link complement.
    Tv(commands::TvArgs),
    /// Critical point of the potential function, as JSON.
    Critical(commands::CriticalArgs),
    /// Direct summation versus the saddle-point prediction for WD^0(4_1).
    Saddle(commands::SaddleArgs),
    /// Run the identity suites and report pass/fail.
    Selfcheck(selfcheck::SelfcheckArgs),
}

/// Exit code for a library error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::InvalidInput(_) => 2,
        Error::BudgetExceeded { .. } | Error::PrecisionInsufficient { .. } => 3,
        Error::Domain(_) | Error::BranchCut(_) | Error::IndexOutOfRange(_) | Error::Unsupported(_) => 4,
        Error::NoConvergence(_) | Error::Singular(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.run.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Jones(a) => commands::jones(a, &cli.run),
        Command::Growth(a) => commands::growth(a, &cli.run),
        Command::Tv(a) => commands::tv(a, &cli.run),
        Command::Critical(a) => commands::critical(a, &cli.run),
        Command::Saddle(a) => commands::saddle(a, &cli.run),
        Command::Selfcheck(a) => selfcheck::run(a, &cli.run),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(1, exit_code);
            ExitCode::from(code)
        }
    }
}
