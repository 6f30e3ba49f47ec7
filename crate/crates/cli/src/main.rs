//! `translator`: batch driver for verifying, solving and diagnosing
//! translating solitons given as graphs over a box.
//!
//! Exit status: 0 when every pass/fail result passes, 1 when one fails,
//! 2 for configuration or input errors, 3 for geometric degeneracy.

mod config;
mod diagnose;
mod output;
mod solve;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{GuessConfig, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "translator", version, about = "Verify, solve and diagnose graphic translators in R^{m+n}_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pointwise geometry and translator residual over the grid.
    Verify(RunArgs),
    /// Damped Newton solve (or continuation sweep) with Dirichlet data.
    Solve(RunArgs),
    /// Differential-inequality, decay, Gauss-image and rigidity diagnostics.
    Diagnose(RunArgs),
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Repeat the run on k successively halved grids and report observed orders.
    #[arg(long = "h-refine", value_name = "K")]
    h_refine: Option<usize>,
    /// Seed for a random initial guess.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Degenerate(String),
}

impl From<translator_core::Error> for RunError {
    fn from(e: translator_core::Error) -> Self {
        use translator_core::Error as E;
        match e {
            E::NotSpacelike { .. } | E::DegenerateSolution(_) | E::LinearSolve(_) => RunError::Degenerate(e.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Degenerate(_) => 3,
        }
    }
}

/// Overall verdict of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    /// Directory of the configuration file, for relative paths inside it.
    pub base_dir: PathBuf,
}

fn resolve(args: &RunArgs) -> Result<Context, RunError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(k) = args.h_refine {
        config.h_refine = k;
    }
    if let Some(seed) = args.seed {
        if let GuessConfig::Random { seed: s, .. } = &mut config.solve.initial_guess {
            *s = seed;
        }
    }
    config.validate()?;
    let base_dir = args.config.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    let out = match (&args.out, &config.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) if o.is_relative() => base_dir.join(o),
        (None, Some(o)) => o.clone(),
        (None, None) => return Err(RunError::Config("no output directory: pass --out or set output_dir".into())),
    };
    Ok(Context { config, out, base_dir })
}

fn run(cli: &Cli) -> Result<Verdict, RunError> {
    match &cli.command {
        Command::Verify(a) => verify::run(&resolve(a)?),
        Command::Solve(a) => solve::run(&resolve(a)?),
        Command::Diagnose(a) => diagnose::run(&resolve(a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            match &e {
                RunError::Config(msg) => eprintln!("error: {msg}"),
                RunError::Degenerate(msg) => eprintln!("degenerate geometry: {msg}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
