//! Command-line front end: integrate trajectories, classify end behaviour,
//! scan anchor grids, and run verification suites.
//!
//! Exit codes are a function of the outcome alone: 0 on success (including
//! classify runs whose membership holds or is not applicable), 1 on errors,
//! failed checks, or membership violations, and 2 when solve stops before
//! its target at a singular or degenerate point (the data is still written).

// Validation guards are written in the negated form (`!(a < b)`) so that
// NaN input falls into the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "abreu",
    version,
    about = "Radial similarity solutions of Abreu's fourth-order equation",
    after_help = "Exit codes: 0 success, 1 error or failed check, 2 solve stopped before its target."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate from an anchor state and write the trajectory
    Solve(SolveArgs),
    /// Integrate in one or both directions and report the end behaviour
    Classify(ClassifyArgs),
    /// Classify a grid of anchor values and tabulate the outcomes
    Scan(ScanArgs),
    /// Run a verification suite and print its pass/fail table
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Dimension n >= 1
    #[arg(long)]
    n: u32,
    /// Coefficient kappa
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    kappa: f64,
    /// Coefficient lambda
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Forward,
    Backward,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Oracles,
    Pde,
    Polytope,
    All,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Anchor radius
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    eps: f64,
    /// f at the anchor radius (with --fp)
    #[arg(long, allow_negative_numbers = true, requires = "fp", conflicts_with = "seed_origin")]
    f: Option<f64>,
    /// f' at the anchor radius (with --f)
    #[arg(long, allow_negative_numbers = true, requires = "f", conflicts_with = "seed_origin")]
    fp: Option<f64>,
    /// Origin expansion to seed from instead of --f/--fp:
    /// regular-a:f0=F,a=A | regular-b:f0=F | vanishing | exact-pole
    #[arg(long, value_name = "SPEC")]
    seed_origin: Option<String>,
    /// Radius to integrate to
    #[arg(long, allow_negative_numbers = true)]
    target: f64,
    /// Relative step tolerance (the absolute tolerance is tol/100)
    #[arg(long)]
    tol: Option<f64>,
    /// Trajectory output path; a .json sidecar lands next to it
    #[arg(long, short = 'o')]
    output: PathBuf,
    /// Table format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Anchor radius
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    eps: f64,
    /// f at the anchor radius (with --fp)
    #[arg(long, allow_negative_numbers = true, requires = "fp", conflicts_with = "seed_origin")]
    f: Option<f64>,
    /// f' at the anchor radius (with --f)
    #[arg(long, allow_negative_numbers = true, requires = "f", conflicts_with = "seed_origin")]
    fp: Option<f64>,
    /// Origin expansion to seed from instead of --f/--fp
    #[arg(long, value_name = "SPEC")]
    seed_origin: Option<String>,
    /// Relative step tolerance (the absolute tolerance is tol/100)
    #[arg(long)]
    tol: Option<f64>,
    /// Directions to classify
    #[arg(long, value_enum, default_value_t = Direction::Both)]
    direction: Direction,
    /// Report path (stdout when omitted)
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Anchor radius
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// f grid as lo:hi:steps (inclusive)
    #[arg(long, value_name = "LO:HI:STEPS", allow_hyphen_values = true)]
    f_range: String,
    /// f' grid as lo:hi:steps (inclusive)
    #[arg(long, value_name = "LO:HI:STEPS", allow_hyphen_values = true)]
    fp_range: String,
    /// Relative step tolerance (the absolute tolerance is tol/100)
    #[arg(long)]
    tol: Option<f64>,
    /// Table output path; a .json summary lands next to it
    #[arg(long, short = 'o')]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Checks to run
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Dimension for the pde and polytope suites
    #[arg(long)]
    n: Option<u32>,
    /// Coefficient kappa (pde suite)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    kappa: f64,
    /// Coefficient lambda (pde suite)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Anchor radius for the integrated pde check
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// f at the anchor (pde suite with lambda != 0 and n >= 2)
    #[arg(long, allow_negative_numbers = true, requires = "fp")]
    f: Option<f64>,
    /// f' at the anchor
    #[arg(long, allow_negative_numbers = true, requires = "f")]
    fp: Option<f64>,
    /// Cuboid bounds a1,b1,a2,b2,... for the polytope suite
    #[arg(long = "box", value_name = "BOUNDS", allow_hyphen_values = true)]
    box_spec: Option<String>,
    /// Seed for the random shell directions
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Clap's own error exit code is 2, which this tool reserves for
            // expected singular terminations; usage errors exit 1 instead.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve(args) => commands::cmd_solve(args),
        Command::Classify(args) => commands::cmd_classify(args),
        Command::Scan(args) => commands::cmd_scan(args),
        Command::Verify(args) => commands::cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
