//! `soliton-forge`: solve, verify, flow, transform and sweep translating
//! solitons from the command line.
//!
//! Exit status: 0 on success, 2 when a verification fails, 1 on usage or
//! runtime errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{flow, isometry, soliton, sweep, verify};
use config::Context;
use failure::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "soliton-forge",
    version,
    about = "Translating solitons of mean curvature flow in ℝ × P",
    long_about = "Solves bowl, wing, ideal and grim-reaper solitons, checks them against \
                  independent identities, runs graphical mean curvature flow and applies \
                  hyperbolic isometries. Options given as flags override the --config JSON, \
                  which overrides built-in defaults."
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// JSON object of option defaults, keyed by long flag name with `_` for `-`.
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Relative tolerance of the adaptive integrator.
    #[arg(long = "tol-rel", global = true, value_name = "TOL")]
    pub tol_rel: Option<f64>,
    /// Absolute tolerance of the adaptive integrator.
    #[arg(long = "tol-abs", global = true, value_name = "TOL")]
    pub tol_abs: Option<f64>,
    /// Seed of the randomised checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one soliton and export profile, mesh and diagnostics.
    Soliton(soliton::SolitonArgs),
    /// Run the diagnostics suite on a profile CSV with its JSON sidecar.
    Verify(verify::VerifyArgs),
    /// Radial graphical mean curvature flow and its weighted area.
    Flow(flow::FlowArgs),
    /// Apply a hyperbolic or parabolic translation to points or a mesh.
    Isometry(isometry::IsometryArgs),
    /// Solve a grid of ε or c values in parallel.
    Sweep(sweep::SweepArgs),
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = Context::new(&cli.global)?;
    match cli.command {
        Command::Soliton(args) => soliton::run(&ctx, &args),
        Command::Verify(args) => verify::run(&ctx, &args),
        Command::Flow(args) => flow::run(&ctx, &args),
        Command::Isometry(args) => isometry::run(&ctx, &args),
        Command::Sweep(args) => sweep::run(&ctx, &args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code())
        }
    }
}
