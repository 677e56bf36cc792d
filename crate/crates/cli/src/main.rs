//! `uvkit` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 invariant violation.
//! `UVT_THREADS` caps the worker pool.

mod args;
mod commands;
mod error;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "uvkit", version, about = "Continuous UV atlases, location maps and IUV supervision data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cut, flatten and symmetrize a closed mesh into a continuous atlas.
    Param(commands::param::ParamArgs),
    /// Score atlases against the surface distance matrix (S1, S2).
    CompareUv(commands::compare::CompareArgs),
    /// Generate IUV / location / weight supervision from a manifest.
    Factory(commands::factory::FactoryArgs),
    /// Evaluate predictions against ground truth.
    Eval(commands::eval::EvalArgs),
    /// Rasterize a mesh into a UV-space location map.
    Encode(commands::codec::EncodeArgs),
    /// Reconstruct vertices from a location map.
    Decode(commands::codec::DecodeArgs),
    /// Render a ground-truth IUV image through a weak-perspective camera.
    RenderIuv(commands::codec::RenderArgs),
    /// Move grids between image space and UV space.
    Transfer(commands::codec::TransferArgs),
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("UVT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("UVT_THREADS={value} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Param(a) => commands::param::run(&a),
        Command::CompareUv(a) => commands::compare::run(&a),
        Command::Factory(a) => commands::factory::run(&a),
        Command::Eval(a) => commands::eval::run(&a),
        Command::Encode(a) => commands::codec::encode(&a),
        Command::Decode(a) => commands::codec::decode(&a),
        Command::RenderIuv(a) => commands::codec::render(&a),
        Command::Transfer(a) => commands::codec::transfer(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
