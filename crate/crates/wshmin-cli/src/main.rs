//! `wshmin`: smallest-eigenvalue distributions of complex Wishart matrices.
//!
//! Exit codes: 0 on success (and all `verify` checks passing), 1 when a
//! value fails validation or a computation refuses to certify, 2 for a
//! malformed command line (clap's default).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wshmin_cli::grid::{parse_grid, GridSpec};
use wshmin_cli::run::{
    run_cdf, run_correction, run_limit, run_mc, run_softedge, run_verify, CdfSpec,
    CorrectionSpec, LimitSpec, McSpec, PrecisionArg, RunError, SoftedgeSpec, VerifySpec,
};
use wshmin_cli::table::OutputFormat;

#[derive(Parser)]
#[command(
    name = "wshmin",
    version,
    about = "Smallest-eigenvalue distributions of complex Wishart matrices",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Working precision; overrides the WSHART_PRECISION environment
    /// variable when given.
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
    /// Output format for the rendered table.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact gap probability F_N, density, and log-derivative H_N on a t grid.
    Cdf {
        /// Matrix size N.
        #[arg(long = "N")]
        n: u32,
        /// Rectangularity a = M - N (any real >= 0).
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        /// Evaluation grid, start:stop:count inclusive.
        #[arg(long = "t-grid", value_parser = parse_grid, allow_hyphen_values = true)]
        t_grid: GridSpec,
        #[command(flatten)]
        common: Common,
        /// Write the table here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Hard-edge limit functions f(x) and F_inf(x) on an x grid.
    Limit {
        /// Rectangularity a (integer required with --bessel).
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "x-grid", value_parser = parse_grid, allow_hyphen_values = true)]
        x_grid: GridSpec,
        /// Take f from the Bessel determinant closed form instead of the
        /// differential equation; F_inf stays equation-based either way.
        #[arg(long)]
        bessel: bool,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Finite-size correction to the hard-edge limit at fixed N.
    Correction {
        #[arg(long = "N")]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "x-grid", value_parser = parse_grid, allow_hyphen_values = true)]
        x_grid: GridSpec,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Soft-edge (Tracy-Widom) distribution and correction profiles.
    Softedge {
        #[arg(long = "x-grid", value_parser = parse_grid, allow_hyphen_values = true)]
        x_grid: GridSpec,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo sampling of the smallest eigenvalue.
    Mc {
        #[arg(long = "N")]
        n: u32,
        /// Rectangularity a = M - N; the sampler needs an integer.
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        /// Total sample count, independent of the stream count.
        #[arg(long, default_value_t = 300_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; affects wall time only, never the samples.
        #[arg(long, default_value_t = 1)]
        streams: u32,
        /// Binary dump destination (64-byte header + little-endian f64s).
        #[arg(long)]
        output: PathBuf,
        /// Also write the samples as a CSV table here.
        #[arg(long = "export-csv")]
        export_csv: Option<PathBuf>,
        /// Abscissas x for the correction diagnostic (evaluated at t = x/N).
        #[arg(long = "diag-grid", value_parser = parse_grid, allow_hyphen_values = true)]
        diag_grid: Option<GridSpec>,
        #[command(flatten)]
        common: Common,
    },
    /// Identity and oracle cross-checks at one (N, a, t) point.
    Verify {
        #[arg(long = "N")]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(target: &Option<PathBuf>, text: &str) -> Result<(), RunError> {
    match target {
        Some(path) => fs::write(path, text).map_err(RunError::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, RunError> {
    match cli.cmd {
        Cmd::Cdf { n, a, t_grid, common, output } => {
            let text = run_cdf(&CdfSpec {
                n,
                a,
                grid: t_grid,
                precision: common.precision,
                format: common.format,
            })?;
            emit(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Limit { a, x_grid, bessel, common, output } => {
            let text = run_limit(&LimitSpec {
                a,
                grid: x_grid,
                bessel,
                precision: common.precision,
                format: common.format,
            })?;
            emit(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Correction { n, a, x_grid, common, output } => {
            let text = run_correction(&CorrectionSpec {
                n,
                a,
                grid: x_grid,
                precision: common.precision,
                format: common.format,
            })?;
            emit(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Softedge { x_grid, common, output } => {
            let text = run_softedge(&SoftedgeSpec {
                grid: x_grid,
                precision: common.precision,
                format: common.format,
            })?;
            emit(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Mc { n, a, samples, seed, streams, output, export_csv, diag_grid, common } => {
            let text = run_mc(&McSpec {
                n,
                a,
                samples,
                seed,
                streams,
                output,
                export_csv,
                diag_grid,
                precision: common.precision,
                format: common.format,
            })?;
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { n, a, t, common, output } => {
            let outcome = run_verify(&VerifySpec {
                n,
                a,
                t,
                precision: common.precision,
                format: common.format,
            })?;
            emit(&output, &outcome.rendered)?;
            Ok(if outcome.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
