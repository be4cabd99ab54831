//! `fvr`: rotation conversion, representation benchmarks, FVR grid search,
//! box-cage augmentation and pose evaluation.
//!
//! Exit codes: 0 success, 1 usage error (flags, config, input files),
//! 2 computation failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod augment;
mod bench;
mod config;
mod convert;
mod error;
mod eval;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fvr_core::fvr::FvrParams;
use fvr_core::regressor::Representation;

use crate::config::{AugmentConfig, BenchConfig, EvalSection, GridConfig};
use crate::error::{usage, CliError, CliResult};

#[derive(Parser)]
#[command(name = "fvr", version, about = "Rotation representation experiments and pose metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert one rotation between representations and print it.
    ///
    /// Value counts: matrix 9 (row-major), quaternion 4 (w x y z), euler 3
    /// (yaw pitch roll, radians, ZYX), axis_angle 4 (unit axis, angle),
    /// r6d 6 (first two columns), fvr 12 (green start, green end, red start,
    /// red end).
    #[command(allow_negative_numbers = true)]
    Convert {
        #[arg(long, value_parser = parse_rep)]
        from: Representation,
        #[arg(long, value_parser = parse_rep)]
        to: Representation,
        /// FVR vector length L (both vectors).
        #[arg(long, default_value_t = 1.0)]
        fvr_length: f64,
        /// FVR θ_g in degrees.
        #[arg(long, default_value_t = 0.0)]
        fvr_theta_g: f64,
        /// FVR θ_r in degrees.
        #[arg(long, default_value_t = 0.0)]
        fvr_theta_r: f64,
        #[arg(required = true)]
        values: Vec<f64>,
    },
    /// Train the regressor for every representation × mode × seed in a config.
    BenchRep {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write wall-clock times to timing.csv.
        #[arg(long)]
        timing: bool,
    },
    /// Sequential L / θ_g / θ_r grid search over FVR parameters.
    GridSearch {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write seeded box-cage deformations of an object point cloud.
    Augment {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predicted poses against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Object model points, one `x y z` per line.
        #[arg(long)]
        model: PathBuf,
        /// Optional TOML with thresholds, IoU samples and seed.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_rep(s: &str) -> Result<Representation, String> {
    s.parse().map_err(|e: fvr_core::Error| e.to_string())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Convert {
            from,
            to,
            fvr_length,
            fvr_theta_g,
            fvr_theta_r,
            values,
        } => {
            let p = FvrParams::from_degrees(fvr_length, fvr_theta_g, fvr_theta_r).map_err(usage)?;
            print!("{}", convert::run(from, to, &values, &p)?);
            Ok(())
        }
        Command::BenchRep { config, out, timing } => {
            let plan = config::load::<BenchConfig>(&config)?.plan()?;
            let outcome = bench::run(&plan, &out, timing)?;
            if outcome.failed > 0 {
                return Err(CliError::Compute(format!(
                    "{} of {} cells failed",
                    outcome.failed, outcome.cells
                )));
            }
            Ok(())
        }
        Command::GridSearch { config, out } => {
            let cfg = config::load::<GridConfig>(&config)?;
            let (train, spec) = cfg.plan()?;
            grid::run(&cfg.experiment_id, &train, &spec, &out)
        }
        Command::Augment { config, out } => {
            let cfg = config::load::<AugmentConfig>(&config)?;
            augment::run(&cfg, &config, &out)
        }
        Command::Eval {
            pred,
            gt,
            model,
            config,
            out,
        } => {
            let section = match &config {
                Some(p) => config::load::<EvalSection>(p)?,
                None => EvalSection::default(),
            };
            let cfg = section.to_config()?;
            let inputs = eval::EvalInputs {
                pred: &pred,
                gt: &gt,
                model: &model,
            };
            eval::run(&inputs, &cfg, &out).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
