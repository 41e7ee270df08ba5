//! Command-line front end. Exit codes: 0 success, 1 usage, 2 data, 3 degeneracy.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use robust_mean::{adaptive_estimate, estimate, LepskiConfig, Schedule};
use serde::Serialize;

use crate::config::BenchmarkConfig;
use crate::error::{HarnessError, Result};
use crate::io::{read_data, Format};
use crate::report::write_all;
use crate::trials::run_trials;

#[derive(Debug, Parser)]
#[command(
    name = "robust-mean",
    version,
    about = "Robust mean estimation from heavy-tailed or corrupted samples"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Fast,
    Subgaussian,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Fast => Schedule::Fast,
            ScheduleArg::Subgaussian => Schedule::Subgaussian,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the mean with a fixed number of blocks.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        u: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        output: Output,
        /// Report `wall_ms` as zero so that output is reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
    },
    /// Estimate with the number of blocks chosen adaptively.
    Lepski {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Trace of the covariance.
        #[arg(long)]
        trace: f64,
        /// Operator norm of the covariance.
        #[arg(long)]
        opnorm: f64,
        #[arg(long, value_enum, default_value = "fast")]
        schedule: ScheduleArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the Monte-Carlo trials of a config file and write reports to a directory.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write zero for every `wall_ms`.
        #[arg(long)]
        no_timing: bool,
        /// Write `curves.tsv` even if the config does not ask for it.
        #[arg(long)]
        tsv: bool,
    },
}

#[derive(Debug, Serialize)]
struct EstimateOutput<'a> {
    estimate: &'a [f64],
    iterations: usize,
    terminated_by: &'static str,
    wall_ms: f64,
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| HarnessError::Data(e.to_string()))
}

/// Runs a parsed command, returning what goes to stdout.
pub fn execute(cmd: Command) -> Result<String> {
    match cmd {
        Command::Estimate {
            input,
            format,
            k,
            u,
            seed,
            output: Output::Json,
            no_timing,
        } => {
            let data = read_data(&input, format)?;
            let start = Instant::now();
            let (est, trace) = estimate(&data, k, u, seed)?;
            let wall_ms = if no_timing {
                0.0
            } else {
                start.elapsed().as_secs_f64() * 1e3
            };
            to_json(&EstimateOutput {
                estimate: &est,
                iterations: trace.iterations(),
                terminated_by: trace.terminated_by.as_str(),
                wall_ms,
            })
        }
        Command::Lepski {
            input,
            format,
            trace,
            opnorm,
            schedule,
            seed,
        } => {
            let data = read_data(&input, format)?;
            let cfg = LepskiConfig::with_schedule(trace, opnorm, data.n(), schedule.into())?;
            to_json(&adaptive_estimate(&data, &cfg, seed)?)
        }
        Command::Benchmark {
            config,
            out,
            no_timing,
            tsv,
        } => {
            let cfg = BenchmarkConfig::load(&config)?;
            let results = run_trials(&cfg.trials, cfg.repetitions, cfg.seed, !no_timing)?;
            write_all(&results, &out, cfg.tsv || tsv)?;
            Ok(format!(
                "wrote {} trial rows to {}",
                results.len(),
                out.display()
            ))
        }
    }
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn run<I, A>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            let _ = writeln!(stdout, "{text}");
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
