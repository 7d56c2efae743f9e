//! `qreg`: sparse regression under q-normal errors from the command line.

mod config;
mod data;
mod experiment;
mod fit;
mod qmath;
mod select;
mod summarize;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qreg_core::solver::{PathConfig, PenaltyKind, PenaltySpec, DEFAULT_MCP_GAMMA, DEFAULT_SCAD_A};

/// Bad flags, bad input files or out-of-domain arguments. Exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Parser, Debug)]
#[command(name = "qreg", version, about = "LASSO/SCAD/MCP under q-normal errors with L_q-likelihood model selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a regularization path and write the path table as CSV.
    Fit(fit::FitArgs),
    /// Pick one model from a path with an information criterion or CV; prints JSON.
    Select(select::SelectArgs),
    /// Run a Monte-Carlo experiment grid from a TOML config.
    Experiment(experiment::ExperimentArgs),
    /// Evaluate q-logarithm, q-exponential, density, Z_q or draw samples.
    Qmath(qmath::QmathArgs),
    /// Print best-over-criteria tables from experiment outputs.
    Summarize(summarize::SummarizeArgs),
}

/// Penalty and path settings shared by `fit` and `select`.
#[derive(Args, Debug, Clone)]
pub struct PathArgs {
    /// lasso, scad or mcp
    #[arg(long, default_value = "mcp")]
    pub penalty: String,
    /// SCAD shape parameter
    #[arg(long, default_value_t = DEFAULT_SCAD_A)]
    pub a: f64,
    /// MCP shape parameter
    #[arg(long, default_value_t = DEFAULT_MCP_GAMMA)]
    pub gamma: f64,
    #[arg(long, default_value_t = 100)]
    pub n_lambda: usize,
    /// Defaults to 0.001 when n > d, else 0.05
    #[arg(long)]
    pub lambda_min_ratio: Option<f64>,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

impl PathArgs {
    pub fn spec(&self) -> anyhow::Result<PenaltySpec> {
        let kind: PenaltyKind = match self.penalty.parse() {
            Ok(k) => k,
            Err(e) => return usage(e.to_string()),
        };
        let spec = PenaltySpec { kind, a: self.a, gamma: self.gamma };
        spec.validated().or_else(|e| usage(e.to_string()))
    }

    pub fn config(&self) -> anyhow::Result<PathConfig> {
        let config = PathConfig {
            n_lambda: self.n_lambda,
            lambda_min_ratio: self.lambda_min_ratio,
            tol: self.tol,
            max_iter: self.max_iter,
        };
        config.validate().or_else(|e| usage(e.to_string()))?;
        Ok(config)
    }
}

/// Input CSV and response column shared by `fit` and `select`.
#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// CSV with a header row
    pub input: PathBuf,
    /// Response column name; defaults to the last column
    #[arg(long)]
    pub response: Option<String>,
    /// Write to this file instead of standard output
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Fit(args) => fit::run(&args),
        Command::Select(args) => select::run(&args),
        Command::Experiment(args) => experiment::run(&args),
        Command::Qmath(args) => qmath::run(&args),
        Command::Summarize(args) => summarize::run(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
