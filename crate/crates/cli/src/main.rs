//! `cknball` — batch front end for weighted variational computations on the
//! Poincaré ball: best-constant estimation, ground-state solves, the
//! verification suite, Pohozaev diagnostics and parameter sweeps.

mod commands;
mod output;
mod settings;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use settings::Settings;

/// Exit codes of the tool.
pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;
pub const EXIT_VERIFICATION: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        CliError {
            code: EXIT_ERROR,
            message,
        }
    }

    pub fn io(message: String) -> Self {
        CliError {
            code: EXIT_ERROR,
            message,
        }
    }

    pub fn validation(violations: &[cknball::Violation]) -> Self {
        // machine-readable violation list on one line
        let json = serde_json::to_string(violations).unwrap_or_else(|_| "[]".into());
        CliError {
            code: EXIT_VALIDATION,
            message: format!("validation failed: {json}"),
        }
    }

    pub fn from_core(err: cknball::Error) -> Self {
        match err {
            cknball::Error::Validation(v) => Self::validation(&v),
            cknball::Error::NonConvergence { .. } => CliError {
                code: EXIT_NONCONVERGENCE,
                message: err.to_string(),
            },
            other => CliError {
                code: EXIT_ERROR,
                message: other.to_string(),
            },
        }
    }
}

impl From<cknball::Error> for CliError {
    fn from(e: cknball::Error) -> Self {
        CliError::from_core(e)
    }
}

#[derive(Parser)]
#[command(
    name = "cknball",
    version,
    about = "Weighted variational toolkit on the Poincaré ball: constants, ground states, verification, Pohozaev probes, sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate CKN best constants and quotient floors for (a, b)
    Constant(CommonArgs),
    /// Compute the positive radial ground state for (alpha, beta, lambda, q)
    Solve(CommonArgs),
    /// Run the named verification checks and emit a pass/fail table
    Verify(CommonArgs),
    /// Verify the ball identity at subcritical p, or probe supercritical collapse
    Pohozaev(CommonArgs),
    /// Cartesian sweep over (a, b) or (alpha, beta, lambda, q) ranges
    Sweep(CommonArgs),
}

/// Shared flags. Values may also come from `--config`; command-line values
/// take precedence. Range-valued flags (`start:stop:count`) drive `sweep`.
#[derive(Args, Clone)]
struct CommonArgs {
    /// dimension N >= 3
    #[arg(long = "N")]
    n: Option<String>,
    /// CKN parameter a (or range)
    #[arg(long)]
    a: Option<String>,
    /// CKN parameter b (or range)
    #[arg(long)]
    b: Option<String>,
    /// gradient-weight exponent alpha (or range)
    #[arg(long)]
    alpha: Option<String>,
    /// nonlinearity-weight exponent beta (or range)
    #[arg(long)]
    beta: Option<String>,
    /// Hardy coefficient lambda (or range)
    #[arg(long)]
    lambda: Option<String>,
    /// subcritical exponent q (or range)
    #[arg(long)]
    q: Option<String>,
    /// Dirichlet/Pohozaev exponent p
    #[arg(long)]
    p: Option<String>,
    /// target grid node count
    #[arg(long = "grid-n")]
    grid_n: Option<String>,
    /// truncation radius (geodesic)
    #[arg(long)]
    tmax: Option<String>,
    /// stationarity tolerance
    #[arg(long)]
    tol: Option<String>,
    /// iteration budget
    #[arg(long = "max-iter")]
    max_iter: Option<String>,
    /// output directory
    #[arg(long)]
    out: Option<String>,
    /// comma list of output formats: csv,json,svg
    #[arg(long)]
    format: Option<String>,
    /// parallel sweep cells
    #[arg(long)]
    jobs: Option<String>,
    /// comma list of check-name fragments for verify
    #[arg(long)]
    checks: Option<String>,
    /// key = value config file (command-line flags override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// concentrating-family size for probes
    #[arg(long = "family-size")]
    family_size: Option<String>,
    /// verification fault hook: scale quadrature weight INDEX by FACTOR
    /// (format: INDEX:FACTOR)
    #[arg(long = "inject-fault")]
    inject_fault: Option<String>,
}

impl CommonArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        Settings::resolve(
            self.config.as_deref(),
            vec![
                ("N", self.n.clone()),
                ("a", self.a.clone()),
                ("b", self.b.clone()),
                ("alpha", self.alpha.clone()),
                ("beta", self.beta.clone()),
                ("lambda", self.lambda.clone()),
                ("q", self.q.clone()),
                ("p", self.p.clone()),
                ("grid-n", self.grid_n.clone()),
                ("tmax", self.tmax.clone()),
                ("tol", self.tol.clone()),
                ("max-iter", self.max_iter.clone()),
                ("out", self.out.clone()),
                ("format", self.format.clone()),
                ("jobs", self.jobs.clone()),
                ("checks", self.checks.clone()),
                ("family-size", self.family_size.clone()),
                ("inject-fault", self.inject_fault.clone()),
            ],
        )
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<u8, CliError> {
        match &cli.command {
            Command::Constant(args) => commands::constant::run(&args.settings()?),
            Command::Solve(args) => commands::solve::run(&args.settings()?),
            Command::Verify(args) => commands::verify::run(&args.settings()?),
            Command::Pohozaev(args) => commands::pohozaev::run(&args.settings()?),
            Command::Sweep(args) => commands::sweep::run(&args.settings()?),
        }
    };
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
