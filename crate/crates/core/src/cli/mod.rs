//! Command-line front end.
//!
//! Exit codes: 0 success, 1 selftest failure, 2 invalid input, 3 numerical
//! failure. Errors are reported as a single line on stderr.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charfn::CharFnError;
use crate::classify::ClassifyError;
use crate::critcurve::CurveError;
use crate::fde::FdeError;
use crate::fhn::FhnError;

pub use commands::{
    AstarArgs, BranchArgs, ClassifyArgs, CurveArgs, HopfArgs, RegionsArgs, RhpCountArgs, SelftestArgs, SimulateArgs,
};

pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("selftest failed: {0}")]
    SelftestFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::SelftestFailed(_) => 1,
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::InvalidInput(_) | ClassifyError::Curve(_) => CliError::Validation(e.to_string()),
            ClassifyError::Oracle(inner) => inner.into(),
        }
    }
}

impl From<CharFnError> for CliError {
    fn from(e: CharFnError) -> Self {
        match e {
            CharFnError::InvalidInput(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<FhnError> for CliError {
    fn from(e: FhnError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<FdeError> for CliError {
    fn from(e: FdeError) -> Self {
        match e {
            FdeError::InvalidProblem(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Clone, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Globals {
    /// Output format (default depends on the command)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Significant digits of floating-point output
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    /// Write the artifact here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized suites
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(name = "fracstab", version, about = "Stability of incommensurate fractional-order systems")]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    /// JSON object of parameters; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stability verdict for a 2x2 matrix or for (a, b, c)
    Classify(ClassifyArgs),
    /// Critical value a*(b) for given (c, q1, q2)
    Astar(AstarArgs),
    /// Samples (omega, b, a) of the critical curve
    Curve(CurveArgs),
    /// Order-independent regions on a grid of the (b, a) plane
    Regions(RegionsArgs),
    /// Hopf curve of the FitzHugh-Nagumo equilibrium in the (q1, q2) plane
    Hopf(HopfArgs),
    /// FitzHugh-Nagumo equilibria against the external current
    Branch(BranchArgs),
    /// Integrates the fractional FitzHugh-Nagumo system
    Simulate(SimulateArgs),
    /// Right half-plane root count by the argument principle
    RhpCount(RhpCountArgs),
    /// Cross-validation of the classifier, the curve and the FHN anchors
    Selftest(SelftestArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::Astar(_) => "astar",
            Command::Curve(_) => "curve",
            Command::Regions(_) => "regions",
            Command::Hopf(_) => "hopf",
            Command::Branch(_) => "branch",
            Command::Simulate(_) => "simulate",
            Command::RhpCount(_) => "rhp-count",
            Command::Selftest(_) => "selftest",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Classify(_) | Command::Astar(_) | Command::RhpCount(_) | Command::Selftest(_) => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Resolved global settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub format: Format,
    pub precision: usize,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

/// What a command produced: the artifact text and an optional error raised
/// after (part of) the artifact was built.
pub struct Outcome {
    pub artifact: String,
    pub error: Option<CliError>,
}

impl From<String> for Outcome {
    fn from(artifact: String) -> Self {
        Self { artifact, error: None }
    }
}

fn resolve(cli: Cli) -> Result<(Command, Settings), CliError> {
    let Cli { globals, config, command } = cli;
    let name = command.name();
    let (globals, command) = match config {
        None => (globals, command),
        Some(path) => {
            let (g, params) = config::split(config::load(&path)?, name)?;
            (config::merge(&globals, g)?, commands::merge_params(command, params)?)
        }
    };
    let precision = globals.precision.unwrap_or(DEFAULT_PRECISION);
    if !(1..=17).contains(&precision) {
        return Err(CliError::Validation(format!("precision must lie in 1..=17, got {precision}")));
    }
    let settings = Settings {
        format: globals.format.unwrap_or(command.default_format()),
        precision,
        output: globals.output,
        seed: globals.seed.unwrap_or(0),
    };
    Ok((command, settings))
}

fn emit(artifact: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, artifact)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(artifact.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Validation(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Runs a parsed command line and writes its artifact.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let (command, settings) = resolve(cli)?;
    let outcome = commands::execute(&command, &settings)?;
    emit(&outcome.artifact, settings.output.as_deref())?;
    outcome.error.map_or(Ok(()), Err)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fracstab: {e}");
            e.exit_code()
        }
    }
}
