//! Command-line front end: reads matrix and weight files, runs the computations and writes
//! CSV, JSON and SVG artifacts.

pub mod commands;
pub mod output;
pub mod svg;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use weighted_range::verify::DEFAULT_SEED;
use weighted_range::{ComplexMatrix, Error, WeightVector};

#[derive(Parser, Debug)]
#[command(name = "wrange", version, about = "Weighted numerical ranges of complex matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Number of sampled angles (power of two, at least 256)
    #[arg(long, global = true, default_value_t = 4096)]
    pub grid: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Off-diagonal tolerance of the Hermitian eigensolver
    #[arg(long, global = true)]
    pub tol_eig: Option<f64>,
    /// Relative tolerance for matching c-values
    #[arg(long, global = true)]
    pub tol_match: Option<f64>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Output formats (repeat or separate with commas); each command has its own default
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Boundary polygon of W(A;c)
    Boundary { matrix: PathBuf, weights: PathBuf },
    /// All c-values with their witnesses, and the c-polynomial
    Cvalues { matrix: PathBuf, weights: PathBuf },
    /// Coefficients of the c-polynomial
    Cpoly { matrix: PathBuf, weights: PathBuf },
    /// Support function sampled on the grid
    Support { matrix: PathBuf, weights: PathBuf },
    /// Common boundary points of W(A;c) and W(B;d)
    Intersect {
        a: PathBuf,
        c: PathBuf,
        b: PathBuf,
        d: PathBuf,
    },
    /// Check a coincidence theorem or corollary on the given inputs
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        /// Matrix and weight files: `A c [B d]` (`A` alone for nilpotent)
        inputs: Vec<PathBuf>,
        /// Random weight vectors tried by the nilpotent check
        #[arg(long, default_value_t = 16)]
        trials: usize,
    },
    /// Run the built-in fixtures and write their artifacts
    Demo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    EqualAngles,
    SupportingLines,
    BoundaryPoints,
    Circle,
    Ellipse,
    SharpPoints,
    Nilpotent,
    Overlap,
    EqualRanges,
}

/// Validated options.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub grid: usize,
    pub seed: u64,
    pub tol_eig: Option<f64>,
    pub tol_match: Option<f64>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

impl RunConfig {
    pub fn new(o: &Options) -> Result<Self, CliError> {
        if o.grid < 256 || !o.grid.is_power_of_two() {
            return Err(CliError::Input(format!(
                "--grid {} must be a power of two of at least 256",
                o.grid
            )));
        }
        for (name, tol) in [("--tol-eig", o.tol_eig), ("--tol-match", o.tol_match)] {
            if let Some(t) = tol {
                if !(t.is_finite() && t > 0.0) {
                    return Err(CliError::Input(format!("{name} {t} must be positive")));
                }
            }
        }
        Ok(Self {
            grid: o.grid,
            seed: o.seed,
            tol_eig: o.tol_eig,
            tol_match: o.tol_match,
            out: o.out.clone(),
            formats: o.format.clone(),
        })
    }

    /// Whether `f` was requested, falling back to `default` when no format was given.
    pub fn wants(&self, f: Format, default: &[Format]) -> bool {
        if self.formats.is_empty() {
            default.contains(&f)
        } else {
            self.formats.contains(&f)
        }
    }
}

/// How a successful run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Empty,
    Inconsistent,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input.
    Input(String),
    /// A library error, with the file or step it came from.
    Core { context: String, error: Error },
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core { context, error } => write!(f, "{context}: {error}"),
        }
    }
}

impl std::error::Error for CliError {}

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core {
                error:
                    Error::DimensionTooLarge { .. } | Error::DegreeTooLarge { .. } | Error::ScaleGuard { .. },
                ..
            } => EXIT_GUARD,
            _ => EXIT_PARSE,
        }
    }
}

pub fn exit_code(outcome: &Result<Outcome, CliError>) -> i32 {
    match outcome {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Empty) => EXIT_EMPTY,
        Ok(Outcome::Inconsistent) => EXIT_INCONSISTENT,
        Err(e) => e.exit_code(),
    }
}

pub(crate) fn core<T>(context: impl fmt::Display, r: weighted_range::Result<T>) -> Result<T, CliError> {
    r.map_err(|error| CliError::Core {
        context: context.to_string(),
        error,
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    core(path.display(), weighted_range::io::parse_matrix(&read_text(path)?))
}

pub fn read_weights(path: &Path) -> Result<WeightVector, CliError> {
    core(path.display(), weighted_range::io::parse_weights(&read_text(path)?))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = RunConfig::new(&cli.options)?;
    match &cli.command {
        Command::Boundary { matrix, weights } => commands::boundary(&cfg, matrix, weights),
        Command::Cvalues { matrix, weights } => commands::cvalues(&cfg, matrix, weights),
        Command::Cpoly { matrix, weights } => commands::cpoly(&cfg, matrix, weights),
        Command::Support { matrix, weights } => commands::support(&cfg, matrix, weights),
        Command::Intersect { a, c, b, d } => commands::intersect(&cfg, [a, c, b, d]),
        Command::Verify {
            theorem,
            inputs,
            trials,
        } => commands::verify(&cfg, *theorem, inputs, *trials),
        Command::Demo => commands::demo(&cfg),
    }
}
