//! Command-line front end: solves, meshes, sweeps and verifications.
//!
//! Exit codes: 0 success, 1 failed verification or invalid input,
//! 2 solver or build failure, 3 I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

mod commands;
pub mod json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    /// Solver or build failure with its diagnostic record.
    Solver(Value),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_FAIL,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hexcmc", version, about = "Polyhedral CMC surfaces for the hexagonal prism norm")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a Delaunay period or the assembly vertex system.
    Solve(SolveArgs),
    /// Export a surface as OBJ with a JSON sidecar.
    Mesh(MeshArgs),
    /// Run a verification and print its report.
    #[command(subcommand)]
    Verify(VerifyTarget),
    /// Solve a Delaunay branch at many values of r and write CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveKind {
    Unduloid,
    Nodoid,
    Assembly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshKind {
    Unduloid,
    Nodoid,
    Wulff,
    Assembly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainKind {
    Unduloid,
    Nodoid,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub kind: SolveKind,
    /// Tube width r, or r1 for the assembly.
    #[arg(long)]
    pub r: Option<f64>,
    /// Largest accepted residual norm.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Assembly only: pick r1 so that sides and diagonals close up.
    #[arg(long)]
    pub fit: bool,
    /// Assembly only: unduloid periods per side.
    #[arg(long, default_value_t = 3)]
    pub m_u: usize,
    /// Assembly only: nodoid periods per diagonal (default 2 m_u + 1).
    #[arg(long)]
    pub m_n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long, value_enum)]
    pub kind: MeshKind,
    /// JSON written by `solve`.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Solve inline at this r (unduloid and nodoid only).
    #[arg(long)]
    pub r: Option<f64>,
    /// OBJ path; the sidecar goes to `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    /// Ratio inequality on subregions of an annulus.
    Lemma(LemmaArgs),
    /// Nonnegativity of the first-variation functional on random test functions.
    Variation(VariationArgs),
    /// Mean-curvature residual of every face class.
    Curvature(CurvatureArgs),
}

#[derive(Debug, Args)]
pub struct AnnulusArgs {
    #[arg(long, default_value_t = 1.0)]
    pub x1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub y1: f64,
    /// Half-width and half-height of the hole.
    #[arg(long, default_value_t = 0.05)]
    pub hole: f64,
    /// Hole half-width; overrides --hole.
    #[arg(long)]
    pub x0: Option<f64>,
    /// Hole half-height; overrides --hole.
    #[arg(long)]
    pub y0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    #[command(flatten)]
    pub annulus: AnnulusArgs,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Grid resolution of the exhaustive rectangle enumeration (1 to 12).
    #[arg(long, default_value_t = 12)]
    pub resolution: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VariationArgs {
    #[command(flatten)]
    pub annulus: AnnulusArgs,
    /// Number of random test functions.
    #[arg(long, default_value_t = 1000)]
    pub functions: usize,
    /// Grid cells per side.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    /// JSON written by `solve`.
    #[arg(long, conflicts_with = "wulff")]
    pub surface: Option<PathBuf>,
    /// Check the Wulff prism instead.
    #[arg(long)]
    pub wulff: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: ChainKind,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long)]
    pub r: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub sequential: bool,
}

/// Output of one command: text for the report destination and an exit code.
pub(crate) struct Report {
    pub text: String,
    pub code: i32,
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn deliver(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, text),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn out_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Solve(a) => a.out.as_deref(),
        // mesh writes its own files; its failures go to stdout
        Command::Mesh(_) => None,
        Command::Verify(VerifyTarget::Lemma(a)) => a.out.as_deref(),
        Command::Verify(VerifyTarget::Variation(a)) => a.out.as_deref(),
        Command::Verify(VerifyTarget::Curvature(a)) => a.out.as_deref(),
        // no CSV on failure
        Command::Sweep(_) => None,
    }
}

/// Runs one parsed command, writing reports to `out` paths or `stdout` and
/// diagnostics to `stderr`. Returns the exit code.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Mesh(a) => commands::mesh(a),
        Command::Verify(VerifyTarget::Lemma(a)) => commands::lemma(a),
        Command::Verify(VerifyTarget::Variation(a)) => commands::variation(a),
        Command::Verify(VerifyTarget::Curvature(a)) => commands::curvature(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    let sink = out_path(&cli.command);
    match result {
        Ok(report) => match deliver(if report.text.is_empty() { None } else { sink }, &report.text, stdout) {
            Ok(()) => report.code,
            Err(e) => fail(e, stderr),
        },
        Err(CliError::Solver(record)) => {
            let text = json::to_text(&record);
            let _ = writeln!(stderr, "error: {}", record.get("error").and_then(Value::as_str).unwrap_or("solver failure"));
            match deliver(sink, &text, stdout) {
                Ok(()) => EXIT_SOLVER,
                Err(e) => fail(e, stderr),
            }
        }
        Err(e) => fail(e, stderr),
    }
}

fn fail(e: CliError, stderr: &mut dyn Write) -> i32 {
    match &e {
        CliError::Invalid(m) => {
            let _ = writeln!(stderr, "error: {m}");
        }
        CliError::Io(m) => {
            let _ = writeln!(stderr, "I/O error: {m}");
        }
        CliError::Solver(v) => {
            let _ = writeln!(stderr, "error: {v}");
        }
    }
    e.code()
}

/// Parses `args` (program name first) and runs the command. Unknown or
/// malformed flags exit with 1; `--help` and `--version` exit with 0.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAIL } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            code
        }
    }
}
