//! `gsht`: Gaunt table generation, verification sweeps and application demos.
//!
//! Exit codes: 0 success, 1 verification failure, 2 I/O error, 3 invalid
//! configuration.

/// `println!` that reports a closed stdout as an error instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        writeln!(std::io::stdout(), $($arg)*)?
    }};
}

mod demo;
mod oracle;
mod tables;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaunt_core::wigner::FactorialPath;

/// Largest order accepted without `--allow-large`.
pub const MAX_ORDER: usize = 30;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed")]
    VerifyFailed,
    #[error(transparent)]
    Core(gaunt_core::Error),
}

impl From<gaunt_core::Error> for CliError {
    fn from(e: gaunt_core::Error) -> Self {
        match e {
            gaunt_core::Error::Io(io) => CliError::Io(io),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Io(_) => 2,
            CliError::Core(gaunt_core::Error::Format(_) | gaunt_core::Error::Checksum { .. }) => 2,
            CliError::Config(_) | CliError::Core(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "gsht",
    version,
    about = "Gaunt coefficient tables, verification sweeps and spherical-acoustics demos"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build Gaunt coupling tables and write them to a file or stdout.
    Tables(TablesArgs),
    /// Run closed-form vs. quadrature verification suites.
    Verify(VerifyArgs),
    /// Evaluate one application formula and compare it with quadrature.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Complex,
    Real,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Exact,
    Fast,
}

impl From<PathArg> for FactorialPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Exact => FactorialPath::Exact,
            PathArg::Fast => FactorialPath::Fast,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Binary,
    Json,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    /// Maximum order of the first factor.
    #[arg(long, default_value_t = 3)]
    pub n1: usize,
    /// Maximum order of the second factor.
    #[arg(long, default_value_t = 3)]
    pub n2: usize,
    /// Accept orders above 30.
    #[arg(long)]
    pub allow_large: bool,
}

impl OrderArgs {
    fn check(&self) -> CliResult<()> {
        check_order(self.n1.max(self.n2), self.allow_large)
    }
}

pub fn check_order(order: usize, allow_large: bool) -> CliResult<()> {
    if order > MAX_ORDER && !allow_large {
        return Err(CliError::Config(format!(
            "order {order} exceeds {MAX_ORDER}; pass --allow-large to proceed"
        )));
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[command(flatten)]
    pub orders: OrderArgs,
    #[arg(long, value_enum, default_value_t = BasisArg::Real)]
    pub basis: BasisArg,
    #[arg(long, value_enum, default_value_t = PathArg::Exact)]
    pub factorial_path: PathArg,
    /// Output file; stdout when omitted. With `--basis both --format binary`
    /// the basis name is appended to the file stem.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Binary)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    SelectionRules,
    Symmetry,
    Unitarity,
    GauntOracle,
    Multiplication,
    Applications,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub orders: OrderArgs,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Tolerance for the exact-arithmetic suites. The applications suite uses
    /// fixed per-check tolerances.
    #[arg(long, default_value_t = 1e-11)]
    pub tolerance: f64,
    /// Quadrature band limit for oracles; default 3 (N1 + N2).
    #[arg(long)]
    pub grid_band: Option<usize>,
    #[arg(long, value_enum, default_value_t = PathArg::Exact)]
    pub factorial_path: PathArg,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Translate,
    Intensity,
    EnergyVector,
    Window,
    Beamform,
    DiffuseScm,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub name: DemoName,
    /// Sound-field order.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Direction as `theta,phi` in radians (inclination, azimuth).
    #[arg(long, value_parser = parse_direction)]
    pub direction: Option<(f64, f64)>,
    /// Wavenumber-distance product.
    #[arg(long, default_value_t = 1.0)]
    pub kd: f64,
    /// Plane-wave expansion order; defaults to the truncation rule with margin.
    #[arg(long)]
    pub expansion: Option<usize>,
    /// Sensor spacing in metres (diffuse-scm).
    #[arg(long, default_value_t = 0.1)]
    pub spacing: f64,
    /// Frequency in Hz (diffuse-scm); sets kd with c = 343 m/s.
    #[arg(long)]
    pub freq: Option<f64>,
    /// Seed for random inputs.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub allow_large: bool,
    #[arg(long)]
    pub json: bool,
}

fn parse_direction(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected theta,phi, got {s:?}"));
    }
    let parse = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    Ok((parse(parts[0])?, parse(parts[1])?))
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("GSHT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        CliError::Config(format!(
            "GSHT_THREADS={raw:?} is not a non-negative integer"
        ))
    })?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Tables(args) => tables::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Demo(args) => demo::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let quiet = match &e {
                CliError::VerifyFailed => true,
                CliError::Io(io) => io.kind() == std::io::ErrorKind::BrokenPipe,
                _ => false,
            };
            if !quiet {
                eprintln!("gsht: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_parsing() {
        assert_eq!(parse_direction("0.5,1.2"), Ok((0.5, 1.2)));
        assert_eq!(parse_direction(" 1 , -2 "), Ok((1.0, -2.0)));
        assert!(parse_direction("1").is_err());
        assert!(parse_direction("a,b").is_err());
    }

    #[test]
    fn order_cap() {
        assert!(check_order(30, false).is_ok());
        assert!(matches!(check_order(31, false), Err(CliError::Config(_))));
        assert!(check_order(31, true).is_ok());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::VerifyFailed.exit_code(), 1);
        assert_eq!(CliError::Io(std::io::Error::other("x")).exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 3);
        assert_eq!(CliError::from(gaunt_core::Error::ZeroEnergy).exit_code(), 3);
    }
}
