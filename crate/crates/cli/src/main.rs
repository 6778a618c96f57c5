//! `toricdyn`: profiles, degree sequences, rotation and equidistribution
//! reports for toric surface maps.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "toricdyn", version, about = "Dynamics of toric surface maps")]
#[command(after_help = "\
Words compose right to left: \"g.m[1,-2;2,1]\" applies m[1,-2;2,1] first.
Letters: g (standard involution), m[a,b;c,d] (monomial map),
t[y1,y2] (torus translation), user:FILE (JSON map file).

CSV columns:
  degrees       n,degree,ratio,root[,oracle,equal]
  oracle-check  n,class,oracle,equal
  equidist      n,e_n
  ronkin        direction,angle,ronkin,newton,deviation

Exit codes: 0 success, 1 usage or input error, 2 a property check failed.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Opts {
    /// Iterations (degree sequence length, rotation steps, Cesaro length).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Maximum number of rays in a working fan.
    #[arg(long, global = true, default_value_t = 512)]
    pub budget_rays: usize,
    /// Maximum degree of symbolic oracle compositions.
    #[arg(long, global = true, default_value_t = 200)]
    pub budget_degree: u32,
    /// Tolerance for numeric property checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Run every loop on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Exact invariants, exceptional and indeterminacy data, regime.
    Analyze { word: String },
    /// Degree sequence deg(f^n) and dynamical degree estimates.
    Degrees {
        word: String,
        /// Compare with the line-restriction oracle.
        #[arg(long)]
        oracle_check: bool,
    },
    /// Rotation number of the tropicalization.
    Rotation { word: String },
    /// Internal stability verdict.
    Stability { word: String },
    /// Cesaro averages of a support function under a monomial map.
    Equidist {
        /// Matrix with complex eigenvalues, e.g. "[1,-2;2,1]".
        #[arg(long = "A", default_value = "[1,-2;2,1]")]
        a: String,
        /// "line" or three values on the P2 rays, e.g. "0,0,1".
        #[arg(long, default_value = "line")]
        psi: String,
        #[arg(long, default_value_t = 360)]
        directions: usize,
        /// Quadrature nodes for c*.
        #[arg(long, default_value_t = 1 << 15)]
        quad: usize,
        /// Number of log-spaced grid points between 1 and n.
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Class-machinery degrees against the oracle.
    OracleCheck { word: String },
    /// Newton polygon and support function of a Laurent polynomial.
    Newton { poly: String },
    /// Homogenized Ronkin function against the Newton support function.
    Ronkin {
        poly: String,
        /// Quadrature grid size per torus angle.
        #[arg(long, default_value_t = 64)]
        quad: usize,
        #[arg(long, default_value_t = 64)]
        directions: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
