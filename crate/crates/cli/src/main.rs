//! `ntkit`: batch front end for the ntkit library.
//!
//! Every run prints a manifest line first, then its records. Exit codes:
//! 0 success, 1 usage error, 2 inconclusive result only, 3 internal
//! consistency failure.

mod commands;
mod manifest;

use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifest::Format;
use ntkit::ntheory::Budget;

#[derive(Parser, Debug)]
#[command(name = "ntkit", version, about = "Exact number theory toolkit: Pell, Diophantine search, elliptic curves, 2-descent")]
pub struct Cli {
    /// Output format; csv is available for tabular outputs only
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Worker threads (0 = one per CPU); never changes output
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Pin the manifest timestamp (default: current UTC time)
    #[arg(long, global = true)]
    pub timestamp: Option<String>,
    /// Pollard rho iteration budget per factorization
    #[arg(long, global = true, env = "NTKIT_FACTOR_BUDGET", default_value_t = Budget::default().0)]
    pub factor_budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solutions of x^2 - (a^2 - 1) y^2 = 1
    Pell(PellArgs),
    /// Witness search for a Diophantine set
    Dioph(DiophArgs),
    /// Arithmetic on y^2 = x^3 + a x + b
    Curve(CurveArgs),
    /// Complete 2-descent on y^2 = (x - e1)(x - e2)(x - e3)
    Descent(DescentArgs),
    /// Two-parameter family with a built-in point
    Family(FamilyArgs),
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["count", "divisibility", "bound"])))]
pub struct PellArgs {
    /// Parameter a >= 2
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// List (x_n, y_n) for n = 0..=COUNT
    #[arg(long)]
    pub count: Option<u64>,
    /// Report y_m^2 | y_n against y_m | n and m y_m | n
    #[arg(long, requires_all = ["m", "n"])]
    pub divisibility: bool,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    /// Brute-force every solution with 1 <= y <= BOUND
    #[arg(long, allow_hyphen_values = true)]
    pub bound: Option<String>,
}

#[derive(Args, Debug)]
pub struct DiophArgs {
    /// Polynomial in parameters x1..xN and witnesses y1..yM
    #[arg(long, default_value = "x1 - y1^2 - y2^2 - y3^2 - y4^2", allow_hyphen_values = true)]
    pub poly: String,
    /// Parameter values, comma separated
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Vec<String>,
    /// Witness coordinates range over [-BOUND, BOUND]
    #[arg(long, default_value = "10", allow_hyphen_values = true)]
    pub bound: String,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("op").args(["add", "mul", "neg", "on_curve", "torsion", "search", "scale"])))]
pub struct CurveArgs {
    /// Coefficient a (integer or p/q)
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Coefficient b (integer or p/q)
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    /// P + Q, points written "(x, y)" or "O"
    #[arg(long, num_args = 2, value_names = ["P", "Q"], allow_hyphen_values = true)]
    pub add: Option<Vec<String>>,
    /// k P
    #[arg(long, num_args = 2, value_names = ["K", "P"], allow_hyphen_values = true)]
    pub mul: Option<Vec<String>>,
    /// -P
    #[arg(long, value_name = "P", allow_hyphen_values = true)]
    pub neg: Option<String>,
    /// Whether P lies on the curve
    #[arg(long, value_name = "P", allow_hyphen_values = true)]
    pub on_curve: Option<String>,
    /// Order of P, or null for infinite order (integral model required)
    #[arg(long, value_name = "P", allow_hyphen_values = true)]
    pub torsion: Option<String>,
    /// Points with x = p/q^2, |p|, q <= H (integral model required)
    #[arg(long, value_name = "H")]
    pub search: Option<String>,
    /// Smallest integral model (x, y) -> (u^2 x, u^3 y)
    #[arg(long)]
    pub scale: bool,
}

#[derive(Args, Debug)]
pub struct DescentArgs {
    /// Roots e1,e2,e3 (distinct integers)
    #[arg(long, required = true, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub roots: Vec<String>,
    /// Also search points up to this height and report the rank window
    #[arg(long)]
    pub height: Option<String>,
    /// Known point on the curve, used for the rank lower bound (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    pub point: Vec<String>,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// Parameters a1,a2,a3 (distinct integers)
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<String>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub m_min: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub m_max: i64,
    #[arg(long, default_value_t = 1)]
    pub n_min: i64,
    #[arg(long)]
    pub n_max: i64,
    /// Run descent on every member and tag rank-one certificates
    #[arg(long)]
    pub certify: bool,
    /// Use every coprime (m, n) instead of requiring the four linear forms prime
    #[arg(long)]
    pub all_pairs: bool,
    /// Height of the fallback point search when the built-in point is torsion
    #[arg(long, default_value_t = 0)]
    pub height: u64,
}

/// Why a run stopped; mapped onto the documented exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Inconclusive(String),
    Internal(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Successful runs still distinguish "found something" from "inconclusive".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    InconclusiveOnly,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(3);
        }
    };
    let stdout = io::stdout();
    let result = pool.install(|| commands::run(&cli, BufWriter::new(stdout.lock())));
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::InconclusiveOnly) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Inconclusive(msg)) => {
            eprintln!("inconclusive: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
