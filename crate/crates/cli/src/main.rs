use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Secure distributed Gram matrix computation.
#[derive(Debug, Parser)]
#[command(name = "sdgmm", version)]
struct Cli {
    /// Print structured JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Prime field modulus (defaults to 2^61 - 1).
    #[arg(long, global = true, env = "GRAM_DEFAULT_Q")]
    q: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the degree table of an exponent vector and check validity.
    Table(TableArgs),
    /// Search for the exponent vector with the smallest largest entry.
    Search(SearchArgs),
    /// Build an exponent vector with a closed-form construction.
    Construct(ConstructArgs),
    /// Compute A·Aᵀ over the prime field with simulated or remote workers.
    Run(RunArgs),
    /// Compute A·B with secure MatDot.
    Matdot(MatdotArgs),
    /// Compute A·A* over the complex numbers (no security).
    Adgmm(AdgmmArgs),
    /// Solve least squares (A·Aᵀ)β = A·b with the analog Gram scheme.
    Lstsq(LstsqArgs),
    /// Exhaustively check share uniformity and collusion leakage.
    Audit(AuditArgs),
    /// Compare upload and download costs of all schemes.
    Compare(CompareArgs),
    /// Serve Gram tasks over TCP until killed.
    ServeWorker(ServeArgs),
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Row exponents, e.g. 0,1,3,7,8.
    #[arg(long, value_delimiter = ',', required = true)]
    phi: Vec<u64>,
    /// Number of useful partitions (defaults to len(phi) - 1).
    #[arg(long)]
    p: Option<usize>,
    /// Column exponents for a general table (skips the validity check).
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<u64>>,
    /// Print the difference table φ_i - φ_j instead.
    #[arg(long, conflicts_with = "gamma")]
    diff: bool,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    p: usize,
    /// Maximum number of search nodes.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[arg(long)]
    p: usize,
    /// trivial or doubling.
    #[arg(long, default_value = "doubling")]
    scheme: String,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// CSV matrix A, integers reduced modulo q.
    #[arg(long)]
    input: String,
    #[arg(long)]
    p: usize,
    /// trivial, doubling or search.
    #[arg(long, default_value = "doubling")]
    scheme: String,
    /// Explicit exponent vector; overrides --scheme.
    #[arg(long, value_delimiter = ',')]
    phi: Option<Vec<u64>>,
    #[arg(long)]
    workers: usize,
    /// Number of workers that never answer.
    #[arg(long, default_value_t = 0)]
    drop: usize,
    /// subset-safe or interp.
    #[arg(long, default_value = "subset-safe")]
    mode: String,
    /// Write A·Aᵀ here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Write a JSON trace here.
    #[arg(long)]
    trace: Option<String>,
    /// Send shares to remote workers.
    #[arg(long, requires = "endpoints")]
    distributed: bool,
    /// Comma-separated host:port list.
    #[arg(long, value_delimiter = ',')]
    endpoints: Option<Vec<String>>,
    #[arg(long, default_value_t = 5000)]
    timeout_ms: u64,
}

#[derive(Debug, Args)]
struct MatdotArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    drop: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct AdgmmArgs {
    /// CSV matrix of real numbers.
    #[arg(long)]
    input: String,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    drop: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct LstsqArgs {
    #[arg(long)]
    input: String,
    /// Right-hand side, one value per column of A.
    #[arg(long)]
    b: String,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    workers: usize,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Rows of A.
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long)]
    p: usize,
    /// Columns per partition.
    #[arg(long, default_value_t = 1)]
    chunk: usize,
    /// Exponent vector (defaults to the search optimum).
    #[arg(long, value_delimiter = ',')]
    phi: Option<Vec<u64>>,
    /// Evaluation points of two colluding workers, e.g. 1,2.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pair: Option<Vec<u64>>,
    /// Dump the share histogram for A = 0 at every point.
    #[arg(long)]
    histogram: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, default_value_t = 1)]
    p_min: usize,
    #[arg(long)]
    p_max: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Node budget for each exponent search.
    #[arg(long)]
    budget: Option<u64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
