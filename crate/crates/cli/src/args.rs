use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robustflow_core::instances::RmatParams;
use robustflow_core::Limits;

#[derive(Parser, Debug)]
#[command(name = "robustflow", version, about = "Maximum flow that survives the removal of k arcs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the k-robust flow problem by row and column generation.
    Solve(SolveArgs),
    /// Solve with weighted scenario classes.
    Hybrid(HybridArgs),
    /// Run the single-parameter heuristic.
    Heuristic(KArgs),
    /// Find the worst scenario against a given path flow.
    Interdict(InterdictArgs),
    /// Solve the fully enumerated path LP.
    Oracle(KArgs),
    /// Generate a test instance.
    Gen(GenArgs),
    /// Network interdiction value, an upper bound on the robust value.
    Bound(KArgs),
    /// Run instance families and report one row per family and k.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dimacs,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Table,
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Network file.
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum, default_value_t = Output::Table)]
    pub output: Output,
    /// Enumeration caps as paths,scenarios,nodes.
    #[arg(long, value_parser = parse_limits)]
    pub limits: Option<Limits>,
}

#[derive(Args, Debug)]
pub struct KArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Number of arcs a scenario may remove.
    #[arg(long)]
    pub k: usize,
}

#[derive(Args, Debug)]
pub struct LoopArgs {
    /// Most scenarios added per iteration.
    #[arg(long)]
    pub max_interdictions_per_iter: Option<usize>,
    /// Absolute gap between the bounds at which to stop.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Write the per-iteration bound trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the per-call pricing log as CSV.
    #[arg(long)]
    pub pricing_trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub base: KArgs,
    #[command(flatten)]
    pub run: LoopArgs,
    /// Also compute the network interdiction bound and report the gap.
    #[arg(long)]
    pub upper_bound: bool,
}

#[derive(Args, Debug)]
pub struct HybridArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub run: LoopArgs,
    /// Classes as a comma list: `k` for all k-arc scenarios, or `j:k` for j
    /// regular plus k exposed arcs (requires --exposed).
    #[arg(long, value_delimiter = ',', required = true)]
    pub classes: Vec<String>,
    /// Class weights summing to 1.
    #[arg(long, value_delimiter = ',', conflicts_with = "observations")]
    pub weights: Option<Vec<f64>>,
    /// Observed scenarios, one per line; weights are their class frequencies.
    #[arg(long)]
    pub observations: Option<PathBuf>,
    /// Confidence level for the generalization bound (needs --observations).
    #[arg(long, requires = "observations")]
    pub delta: Option<f64>,
    /// Arcs in the exposed tier of two-tier classes.
    #[arg(long, value_delimiter = ',')]
    pub exposed: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct InterdictArgs {
    #[command(flatten)]
    pub base: KArgs,
    /// Path flow as JSON, as written by `solve --output json`. Defaults to a
    /// decomposed maximum flow.
    #[arg(long)]
    pub flow: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    P1,
    P2,
    P3,
    Rmat,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// P1: parallel s-v arcs. P2: nodes. P3: blocks.
    #[arg(long)]
    pub n: Option<usize>,
    /// P2 mean extra arcs per bundle.
    #[arg(long)]
    pub m0: Option<usize>,
    /// P3 safe capacity.
    #[arg(long)]
    pub m: Option<usize>,
    /// P1 and P3 large capacity.
    #[arg(long = "big-m")]
    pub big_m: Option<usize>,
    /// R-MAT node count.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// R-MAT arc count.
    #[arg(long)]
    pub arcs: Option<usize>,
    /// R-MAT quadrant probabilities a,b,c,d.
    #[arg(long, value_parser = parse_rmat)]
    pub rmat: Option<RmatParams>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Dimacs)]
    pub format: Format,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Values of k, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    /// Number of seeds, run as 0..seeds (ignored by deterministic families).
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, value_enum, default_value_t = Output::Table)]
    pub output: Output,
    /// Report gaps in percent.
    #[arg(long)]
    pub percent: bool,
    /// Skip the interdiction bound.
    #[arg(long)]
    pub no_upper_bound: bool,
    #[arg(long)]
    pub max_interdictions_per_iter: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_parser = parse_limits)]
    pub limits: Option<Limits>,
    /// Directory for per-run bound and pricing traces.
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("{what} needs {n} comma-separated values"));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| format!("bad value {p:?} in {what}")))
        .collect()
}

fn parse_limits(s: &str) -> Result<Limits, String> {
    let v: Vec<usize> = parse_list(s, 3, "limits")?;
    Ok(Limits {
        paths: v[0],
        scenarios: v[1],
        nodes: v[2],
    })
}

fn parse_rmat(s: &str) -> Result<RmatParams, String> {
    let v: Vec<f64> = parse_list(s, 4, "R-MAT parameters")?;
    Ok(RmatParams {
        a: v[0],
        b: v[1],
        c: v[2],
        d: v[3],
    })
}
