use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "satnav",
    version,
    about = "Expected travel times and optimal trust for an unreliable navigation device"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact (and optionally simulated) expected travel times for a policy.
    Solve(SolveArgs),
    /// Optimal trust for a start node, at one reliability or along a curve.
    Optimize(OptimizeArgs),
    /// Crossing times and increments on a line with a leaf at node 0.
    Line(LineArgs),
    /// Equilibria of the first-to-home game on the three-node line.
    Game(GameArgs),
    /// List the built-in networks, or print one in the text format.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
pub struct NetworkArgs {
    /// Network description file (text or JSON).
    #[arg(long, value_name = "PATH", group = "network")]
    pub net: Option<PathBuf>,
    /// Built-in network by name (see `satnav fixtures`).
    #[arg(long, alias = "fixtures", value_name = "NAME", group = "network")]
    pub fixture: Option<String>,
    /// Star with `N` unit rays, one of them to home; the centre is `I`.
    #[arg(long, value_name = "N", group = "network")]
    pub star: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReliabilityArgs {
    /// Reliability of each pointer.
    #[arg(long, value_name = "REAL")]
    pub p: Option<f64>,
    /// Reliability grid `lo:hi:step`; takes precedence over `--p`.
    #[arg(long, value_name = "LO:HI:STEP")]
    pub curve: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub reliability: ReliabilityArgs,
    /// Uniform trust at every branch node.
    #[arg(long, value_name = "REAL")]
    pub q: Option<f64>,
    #[arg(long, value_name = "REAL", conflicts_with = "q")]
    pub q2: Option<f64>,
    #[arg(long, value_name = "REAL", conflicts_with = "q")]
    pub q3: Option<f64>,
    #[arg(long, value_name = "REAL", conflicts_with = "q")]
    pub q4: Option<f64>,
    #[arg(long, value_name = "REAL", conflicts_with = "q")]
    pub q5: Option<f64>,
    #[arg(long, value_name = "REAL", conflicts_with = "q")]
    pub q6: Option<f64>,
    #[arg(long, value_name = "REAL", conflicts_with = "q")]
    pub q7: Option<f64>,
    #[arg(long, value_name = "REAL", conflicts_with = "q")]
    pub q8: Option<f64>,
    #[arg(long, value_name = "REAL", conflicts_with = "q")]
    pub q9: Option<f64>,
    /// Start node; every non-target node when absent.
    #[arg(long, value_name = "NODE")]
    pub start: Option<String>,
    /// Destination; home when absent. Pointers still indicate home.
    #[arg(long, value_name = "NODE")]
    pub to: Option<String>,
    /// Also run this many Monte Carlo walks per start node.
    #[arg(long, value_name = "N_WALKS")]
    pub simulate: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl SolveArgs {
    pub fn degree_trusts(&self) -> Vec<(usize, f64)> {
        [
            self.q2, self.q3, self.q4, self.q5, self.q6, self.q7, self.q8, self.q9,
        ]
        .into_iter()
        .enumerate()
        .filter_map(|(i, q)| q.map(|q| (i + 2, q)))
        .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Uniform,
    Counting,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub reliability: ReliabilityArgs,
    /// Start node; the centre `I` for `--star`.
    #[arg(long, value_name = "NODE")]
    pub start: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Uniform)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LineArgs {
    #[command(flatten)]
    pub reliability: ReliabilityArgs,
    /// Trust; the optimal trust when absent.
    #[arg(long, value_name = "REAL")]
    pub q: Option<f64>,
    /// Comma-separated arc lengths a0,a1,...; unit arcs when absent.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub lengths: Option<Vec<f64>>,
    /// Largest node index for unit arcs.
    #[arg(long, value_name = "J", default_value_t = 6)]
    pub max_j: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameModeArg {
    Symmetric,
    Asymmetric,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    #[arg(long, value_enum)]
    pub mode: GameModeArg,
    #[command(flatten)]
    pub reliability: ReliabilityArgs,
    /// Also emit best-response curves.
    #[arg(long)]
    pub responses: bool,
    /// Step of the response grid on (0, 1).
    #[arg(long, value_name = "STEP", default_value_t = 0.01)]
    pub grid: f64,
    /// Also play this many Monte Carlo games at the equilibrium.
    #[arg(long, value_name = "N_PLAYS")]
    pub simulate: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// Print this fixture in the text format.
    pub name: Option<String>,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
