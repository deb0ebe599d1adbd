use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cayminor",
    version,
    about = "Cayley graph balls, minors, ends and clique constructions"
)]
pub struct Cli {
    /// Output format for the report on standard output.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a ball of a Cayley graph and report its size and sphere sizes.
    Ball(BallArgs),
    /// Search the ball for a minor of a pattern graph.
    Minor(MinorArgs),
    /// Decide planarity of the ball by excluding K5 and K3,3 minors.
    Planar(SearchArgs),
    /// Largest clique minor found within the budget.
    Hadwiger(SearchArgs),
    /// Live components and disjoint-path counts outside an inner ball.
    Ends(EndsArgs),
    /// Disjoint paths from an inner sphere to the outer sphere.
    Rays(RaysArgs),
    /// Build a K_m minor of the boosted ball from m disjoint rays.
    Construct(ConstructArgs),
    /// Check a certificate file against a graph file.
    Verify(VerifyArgs),
    /// Compare the exact minor search with the brute-force oracle on random graphs.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// Group: cyclic:N, table:FILE, z^N, free:K or freeprod:F1,F2,...
    #[arg(long)]
    pub group: String,

    /// Comma-separated generators, or `all` for a finite group. Defaults to the
    /// standard generators of the group.
    #[arg(long)]
    pub gens: Option<String>,

    #[arg(long)]
    pub radius: usize,
}

#[derive(Debug, Args)]
pub struct BudgetArg {
    /// Node expansions allowed per minor search.
    #[arg(
        long,
        env = "CAYMINOR_BUDGET",
        default_value_t = 20_000_000,
        value_parser = clap::value_parser!(u64).range(1..)
    )]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[command(flatten)]
    pub group: GroupArgs,

    /// Write the ball as graph JSON.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub group: GroupArgs,

    #[command(flatten)]
    pub budget: BudgetArg,

    /// Write the certificate, if any, as JSON.
    #[arg(long)]
    pub cert_out: Option<PathBuf>,

    /// Write the host ball as graph JSON.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MinorArgs {
    #[command(flatten)]
    pub search: SearchArgs,

    /// Pattern: k:N, k:A,B, c:N, p:N, petersen or file:PATH.
    #[arg(long)]
    pub pattern: String,
}

#[derive(Debug, Args)]
pub struct EndsArgs {
    #[command(flatten)]
    pub group: GroupArgs,

    /// Radius of the removed inner ball.
    #[arg(long, default_value_t = 0)]
    pub inner: usize,
}

#[derive(Debug, Args)]
pub struct RayChoice {
    /// Number of rays.
    #[arg(long)]
    pub m: usize,

    /// Radius of the removed inner ball.
    #[arg(long, default_value_t = 0)]
    pub inner: usize,

    /// Live component to draw rays in. Defaults to the first live one.
    #[arg(long)]
    pub component: Option<usize>,

    /// Sphere the rays start on. Defaults to the smallest radius that works.
    #[arg(long)]
    pub start_radius: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RaysArgs {
    #[command(flatten)]
    pub group: GroupArgs,

    #[command(flatten)]
    pub rays: RayChoice,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub group: GroupArgs,

    #[command(flatten)]
    pub rays: RayChoice,

    /// Write the certificate as JSON.
    #[arg(long)]
    pub cert_out: Option<PathBuf>,

    /// Write the boosted ball as graph JSON.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Graph JSON: `{n, edges}` or a ball export.
    #[arg(long)]
    pub graph: PathBuf,

    /// Certificate JSON.
    #[arg(long)]
    pub cert: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,

    /// Number of random graphs.
    #[arg(long, default_value_t = 200)]
    pub count: usize,

    /// Largest vertex count of a random graph.
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,

    #[command(flatten)]
    pub budget: BudgetArg,
}
