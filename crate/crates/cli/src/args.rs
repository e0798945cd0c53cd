use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "eprkit",
    version,
    about = "Spin correlations, Bell/CHSH inequalities and joint-distribution checks"
)]
pub struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output to a file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    /// Read angle arguments as radians instead of degrees.
    #[arg(long, global = true)]
    pub radians: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint outcome table for two measurement directions.
    Dist(DistArgs),
    /// Evaluate the Bell or CHSH inequality.
    Ineq(IneqArgs),
    /// Grid search for violating coplanar configurations.
    Scan(ScanArgs),
    /// Third-order table from singlet geometry or from pair tables.
    Joint3(Joint3Args),
    /// Decide whether four CHSH pair tables admit a joint distribution.
    Joint4(Joint4Args),
    /// Monte Carlo run of the hidden-variable model.
    Simulate(SimulateArgs),
    /// Mutual information and conditional entropy against a·b.
    Info(InfoArgs),
    /// Cross-check the pair tables against the state-vector computation.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Angle between the two directions.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["a", "b"])]
    pub theta: Option<f64>,

    /// First direction as x,y,z (normalized on input).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "b"
    )]
    pub a: Option<Vec<f64>>,

    /// Second direction as x,y,z.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "a"
    )]
    pub b: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,

    /// Two-device singlet table (default).
    #[arg(long, conflicts_with = "local")]
    pub pair: bool,

    /// Single-device table `(A(a), A(b))`.
    #[arg(long)]
    pub local: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InequalityArg {
    Bell,
    Chsh,
}

#[derive(Debug, Args)]
pub struct IneqArgs {
    #[arg(value_enum)]
    pub inequality: InequalityArg,

    /// Coplanar angles. Bell: θab,θbc (θac derived) or θab,θac,θbc.
    /// CHSH: θab,θdb,θdc (θac derived) or θab,θac,θdb,θdc.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "cov"
    )]
    pub angles: Option<Vec<f64>>,

    /// Covariances. Bell: c_ab,c_ac,c_bc. CHSH: c_ab,c_ac,c_db,c_dc.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub cov: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub inequality: InequalityArg,

    /// Grid step in degrees, in (0, 45].
    #[arg(long)]
    pub resolution_deg: f64,
}

#[derive(Debug, Args)]
pub struct Joint3Args {
    /// Build the table from the local pair tables of three directions.
    #[arg(long, conflicts_with = "pairs")]
    pub qm: bool,

    /// Coplanar increments θab,θbc.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "qm", conflicts_with_all = ["a", "b", "c"])]
    pub angles: Option<Vec<f64>>,

    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "qm"
    )]
    pub a: Option<Vec<f64>>,

    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "qm"
    )]
    pub b: Option<Vec<f64>>,

    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "qm"
    )]
    pub c: Option<Vec<f64>>,

    /// JSON file with tables AB, BC and CA.
    #[arg(long)]
    pub pairs: Option<PathBuf>,

    /// Third moment ⟨ABC⟩; defaults to 0 for zero means, else the middle of
    /// the feasible range.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "qm")]
    pub mu3: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Joint4Args {
    /// JSON file with tables AB, AC, DB and DC.
    #[arg(long)]
    pub pairs: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Local,
    Singlet,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,

    /// Number of samples.
    #[arg(short = 'n', long = "samples")]
    pub n: u64,

    #[arg(long)]
    pub seed: u64,

    #[arg(long, value_enum, default_value = "singlet")]
    pub mode: ModeArg,

    /// Worker threads; output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// Spacing of x = a·b in (0, 1].
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
