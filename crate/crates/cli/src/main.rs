//! `shadowcut`: generate instances, transform them, run pivot rules and
//! verify long-path certificates.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;
mod svg;

#[derive(Parser, Debug)]
#[command(
    name = "shadowcut",
    version,
    about = "Exact shadow and steepest-edge path experiments"
)]
pub struct Cli {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of pivots in a simplex run.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    pub step_cap: usize,
    /// Maximum number of vertices any enumeration may visit.
    #[arg(long, global = true, default_value_t = shadowcut::polytope::DEFAULT_VERTEX_CAP)]
    pub vertex_cap: usize,
    /// Suppress summaries on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a new instance bundle.
    Generate(GenerateArgs),
    /// Apply a construction to a bundle.
    Transform(TransformArgs),
    /// Run a pivot rule from the bundle's start vertex.
    Run(RunArgs),
    /// Check a lower-bound claim and write a report.
    Verify(VerifyArgs),
    /// Draw a shadow polygon or a planar normal fan as SVG.
    Plot(PlotArgs),
    /// Summarize a bundle.
    Info(InfoArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Goldfarb,
    Cube,
    KleeMinty,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    pub kind: GenerateKind,
    #[arg(long)]
    pub n: usize,
    /// Deformation parameters `eps,delta` for the goldfarb family.
    #[arg(long)]
    pub params: Option<String>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformOp {
    VertexCut,
    ThinCone,
    ManyFromOne,
    FixedC,
    Compress,
    Canonicalize,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    pub op: TransformOp,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Certificate output for many-from-one and fixed-c.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    /// Vertex coordinates, comma separated.
    #[arg(long)]
    pub vertex: Option<String>,
    /// Vertex given by its tight facet indices instead.
    #[arg(long)]
    pub tight: Option<String>,
    /// Cut direction for vertex-cut (default: sum of the cone rays).
    #[arg(long)]
    pub w: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    /// Ball center for thin-cone (default: sum of the cone rays).
    #[arg(long)]
    pub center: Option<String>,
    /// Ball radius for thin-cone (default: half the inradius at the center).
    #[arg(long)]
    pub radius: Option<String>,
    /// Compression factor, or `auto` to search with `--norm`.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub norm: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TieArg {
    Error,
    Lowest,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// `shadow`, `shadow:<w>`, `steepest:<norm>`, `dantzig` or `greatest`.
    #[arg(long)]
    pub rule: String,
    #[arg(short, long)]
    pub input: PathBuf,
    /// Path record output.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TieArg::Error)]
    pub tie: TieArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyMode {
    /// Certificate plus sampled paths for a two-sided thinned instance.
    ManyFromOne,
    /// Certificate plus sampled paths with the objective held fixed.
    FixedC,
    /// Compression factor search, then steepest edge, per norm.
    FindK,
    /// One compression, every norm of a regular battery.
    NormBattery,
    /// Local shadow rule against the parametric path.
    Agreement,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub mode: VerifyMode,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long)]
    pub cert: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Number of regular norms in the battery.
    #[arg(long, default_value_t = 25)]
    pub samples_norms: usize,
    /// Norm for find-k (default: a fixed list of six).
    #[arg(long)]
    pub norm: Option<String>,
    /// Report output (JSON).
    #[arg(short, long)]
    pub report: Option<PathBuf>,
    /// One-row CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    ShadowPolygon,
    #[value(name = "fan-2d")]
    Fan2d,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    pub kind: PlotKind,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct InfoArgs {
    #[arg(short, long)]
    pub input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
