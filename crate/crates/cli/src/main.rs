use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::CliError;

/// Fractal dimensions of iterated-function-system attractors.
#[derive(Debug, Parser)]
#[command(name = "fractaldim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an attractor sample or a level-n construction.
    Gen(GenArgs),
    /// Similarity dimension of an IFS, or box-counting dimension of a cloud.
    Dim(DimArgs),
    /// Grid-cover sums over a range of exponents and their crossing of 1.
    Profile(ProfileArgs),
    /// Check the open set condition against a candidate convex region.
    Osc(OscArgs),
    /// Print a built-in IFS (or its open set) as JSON.
    Preset(PresetArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Cantor,
    Koch,
    Snowflake,
    Sierpinski,
    Hilbert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// All compositions of the maps up to the given depth.
    Det,
    /// Random iteration.
    Chaos,
    /// Explicit level-n geometry from the catalog.
    Level,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Svg,
    Json,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// IFS JSON file (alternative to --preset).
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    pub ifs: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Defaults to `det`, or `level` for presets without an IFS.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    #[arg(long, default_value_t = 100_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = fractaldim::ifs::DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = "black")]
    pub stroke: String,
    /// Stroke width in pixels.
    #[arg(long, default_value_t = 1.0)]
    pub stroke_width: f64,
    /// SVG width and height in pixels.
    #[arg(long, default_value_t = 512)]
    pub size: u32,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 2.0)]
    pub base: f64,
    /// Grid levels `kmin:kmax`; the cell side at level k is base^-k.
    #[arg(long, default_value = "1:8")]
    pub levels: String,
    /// Grid origin, comma separated (default: the zero vector).
    #[arg(long)]
    pub origin: Option<String>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["moran", "boxcount", "preset"]))]
pub struct DimArgs {
    /// IFS JSON file: solve the Moran equation for its ratios.
    #[arg(long, value_name = "IFS")]
    pub moran: Option<PathBuf>,
    /// Built-in IFS for the Moran mode.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Candidate open set; when given, the open set condition is checked.
    #[arg(long, value_name = "REGION")]
    pub region: Option<PathBuf>,
    /// Point cloud CSV: box-counting regression.
    #[arg(long, value_name = "CLOUD")]
    pub boxcount: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Also write the scale series as CSV.
    #[arg(long)]
    pub series_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Point cloud CSV.
    pub cloud: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    /// Exponents `lo:hi:n` (default: 61 values over [0.05, k + 0.5]).
    #[arg(long)]
    pub deltas: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    pub base: f64,
    #[arg(long)]
    pub origin: Option<String>,
    /// Also write the profile as CSV (`delta,value`).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OscArgs {
    /// `IFS REGION`, or with --preset just an optional `REGION` (defaulting
    /// to the preset's open set).
    #[arg(num_args = 0..=2, value_name = "FILE")]
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    #[arg(value_enum)]
    pub name: Preset,
    /// Print the open set used for the open set condition instead.
    #[arg(long)]
    pub region: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Dim(a) => commands::dim(a),
        Command::Profile(a) => commands::profile(a),
        Command::Osc(a) => commands::osc(a),
        Command::Preset(a) => commands::preset(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
