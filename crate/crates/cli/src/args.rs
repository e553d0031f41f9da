//! Command-line syntax.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "liefront", version, about = "Singularities of surfaces under Lie sphere transformations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find and classify the singular points of a (transformed) surface.
    Classify(RunArgs),
    /// Follow the class at one point along a one-parameter family.
    Sweep(RunArgs),
    /// Construct a transformation giving a requested class at a point.
    Steer(RunArgs),
    /// Export the (transformed) surface and its singular locus as OBJ.
    Mesh(RunArgs),
    /// Check that matrices preserve the metric of signature (4,2).
    CheckMatrix(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Generic,
    Degenerate,
}

#[derive(Clone, Debug, Default, Args)]
pub struct TolArgs {
    /// Relative cutoff under which a criterion counts as zero.
    #[arg(long)]
    pub tol_zero: Option<f64>,
    /// Relative cutoff on singular values of df.
    #[arg(long)]
    pub tol_rank: Option<f64>,
    /// Relative cutoff for the front (immersivity) check.
    #[arg(long)]
    pub tol_front: Option<f64>,
    /// Floor for derivative scales.
    #[arg(long)]
    pub tol_scale_floor: Option<f64>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub surface: Option<PathBuf>,
    /// Matrix file, or a matrix family file for `sweep`.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub xi_range: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["U", "V"], allow_negative_numbers = true)]
    pub point: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    pub grid: Option<Vec<usize>>,
    /// Overrides the domain of the surface file.
    #[arg(long, num_args = 4, value_names = ["UMIN", "UMAX", "VMIN", "VMAX"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
    #[arg(long)]
    pub order: Option<usize>,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub obj: Option<PathBuf>,
    /// Where `steer` writes the constructed matrix.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Number of evenly spaced parameters sampled by `sweep`.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Clone, Debug, Args)]
pub struct CheckArgs {
    /// Matrix files or matrix family files.
    #[arg(long = "matrix", required = true)]
    pub matrices: Vec<PathBuf>,
    /// Parameter values for family files; arithmetic such as `1/(2*sqrt(2))` is accepted.
    #[arg(long = "xi", allow_negative_numbers = true)]
    pub xi: Vec<String>,
    /// Bound on the max-norm of `A^T J A - J`.
    #[arg(long, default_value_t = 1e-12)]
    pub tol_lie: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}
