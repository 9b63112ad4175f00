use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

const DESCRIPTOR_HELP: &str = "\
Manifold descriptors (the \"manifold\" field of data and spline files):
  {\"type\": \"euclidean\", \"n\": N}         R^N, point = [x1, ..., xN]
  {\"type\": \"sphere\", \"n\": N}            unit sphere in R^(N+1), point = [x0, ..., xN]
  {\"type\": \"so3\"}                         rotation, point = 3x3 rows [[..],[..],[..]]
  {\"type\": \"spd3\"}                        SPD matrix (log-Euclidean), point = 3x3 rows
  {\"type\": \"product\", \"factors\": [D, ...]}  point = [payload of each factor]
  {\"type\": \"power\", \"base\": D, \"count\": K}  point = [K payloads of D]

Data file:   {\"manifold\": D, \"samples\": [{\"t\": 0.5, \"point\": P}, ...]}
Spline file: {\"manifold\": D, \"config\": {\"degrees\": [3, 3], \"closed\": false},
              \"control_points\": [P, ...], \"stats\": {...}}

Exit codes: 0 success, 1 input error, 2 fit did not converge (output still
written), 3 data have zero variance.";

#[derive(Parser)]
#[command(
    name = "rbspline",
    version,
    about = "Bezier spline regression on Riemannian manifolds",
    after_help = DESCRIPTOR_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a C1 Bezier spline to a data file
    #[command(after_help = DESCRIPTOR_HELP)]
    Fit(FitArgs),
    /// Evaluate a spline file at given parameters
    Eval(EvalArgs),
    /// Print sample count, total variance and Frechet mean of a data file
    Stats(StatsArgs),
    /// Draw noisy samples around a spline
    Synth(SynthArgs),
    /// Mesh pipeline in the differential-coordinates shape space
    #[command(subcommand)]
    Shape(ShapeCommand),
}

#[derive(Args)]
struct SolverArgs {
    /// Segment degrees, e.g. 3,3
    #[arg(long, value_delimiter = ',', required = true)]
    degrees: Vec<usize>,
    /// Fit a closed (periodic) spline
    #[arg(long)]
    closed: bool,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Gradient-norm stopping tolerance
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Accepted for reproducible scripts; fitting itself is deterministic
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[group(id = "where", required = true, multiple = false)]
struct TimesArgs {
    /// Comma-separated parameters
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        group = "where"
    )]
    times: Option<Vec<f64>>,
    /// N equally spaced parameters over the domain
    #[arg(long, group = "where")]
    grid: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    spline: PathBuf,
    #[command(flatten)]
    times: TimesArgs,
    /// Interpret --times as data times, mapped through the fit's time map
    #[arg(long)]
    data_time: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    data: PathBuf,
    /// Also report the R² upper bound for samples grouped by equal times
    #[arg(long)]
    groups: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    spline: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    times: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Interpret --times as data times, mapped through the fit's time map
    #[arg(long)]
    data_time: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ShapeCommand {
    /// Rigidly align corresponded meshes (generalized Procrustes)
    Align {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(required = true)]
        meshes: Vec<PathBuf>,
    },
    /// Encode meshes against a reference as a shape-space data file
    Encode {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        times: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        meshes: Vec<PathBuf>,
    },
    /// Build the intrinsic mean template of aligned meshes
    Template {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        meshes: Vec<PathBuf>,
    },
    /// Encode meshes against a reference and fit a shape-space spline
    Fit {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        times: Vec<f64>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        meshes: Vec<PathBuf>,
    },
    /// Evaluate a shape spline and write one OBJ per time
    Reconstruct {
        #[arg(long)]
        spline: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        times: Vec<f64>,
        /// Vertex pinned to its reference position
        #[arg(long, default_value_t = 0)]
        anchor: usize,
        /// Interpret --times as data times, mapped through the fit's time map
        #[arg(long)]
        data_time: bool,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(commands::Outcome::Done) => ExitCode::SUCCESS,
        Ok(commands::Outcome::NotConverged) => {
            eprintln!("warning: fit stopped before convergence; result written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                rbspline::Error::ZeroVariance => 3,
                _ => 1,
            })
        }
    }
}
