//! `orbitmap`: canonicalize images and point clouds, and run the stability,
//! kernel and orbit-sweep studies.
//!
//! Exit codes: 0 success, 2 input error, 3 degenerate input (a report is
//! still written), 4 failed `--assert`.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use orbitmap::image::{Interpolation, SampleCircleSet, DEFAULT_SIGMA};
use orbitmap::stability::Estimator;

#[derive(Parser)]
#[command(name = "orbitmap", version, about = "Orbit-mapping canonicalization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rotate a PGM/PPM image into its canonical orientation.
    CanonicalizeImage {
        input: PathBuf,
        output: PathBuf,
        /// JSON report path; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Interp::Bilinear)]
        interp: Interp,
        #[command(flatten)]
        angle: AngleArgs,
    },
    /// Canonicalize an XYZ/PLY point cloud.
    CanonicalizeCloud {
        input: PathBuf,
        output: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CloudMode::Similarity)]
        mode: CloudMode,
        /// Flip the last principal axis when the alignment would reflect.
        #[arg(long)]
        proper_rotation: bool,
        #[arg(long, value_enum, default_value_t = SignRuleArg::FirstSignificant)]
        sign_rule: SignRuleArg,
    },
    /// Angle dispersion of image files or of the synthetic corpus under
    /// rotation.
    StabilityReport {
        /// PGM/PPM images; ignored with --synthetic.
        inputs: Vec<PathBuf>,
        /// Use this many images of the seeded synthetic corpus.
        #[arg(long)]
        synthetic: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        step_deg: f64,
        #[arg(long, value_enum, default_value_t = Interp::Bilinear)]
        interp: Interp,
        #[arg(long, value_enum, default_value_t = EstimatorArg::Exact)]
        estimator: EstimatorArg,
        /// Variance of Gaussian noise added to every rotated copy.
        #[arg(long, default_value_t = 0.0)]
        noise_variance: f64,
        #[command(flatten)]
        angle: AngleArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the quarter-turn condition for a derivative kernel pair.
    KernelCheck {
        #[arg(long, value_enum, conflicts_with = "pair", required_unless_present = "pair")]
        builtin: Option<BuiltinPair>,
        /// JSON file `{"k1": [[..]], "k2": [[..]]}`.
        #[arg(long)]
        pair: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
        quarter_turns: Vec<i32>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Toy point-cloud classification swept over similarity transforms.
    OrbitBench {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Rotation grid size per axis.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Exit with 4 unless the orbit-mapped predictor is exactly invariant.
        #[arg(long)]
        assert: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct AngleArgs {
    /// Blur standard deviation in pixels.
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    /// Circle radii as fractions of the shorter image side.
    #[arg(long, value_delimiter = ',', default_values_t = SampleCircleSet::DEFAULT_RADII)]
    radii: Vec<f64>,
    /// Samples per circle.
    #[arg(long, default_value_t = SampleCircleSet::DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Interp {
    Nearest,
    Bilinear,
    Bicubic,
}

impl From<Interp> for Interpolation {
    fn from(i: Interp) -> Self {
        match i {
            Interp::Nearest => Interpolation::Nearest,
            Interp::Bilinear => Interpolation::Bilinear,
            Interp::Bicubic => Interpolation::Bicubic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Exact,
    Central,
    Forward,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Exact => Estimator::Exact,
            EstimatorArg::Central => Estimator::Central,
            EstimatorArg::Forward => Estimator::Forward,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CloudMode {
    Center,
    Scale,
    Pca,
    Similarity,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignRuleArg {
    FirstRow,
    FirstSignificant,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltinPair {
    Central,
    Forward,
}

/// Outcome of a subcommand that did not fail outright.
enum Status {
    Ok,
    Degenerate,
    AssertionFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Degenerate) => ExitCode::from(3),
        Ok(Status::AssertionFailed) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
