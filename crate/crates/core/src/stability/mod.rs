//! Dispersion of the canonical image angle under resampling and noise, and
//! clean/average/worst-case accuracy sweeps over transformation orbits.

mod bench;
mod circular;
mod corpus;
mod report;
mod residuals;
mod sweep;

use thiserror::Error;

use crate::image::ImageError;
use crate::pointcloud::CloudError;

pub use bench::{
    occupancy_features, sample_shape, similarity_sweep_transforms, toy_shape_bench,
    toy_shape_bench_with, BenchConfig, BenchReport, ShapeClass,
};
pub use circular::{circular_std, Histogram, CIRCULAR_STD_CAP_DEG, HISTOGRAM_BIN_DEG};
pub use corpus::{
    ramp_corpus, scene_coherence, smooth_bump_spec, smooth_corpus, smooth_scenes, CORPUS_SIDE,
    MIN_COHERENCE,
};
pub use report::{compare_dispersion, stability_report, OrderingCheck, StabilityReport};
pub use residuals::{angle_residuals, angle_residuals_with, Estimator, ResidualOptions};
pub use sweep::{orbit_sweep, NamedTransform, OrbitSweepReport};

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("empty input")]
    Empty,
    #[error("rotation step {0}° must be positive and divide 360°")]
    InvalidStep(f64),
    #[error("noise variance must be finite and nonnegative, got {0}")]
    InvalidNoise(f64),
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("sweep has no identity transform")]
    MissingIdentity,
    #[error("duplicate transform name `{0}`")]
    DuplicateTransform(String),
    #[error("{items} items but {labels} labels")]
    LabelCount { items: usize, labels: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Cloud(#[from] CloudError),
}
