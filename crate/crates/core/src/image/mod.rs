//! Rotation canonicalization of raster images.
//!
//! A raster is blurred and read as a bilinear function on a normalized
//! domain ([`ContinuousImage`]). Its gradient, integrated over two centered
//! circles, gives a direction; rotating the image so that this direction
//! points along `+x` selects one representative per rotation orbit.

mod blur;
mod continuous;
mod orbit;
mod pnm;
mod raster;
mod render;
mod rotate;

use thiserror::Error;

pub use blur::{gaussian_blur, gaussian_kernel_1d};
pub use continuous::{
    alignment_objective, angle_from_integral, canonical_angle, degeneracy_threshold,
    grad_bilinear, gradient_coherence, gradient_integral, ContinuousImage, GradientIntegral, SampleCircleSet,
    DEGENERACY_FACTOR,
};
pub use orbit::{orbit_map_image, ImageOrbitMap, DEFAULT_SIGMA};
pub use pnm::{decode_pnm, encode_pnm, read_pnm, write_pnm, PnmDepth};
pub use raster::{psnr, RasterImage, MIN_SIDE};
pub(crate) use raster::reflect_index;
pub use render::{render_synthetic, BumpSpec, GaussianBumps, Scene};
pub use rotate::{rotate_image, ImageRotation, Interpolation};

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image is {height}x{width}; both sides must be at least {MIN_SIDE}")]
    TooSmall { height: usize, width: usize },
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    UnsupportedChannels(usize),
    #[error("pixel buffer has {got} values, expected {expected}")]
    DataLength { expected: usize, got: usize },
    #[error("non-finite pixel value")]
    NonFinite,
    #[error("blur sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("point {0:?} lies outside the image domain")]
    OutsideDomain([f64; 2]),
    #[error("invalid sample circles: {0}")]
    InvalidCircles(String),
    #[error("circle of radius {0} exits the image domain")]
    CircleOutsideDomain(f64),
    #[error("degenerate orientation: gradient integral magnitude {magnitude:e} <= threshold {threshold:e}")]
    DegenerateOrientation { magnitude: f64, threshold: f64 },
    #[error("image format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
