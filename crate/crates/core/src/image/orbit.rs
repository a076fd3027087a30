use serde::{Deserialize, Serialize};

use super::continuous::{canonical_angle, ContinuousImage, SampleCircleSet};
use super::raster::RasterImage;
use super::rotate::{rotate_image, ImageRotation, Interpolation};
use super::ImageError;
use crate::group::{CanonicalResult, OrbitMap, Rotation2D};

/// Standard deviation, in pixels, of the blur applied before differentiation.
pub const DEFAULT_SIGMA: f64 = 1.5;

/// Gradient-based rotation orbit map for rasters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageOrbitMap {
    pub interpolation: Interpolation,
    pub circles: SampleCircleSet,
    pub sigma: f64,
}

impl Default for ImageOrbitMap {
    fn default() -> Self {
        Self {
            interpolation: Interpolation::Bilinear,
            circles: SampleCircleSet::default(),
            sigma: DEFAULT_SIGMA,
        }
    }
}

impl ImageOrbitMap {
    /// Canonical angle `α̂` of `img` and the gradient-integral magnitude.
    pub fn angle(&self, img: &RasterImage) -> Result<(Rotation2D, f64), ImageError> {
        let cimg = ContinuousImage::new(img, self.sigma)?;
        canonical_angle(&cimg, &self.circles)
    }
}

impl OrbitMap<RasterImage> for ImageOrbitMap {
    type Element = ImageRotation;
    type Error = ImageError;

    fn canonicalize(
        &self,
        img: &RasterImage,
    ) -> Result<CanonicalResult<RasterImage, ImageRotation>, ImageError> {
        let (rotation, _) = self.angle(img)?;
        let element = ImageRotation {
            rotation,
            interpolation: self.interpolation,
        };
        Ok(CanonicalResult {
            canonical: rotate_image(img, rotation, self.interpolation),
            element,
        })
    }
}

/// Rotates `img` so that its mean blurred gradient points along `+x`.
///
/// The blur only enters the angle estimate; the unblurred input is what gets
/// rotated.
pub fn orbit_map_image(
    img: &RasterImage,
    mode: Interpolation,
    circles: &SampleCircleSet,
    sigma: f64,
) -> Result<CanonicalResult<RasterImage, ImageRotation>, ImageError> {
    ImageOrbitMap {
        interpolation: mode,
        circles: circles.clone(),
        sigma,
    }
    .canonicalize(img)
}
