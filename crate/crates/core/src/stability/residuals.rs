use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::StabilityError;
use crate::group::Rotation2D;
use crate::image::{
    angle_from_integral, canonical_angle, degeneracy_threshold, rotate_image, ContinuousImage,
    ImageError, Interpolation, RasterImage, SampleCircleSet, DEFAULT_SIGMA,
};
use crate::kernel::{kernel_gradient_integral_with, KernelPair, ResponseSampling};

/// How `∇u` is evaluated at the circle samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Analytic gradient of the bilinear interpolant.
    Exact,
    /// Central differences read at the pixel closest to each sample.
    Central,
    /// One-sided forward differences read at the closest pixel.
    Forward,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Self::Exact, Self::Central, Self::Forward];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Central => "central",
            Self::Forward => "forward",
        }
    }

    /// Canonical angle of an already blurred image.
    pub fn angle(
        &self,
        cimg: &ContinuousImage,
        circles: &SampleCircleSet,
    ) -> Result<Rotation2D, ImageError> {
        let pair = match self {
            Self::Exact => return canonical_angle(cimg, circles).map(|(r, _)| r),
            Self::Central => KernelPair::central_difference(),
            Self::Forward => KernelPair::forward_difference_anchored(),
        };
        let integral =
            kernel_gradient_integral_with(cimg, &pair, circles, ResponseSampling::NearestPixel);
        angle_from_integral(&integral, degeneracy_threshold(cimg))
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown estimator `{s}`"))
    }
}

/// Parameters of a residual sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualOptions {
    /// Rotation step in degrees; must divide 360.
    pub step_deg: f64,
    pub interpolation: Interpolation,
    pub estimator: Estimator,
    pub sigma: f64,
    pub circles: SampleCircleSet,
    /// Variance of the Gaussian noise added to every rotated copy, in
    /// intensity units. Zero disables noise.
    pub noise_variance: f64,
    pub seed: u64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            step_deg: 1.0,
            interpolation: Interpolation::Bilinear,
            estimator: Estimator::Exact,
            sigma: DEFAULT_SIGMA,
            circles: SampleCircleSet::default(),
            noise_variance: 0.0,
            seed: 0,
        }
    }
}

impl ResidualOptions {
    pub(crate) fn rotation_count(&self) -> Result<usize, StabilityError> {
        let step = self.step_deg;
        let n = (360.0 / step).round();
        if !(step > 0.0 && step <= 360.0 && (n * step - 360.0).abs() <= 1e-9) {
            return Err(StabilityError::InvalidStep(step));
        }
        Ok(n as usize)
    }

    pub(crate) fn noise(&self) -> Result<Option<Normal<f64>>, StabilityError> {
        let v = self.noise_variance;
        if !(v.is_finite() && v >= 0.0) {
            return Err(StabilityError::InvalidNoise(v));
        }
        Ok((v > 0.0).then(|| Normal::new(0.0, v.sqrt()).expect("valid deviation")))
    }
}

/// Residuals `(α̂(rotate(img, γ_i)) + γ_i) mod 360` over `γ_i = i·step_deg`,
/// with the other options at their defaults. Degenerate rotations are `None`.
pub fn angle_residuals(
    img: &RasterImage,
    step_deg: f64,
    interpolation: Interpolation,
    estimator: Estimator,
) -> Result<Vec<Option<f64>>, StabilityError> {
    let options = ResidualOptions {
        step_deg,
        interpolation,
        estimator,
        ..ResidualOptions::default()
    };
    angle_residuals_with(img, &options)
}

pub fn angle_residuals_with(
    img: &RasterImage,
    options: &ResidualOptions,
) -> Result<Vec<Option<f64>>, StabilityError> {
    residuals_for_item(img, options, 0)
}

/// Noise for item `item` at rotation `i` is drawn from ChaCha stream
/// `(item << 32) | i` under `options.seed`, so results do not depend on
/// evaluation order.
pub(crate) fn residuals_for_item(
    img: &RasterImage,
    options: &ResidualOptions,
    item: u64,
) -> Result<Vec<Option<f64>>, StabilityError> {
    let count = options.rotation_count()?;
    let noise = options.noise()?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let gamma = i as f64 * options.step_deg;
        let mut rotated = rotate_image(img, Rotation2D::from_degrees(gamma), options.interpolation);
        if let Some(dist) = noise {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream((item << 32) | i as u64);
            let noisy = rotated.data().iter().map(|v| v + dist.sample(&mut rng)).collect();
            rotated = RasterImage::new(rotated.height(), rotated.width(), rotated.channels(), noisy)?;
        }
        let cimg = ContinuousImage::new(&rotated, options.sigma)?;
        match options.estimator.angle(&cimg, &options.circles) {
            Ok(alpha) => out.push(Some((alpha.degrees() + gamma).rem_euclid(360.0))),
            Err(ImageError::DegenerateOrientation { .. }) => out.push(None),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}
