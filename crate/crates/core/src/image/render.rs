use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::continuous::Frame;
use super::raster::RasterImage;
use super::ImageError;
use crate::group::Rotation2D;

/// An analytic grayscale image on the normalized domain.
pub trait Scene: Sync {
    fn value(&self, z: [f64; 2]) -> f64;
}

impl<F> Scene for F
where
    F: Fn([f64; 2]) -> f64 + Sync,
{
    fn value(&self, z: [f64; 2]) -> f64 {
        self(z)
    }
}

/// Samples `scene ∘ r(rotation)` (about the domain center) at pixel centers.
///
/// This is the rotate-before-discretize counterpart of
/// [`rotate_image`](super::rotate_image): both produce `u(c + r(γ)(z - c))`,
/// but here no resampling of an existing raster takes place.
pub fn render_synthetic(
    scene: &impl Scene,
    rotation: Rotation2D,
    height: usize,
    width: usize,
) -> Result<RasterImage, ImageError> {
    let frame = Frame::new(height, width);
    RasterImage::from_fn(height, width, |i, j| {
        let z = frame.to_domain(i, j);
        let d = rotation.apply([z[0] - 0.5, z[1] - 0.5]);
        scene.value([0.5 + d[0], 0.5 + d[1]])
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bump {
    center: [f64; 2],
    // inverse squared widths along the rotated principal axes
    inv_a: f64,
    inv_b: f64,
    cos: f64,
    sin: f64,
    amplitude: f64,
}

/// Distribution of random [`GaussianBumps`] scenes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub min_count: usize,
    pub max_count: usize,
    /// Range of the per-axis standard deviations, in domain units.
    pub min_width: f64,
    pub max_width: f64,
    /// Bump centers are uniform in the disc of this radius around the center.
    pub placement_radius: f64,
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self {
            min_count: 3,
            max_count: 8,
            min_width: 0.05,
            max_width: 0.18,
            placement_radius: 0.35,
        }
    }
}

/// A smooth random scene: `0.5 + 0.5·tanh(Σ a_k g_k(z))` over anisotropic
/// Gaussian bumps `g_k` with amplitudes `|a_k| ∈ [0.3, 1)` of random sign.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBumps {
    bumps: Vec<Bump>,
}

impl GaussianBumps {
    pub fn from_seed(seed: u64) -> Self {
        Self::random(&mut ChaCha8Rng::seed_from_u64(seed), &BumpSpec::default())
    }

    pub fn random(rng: &mut impl Rng, spec: &BumpSpec) -> Self {
        let count = rng.random_range(spec.min_count..=spec.max_count);
        let bumps = (0..count)
            .map(|_| {
                let radius = spec.placement_radius * rng.random::<f64>().sqrt();
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                let wa: f64 = rng.random_range(spec.min_width..spec.max_width);
                let wb: f64 = rng.random_range(spec.min_width..spec.max_width);
                let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
                let magnitude = rng.random_range(0.3..1.0);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                Bump {
                    center: [0.5 + radius * phi.cos(), 0.5 + radius * phi.sin()],
                    inv_a: 1.0 / (wa * wa),
                    inv_b: 1.0 / (wb * wb),
                    cos: theta.cos(),
                    sin: theta.sin(),
                    amplitude: sign * magnitude,
                }
            })
            .collect();
        Self { bumps }
    }

    pub fn len(&self) -> usize {
        self.bumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bumps.is_empty()
    }
}

impl Scene for GaussianBumps {
    fn value(&self, z: [f64; 2]) -> f64 {
        let s: f64 = self
            .bumps
            .iter()
            .map(|b| {
                let (dx, dy) = (z[0] - b.center[0], z[1] - b.center[1]);
                let u = b.cos * dx + b.sin * dy;
                let v = -b.sin * dx + b.cos * dy;
                b.amplitude * (-0.5 * (u * u * b.inv_a + v * v * b.inv_b)).exp()
            })
            .sum();
        0.5 + 0.5 * s.tanh()
    }
}
