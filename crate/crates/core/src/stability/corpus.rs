//! Seeded synthetic image corpora.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group::Rotation2D;
use crate::image::{
    gradient_coherence, render_synthetic, BumpSpec, ContinuousImage, GaussianBumps, RasterImage,
    SampleCircleSet, DEFAULT_SIGMA,
};

/// Side length of the square corpus images, in pixels.
pub const CORPUS_SIDE: usize = 64;

/// Scenes whose gradient coherence `‖∫∇u‖ / ∫‖∇u‖` falls below this are
/// redrawn: their canonical angle rests on a near-cancelling integral.
pub const MIN_COHERENCE: f64 = 0.1;

/// Band-limited bump scenes: the narrowest bump still spans about 13 pixels
/// at [`CORPUS_SIDE`].
pub fn smooth_bump_spec() -> BumpSpec {
    BumpSpec {
        min_count: 3,
        max_count: 8,
        min_width: 0.2,
        max_width: 0.4,
        placement_radius: 0.35,
    }
}

fn render(scene: &GaussianBumps) -> RasterImage {
    render_synthetic(scene, Rotation2D::identity(), CORPUS_SIDE, CORPUS_SIDE)
        .expect("corpus side exceeds the minimum")
}

/// Coherence of the unrotated render under the default blur and circles.
pub fn scene_coherence(scene: &GaussianBumps) -> f64 {
    let cimg = ContinuousImage::new(&render(scene), DEFAULT_SIGMA).expect("valid sigma");
    gradient_coherence(&cimg, &SampleCircleSet::default()).expect("default circles fit")
}

/// The first `count` scenes with coherence at least [`MIN_COHERENCE`] drawn
/// in sequence from one generator seeded with `seed`.
pub fn smooth_scenes(count: usize, seed: u64) -> Vec<GaussianBumps> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = smooth_bump_spec();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let scene = GaussianBumps::random(&mut rng, &spec);
        if scene_coherence(&scene) >= MIN_COHERENCE {
            out.push(scene);
        }
    }
    out
}

/// [`smooth_scenes`] rendered unrotated at `CORPUS_SIDE × CORPUS_SIDE`.
pub fn smooth_corpus(count: usize, seed: u64) -> Vec<RasterImage> {
    smooth_scenes(count, seed).iter().map(render).collect()
}

/// Linear ramps `0.5 + 0.8·⟨n_k, z − c⟩` with gradient directions
/// `n_k` at `k·360°/count + 7°`.
pub fn ramp_corpus(count: usize, side: usize) -> Vec<RasterImage> {
    (0..count)
        .map(|k| {
            let (s, c) = (k as f64 * 360.0 / count as f64 + 7.0).to_radians().sin_cos();
            let mid = (side as f64 - 1.0) / 2.0;
            let slope = 0.8 / side as f64;
            RasterImage::from_fn(side, side, |i, j| {
                0.5 + slope * (c * (mid - i as f64) + s * (j as f64 - mid))
            })
            .expect("ramp side exceeds the minimum")
        })
        .collect()
}
