//! Toy point-cloud classification under similarity transforms: occupancy
//! features and a nearest-centroid classifier, evaluated with and without the
//! similarity orbit map in front.

use nalgebra::Vector3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::sweep::{orbit_sweep, NamedTransform, OrbitSweepReport};
use super::StabilityError;
use crate::group::Similarity3;
use crate::pointcloud::{
    orbit_map_similarity, rotation_grid, PointCloud, SCALE_SET, TRANSLATION_SET,
};

/// Cells per axis of the occupancy grid.
pub const OCCUPANCY_CELLS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeClass {
    SphereShell,
    CubeSurface,
    /// The planes `z = 0` and `x = 0`, each a 2×2 square.
    PlaneCross,
    /// Major radius 1, minor radius 0.35, around the z axis.
    Torus,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 4] = [
        Self::SphereShell,
        Self::CubeSurface,
        Self::PlaneCross,
        Self::Torus,
    ];

    pub fn label(self) -> usize {
        self as usize
    }

    fn point(self, rng: &mut impl Rng) -> Vector3<f64> {
        let mut u = || rng.random_range(-1.0..1.0);
        match self {
            Self::SphereShell => loop {
                let v = Vector3::new(u(), u(), u());
                let n = v.norm();
                if n > 1e-3 && n <= 1.0 {
                    break v / n;
                }
            },
            Self::CubeSurface => {
                let mut v = Vector3::new(u(), u(), u());
                let face = rng.random_range(0..6);
                v[face / 2] = if face % 2 == 0 { 1.0 } else { -1.0 };
                v
            }
            Self::PlaneCross => {
                let (a, b) = (u(), u());
                if rng.random::<bool>() {
                    Vector3::new(a, b, 0.0)
                } else {
                    Vector3::new(0.0, a, b)
                }
            }
            Self::Torus => {
                let (p, q) = (
                    rng.random_range(0.0..std::f64::consts::TAU),
                    rng.random_range(0.0..std::f64::consts::TAU),
                );
                let ring = 1.0 + 0.35 * q.cos();
                Vector3::new(ring * p.cos(), ring * p.sin(), 0.35 * q.sin())
            }
        }
    }
}

/// One noisy sample of `class`: `points` surface points, each axis stretched
/// by an independent factor in `[0.8, 1.2)`, plus isotropic Gaussian jitter
/// of standard deviation `noise`.
pub fn sample_shape(class: ShapeClass, points: usize, noise: f64, rng: &mut impl Rng) -> PointCloud {
    let stretch = Vector3::from_fn(|_, _| rng.random_range(0.8..1.2));
    let jitter = Normal::new(0.0, noise).expect("noise must be finite and nonnegative");
    let pts = (0..points)
        .map(|_| {
            let p = class.point(rng).component_mul(&stretch);
            p + Vector3::from_fn(|_, _| jitter.sample(rng))
        })
        .collect();
    PointCloud::new(pts).expect("sampled clouds are finite and nonempty")
}

/// Fraction of points in each cell of a 4×4×4 grid over the cloud's
/// axis-aligned bounding cube, in x-major order.
pub fn occupancy_features(cloud: &PointCloud) -> Vec<f64> {
    let n = OCCUPANCY_CELLS;
    let pts = cloud.points();
    let lo = pts.iter().fold(Vector3::repeat(f64::INFINITY), |m, p| m.inf(p));
    let hi = pts.iter().fold(Vector3::repeat(f64::NEG_INFINITY), |m, p| m.sup(p));
    let center = (lo + hi) / 2.0;
    let half = (hi - lo).max() / 2.0;
    let mut counts = vec![0.0; n * n * n];
    for p in pts {
        let cell = |a: usize| {
            if half > 0.0 {
                let t = (p[a] - (center[a] - half)) / (2.0 * half);
                ((t * n as f64).floor().max(0.0) as usize).min(n - 1)
            } else {
                0
            }
        };
        counts[(cell(0) * n + cell(1)) * n + cell(2)] += 1.0;
    }
    let total = pts.len() as f64;
    counts.iter_mut().for_each(|c| *c /= total);
    counts
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub points: usize,
    pub noise: f64,
    /// The sweep uses the `grid × grid` rotation grid.
    pub grid: usize,
    pub scales: Vec<f64>,
    /// Translation components are drawn from this set.
    pub translations: Vec<f64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            train_per_class: 50,
            test_per_class: 20,
            points: 512,
            noise: 0.02,
            grid: 16,
            scales: SCALE_SET.to_vec(),
            translations: TRANSLATION_SET.to_vec(),
        }
    }
}

/// The identity plus `s·R·x + t` for every grid rotation `R` and scale `s`,
/// where each component of `t` is drawn uniformly from `translations`.
pub fn similarity_sweep_transforms(
    grid: usize,
    scales: &[f64],
    translations: &[f64],
    rng: &mut impl Rng,
) -> Result<Vec<NamedTransform<Similarity3>>, StabilityError> {
    if translations.is_empty() {
        return Err(StabilityError::Empty);
    }
    let mut out = vec![NamedTransform::identity("identity", Similarity3::identity())];
    for (k, r) in rotation_grid(grid, grid).into_iter().enumerate() {
        for &s in scales {
            let t = Vector3::from_fn(|_, _| translations[rng.random_range(0..translations.len())]);
            let name = format!(
                "r{}.{}/s{s:?}/t{:?},{:?},{:?}",
                k / grid,
                k % grid,
                t.x,
                t.y,
                t.z
            );
            let element = Similarity3::new(r, t, s)
                .map_err(|e| StabilityError::InvalidTransform(e.to_string()))?;
            out.push(NamedTransform::new(name, element));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub transforms: usize,
    pub with_orbit_map: OrbitSweepReport,
    pub without_orbit_map: OrbitSweepReport,
}

pub fn toy_shape_bench(seed: u64) -> Result<BenchReport, StabilityError> {
    toy_shape_bench_with(seed, &BenchConfig::default())
}

struct NearestCentroid {
    centroids: Vec<Option<Vec<f64>>>,
}

impl NearestCentroid {
    fn fit(samples: impl Iterator<Item = (Vec<f64>, usize)>, classes: usize) -> Self {
        let mut sums: Vec<Option<(Vec<f64>, usize)>> = vec![None; classes];
        for (f, label) in samples {
            let slot = sums[label].get_or_insert_with(|| (vec![0.0; f.len()], 0));
            slot.0.iter_mut().zip(&f).for_each(|(s, v)| *s += v);
            slot.1 += 1;
        }
        let centroids = sums
            .into_iter()
            .map(|s| s.map(|(sum, n)| sum.into_iter().map(|v| v / n as f64).collect()))
            .collect();
        Self { centroids }
    }

    /// Ties go to the lowest label.
    fn predict(&self, f: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (label, c) in self.centroids.iter().enumerate() {
            let Some(c) = c else { continue };
            let d: f64 = c.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((label, d));
            }
        }
        best.map(|(label, _)| label)
    }
}

fn canonical(x: &PointCloud) -> Option<PointCloud> {
    orbit_map_similarity(x).ok().map(|r| r.canonical)
}

/// Trains on axis-aligned samples and sweeps the test set over
/// [`similarity_sweep_transforms`], once featurizing the raw cloud and once
/// featurizing its similarity-canonical form. A cloud the orbit map rejects
/// as degenerate counts as misclassified.
pub fn toy_shape_bench_with(seed: u64, config: &BenchConfig) -> Result<BenchReport, StabilityError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |per_class: usize, rng: &mut ChaCha8Rng| {
        let mut clouds = Vec::new();
        let mut labels = Vec::new();
        for class in ShapeClass::ALL {
            for _ in 0..per_class {
                clouds.push(sample_shape(class, config.points, config.noise, rng));
                labels.push(Some(class.label()));
            }
        }
        (clouds, labels)
    };
    let (train, train_labels) = draw(config.train_per_class, &mut rng);
    let (test, test_labels) = draw(config.test_per_class, &mut rng);
    if train.is_empty() || test.is_empty() {
        return Err(StabilityError::Empty);
    }
    let transforms =
        similarity_sweep_transforms(config.grid, &config.scales, &config.translations, &mut rng)?;
    let classes = ShapeClass::ALL.len();
    let labelled = || train.iter().zip(train_labels.iter().flatten().copied());

    let raw = NearestCentroid::fit(labelled().map(|(x, l)| (occupancy_features(x), l)), classes);
    let without_orbit_map = orbit_sweep(
        |x: &PointCloud| raw.predict(&occupancy_features(x)),
        &test,
        &test_labels,
        &transforms,
    )?;

    let canon = NearestCentroid::fit(
        labelled().filter_map(|(x, l)| Some((occupancy_features(&canonical(x)?), l))),
        classes,
    );
    let with_orbit_map = orbit_sweep(
        |x: &PointCloud| canon.predict(&occupancy_features(&canonical(x)?)),
        &test,
        &test_labels,
        &transforms,
    )?;

    Ok(BenchReport {
        seed,
        transforms: transforms.len(),
        with_orbit_map,
        without_orbit_map,
    })
}
