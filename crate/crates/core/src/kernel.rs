//! Pairs of discrete derivative filters `(k₁, k₂)` used in place of the exact
//! gradient, and the quarter-turn condition
//! `(k₁(rᵀφ), k₂(rᵀφ)) = rᵀ (k₁(φ), k₂(φ))` a pair must meet for the
//! resulting canonical angle to follow 90° rotations of the raster.
//!
//! A kernel matrix entry `k[a][b]` sits at grid offset
//! `φ = (-(a - c), b - c)` with `c = (N - 1)/2`, using the image convention
//! of `x` pointing up (towards row 0) and `y` to the right. Responses are
//! correlations, `(k ⋆ u)(z) = Σ_φ k(φ) u(z + φ)`, so the central pair below
//! responds with twice the gradient.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{exact_cos_sin, Rotation2D};
use crate::image::{
    angle_from_integral, degeneracy_threshold, ContinuousImage, GradientIntegral, ImageError,
    RasterImage, SampleCircleSet,
};

/// Entry-wise tolerance of [`check_condition`].
pub const CONDITION_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("invalid kernel shape: {0}")]
    Shape(String),
    #[error("family of size {n} takes {expected} parameters, got {got}")]
    ParameterCount { n: usize, expected: usize, got: usize },
    #[error("unsupported family size {0} (expected 2 or 3)")]
    FamilySize(usize),
    #[error(transparent)]
    Image(#[from] ImageError),
}

pub type Kernel = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelPair {
    k1: Kernel,
    k2: Kernel,
}

fn check_square(k: &Kernel, name: &str) -> Result<usize, KernelError> {
    let n = k.len();
    if n == 0 || k.iter().any(|row| row.len() != n) {
        return Err(KernelError::Shape(format!("{name} is not a non-empty square matrix")));
    }
    if k.iter().flatten().any(|v| !v.is_finite()) {
        return Err(KernelError::Shape(format!("{name} has non-finite entries")));
    }
    Ok(n)
}

impl KernelPair {
    pub fn new(k1: Kernel, k2: Kernel) -> Result<Self, KernelError> {
        let n1 = check_square(&k1, "k1")?;
        let n2 = check_square(&k2, "k2")?;
        if n1 != n2 {
            return Err(KernelError::Shape(format!("k1 is {n1}x{n1} but k2 is {n2}x{n2}")));
        }
        Ok(Self { k1, k2 })
    }

    pub fn k1(&self) -> &Kernel {
        &self.k1
    }

    pub fn k2(&self) -> &Kernel {
        &self.k2
    }

    pub fn size(&self) -> usize {
        self.k1.len()
    }

    /// Central differences along `x` and `y`.
    pub fn central_difference() -> Self {
        Self {
            k1: vec![vec![0.0, 1.0, 0.0], vec![0.0; 3], vec![0.0, -1.0, 0.0]],
            k2: vec![vec![0.0; 3], vec![-1.0, 0.0, 1.0], vec![0.0; 3]],
        }
    }

    /// A one-sided difference in a 2×2 window and its −90° rotation.
    pub fn forward_difference() -> Self {
        let k1 = vec![vec![-1.0, 0.0], vec![1.0, 0.0]];
        let k2 = rotate_kernel_90(&k1, -1);
        Self { k1, k2 }
    }
}

impl KernelPair {
    /// One-sided differences `u(z + e_x) - u(z)` and `u(z + e_y) - u(z)`,
    /// embedded in 3×3 windows so that each response is anchored at the
    /// pixel where the difference starts.
    pub fn forward_difference_anchored() -> Self {
        Self {
            k1: vec![vec![0.0, 1.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0; 3]],
            k2: vec![vec![0.0; 3], vec![0.0, -1.0, 1.0], vec![0.0; 3]],
        }
    }
}

/// Exact rotation on the grid: `out(φ) = k(r(quarter_turns · 90°) φ)`.
/// One quarter turn is a counter-clockwise array rotation.
pub fn rotate_kernel_90(k: &Kernel, quarter_turns: i32) -> Kernel {
    let n = k.len();
    let mut out = k.clone();
    for _ in 0..quarter_turns.rem_euclid(4) {
        let prev = out.clone();
        for (a, row) in out.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = prev[b][n - 1 - a];
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub max_violation: f64,
}

/// Evaluates the quarter-turn condition at every grid offset for
/// `α = quarter_turns · 90°`.
pub fn check_condition(pair: &KernelPair, quarter_turns: i32) -> ConditionCheck {
    let (c, s) = exact_cos_sin(quarter_turns as f64 * std::f64::consts::FRAC_PI_2);
    // k(rᵀ(α) φ) is k rotated by -α
    let l1 = rotate_kernel_90(&pair.k1, -quarter_turns);
    let l2 = rotate_kernel_90(&pair.k2, -quarter_turns);
    let n = pair.size();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let (u, v) = (pair.k1[a][b], pair.k2[a][b]);
            // rᵀ(α) (u, v)
            let (ru, rv) = (c * u + s * v, -s * u + c * v);
            worst = worst.max((l1[a][b] - ru).abs()).max((l2[a][b] - rv).abs());
        }
    }
    ConditionCheck {
        holds: worst <= CONDITION_TOL,
        max_violation: worst,
    }
}

/// The parametric families: `N = 2` with `(a, b)`, `k₁ = ((a, b), (-b, -a))`;
/// `N = 3` with `(a, b, c, d)`, `k₁ = ((a, b, c), (d, 0, -d), (-c, -b, -a))`.
/// In both cases `k₂ = k₁ ∘ r(-90°)`.
pub fn make_family_pair(n: usize, params: &[f64]) -> Result<KernelPair, KernelError> {
    let expected = match n {
        2 => 2,
        3 => 4,
        other => return Err(KernelError::FamilySize(other)),
    };
    if params.len() != expected {
        return Err(KernelError::ParameterCount {
            n,
            expected,
            got: params.len(),
        });
    }
    let k1 = if n == 2 {
        let (a, b) = (params[0], params[1]);
        vec![vec![a, b], vec![-b, -a]]
    } else {
        let (a, b, c, d) = (params[0], params[1], params[2], params[3]);
        vec![vec![a, b, c], vec![d, 0.0, -d], vec![-c, -b, -a]]
    };
    let k2 = rotate_kernel_90(&k1, -1);
    KernelPair::new(k1, k2)
}

/// Correlation response of a kernel, summed over channels, on the raster
/// grid. `response[i][j]` belongs to the continuous index position
/// `(i + offset, j + offset)`, where `offset` is `0` for odd sizes and `0.5`
/// for even ones. Borders are mirrored.
pub(crate) fn correlate(img: &RasterImage, k: &Kernel) -> Vec<f64> {
    let n = k.len();
    let a0 = ((n - 1) / 2) as isize;
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    let data = img.data();
    let mut out = vec![0.0; h * w];
    for i in 0..h {
        for j in 0..w {
            let mut acc = 0.0;
            for (a, row) in k.iter().enumerate() {
                let ii = crate::image::reflect_index(i as isize + a as isize - a0, h);
                for (b, &kv) in row.iter().enumerate() {
                    if kv == 0.0 {
                        continue;
                    }
                    let jj = crate::image::reflect_index(j as isize + b as isize - a0, w);
                    for c in 0..ch {
                        acc += kv * data[(ii * w + jj) * ch + c];
                    }
                }
            }
            out[i * w + j] = acc;
        }
    }
    out
}

/// How filter responses are read at off-grid circle samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseSampling {
    /// Bilinear interpolation between the four surrounding pixels.
    #[default]
    Bilinear,
    /// The response at the pixel closest to the sample.
    NearestPixel,
}

/// Two response rasters read as one vector field on the image domain, in
/// domain units.
pub(crate) struct ResponseField {
    r1: Vec<f64>,
    r2: Vec<f64>,
    height: usize,
    width: usize,
    offset: f64,
    scale: f64,
    sampling: ResponseSampling,
}

impl ResponseField {
    pub(crate) fn new(
        r1: Vec<f64>,
        r2: Vec<f64>,
        img: &RasterImage,
        offset: f64,
        scale: f64,
        sampling: ResponseSampling,
    ) -> Self {
        Self {
            r1,
            r2,
            height: img.height(),
            width: img.width(),
            offset,
            scale,
            sampling,
        }
    }

    fn sample(&self, fi: f64, fj: f64) -> [f64; 2] {
        if self.sampling == ResponseSampling::NearestPixel {
            let near = |f: f64, n: usize| (f.round().max(0.0) as usize).min(n - 1);
            let k = near(fi - self.offset, self.height) * self.width
                + near(fj - self.offset, self.width);
            return [self.scale * self.r1[k], self.scale * self.r2[k]];
        }
        let clamp_cell = |f: f64, n: usize| {
            let f = f.clamp(0.0, (n - 1) as f64);
            let base = (f.floor() as usize).min(n - 2);
            (base, f - base as f64)
        };
        let (i0, ti) = clamp_cell(fi - self.offset, self.height);
        let (j0, tj) = clamp_cell(fj - self.offset, self.width);
        let w = self.width;
        let lerp = |r: &[f64]| {
            let top = r[i0 * w + j0] * (1.0 - tj) + r[i0 * w + j0 + 1] * tj;
            let bottom = r[(i0 + 1) * w + j0] * (1.0 - tj) + r[(i0 + 1) * w + j0 + 1] * tj;
            top * (1.0 - ti) + bottom * ti
        };
        [self.scale * lerp(&self.r1), self.scale * lerp(&self.r2)]
    }

    /// Arc-length weighted sum over the circle samples.
    pub(crate) fn integrate(&self, circles: &SampleCircleSet) -> GradientIntegral {
        let s = self.height.min(self.width) as f64;
        let (ci, cj) = (self.height as f64 / 2.0 - 0.5, self.width as f64 / 2.0 - 0.5);
        let mut acc = [0.0, 0.0];
        for (z, wgt) in circles.points() {
            let g = self.sample(ci - (z[0] - 0.5) * s, cj + (z[1] - 0.5) * s);
            acc[0] += wgt * g[0];
            acc[1] += wgt * g[1];
        }
        GradientIntegral::from_vector(acc)
    }
}

/// Integral of `(k₁ ⋆ u, k₂ ⋆ u)` over the sample circles, with the
/// responses computed on the blurred raster and interpolated bilinearly.
pub fn kernel_gradient_integral(
    cimg: &ContinuousImage,
    pair: &KernelPair,
    circles: &SampleCircleSet,
) -> GradientIntegral {
    kernel_gradient_integral_with(cimg, pair, circles, ResponseSampling::Bilinear)
}

pub fn kernel_gradient_integral_with(
    cimg: &ContinuousImage,
    pair: &KernelPair,
    circles: &SampleCircleSet,
    sampling: ResponseSampling,
) -> GradientIntegral {
    let img = cimg.blurred();
    let offset = if pair.size() % 2 == 0 { 0.5 } else { 0.0 };
    let field = ResponseField::new(
        correlate(img, &pair.k1),
        correlate(img, &pair.k2),
        img,
        offset,
        img.shorter_side() as f64,
        sampling,
    );
    field.integrate(circles)
}

/// Canonical angle with the gradient replaced by the responses of `pair`.
pub fn kernel_canonical_angle(
    cimg: &ContinuousImage,
    pair: &KernelPair,
    circles: &SampleCircleSet,
) -> Result<Rotation2D, KernelError> {
    let integral = kernel_gradient_integral(cimg, pair, circles);
    Ok(angle_from_integral(&integral, degeneracy_threshold(cimg))?)
}
