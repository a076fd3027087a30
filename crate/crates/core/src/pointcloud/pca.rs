use nalgebra::{Matrix3, MatrixXx3, Vector3};
use serde::{Deserialize, Serialize};

use super::cloud::{center, scale_normalize, PointCloud};
use super::CloudError;
use crate::group::{CanonicalResult, Similarity3};

/// Minimum relative gap `(σ_i - σ_{i+1}) / σ_1` between singular values.
pub const EPS_GAP: f64 = 1e-6;

/// Projections at most `EPS_SIGN · σ_1` in magnitude carry no sign.
pub const EPS_SIGN: f64 = 1e-9;

const MIN_POINTS: usize = 4;

/// How the sign of each principal axis is fixed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignRule {
    /// Sign of the first point's coordinate along the axis (the first row of
    /// `U`). Fails when that coordinate is numerically zero.
    FirstRow,
    /// Sign of the first point, in input order, whose coordinate along the
    /// axis is numerically nonzero. Agrees with `FirstRow` whenever the latter
    /// succeeds.
    #[default]
    FirstSignificant,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PcaOptions {
    pub sign_rule: SignRule,
    /// Flip the last axis when the aligning transform would be a reflection.
    pub proper_rotation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaDiagnostics {
    pub singular_values: [f64; 3],
    pub relative_gaps: [f64; 2],
    pub sign_vector: [f64; 3],
    /// Determinant of the applied orthogonal transform, `±1`.
    pub determinant: f64,
}

/// Output of [`pca_align`] and [`orbit_map_similarity_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct PcaAlignment {
    pub result: CanonicalResult<PointCloud, Similarity3>,
    pub diagnostics: PcaDiagnostics,
}

pub fn pca_align(x: &PointCloud) -> Result<PcaAlignment, CloudError> {
    pca_align_with(x, &PcaOptions::default())
}

/// Centers `x`, takes the SVD `X_c = U Σ Vᵀ` with `Σ` nonincreasing, fixes a
/// sign per axis into `D`, and returns `X̂ = X_c V D`. The recorded element
/// is `x ↦ (VD)ᵀ (x - c)`.
pub fn pca_align_with(x: &PointCloud, options: &PcaOptions) -> Result<PcaAlignment, CloudError> {
    if x.len() < MIN_POINTS {
        return Err(CloudError::TooFewPoints {
            got: x.len(),
            need: MIN_POINTS,
        });
    }
    let c = x.centroid();
    let centered: Vec<Vector3<f64>> = x.points().iter().map(|p| p - c).collect();
    let m = MatrixXx3::from_fn(centered.len(), |i, j| centered[i][j]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;

    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let sigma = order.map(|k| sv[k]);
    let axes = order.map(|k| v_t.row(k).transpose());

    let relative_gaps = if sigma[0] > 0.0 {
        [
            (sigma[0] - sigma[1]) / sigma[0],
            (sigma[1] - sigma[2]) / sigma[0],
        ]
    } else {
        [0.0, 0.0]
    };
    if relative_gaps.iter().any(|&g| !(g > EPS_GAP)) {
        return Err(CloudError::DegenerateSpectrum { relative_gaps });
    }

    let threshold = EPS_SIGN * sigma[0];
    let mut signs = [1.0; 3];
    for axis in 0..3 {
        if sigma[axis] <= threshold {
            // every coordinate along a null axis is numerically zero
            continue;
        }
        let coord = |p: &Vector3<f64>| p.dot(&axes[axis]);
        let chosen = match options.sign_rule {
            SignRule::FirstRow => Some(coord(&centered[0])).filter(|v| v.abs() > threshold),
            SignRule::FirstSignificant => centered.iter().map(coord).find(|v| v.abs() > threshold),
        };
        signs[axis] = match chosen {
            Some(v) => v.signum(),
            None => return Err(CloudError::AmbiguousSign { axis }),
        };
    }

    let mut vd = Matrix3::from_columns(&[
        axes[0] * signs[0],
        axes[1] * signs[1],
        axes[2] * signs[2],
    ]);
    if options.proper_rotation && vd.determinant() < 0.0 {
        signs[2] = -signs[2];
        vd.set_column(2, &(-vd.column(2)));
    }
    let rotation = vd.transpose();
    let determinant = rotation.determinant().signum();
    let canonical = PointCloud::new(centered.iter().map(|p| rotation * p).collect())?;
    let element = Similarity3::new(rotation, -(rotation * c), 1.0)
        .expect("singular vectors form an orthogonal matrix");

    Ok(PcaAlignment {
        result: CanonicalResult { canonical, element },
        diagnostics: PcaDiagnostics {
            singular_values: sigma,
            relative_gaps,
            sign_vector: signs,
            determinant,
        },
    })
}

/// Center, PCA-align, then normalize scale: invariant to translations,
/// rotations and positive scalings.
pub fn orbit_map_similarity(
    x: &PointCloud,
) -> Result<CanonicalResult<PointCloud, Similarity3>, CloudError> {
    orbit_map_similarity_with(x, &PcaOptions::default()).map(|a| a.result)
}

pub fn orbit_map_similarity_with(
    x: &PointCloud,
    options: &PcaOptions,
) -> Result<PcaAlignment, CloudError> {
    let centered = center(x);
    let aligned = pca_align_with(&centered.canonical, options)?;
    let scaled = scale_normalize(&aligned.result.canonical)?;
    let element = scaled
        .element
        .compose(&aligned.result.element)
        .compose(&centered.element);
    Ok(PcaAlignment {
        result: CanonicalResult {
            canonical: scaled.canonical,
            element,
        },
        diagnostics: aligned.diagnostics,
    })
}
