use nalgebra::Vector3;

use super::CloudError;
use crate::group::{CanonicalResult, GroupAction, Similarity3};

/// `N` points in 3-space, stored one point per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vector3<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self, CloudError> {
        if points.is_empty() {
            return Err(CloudError::Empty);
        }
        if points.iter().any(|p| !p.iter().all(|v| v.is_finite())) {
            return Err(CloudError::NonFinite);
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[[f64; 3]]) -> Result<Self, CloudError> {
        Self::new(rows.iter().map(|r| Vector3::new(r[0], r[1], r[2])).collect())
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rows(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(|p| [p.x, p.y, p.z]).collect()
    }

    pub fn centroid(&self) -> Vector3<f64> {
        let sum = self.points.iter().fold(Vector3::zeros(), |acc, p| acc + p);
        sum / self.points.len() as f64
    }

    /// `(1/N) Σ ‖x_i‖₂`.
    pub fn mean_norm(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).sum::<f64>() / self.points.len() as f64
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.points.iter().map(|p| p.amax()).fold(0.0, f64::max)
    }

    /// Largest pointwise distance to `other`, divided by `max(1, other.max_abs())`.
    pub fn relative_distance(&self, other: &PointCloud) -> f64 {
        assert_eq!(self.len(), other.len(), "clouds differ in size");
        let d = self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        d / other.max_abs().max(1.0)
    }

    pub fn map_points(&self, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(f).collect(),
        }
    }
}

impl GroupAction<PointCloud> for Similarity3 {
    fn act(&self, x: &PointCloud) -> PointCloud {
        x.map_points(|p| self.apply_point(p))
    }

    fn inverse(&self) -> Self {
        Similarity3::inverse(self)
    }
}

/// Subtracts the center of mass. The element translates by `-centroid`.
pub fn center(x: &PointCloud) -> CanonicalResult<PointCloud, Similarity3> {
    let c = x.centroid();
    CanonicalResult {
        canonical: x.map_points(|p| p - c),
        element: Similarity3::from_translation(-c),
    }
}

/// Divides by the mean distance to the origin. The element scales by the
/// reciprocal of that divisor.
pub fn scale_normalize(
    x: &PointCloud,
) -> Result<CanonicalResult<PointCloud, Similarity3>, CloudError> {
    let divisor = x.mean_norm();
    if !(divisor > 0.0) {
        return Err(CloudError::DegenerateScale);
    }
    let element = Similarity3::from_scale(1.0 / divisor).map_err(|_| CloudError::DegenerateScale)?;
    Ok(CanonicalResult {
        canonical: x.map_points(|p| p / divisor),
        element,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointcloud::{SCALE_SET, TRANSLATION_SET};
    use approx::assert_relative_eq;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(PointCloud::new(vec![]), Err(CloudError::Empty)));
        assert!(matches!(
            PointCloud::from_rows(&[[0.0, f64::NAN, 0.0]]),
            Err(CloudError::NonFinite)
        ));
    }

    #[test]
    fn centering_examples() {
        let sym = PointCloud::from_rows(&[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).unwrap();
        let out = center(&sym);
        assert_eq!(out.canonical, sym);
        assert_eq!(*out.element.translation(), Vector3::zeros());

        let tri = PointCloud::from_rows(&[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 3.0, 0.0]])
            .unwrap();
        let out = center(&tri);
        assert_eq!(*out.element.translation(), Vector3::new(-1.0, -1.0, 0.0));
        assert_eq!(
            out.canonical.rows(),
            vec![[-1.0, -1.0, 0.0], [2.0, -1.0, 0.0], [-1.0, 2.0, 0.0]]
        );
    }

    #[test]
    fn centering_is_translation_invariant() {
        let x = PointCloud::from_rows(&[[0.3, 1.2, -0.7], [2.0, -1.0, 0.5], [0.1, 0.2, 0.3]])
            .unwrap();
        let base = center(&x).canonical;
        for &t in &TRANSLATION_SET {
            for axis in 0..3 {
                let mut shift = Vector3::zeros();
                shift[axis] = t;
                let moved = center(&x.map_points(|p| p + shift)).canonical;
                assert!(moved.relative_distance(&base) <= 1e-12 * (1.0 + t.abs()));
            }
        }
    }

    #[test]
    fn scale_examples() {
        let x = PointCloud::from_rows(&[[1.0, 2.0, 2.0], [-1.0, -2.0, -2.0]]).unwrap();
        let out = scale_normalize(&x).unwrap();
        assert_relative_eq!(out.element.scale(), 1.0 / 3.0, max_relative = 1e-15);
        let want = [[1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0], [-1.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0]];
        for (got, want) in out.canonical.rows().iter().zip(want) {
            for k in 0..3 {
                assert_relative_eq!(got[k], want[k], max_relative = 1e-15);
            }
        }
        let unit = PointCloud::from_rows(&[[1.0, 0.0, 0.0], [0.0, -1.0, 0.0]]).unwrap();
        let out = scale_normalize(&unit).unwrap();
        assert_eq!(out.canonical, unit);
        assert_eq!(out.element.scale(), 1.0);
    }

    #[test]
    fn scale_normalize_is_scale_invariant() {
        let x = PointCloud::from_rows(&[[0.3, 1.2, -0.7], [2.0, -1.0, 0.5], [0.1, 0.2, 0.3]])
            .unwrap();
        let base = scale_normalize(&x).unwrap().canonical;
        assert_relative_eq!(base.mean_norm(), 1.0, max_relative = 1e-12);
        for &s in &SCALE_SET {
            let out = scale_normalize(&x.map_points(|p| p * s)).unwrap().canonical;
            assert!(out.relative_distance(&base) <= 1e-12);
        }
    }

    #[test]
    fn all_zero_cloud_has_degenerate_scale() {
        let x = PointCloud::from_rows(&[[0.0; 3]; 4]).unwrap();
        assert!(matches!(scale_normalize(&x), Err(CloudError::DegenerateScale)));
    }
}
