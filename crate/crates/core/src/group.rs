//! Group elements, the orbit-mapping contract, and the two elementary orbit
//! maps on real vectors (mean subtraction and magnitude sorting).
//!
//! Every orbit map in this crate returns a [`CanonicalResult`]: the selected
//! orbit element together with the group element that produced it, so that
//! the transformation can be undone afterwards (see [`equivariant_wrap`]).

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by group-element constructors and the vector orbit maps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("empty input")]
    EmptyInput,
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),
    #[error("rotation matrix is not orthogonal (max deviation {0:e})")]
    NotOrthogonal(f64),
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("non-finite input")]
    NonFinite,
}

/// A group element acting on values of type `X`.
pub trait GroupAction<X> {
    fn act(&self, x: &X) -> X;

    fn inverse(&self) -> Self
    where
        Self: Sized;
}

/// The orbit element selected by an orbit map, plus the group element that
/// maps the input onto it: `element.act(input) == canonical`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalResult<X, G> {
    pub canonical: X,
    pub element: G,
}

/// A map selecting one fixed representative from every orbit.
pub trait OrbitMap<X> {
    type Element: GroupAction<X>;
    type Error;

    fn canonicalize(&self, x: &X) -> Result<CanonicalResult<X, Self::Element>, Self::Error>;
}

impl<X, G, E, F> OrbitMap<X> for F
where
    F: Fn(&X) -> Result<CanonicalResult<X, G>, E>,
    G: GroupAction<X>,
{
    type Element = G;
    type Error = E;

    fn canonicalize(&self, x: &X) -> Result<CanonicalResult<X, G>, E> {
        self(x)
    }
}

/// Builds an equivariant map from an arbitrary `inner` map by conjugating it
/// with the orbit map's group element: `element⁻¹(inner(element(x)))`.
pub fn equivariant_wrap<X, M, F>(orbit_map: &M, inner: F, x: &X) -> Result<X, M::Error>
where
    M: OrbitMap<X>,
    F: Fn(&X) -> X,
{
    let result = orbit_map.canonicalize(x)?;
    let processed = inner(&result.canonical);
    Ok(result.element.inverse().act(&processed))
}

// Rotations of the plane.

/// Angles closer than this to a full turn collapse onto the identity.
const ANGLE_SNAP: f64 = 1e-14;

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r < ANGLE_SNAP || TAU - r < ANGLE_SNAP {
        0.0
    } else {
        r
    }
}

/// Signed difference `a - b` wrapped into `(-π, π]`.
pub fn angular_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

/// A rotation of the plane, `r(α) = [[cos α, -sin α], [sin α, cos α]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation2D {
    angle: f64,
}

impl Rotation2D {
    pub fn new(angle: f64) -> Self {
        Self {
            angle: normalize_angle(angle),
        }
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::new(degrees.to_radians())
    }

    pub fn identity() -> Self {
        Self { angle: 0.0 }
    }

    /// Angle in radians, in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn degrees(&self) -> f64 {
        self.angle.to_degrees()
    }

    /// `self ∘ other`, i.e. the rotation by the summed angle.
    pub fn compose(&self, other: &Rotation2D) -> Rotation2D {
        Rotation2D::new(self.angle + other.angle)
    }

    pub fn inverse(&self) -> Rotation2D {
        Rotation2D::new(-self.angle)
    }

    /// `(cos α, sin α)`, exact for multiples of a quarter turn.
    pub fn cos_sin(&self) -> (f64, f64) {
        exact_cos_sin(self.angle)
    }

    /// `r(α) z`.
    pub fn apply(&self, z: [f64; 2]) -> [f64; 2] {
        let (c, s) = self.cos_sin();
        [c * z[0] - s * z[1], s * z[0] + c * z[1]]
    }

    /// `rᵀ(α) z`.
    pub fn apply_transpose(&self, z: [f64; 2]) -> [f64; 2] {
        let (c, s) = self.cos_sin();
        [c * z[0] + s * z[1], -s * z[0] + c * z[1]]
    }
}

/// `(cos θ, sin θ)` with exact zeros and ones at multiples of π/2, so that
/// quarter-turn rotations map grids onto grids without round-off.
pub fn exact_cos_sin(theta: f64) -> (f64, f64) {
    let q = theta / FRAC_PI_2;
    let k = q.round();
    if (q - k).abs() < 1e-14 {
        match (k as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        (theta.cos(), theta.sin())
    }
}

// Similarity transforms of 3-space.

/// Tolerance on `R Rᵀ = I` for [`Similarity3`] rotations.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// `x ↦ scale · R x + translation` with `R` orthogonal (possibly improper).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity3 {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
    scale: f64,
}

impl Similarity3 {
    pub fn new(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        scale: f64,
    ) -> Result<Self, GroupError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(GroupError::InvalidScale(scale));
        }
        if !rotation.iter().chain(translation.iter()).all(|v| v.is_finite()) {
            return Err(GroupError::NonFinite);
        }
        let deviation = orthogonality_defect(&rotation);
        if deviation > ORTHOGONALITY_TOL {
            return Err(GroupError::NotOrthogonal(deviation));
        }
        Ok(Self {
            rotation,
            translation,
            scale,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
            scale: 1.0,
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            translation,
            ..Self::identity()
        }
    }

    pub fn from_scale(scale: f64) -> Result<Self, GroupError> {
        Self::new(Matrix3::identity(), Vector3::zeros(), scale)
    }

    pub fn from_rotation(rotation: Matrix3<f64>) -> Result<Self, GroupError> {
        Self::new(rotation, Vector3::zeros(), 1.0)
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn determinant(&self) -> f64 {
        self.rotation.determinant()
    }

    pub fn apply_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        (self.rotation * p) * self.scale + self.translation
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Similarity3) -> Similarity3 {
        Similarity3 {
            rotation: self.rotation * other.rotation,
            translation: (self.rotation * other.translation) * self.scale + self.translation,
            scale: self.scale * other.scale,
        }
    }

    pub fn inverse(&self) -> Similarity3 {
        let rt = self.rotation.transpose();
        let inv_scale = 1.0 / self.scale;
        Similarity3 {
            rotation: rt,
            translation: -(rt * self.translation) * inv_scale,
            scale: inv_scale,
        }
    }

    /// Row-major entries of the rotation matrix.
    pub fn rotation_row_major(&self) -> [f64; 9] {
        let r = &self.rotation;
        [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
        ]
    }
}

/// Largest entry of `|R Rᵀ - I|`.
pub fn orthogonality_defect(r: &Matrix3<f64>) -> f64 {
    (r * r.transpose() - Matrix3::identity()).amax()
}

// Elementary orbit maps on vectors.

/// Translation along the all-ones direction: `v ↦ v - offset·𝟙`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shift {
    pub offset: f64,
}

impl GroupAction<Vec<f64>> for Shift {
    fn act(&self, x: &Vec<f64>) -> Vec<f64> {
        x.iter().map(|v| v - self.offset).collect()
    }

    fn inverse(&self) -> Self {
        Shift {
            offset: -self.offset,
        }
    }
}

/// A bijection of `{0, …, n-1}` acting on sequences by gathering:
/// `apply(v)[i] = v[mapping[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self, GroupError> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n {
                return Err(GroupError::InvalidPermutation(format!(
                    "index {m} out of range for length {n}"
                )));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(GroupError::InvalidPermutation(format!(
                    "index {m} appears twice"
                )));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn apply<T: Clone>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.mapping.len(), "permutation length mismatch");
        self.mapping.iter().map(|&i| v[i].clone()).collect()
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "permutation length mismatch");
        Permutation {
            mapping: self.mapping.iter().map(|&i| other.mapping[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Permutation { mapping: inv }
    }
}

impl GroupAction<Vec<f64>> for Permutation {
    fn act(&self, x: &Vec<f64>) -> Vec<f64> {
        self.apply(x)
    }

    fn inverse(&self) -> Self {
        Permutation::inverse(self)
    }
}

/// Selects the zero-mean element of the orbit under `v ↦ v + a𝟙`.
pub fn mean_subtract(v: &Vec<f64>) -> Result<CanonicalResult<Vec<f64>, Shift>, GroupError> {
    if v.is_empty() {
        return Err(GroupError::EmptyInput);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    // One refinement pass removes most of the summation round-off.
    let residual = v.iter().map(|x| x - mean).sum::<f64>() / n;
    let element = Shift {
        offset: mean + residual,
    };
    Ok(CanonicalResult {
        canonical: element.act(v),
        element,
    })
}

/// Ascending-magnitude order; ties broken by signed value, then by index.
fn magnitude_order(v: &[f64], a: usize, b: usize) -> Ordering {
    v[a].abs()
        .total_cmp(&v[b].abs())
        .then(v[a].total_cmp(&v[b]))
        .then(a.cmp(&b))
}

/// Selects the element of the permutation orbit whose entries are sorted by
/// ascending magnitude.
///
/// The magnitude order alone does not pin down a single element when
/// `|v_i| = |v_j|` with opposite signs, so equal magnitudes are ordered by
/// signed value (negative first). Entries equal in both are interchangeable,
/// and the remaining index tiebreak only fixes which permutation is reported.
pub fn sort_orbit_map(
    v: &Vec<f64>,
) -> Result<CanonicalResult<Vec<f64>, Permutation>, GroupError> {
    if v.is_empty() {
        return Err(GroupError::EmptyInput);
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| magnitude_order(v, a, b));
    let element = Permutation { mapping: order };
    Ok(CanonicalResult {
        canonical: element.apply(v),
        element,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn rotation_compose_with_inverse_is_exact_identity() {
        for k in 0..1000 {
            let a = Rotation2D::new(k as f64 * 0.0137 - 3.0);
            assert_eq!(a.compose(&a.inverse()).angle(), 0.0, "angle {}", a.angle());
        }
    }

    #[test]
    fn rotation_compose_adds_angles_mod_two_pi() {
        let a = Rotation2D::new(5.0);
        let b = Rotation2D::new(2.0);
        assert_abs_diff_eq!(a.compose(&b).angle(), 7.0 - TAU, epsilon = 1e-15);
        assert_abs_diff_eq!(Rotation2D::new(-FRAC_PI_2).angle(), 1.5 * PI);
    }

    #[test]
    fn quarter_turns_are_exact() {
        let r = Rotation2D::from_degrees(90.0);
        assert_eq!(r.apply([1.0, 0.0]), [0.0, 1.0]);
        assert_eq!(r.apply_transpose([0.0, 1.0]), [1.0, 0.0]);
        assert_eq!(Rotation2D::new(PI).cos_sin(), (-1.0, 0.0));
    }

    #[test]
    fn angular_difference_wraps() {
        assert_abs_diff_eq!(angular_difference(0.1, TAU - 0.1), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(angular_difference(TAU - 0.1, 0.1), -0.2, epsilon = 1e-12);
    }

    #[test]
    fn similarity_rejects_bad_inputs() {
        assert!(matches!(
            Similarity3::from_scale(0.0),
            Err(GroupError::InvalidScale(_))
        ));
        let shear = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            Similarity3::from_rotation(shear),
            Err(GroupError::NotOrthogonal(_))
        ));
    }

    #[test]
    fn similarity_inverse_round_trips() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let r = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        let t = Similarity3::new(r, Vector3::new(1.0, -2.0, 3.5), 7.5).unwrap();
        let p = Vector3::new(0.25, -4.0, 9.0);
        let back = t.inverse().apply_point(&t.apply_point(&p));
        assert!((back - p).norm() <= 1e-12 * p.norm());
        let id = t.compose(&t.inverse());
        assert!((id.apply_point(&p) - p).norm() <= 1e-12 * p.norm());
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn permutation_compose_and_inverse() {
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let q = Permutation::new(vec![1, 3, 0, 2]).unwrap();
        let v = vec![10.0, 11.0, 12.0, 13.0];
        assert_eq!(p.compose(&q).apply(&v), p.apply(&q.apply(&v)));
        assert_eq!(p.inverse().apply(&p.apply(&v)), v);
    }

    #[test]
    fn mean_subtract_examples() {
        let r = mean_subtract(&vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.canonical, vec![-1.0, 0.0, 1.0]);
        assert_eq!(r.element.offset, 2.0);

        let r = mean_subtract(&vec![5.0, 5.0, 5.0]).unwrap();
        assert_eq!(r.canonical, vec![0.0, 0.0, 0.0]);
        assert_eq!(r.element.offset, 5.0);

        let shifted = mean_subtract(&vec![8.0, 9.0, 10.0]).unwrap();
        assert_eq!(shifted.canonical, vec![-1.0, 0.0, 1.0]);

        assert_eq!(mean_subtract(&vec![]), Err(GroupError::EmptyInput));
    }

    #[test]
    fn sort_examples() {
        let r = sort_orbit_map(&vec![-3.0, 1.0, 2.0]).unwrap();
        assert_eq!(r.canonical, vec![1.0, 2.0, -3.0]);
        assert_eq!(r.element.act(&vec![-3.0, 1.0, 2.0]), r.canonical);
        assert_eq!(sort_orbit_map(&vec![]), Err(GroupError::EmptyInput));
    }

    #[test]
    fn sort_is_invariant_over_all_permutations() {
        let base = [-3.0, 1.0, 2.0];
        for perm in all_permutations(3) {
            let v: Vec<f64> = perm.iter().map(|&i| base[i]).collect();
            assert_eq!(sort_orbit_map(&v).unwrap().canonical, vec![1.0, 2.0, -3.0]);
        }
    }

    #[test]
    fn sort_tie_rule_has_unique_fixed_point() {
        // Enumerate the orbit of (2, -2, 1): every element must map to the
        // same canonical vector, and that vector must be a fixed point.
        let base = [2.0, -2.0, 1.0];
        let mut outputs = Vec::new();
        for perm in all_permutations(3) {
            let v: Vec<f64> = perm.iter().map(|&i| base[i]).collect();
            outputs.push(sort_orbit_map(&v).unwrap().canonical);
        }
        assert!(outputs.iter().all(|o| *o == vec![1.0, -2.0, 2.0]));
        let fixed = sort_orbit_map(&outputs[0]).unwrap();
        assert_eq!(fixed.canonical, outputs[0]);
        assert_eq!(fixed.element, Permutation::identity(3));
    }

    #[test]
    fn equivariant_wrap_identity_inner_returns_input() {
        let x = vec![3.0, -1.0, 4.0, 1.5];
        let out = equivariant_wrap(&mean_subtract, |c: &Vec<f64>| c.clone(), &x).unwrap();
        assert_eq!(out, x);
        let out = equivariant_wrap(&sort_orbit_map, |c: &Vec<f64>| c.clone(), &x).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn sort_wrap_is_permutation_equivariant() {
        // inner: cumulative sum, which is not permutation-equivariant alone.
        let inner = |c: &Vec<f64>| {
            let mut acc = 0.0;
            c.iter()
                .map(|v| {
                    acc += v;
                    acc
                })
                .collect::<Vec<f64>>()
        };
        let x = vec![0.5, -2.0, 3.0, 1.25];
        let wrapped = equivariant_wrap(&sort_orbit_map, inner, &x).unwrap();
        for perm in all_permutations(4) {
            let g = Permutation::new(perm).unwrap();
            let lhs = equivariant_wrap(&sort_orbit_map, inner, &g.apply(&x)).unwrap();
            assert_eq!(lhs, g.apply(&wrapped));
        }
    }

    fn all_permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mean_subtract_is_shift_invariant(
                v in proptest::collection::vec(-100.0f64..100.0, 1..40),
                a in -50.0f64..50.0,
            ) {
                let r = mean_subtract(&v).unwrap();
                let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
                let mean: f64 = r.canonical.iter().sum::<f64>() / v.len() as f64;
                prop_assert!(mean.abs() <= 1e-12 * max);
                prop_assert_eq!(r.element.act(&v), r.canonical.clone());
                let shifted: Vec<f64> = v.iter().map(|x| x + a).collect();
                let s = mean_subtract(&shifted).unwrap();
                for (p, q) in r.canonical.iter().zip(&s.canonical) {
                    prop_assert!((p - q).abs() <= 1e-12 * (max + a.abs()));
                }
            }

            #[test]
            fn sort_is_idempotent_and_consistent(
                v in proptest::collection::vec(-5i32..5, 1..12),
            ) {
                let v: Vec<f64> = v.into_iter().map(f64::from).collect();
                let r = sort_orbit_map(&v).unwrap();
                prop_assert_eq!(r.element.act(&v), r.canonical.clone());
                prop_assert!(r.canonical.windows(2).all(|w| w[0].abs() <= w[1].abs()));
                let again = sort_orbit_map(&r.canonical).unwrap();
                prop_assert_eq!(again.canonical, r.canonical.clone());
                let rev: Vec<f64> = v.iter().rev().copied().collect();
                prop_assert_eq!(sort_orbit_map(&rev).unwrap().canonical, r.canonical);
            }
        }
    }
}
