//! Orbit mappings: canonicalization procedures that send every element of a
//! group orbit to one fixed representative.
//!
//! Composing any function with an orbit map makes the composite invariant to
//! the group; conjugating with the returned group element makes it
//! equivariant. Implemented groups:
//!
//! * shifts and permutations of real vectors ([`group`]),
//! * planar rotations of images via the mean image gradient ([`image`]),
//! * 3D similarity transforms of point clouds via centering, PCA and scale
//!   normalization ([`pointcloud`]).
//!
//! [`kernel`] checks when a pair of discrete derivative filters preserves the
//! image construction under quarter turns, and [`stability`] measures how
//! stable the image canonicalization is under resampling and noise and runs
//! clean/average/worst-case sweeps over transformation orbits.

pub mod group;
pub mod image;
pub mod kernel;
pub mod pointcloud;
pub mod stability;
