use std::f64::consts::TAU;

use nalgebra::Matrix3;

use crate::group::exact_cos_sin;

/// Scale factors of the similarity evaluation grid.
pub const SCALE_SET: [f64; 9] = [0.001, 0.01, 0.1, 0.5, 1.0, 5.0, 10.0, 100.0, 1000.0];

/// Per-axis offsets of the translation evaluation grid.
pub const TRANSLATION_SET: [f64; 8] = [-10.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 10.0];

/// `r_xy(2πi/n_a) · r_yz(2πj/n_b)` for `i < n_a`, `j < n_b`, row-major in
/// `(i, j)`.
pub fn rotation_grid(n_a: usize, n_b: usize) -> Vec<Matrix3<f64>> {
    assert!(n_a >= 1 && n_b >= 1, "grid sizes must be positive");
    let mut out = Vec::with_capacity(n_a * n_b);
    for i in 0..n_a {
        let (ca, sa) = exact_cos_sin(TAU * i as f64 / n_a as f64);
        #[rustfmt::skip]
        let xy = Matrix3::new(
            ca, -sa, 0.0,
            sa, ca, 0.0,
            0.0, 0.0, 1.0,
        );
        for j in 0..n_b {
            let (cb, sb) = exact_cos_sin(TAU * j as f64 / n_b as f64);
            #[rustfmt::skip]
            let yz = Matrix3::new(
                1.0, 0.0, 0.0,
                0.0, cb, -sb,
                0.0, sb, cb,
            );
            out.push(xy * yz);
        }
    }
    out
}
