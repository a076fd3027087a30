use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::raster::RasterImage;
use crate::group::{GroupAction, Rotation2D};

/// Resampling kernel used by [`rotate_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Nearest,
    Bilinear,
    /// Catmull-Rom cubic convolution (`a = -0.5`).
    Bicubic,
}

impl Interpolation {
    pub const ALL: [Interpolation; 3] = [Self::Nearest, Self::Bilinear, Self::Bicubic];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Nearest => "nearest",
            Self::Bilinear => "bilinear",
            Self::Bicubic => "bicubic",
        }
    }
}

impl fmt::Display for Interpolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Interpolation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nearest" => Ok(Self::Nearest),
            "bilinear" => Ok(Self::Bilinear),
            "bicubic" => Ok(Self::Bicubic),
            other => Err(format!("unknown interpolation mode `{other}`")),
        }
    }
}

/// Rotates `img` about its center by inverse warping:
/// `out(z) = img(c + r(angle)(z - c))`, so content turns by `-angle` and the
/// canonical angle of the result is that of `img` minus `angle`.
///
/// Samples that fall outside the raster read as 0. The output has the input's
/// shape. At `angle = 0` the output is bit-identical to the input; at quarter
/// turns on square images it is an exact array rotation.
pub fn rotate_image(img: &RasterImage, angle: Rotation2D, mode: Interpolation) -> RasterImage {
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    let (cos, sin) = angle.cos_sin();
    let ci = h as f64 / 2.0 - 0.5;
    let cj = w as f64 / 2.0 - 0.5;
    let mut data = vec![0.0; h * w * ch];
    let mut px = vec![0.0; ch];
    for i in 0..h {
        for j in 0..w {
            // offset from the center with x up, y right, in pixel units
            let dx = ci - i as f64;
            let dy = j as f64 - cj;
            let sx = cos * dx - sin * dy;
            let sy = sin * dx + cos * dy;
            let (si, sj) = (ci - sx, cj + sy);
            sample(img, si, sj, mode, &mut px);
            data[(i * w + j) * ch..(i * w + j + 1) * ch].copy_from_slice(&px);
        }
    }
    RasterImage::new(h, w, ch, data).expect("shape preserved")
}

fn sample(img: &RasterImage, si: f64, sj: f64, mode: Interpolation, out: &mut [f64]) {
    match mode {
        Interpolation::Nearest => {
            let (i, j) = (si.round(), sj.round());
            for (c, o) in out.iter_mut().enumerate() {
                *o = tap(img, i as isize, j as isize, c);
            }
        }
        Interpolation::Bilinear => {
            let (i0, j0) = (si.floor(), sj.floor());
            let (ti, tj) = (si - i0, sj - j0);
            let (i0, j0) = (i0 as isize, j0 as isize);
            for (c, o) in out.iter_mut().enumerate() {
                let top = tap(img, i0, j0, c) * (1.0 - tj) + tap(img, i0, j0 + 1, c) * tj;
                let bottom =
                    tap(img, i0 + 1, j0, c) * (1.0 - tj) + tap(img, i0 + 1, j0 + 1, c) * tj;
                *o = top * (1.0 - ti) + bottom * ti;
            }
        }
        Interpolation::Bicubic => {
            let (i0, j0) = (si.floor(), sj.floor());
            let wi = catmull_rom_weights(si - i0);
            let wj = catmull_rom_weights(sj - j0);
            let (i0, j0) = (i0 as isize, j0 as isize);
            for (c, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (a, wa) in wi.iter().enumerate() {
                    let mut row = 0.0;
                    for (b, wb) in wj.iter().enumerate() {
                        row += wb * tap(img, i0 + a as isize - 1, j0 + b as isize - 1, c);
                    }
                    acc += wa * row;
                }
                *o = acc;
            }
        }
    }
}

#[inline]
fn tap(img: &RasterImage, i: isize, j: isize, c: usize) -> f64 {
    if i < 0 || j < 0 || i >= img.height() as isize || j >= img.width() as isize {
        0.0
    } else {
        img.get(i as usize, j as usize, c)
    }
}

/// Weights for taps at offsets `-1, 0, 1, 2` from the base sample, for a
/// fractional position `t ∈ [0, 1)`.
fn catmull_rom_weights(t: f64) -> [f64; 4] {
    const A: f64 = -0.5;
    let near = |x: f64| ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0;
    let far = |x: f64| ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A;
    [far(1.0 + t), near(t), near(1.0 - t), far(2.0 - t)]
}

/// A rotation acting on rasters through [`rotate_image`] with a fixed
/// interpolation mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageRotation {
    pub rotation: Rotation2D,
    pub interpolation: Interpolation,
}

impl GroupAction<RasterImage> for ImageRotation {
    fn act(&self, x: &RasterImage) -> RasterImage {
        rotate_image(x, self.rotation, self.interpolation)
    }

    fn inverse(&self) -> Self {
        Self {
            rotation: self.rotation.inverse(),
            interpolation: self.interpolation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::raster::psnr;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(h: usize, w: usize, ch: usize, seed: u64) -> RasterImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..h * w * ch).map(|_| rng.random::<f64>()).collect();
        RasterImage::new(h, w, ch, data).unwrap()
    }

    #[test]
    fn zero_angle_is_bit_identical() {
        for (h, w) in [(16, 16), (9, 14)] {
            let img = random_image(h, w, 3, 7);
            for mode in Interpolation::ALL {
                assert_eq!(rotate_image(&img, Rotation2D::identity(), mode), img);
            }
        }
    }

    #[test]
    fn quarter_turn_nearest_is_array_rotation() {
        for n in [8, 11] {
            let img = random_image(n, n, 1, 3);
            let out = rotate_image(&img, Rotation2D::from_degrees(90.0), Interpolation::Nearest);
            assert_eq!(out, img.rotate_quarter_turns(1));
            for mode in [Interpolation::Bilinear, Interpolation::Bicubic] {
                let out = rotate_image(&img, Rotation2D::from_degrees(90.0), mode);
                assert_eq!(out, img.rotate_quarter_turns(1));
            }
        }
    }

    #[test]
    fn catmull_rom_partition_of_unity() {
        for k in 0..20 {
            let t = k as f64 / 20.0;
            let w = catmull_rom_weights(t);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        }
        assert_eq!(catmull_rom_weights(0.0), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn round_trip_on_smooth_image_keeps_interior_psnr() {
        // Oracle: PSNR against the original over the inscribed disc.
        let n = 64;
        let c = (n as f64 - 1.0) / 2.0;
        let img = RasterImage::from_fn(n, n, |i, j| {
            let (x, y) = ((i as f64 - c) / n as f64, (j as f64 - c) / n as f64);
            0.5 + 0.3 * (6.0 * x + 2.0 * y).sin() * (-8.0 * (x * x + y * y)).exp()
        })
        .unwrap();
        let inside = |i: usize, j: usize| {
            let (a, b) = (i as f64 - c, j as f64 - c);
            (a * a + b * b).sqrt() < 0.4 * n as f64
        };
        for deg in [7.0, 33.0, 61.0] {
            let g = Rotation2D::from_degrees(deg);
            let there = rotate_image(&img, g, Interpolation::Bilinear);
            let back = rotate_image(&there, g.inverse(), Interpolation::Bilinear);
            assert!(psnr(&img, &back, 1.0, inside) >= 35.0);
        }
    }

    #[test]
    fn content_turns_against_the_angle() {
        // a bright pixel above the center ends up to its left after +90°
        let mut img = RasterImage::zeros(9, 9, 1).unwrap();
        img.set(2, 4, 0, 1.0);
        let out = rotate_image(&img, Rotation2D::from_degrees(90.0), Interpolation::Bilinear);
        assert_eq!(out.get(4, 2, 0), 1.0);
    }

    #[test]
    fn action_inverse_reverses_the_angle() {
        let g = ImageRotation {
            rotation: Rotation2D::from_degrees(30.0),
            interpolation: Interpolation::Bicubic,
        };
        assert_abs_diff_eq!(g.inverse().rotation.degrees(), 330.0, epsilon = 1e-12);
        assert_eq!(g.inverse().interpolation, Interpolation::Bicubic);
        assert_eq!("bicubic".parse::<Interpolation>().unwrap(), Interpolation::Bicubic);
        assert!("cubic".parse::<Interpolation>().is_err());
    }
}
