use super::raster::{reflect_index, RasterImage};
use super::ImageError;

/// Normalized 1D Gaussian taps on `-r..=r` with `r = ⌈3σ⌉`.
pub fn gaussian_kernel_1d(sigma: f64) -> Result<Vec<f64>, ImageError> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(ImageError::NonPositiveSigma(sigma));
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / denom).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    Ok(taps)
}

/// Separable Gaussian blur with mirrored borders, applied per channel.
pub fn gaussian_blur(img: &RasterImage, sigma: f64) -> Result<RasterImage, ImageError> {
    let taps = gaussian_kernel_1d(sigma)?;
    let radius = (taps.len() / 2) as isize;
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let src = img.data();

    let mut horizontal = vec![0.0; src.len()];
    for i in 0..h {
        for j in 0..w {
            for ch in 0..c {
                let mut acc = 0.0;
                for (k, t) in taps.iter().enumerate() {
                    let jj = reflect_index(j as isize + k as isize - radius, w);
                    acc += t * src[(i * w + jj) * c + ch];
                }
                horizontal[(i * w + j) * c + ch] = acc;
            }
        }
    }

    let mut out = vec![0.0; src.len()];
    for i in 0..h {
        for j in 0..w {
            for ch in 0..c {
                let mut acc = 0.0;
                for (k, t) in taps.iter().enumerate() {
                    let ii = reflect_index(i as isize + k as isize - radius, h);
                    acc += t * horizontal[(ii * w + j) * c + ch];
                }
                out[(i * w + j) * c + ch] = acc;
            }
        }
    }
    RasterImage::new(h, w, c, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_radius_and_mass() {
        let k = gaussian_kernel_1d(1.5).unwrap();
        assert_eq!(k.len(), 11);
        assert_relative_eq!(k.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_eq!(k[0], k[10]);
        assert!(gaussian_kernel_1d(0.0).is_err());
        assert!(gaussian_kernel_1d(-1.0).is_err());
    }

    #[test]
    fn constant_image_is_unchanged() {
        let img = RasterImage::from_fn(9, 12, |_, _| 0.375).unwrap();
        let out = gaussian_blur(&img, 1.5).unwrap();
        for v in out.data() {
            assert_relative_eq!(*v, 0.375, epsilon = 1e-15);
        }
    }

    #[test]
    fn impulse_response_matches_truncated_2d_kernel() {
        // Oracle: the 2D window built directly from exp(-(x²+y²)/2σ²) over
        // the 11×11 support, normalized in 2D.
        let sigma: f64 = 1.5;
        let mut total = 0.0;
        for x in -5i32..=5 {
            for y in -5i32..=5 {
                total += (-((x * x + y * y) as f64) / (2.0 * sigma * sigma)).exp();
            }
        }
        let center_weight = 1.0 / total;

        let img = RasterImage::from_fn(17, 17, |i, j| if i == 8 && j == 8 { 1.0 } else { 0.0 })
            .unwrap();
        let out = gaussian_blur(&img, sigma).unwrap();
        assert_relative_eq!(out.get(8, 8, 0), center_weight, max_relative = 1e-12);
        assert_relative_eq!(out.data().iter().sum::<f64>(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn mass_is_preserved_for_interior_content() {
        let img = RasterImage::from_fn(32, 32, |i, j| {
            if (10..20).contains(&i) && (12..22).contains(&j) {
                (i * j) as f64 * 0.01
            } else {
                0.0
            }
        })
        .unwrap();
        let before: f64 = img.data().iter().sum();
        let after: f64 = gaussian_blur(&img, 1.5).unwrap().data().iter().sum();
        assert_relative_eq!(before, after, max_relative = 1e-9);
    }

    #[test]
    fn channels_are_blurred_independently() {
        let data: Vec<f64> = (0..8 * 8)
            .flat_map(|p| [p as f64, 1.0, if p == 27 { 5.0 } else { 0.0 }])
            .collect();
        let img = RasterImage::new(8, 8, 3, data).unwrap();
        let out = gaussian_blur(&img, 1.0).unwrap();
        for c in 0..3 {
            let single = gaussian_blur(&img.channel(c), 1.0).unwrap();
            assert_eq!(out.channel(c), single);
        }
    }
}
