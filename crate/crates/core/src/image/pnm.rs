//! PGM/PPM reading and writing. Samples are mapped linearly between
//! `0..=maxval` and `[0, 1]`.

use std::io::Write;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::raster::RasterImage;
use super::ImageError;

/// Sample depth of a PNM file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnmDepth {
    Eight,
    Sixteen,
}

fn format_error(e: image::ImageError) -> ImageError {
    ImageError::Format(e.to_string())
}

/// Decodes P2/P3/P5/P6 data.
pub fn decode_pnm(bytes: &[u8]) -> Result<(RasterImage, PnmDepth), ImageError> {
    let decoded = image::load_from_memory_with_format(bytes, ImageFormat::Pnm)
        .map_err(format_error)?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let scale8 = |v: u8| v as f64 / 255.0;
    let scale16 = |v: u16| v as f64 / 65535.0;
    match decoded {
        DynamicImage::ImageLuma8(buf) => Ok((
            RasterImage::new(h, w, 1, buf.into_raw().into_iter().map(scale8).collect())?,
            PnmDepth::Eight,
        )),
        DynamicImage::ImageRgb8(buf) => Ok((
            RasterImage::new(h, w, 3, buf.into_raw().into_iter().map(scale8).collect())?,
            PnmDepth::Eight,
        )),
        DynamicImage::ImageLuma16(buf) => Ok((
            RasterImage::new(h, w, 1, buf.into_raw().into_iter().map(scale16).collect())?,
            PnmDepth::Sixteen,
        )),
        DynamicImage::ImageRgb16(buf) => Ok((
            RasterImage::new(h, w, 3, buf.into_raw().into_iter().map(scale16).collect())?,
            PnmDepth::Sixteen,
        )),
        other => Err(ImageError::Format(format!(
            "unsupported PNM color type {:?}",
            other.color()
        ))),
    }
}

/// Encodes as PGM (1 channel) or PPM (3 channels), binary unless `ascii`.
/// Values are clamped to `[0, 1]` and rounded to the nearest level.
///
/// Written by hand because the decoder's crate cannot encode 16-bit samples.
pub fn encode_pnm(img: &RasterImage, depth: PnmDepth, ascii: bool) -> Result<Vec<u8>, ImageError> {
    let magic = match (img.channels(), ascii) {
        (1, true) => "P2",
        (1, false) => "P5",
        (_, true) => "P3",
        (_, false) => "P6",
    };
    let maxval: u16 = match depth {
        PnmDepth::Eight => 255,
        PnmDepth::Sixteen => 65535,
    };
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", img.width(), img.height()).into_bytes();
    let levels = img.data().iter().map(|&v| quantize(v, maxval as f64) as u16);
    if ascii {
        let per_row = img.width() * img.channels();
        for (k, level) in levels.enumerate() {
            let sep = if (k + 1) % per_row == 0 { '\n' } else { ' ' };
            write!(out, "{level}{sep}")?;
        }
    } else {
        for level in levels {
            match depth {
                PnmDepth::Eight => out.push(level as u8),
                PnmDepth::Sixteen => out.extend_from_slice(&level.to_be_bytes()),
            }
        }
    }
    Ok(out)
}

fn quantize(v: f64, max: f64) -> f64 {
    (v.clamp(0.0, 1.0) * max).round()
}

pub fn read_pnm(path: impl AsRef<Path>) -> Result<(RasterImage, PnmDepth), ImageError> {
    decode_pnm(&std::fs::read(path)?)
}

pub fn write_pnm(
    writer: &mut impl Write,
    img: &RasterImage,
    depth: PnmDepth,
) -> Result<(), ImageError> {
    writer.write_all(&encode_pnm(img, depth, false)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_graymap_is_scaled_by_maxval() {
        let src = b"P2\n4 4\n255\n0 51 102 255\n0 0 0 0\n0 0 0 0\n0 0 0 255\n";
        let (img, depth) = decode_pnm(src).unwrap();
        assert_eq!(depth, PnmDepth::Eight);
        assert_eq!((img.height(), img.width(), img.channels()), (4, 4, 1));
        assert_eq!(img.get(0, 1, 0), 0.2);
        assert_eq!(img.get(3, 3, 0), 1.0);
    }

    #[test]
    fn nonstandard_maxval_is_rescaled() {
        let src = b"P2\n4 4\n1000\n500 1000 0 0 0 0 0 0 0 0 0 0 0 0 0 250\n";
        let (img, depth) = decode_pnm(src).unwrap();
        assert_eq!(depth, PnmDepth::Sixteen);
        assert!((img.get(0, 0, 0) - 0.5).abs() < 1e-4);
        assert_eq!(img.get(0, 1, 0), 1.0);
        assert!((img.get(3, 3, 0) - 0.25).abs() < 1e-4);
    }

    #[test]
    fn round_trips_at_both_depths() {
        let img = RasterImage::from_fn(5, 6, |i, j| (i * 6 + j) as f64 / 29.0).unwrap();
        for depth in [PnmDepth::Eight, PnmDepth::Sixteen] {
            for ascii in [false, true] {
                let bytes = encode_pnm(&img, depth, ascii).unwrap();
                let (back, d) = decode_pnm(&bytes).unwrap();
                assert_eq!(d, depth);
                let tol = if depth == PnmDepth::Eight { 0.5 / 255.0 } else { 0.5 / 65535.0 };
                for (a, b) in img.data().iter().zip(back.data()) {
                    assert!((a - b).abs() <= tol + 1e-15);
                }
                // a quantized image survives exactly
                assert_eq!(decode_pnm(&encode_pnm(&back, depth, ascii).unwrap()).unwrap().0, back);
            }
        }
    }

    #[test]
    fn color_pixmap_round_trip() {
        let data: Vec<f64> = (0..4 * 4 * 3).map(|k| (k % 7) as f64 / 6.0).collect();
        let img = RasterImage::new(4, 4, 3, data).unwrap();
        let (back, _) = decode_pnm(&encode_pnm(&img, PnmDepth::Sixteen, false).unwrap()).unwrap();
        assert_eq!(back.channels(), 3);
        assert!(img.data().iter().zip(back.data()).all(|(a, b)| (a - b).abs() < 1e-5));
    }

    #[test]
    fn garbage_is_a_format_error() {
        assert!(matches!(decode_pnm(b"hello"), Err(ImageError::Format(_))));
        assert!(matches!(
            decode_pnm(b"P2\n2 2\n255\n0 0 0 0\n"),
            Err(ImageError::TooSmall { .. })
        ));
    }
}
