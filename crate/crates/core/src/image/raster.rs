use super::ImageError;

/// Smallest admissible side length: the outer sampling circle (radius 0.4 of
/// the shorter side) must enclose at least one full interpolation cell.
pub const MIN_SIDE: usize = 4;

/// A dense `height × width × channels` image with interleaved channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl RasterImage {
    pub fn new(
        height: usize,
        width: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Result<Self, ImageError> {
        if height < MIN_SIDE || width < MIN_SIDE {
            return Err(ImageError::TooSmall { height, width });
        }
        if channels != 1 && channels != 3 {
            return Err(ImageError::UnsupportedChannels(channels));
        }
        let expected = height * width * channels;
        if data.len() != expected {
            return Err(ImageError::DataLength {
                expected,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(ImageError::NonFinite);
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Result<Self, ImageError> {
        Self::new(height, width, channels, vec![0.0; height * width * channels])
    }

    /// Builds a single-channel image from `f(row, col)`.
    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, ImageError> {
        let mut data = Vec::with_capacity(height * width);
        for i in 0..height {
            for j in 0..width {
                data.push(f(i, j));
            }
        }
        Self::new(height, width, 1, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, channel: usize) -> f64 {
        self.data[(row * self.width + col) * self.channels + channel]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, channel: usize, value: f64) {
        self.data[(row * self.width + col) * self.channels + channel] = value;
    }

    /// Length of the shorter side, which the continuous model maps to 1.
    pub fn shorter_side(&self) -> usize {
        self.height.min(self.width)
    }

    /// `max - min` over all samples.
    pub fn dynamic_range(&self) -> f64 {
        let (lo, hi) = self
            .data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RasterImage {
        RasterImage {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    /// Single channel `c` as a new grayscale image.
    pub fn channel(&self, c: usize) -> RasterImage {
        RasterImage {
            height: self.height,
            width: self.width,
            channels: 1,
            data: self.data.iter().skip(c).step_by(self.channels).copied().collect(),
        }
    }

    /// Exact 90° counter-clockwise array rotation, `quarter_turns` times.
    pub fn rotate_quarter_turns(&self, quarter_turns: i32) -> RasterImage {
        let q = quarter_turns.rem_euclid(4);
        let mut out = self.clone();
        for _ in 0..q {
            out = out.rotate_ccw_once();
        }
        out
    }

    fn rotate_ccw_once(&self) -> RasterImage {
        let (h, w, c) = (self.height, self.width, self.channels);
        let mut data = vec![0.0; h * w * c];
        // out[i][j] = in[j][w - 1 - i], out is w × h
        for i in 0..w {
            for j in 0..h {
                for ch in 0..c {
                    data[(i * h + j) * c + ch] = self.get(j, w - 1 - i, ch);
                }
            }
        }
        RasterImage {
            height: w,
            width: h,
            channels: c,
            data,
        }
    }
}

/// Mirror index into `0..n` with the edge sample repeated
/// (`… 1 0 | 0 1 … n-1 | n-1 n-2 …`), periodic with period `2n`.
#[inline]
pub(crate) fn reflect_index(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Peak signal-to-noise ratio in dB over the pixels selected by `mask`,
/// for signals with peak value `peak`.
pub fn psnr(
    a: &RasterImage,
    b: &RasterImage,
    peak: f64,
    mask: impl Fn(usize, usize) -> bool,
) -> f64 {
    assert_eq!(
        (a.height, a.width, a.channels),
        (b.height, b.width, b.channels)
    );
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..a.height {
        for j in 0..a.width {
            if !mask(i, j) {
                continue;
            }
            for c in 0..a.channels {
                let d = a.get(i, j, c) - b.get(i, j, c);
                sum += d * d;
                count += 1;
            }
        }
    }
    let mse = sum / count.max(1) as f64;
    10.0 * (peak * peak / mse).log10()
}
