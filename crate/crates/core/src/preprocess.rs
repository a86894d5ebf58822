//! Grayscale conversion, Gaussian smoothing and intensity quantization.

use crate::{Error, Result};

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_pixel_count(width, height, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }
}

/// Interleaved color (or gray) samples as decoded from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    pub width: usize,
    pub height: usize,
    /// 1 (gray), 2 (gray + alpha), 3 (RGB) or 4 (RGBA).
    pub channels: usize,
    pub bit_depth: u8,
    pub samples: Vec<u8>,
}

/// BT.601 luma, `round(0.299 R + 0.587 G + 0.114 B)`. Alpha is ignored and
/// single-channel input passes through unchanged.
pub fn to_gray(img: &ColorImage) -> Result<GrayImage> {
    let unsupported = Error::UnsupportedFormat {
        channels: img.channels,
        bit_depth: img.bit_depth,
    };
    if img.bit_depth != 8 || !(1..=4).contains(&img.channels) {
        return Err(unsupported);
    }
    let expected = img.width * img.height * img.channels;
    if img.samples.len() != expected {
        return Err(Error::PixelCount {
            width: img.width,
            height: img.height,
            expected,
            actual: img.samples.len(),
        });
    }
    let pixels = match img.channels {
        1 | 2 => img.samples.chunks(img.channels).map(|px| px[0]).collect(),
        _ => img
            .samples
            .chunks(img.channels)
            .map(|px| luma(px[0], px[1], px[2]))
            .collect(),
    };
    GrayImage::new(img.width, img.height, pixels)
}

pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    // Weights scaled by 1000; +500 rounds half up, which is half away from
    // zero for these non-negative sums.
    let weighted = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
    ((weighted + 500) / 1000).min(255) as u8
}

/// Normalized 1-D Gaussian weights for offsets `-radius..=radius`, with
/// `radius = ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let weights: Vec<f64> = (-radius..=radius)
        .map(|x| (-((x * x) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Separable Gaussian blur with replicated borders. The horizontal pass is
/// kept in floating point and only the final value is rounded.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidSigma(sigma));
    }
    if sigma == 0.0 || img.pixels.is_empty() {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = (img.width, img.height);
    let clamp = |v: isize, len: usize| v.clamp(0, len as isize - 1) as usize;

    let mut horizontal = vec![0.0f64; w * h];
    for y in 0..h {
        let row = &img.pixels[y * w..(y + 1) * w];
        for x in 0..w {
            horizontal[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, weight)| {
                    weight * f64::from(row[clamp(x as isize + k as isize - radius, w)])
                })
                .sum();
        }
    }

    let mut pixels = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let v: f64 = kernel
                .iter()
                .enumerate()
                .map(|(k, weight)| {
                    weight * horizontal[clamp(y as isize + k as isize - radius, h) * w + x]
                })
                .sum();
            pixels.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::new(w, h, pixels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantizer {
    /// Equal-width bins: `q = floor(v * K / 256)`.
    #[default]
    Uniform,
    /// Equal-population bins from the image histogram.
    Quantile,
}

/// Image with intensities reduced to `levels` bins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantizedImage {
    width: usize,
    height: usize,
    levels: u32,
    pixels: Vec<u8>,
}

impl QuantizedImage {
    pub fn new(width: usize, height: usize, levels: u32, pixels: Vec<u8>) -> Result<Self> {
        check_levels(levels)?;
        check_pixel_count(width, height, pixels.len())?;
        if let Some(&value) = pixels.iter().find(|&&v| u32::from(v) >= levels) {
            return Err(Error::PixelOutOfRange {
                value: u32::from(value),
                levels,
            });
        }
        Ok(Self {
            width,
            height,
            levels,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn transpose(&self) -> Self {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for x in 0..self.width {
            for y in 0..self.height {
                pixels.push(self.get(x, y));
            }
        }
        Self {
            width: self.height,
            height: self.width,
            levels: self.levels,
            pixels,
        }
    }

    /// Maps each bin back to the smallest gray value of its uniform bin,
    /// `ceil(q * 256 / K)`.
    pub fn to_representatives(&self) -> GrayImage {
        let k = self.levels;
        let pixels = self
            .pixels
            .iter()
            .map(|&q| (u32::from(q) * 256).div_ceil(k) as u8)
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }

    /// Stretches bins over `0..=255` for viewing.
    pub fn to_display(&self) -> GrayImage {
        let top = self.levels - 1;
        let pixels = self
            .pixels
            .iter()
            .map(|&q| ((u32::from(q) * 255 * 2 + top) / (2 * top)) as u8)
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

/// Result of [`quantize`]. `fell_back` is set when quantile mode met a
/// histogram that would leave a bin empty and uniform bins were used instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantized {
    pub image: QuantizedImage,
    pub fell_back: bool,
}

pub fn quantize(img: &GrayImage, levels: u32, quantizer: Quantizer) -> Result<Quantized> {
    check_levels(levels)?;
    let uniform = uniform_lut(levels);
    let (lut, fell_back) = match quantizer {
        Quantizer::Uniform => (uniform, false),
        Quantizer::Quantile => match quantile_lut(img, levels) {
            Some(lut) => (lut, false),
            None => (uniform, true),
        },
    };
    let pixels = img.pixels.iter().map(|&v| lut[v as usize]).collect();
    Ok(Quantized {
        image: QuantizedImage {
            width: img.width,
            height: img.height,
            levels,
            pixels,
        },
        fell_back,
    })
}

fn uniform_lut(levels: u32) -> [u8; 256] {
    std::array::from_fn(|v| (v as u32 * levels / 256) as u8)
}

/// Thresholds sit at the pixel ranks `floor(k N / K)`, `k = 1..K-1`; a value
/// equal to a threshold stays in the lower bin. Returns `None` when any bin
/// would end up empty.
fn quantile_lut(img: &GrayImage, levels: u32) -> Option<[u8; 256]> {
    let n = img.pixels.len();
    if n == 0 {
        return None;
    }
    let mut histogram = [0usize; 256];
    for &v in &img.pixels {
        histogram[v as usize] += 1;
    }
    // Value at 0-based rank `rank` of the sorted pixels.
    let value_at_rank = |rank: usize| {
        let mut seen = 0;
        histogram
            .iter()
            .position(|&count| {
                seen += count;
                seen > rank
            })
            .expect("rank below pixel count")
    };
    let thresholds: Vec<usize> = (1..levels as usize)
        .map(|k| value_at_rank(k * n / levels as usize))
        .collect();
    let lut: [u8; 256] =
        std::array::from_fn(|v| thresholds.iter().filter(|&&t| t < v).count() as u8);

    let mut occupied = vec![false; levels as usize];
    for (v, &count) in histogram.iter().enumerate() {
        if count > 0 {
            occupied[lut[v] as usize] = true;
        }
    }
    occupied.iter().all(|&o| o).then_some(lut)
}

/// Blur and quantization settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessConfig {
    pub sigma: f64,
    pub levels: u32,
    pub quantizer: Quantizer,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            levels: 10,
            quantizer: Quantizer::Uniform,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::InvalidSigma(self.sigma));
        }
        check_levels(self.levels)
    }

    /// Blur followed by quantization.
    pub fn apply(&self, img: &GrayImage) -> Result<Quantized> {
        self.validate()?;
        let blurred = gaussian_blur(img, self.sigma)?;
        quantize(&blurred, self.levels, self.quantizer)
    }
}

fn check_levels(levels: u32) -> Result<()> {
    if (2..=256).contains(&levels) {
        Ok(())
    } else {
        Err(Error::InvalidLevels(levels))
    }
}

fn check_pixel_count(width: usize, height: usize, actual: usize) -> Result<()> {
    let expected = width * height;
    if actual != expected {
        return Err(Error::PixelCount {
            width,
            height,
            expected,
            actual,
        });
    }
    Ok(())
}
