//! Sobel gradient detector used as a comparison baseline.

use crate::preprocess::GrayImage;
use crate::scanner::EdgeMask;
use crate::{Error, Result};

const KERNEL_X: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
const KERNEL_Y: [[i32; 3]; 3] = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientField {
    width: usize,
    height: usize,
    gx: Vec<i32>,
    gy: Vec<i32>,
    magnitude: Vec<u32>,
}

impl GradientField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gx(&self, x: usize, y: usize) -> i32 {
        self.gx[y * self.width + x]
    }

    pub fn gy(&self, x: usize, y: usize) -> i32 {
        self.gy[y * self.width + x]
    }

    /// `round(sqrt(gx^2 + gy^2))`.
    pub fn magnitude(&self, x: usize, y: usize) -> u32 {
        self.magnitude[y * self.width + x]
    }

    /// Gradient direction in radians, `atan2(gy, gx)`.
    pub fn direction(&self, x: usize, y: usize) -> f64 {
        f64::from(self.gy(x, y)).atan2(f64::from(self.gx(x, y)))
    }

    pub fn max_magnitude(&self) -> u32 {
        self.magnitude.iter().copied().max().unwrap_or(0)
    }
}

/// 3x3 Sobel responses with replicated borders.
pub fn sobel(img: &GrayImage) -> Result<GradientField> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            patch_height: 3,
            patch_width: 3,
        });
    }
    let mut gx = Vec::with_capacity(w * h);
    let mut gy = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (mut sx, mut sy) = (0, 0);
            for (ky, dy) in (-1isize..=1).enumerate() {
                let yy = (y as isize + dy).clamp(0, h as isize - 1) as usize;
                for (kx, dx) in (-1isize..=1).enumerate() {
                    let xx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
                    let v = i32::from(img.get(xx, yy));
                    sx += KERNEL_X[ky][kx] * v;
                    sy += KERNEL_Y[ky][kx] * v;
                }
            }
            gx.push(sx);
            gy.push(sy);
        }
    }
    let magnitude = gx
        .iter()
        .zip(&gy)
        .map(|(&a, &b)| f64::from(a * a + b * b).sqrt().round() as u32)
        .collect();
    Ok(GradientField {
        width: w,
        height: h,
        gx,
        gy,
        magnitude,
    })
}

/// Edge wherever the gradient magnitude is strictly above `threshold`.
pub fn sobel_mask(field: &GradientField, threshold: u32) -> EdgeMask {
    let mut mask = EdgeMask::empty(field.width, field.height);
    for y in 0..field.height {
        for x in 0..field.width {
            if field.magnitude(x, y) > threshold {
                mask.set(x, y, true);
            }
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_has_no_gradient() {
        let g = sobel(&GrayImage::filled(5, 4, 77)).unwrap();
        for y in 0..4 {
            for x in 0..5 {
                assert_eq!((g.gx(x, y), g.gy(x, y)), (0, 0));
            }
        }
        assert_eq!(sobel_mask(&g, 0).edge_count(), 0);
    }

    #[test]
    fn vertical_step() {
        let img = GrayImage::from_fn(8, 5, |x, _| if x < 4 { 0 } else { 255 });
        let g = sobel(&img).unwrap();
        for y in 0..5 {
            for x in 0..8 {
                let expected = if x == 3 || x == 4 { 1020 } else { 0 };
                assert_eq!(g.gx(x, y), expected, "({x}, {y})");
                assert_eq!(g.gy(x, y), 0);
            }
        }
        assert_eq!(g.magnitude(3, 2), 1020);
        assert_eq!(g.direction(3, 2), 0.0);
        assert_eq!(sobel_mask(&g, g.max_magnitude()).edge_count(), 0);
        assert_eq!(sobel_mask(&g, 1019).edge_count(), 10);
    }

    #[test]
    fn horizontal_step() {
        let img = GrayImage::from_fn(5, 8, |_, y| if y < 4 { 0 } else { 255 });
        let g = sobel(&img).unwrap();
        assert_eq!(g.gy(2, 3), 1020);
        assert_eq!(g.gy(2, 4), 1020);
        assert_eq!(g.gx(2, 3), 0);
        assert_eq!(g.gy(2, 0), 0);
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            sobel(&GrayImage::filled(2, 5, 0)),
            Err(Error::ImageTooSmall { .. })
        ));
    }
}
