//! Patch scanning: degree maps, edge masks, hysteresis and equivalence groups.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::pbp::{classify, Class, CostMatrix, PseudoBooleanPolynomial, TruncationThreshold};
use crate::preprocess::QuantizedImage;
use crate::{Error, Result};

/// How the vertical and horizontal degrees of a patch are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Combine {
    /// `max(vertical, horizontal)`: edge when either orientation exceeds `p`.
    #[default]
    Max,
    /// `min(vertical, horizontal)`: edge only when both orientations exceed `p`.
    Both,
}

impl Combine {
    pub fn apply(self, vertical: usize, horizontal: usize) -> usize {
        match self {
            Combine::Max => vertical.max(horizontal),
            Combine::Both => vertical.min(horizontal),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hysteresis {
    pub low: u32,
    pub high: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanConfig {
    pub patch_height: usize,
    pub patch_width: usize,
    pub stride: usize,
    pub threshold: TruncationThreshold,
    pub combine: Combine,
    pub hysteresis: Option<Hysteresis>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            patch_height: 6,
            patch_width: 6,
            stride: 1,
            threshold: TruncationThreshold::new(3),
            combine: Combine::Max,
            hysteresis: None,
        }
    }
}

impl ScanConfig {
    /// Checks the settings on their own, independent of any image.
    pub fn validate(&self) -> Result<()> {
        if self.patch_height < 2 || self.patch_width < 2 {
            return Err(Error::InvalidConfig(format!(
                "patch must be at least 2x2, got {}x{}",
                self.patch_height, self.patch_width
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidConfig("stride must be at least 1".into()));
        }
        if let Some(h) = self.hysteresis {
            if h.low >= h.high {
                return Err(Error::InvalidConfig(format!(
                    "hysteresis low ({}) must be below high ({})",
                    h.low, h.high
                )));
            }
        }
        Ok(())
    }

    fn check_fits(&self, width: usize, height: usize) -> Result<()> {
        if self.patch_height > height || self.patch_width > width {
            return Err(Error::ImageTooSmall {
                width,
                height,
                patch_height: self.patch_height,
                patch_width: self.patch_width,
            });
        }
        Ok(())
    }

    fn grid_dims(&self, width: usize, height: usize) -> (usize, usize) {
        (
            (height - self.patch_height) / self.stride + 1,
            (width - self.patch_width) / self.stride + 1,
        )
    }
}

/// Top-left corner of a patch in image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatchPosition {
    pub row: usize,
    pub col: usize,
}

/// Combined patch degree per scan position, row-major over the patch grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeMap {
    grid_rows: usize,
    grid_cols: usize,
    cells: Vec<usize>,
    patch_height: usize,
    patch_width: usize,
    stride: usize,
    image_width: usize,
    image_height: usize,
}

impl DegreeMap {
    /// Wraps precomputed cells for the given scan geometry.
    pub fn from_cells(
        cfg: &ScanConfig,
        image_width: usize,
        image_height: usize,
        cells: Vec<usize>,
    ) -> Result<Self> {
        cfg.validate()?;
        cfg.check_fits(image_width, image_height)?;
        let (grid_rows, grid_cols) = cfg.grid_dims(image_width, image_height);
        if cells.len() != grid_rows * grid_cols {
            return Err(Error::InvalidConfig(format!(
                "expected {} degree cells for a {grid_rows}x{grid_cols} grid, got {}",
                grid_rows * grid_cols,
                cells.len()
            )));
        }
        Ok(Self {
            grid_rows,
            grid_cols,
            cells,
            patch_height: cfg.patch_height,
            patch_width: cfg.patch_width,
            stride: cfg.stride,
            image_width,
            image_height,
        })
    }

    pub fn grid_rows(&self) -> usize {
        self.grid_rows
    }

    pub fn grid_cols(&self) -> usize {
        self.grid_cols
    }

    pub fn get(&self, grid_row: usize, grid_col: usize) -> usize {
        self.cells[grid_row * self.grid_cols + grid_col]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn patch_height(&self) -> usize {
        self.patch_height
    }

    pub fn patch_width(&self) -> usize {
        self.patch_width
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn image_width(&self) -> usize {
        self.image_width
    }

    pub fn image_height(&self) -> usize {
        self.image_height
    }

    /// Image position of the patch behind a grid cell.
    pub fn position(&self, grid_row: usize, grid_col: usize) -> PatchPosition {
        PatchPosition {
            row: grid_row * self.stride,
            col: grid_col * self.stride,
        }
    }

    /// Width and height of the image area covered by at least one patch.
    /// Trailing columns and rows beyond it are never scanned.
    pub fn coverage(&self) -> (usize, usize) {
        (
            (self.grid_cols - 1) * self.stride + self.patch_width,
            (self.grid_rows - 1) * self.stride + self.patch_height,
        )
    }

    pub fn max_degree(&self) -> usize {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        let mut cells = Vec::with_capacity(self.cells.len());
        for c in 0..self.grid_cols {
            for r in 0..self.grid_rows {
                cells.push(self.get(r, c));
            }
        }
        Self {
            grid_rows: self.grid_cols,
            grid_cols: self.grid_rows,
            cells,
            patch_height: self.patch_width,
            patch_width: self.patch_height,
            stride: self.stride,
            image_width: self.image_height,
            image_height: self.image_width,
        }
    }
}

/// Binary image, `255` for edge pixels and `0` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeMask {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl EdgeMask {
    pub const EDGE: u8 = 255;

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x] == Self::EDGE
    }

    pub fn set(&mut self, x: usize, y: usize, edge: bool) {
        self.pixels[y * self.width + x] = if edge { Self::EDGE } else { 0 };
    }

    pub fn edge_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p == Self::EDGE).count()
    }

    /// True when every edge pixel of `self` is also an edge pixel of `other`.
    pub fn is_subset_of(&self, other: &EdgeMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self
                .pixels
                .iter()
                .zip(&other.pixels)
                .all(|(&a, &b)| a == 0 || b == Self::EDGE)
    }

    /// Pixels where the two masks disagree are marked as edges.
    pub fn difference(&self, other: &EdgeMask) -> Result<EdgeMask> {
        self.check_same_dims(other)?;
        Ok(EdgeMask {
            width: self.width,
            height: self.height,
            pixels: self
                .pixels
                .iter()
                .zip(&other.pixels)
                .map(|(&a, &b)| if a != b { Self::EDGE } else { 0 })
                .collect(),
        })
    }

    /// Fraction of pixels on which both masks agree; 1.0 for empty images.
    pub fn agreement(&self, other: &EdgeMask) -> Result<f64> {
        self.check_same_dims(other)?;
        if self.pixels.is_empty() {
            return Ok(1.0);
        }
        let same = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .filter(|(a, b)| a == b)
            .count();
        Ok(same as f64 / self.pixels.len() as f64)
    }

    fn check_same_dims(&self, other: &EdgeMask) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                left_rows: self.height,
                left_cols: self.width,
                right_rows: other.height,
                right_cols: other.width,
            });
        }
        Ok(())
    }
}

/// The `patch_height x patch_width` block whose top-left pixel is at `(row, col)`.
pub fn patch_at(
    img: &QuantizedImage,
    row: usize,
    col: usize,
    cfg: &ScanConfig,
) -> Result<CostMatrix> {
    let (h, w) = (cfg.patch_height, cfg.patch_width);
    if h == 0 || w == 0 || row + h > img.height() || col + w > img.width() {
        return Err(Error::PatchOutOfBounds {
            row,
            col,
            width: img.width(),
            height: img.height(),
        });
    }
    let mut entries = Vec::with_capacity(h * w);
    for y in row..row + h {
        let start = y * img.width() + col;
        entries.extend(img.pixels()[start..start + w].iter().map(|&v| u32::from(v)));
    }
    CostMatrix::new(h, w, entries)
}

/// Polynomial degrees of a patch and of its transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedDegrees {
    /// Degree of the patch as given; columns run vertically.
    pub vertical: usize,
    /// Degree of the transposed patch.
    pub horizontal: usize,
}

pub fn oriented_degrees(patch: &CostMatrix) -> OrientedDegrees {
    OrientedDegrees {
        vertical: PseudoBooleanPolynomial::from_matrix(patch).degree(),
        horizontal: PseudoBooleanPolynomial::from_matrix(&patch.transpose()).degree(),
    }
}

/// `max` of the vertical and horizontal polynomial degrees.
pub fn patch_degree(patch: &CostMatrix) -> usize {
    let d = oriented_degrees(patch);
    Combine::Max.apply(d.vertical, d.horizontal)
}

/// Computes the combined degree of every patch position, row-major.
///
/// Positions are processed in parallel on the current rayon pool; each cell is
/// written exactly once, so the output does not depend on scheduling.
pub fn scan(img: &QuantizedImage, cfg: &ScanConfig) -> Result<DegreeMap> {
    cfg.validate()?;
    cfg.check_fits(img.width(), img.height())?;
    let (grid_rows, grid_cols) = cfg.grid_dims(img.width(), img.height());
    let cells: Vec<usize> = (0..grid_rows * grid_cols)
        .into_par_iter()
        .map(|i| {
            let (gr, gc) = (i / grid_cols, i % grid_cols);
            let patch = patch_at(img, gr * cfg.stride, gc * cfg.stride, cfg)
                .expect("grid positions fit by construction");
            let d = oriented_degrees(&patch);
            cfg.combine.apply(d.vertical, d.horizontal)
        })
        .collect();
    DegreeMap::from_cells(cfg, img.width(), img.height(), cells)
}

/// Marks every pixel covered by at least one edge patch.
pub fn classify_map(map: &DegreeMap, threshold: TruncationThreshold) -> EdgeMask {
    let mut mask = EdgeMask::empty(map.image_width, map.image_height);
    for gr in 0..map.grid_rows {
        for gc in 0..map.grid_cols {
            if classify(map.get(gr, gc), threshold) != Class::Edge {
                continue;
            }
            let pos = map.position(gr, gc);
            for y in pos.row..pos.row + map.patch_height {
                let start = y * mask.width + pos.col;
                mask.pixels[start..start + map.patch_width].fill(EdgeMask::EDGE);
            }
        }
    }
    mask
}

/// Keeps cells above `high`, plus cells above `low` that are 8-connected in
/// the grid to a kept cell. Everything else is set to 0.
pub fn hysteresis_filter(map: &DegreeMap, low: u32, high: u32) -> DegreeMap {
    let (low, high) = (low as usize, high as usize);
    let (rows, cols) = (map.grid_rows, map.grid_cols);
    let mut keep = vec![false; map.cells.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, &d) in map.cells.iter().enumerate() {
        if d > high {
            keep[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (r, c) = (i / cols, i % cols);
        for nr in r.saturating_sub(1)..=(r + 1).min(rows - 1) {
            for nc in c.saturating_sub(1)..=(c + 1).min(cols - 1) {
                let j = nr * cols + nc;
                if !keep[j] && map.cells[j] > low {
                    keep[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    let cells = map
        .cells
        .iter()
        .zip(&keep)
        .map(|(&d, &k)| if k { d } else { 0 })
        .collect();
    DegreeMap {
        cells,
        ..map.clone()
    }
}

/// Patches whose (vertical) reduced polynomials coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceGroup {
    pub polynomial: PseudoBooleanPolynomial,
    /// In scan order.
    pub positions: Vec<PatchPosition>,
}

/// Partitions all patch positions by their reduced polynomial. Groups are
/// ordered by first occurrence in scan order.
pub fn group_equivalent(img: &QuantizedImage, cfg: &ScanConfig) -> Result<Vec<EquivalenceGroup>> {
    cfg.validate()?;
    cfg.check_fits(img.width(), img.height())?;
    let (grid_rows, grid_cols) = cfg.grid_dims(img.width(), img.height());
    let polynomials: Vec<(PatchPosition, PseudoBooleanPolynomial)> = (0..grid_rows * grid_cols)
        .into_par_iter()
        .map(|i| {
            let pos = PatchPosition {
                row: (i / grid_cols) * cfg.stride,
                col: (i % grid_cols) * cfg.stride,
            };
            let patch =
                patch_at(img, pos.row, pos.col, cfg).expect("grid positions fit by construction");
            (pos, PseudoBooleanPolynomial::from_matrix(&patch))
        })
        .collect();

    let mut index: HashMap<PseudoBooleanPolynomial, usize> = HashMap::new();
    let mut groups: Vec<EquivalenceGroup> = Vec::new();
    for (pos, poly) in polynomials {
        match index.get(&poly) {
            Some(&g) => groups[g].positions.push(pos),
            None => {
                index.insert(poly.clone(), groups.len());
                groups.push(EquivalenceGroup {
                    polynomial: poly,
                    positions: vec![pos],
                });
            }
        }
    }
    Ok(groups)
}
