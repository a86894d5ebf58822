//! PGM (P2/P5) and CSV readers and writers.
//!
//! Writers always emit `maxval` 255 and a fixed header, so a P5 file written
//! here reads back bit-exactly.

use std::fmt::Write as _;

use crate::pbp::CostMatrix;
use crate::preprocess::GrayImage;
use crate::scanner::{DegreeMap, EdgeMask};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmFormat {
    /// `P2`, ASCII samples.
    Ascii,
    /// `P5`, one byte per sample.
    #[default]
    Binary,
}

/// Anything that can be written as an 8-bit PGM.
pub trait PgmSamples {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn samples(&self) -> &[u8];
}

impl PgmSamples for GrayImage {
    fn width(&self) -> usize {
        GrayImage::width(self)
    }
    fn height(&self) -> usize {
        GrayImage::height(self)
    }
    fn samples(&self) -> &[u8] {
        self.pixels()
    }
}

impl PgmSamples for EdgeMask {
    fn width(&self) -> usize {
        EdgeMask::width(self)
    }
    fn height(&self) -> usize {
        EdgeMask::height(self)
    }
    fn samples(&self) -> &[u8] {
        self.pixels()
    }
}

pub fn write_pgm<I: PgmSamples + ?Sized>(img: &I, format: PgmFormat) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    match format {
        PgmFormat::Binary => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            out.extend_from_slice(img.samples());
            out
        }
        PgmFormat::Ascii => {
            let mut out = format!("P2\n{w} {h}\n255\n");
            if w > 0 {
                for row in img.samples().chunks(w) {
                    let line: Vec<String> = row.iter().map(u8::to_string).collect();
                    out.push_str(&line.join(" "));
                    out.push('\n');
                }
            }
            out.into_bytes()
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Skips whitespace and `#` comments.
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<usize> {
        let tok = self
            .token()
            .ok_or_else(|| Error::PgmHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::PgmHeader(format!("invalid {what} '{}'", String::from_utf8_lossy(tok)))
            })
    }
}

/// Parses a P2 or P5 file. Samples are rescaled to `0..=255` with
/// `round(v * 255 / maxval)` when `maxval` is not 255.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cur = Cursor { bytes, pos: 0 };
    let format = match cur.token() {
        Some(b"P2") => PgmFormat::Ascii,
        Some(b"P5") => PgmFormat::Binary,
        Some(other) => {
            return Err(Error::PgmHeader(format!(
                "unsupported magic '{}'",
                String::from_utf8_lossy(other)
            )))
        }
        None => return Err(Error::PgmHeader("empty input".into())),
    };
    let width = cur.header_number("width")?;
    let height = cur.header_number("height")?;
    let maxval = cur.header_number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::PgmHeader(format!("maxval {maxval} not in 1..=255")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::PgmHeader("image dimensions overflow".into()))?;

    let mut samples = Vec::with_capacity(count);
    match format {
        PgmFormat::Binary => {
            // Exactly one whitespace byte separates the header from the data.
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(Error::TruncatedPixelData),
            }
            let data = bytes
                .get(cur.pos..cur.pos + count)
                .ok_or(Error::TruncatedPixelData)?;
            samples.extend_from_slice(data);
        }
        PgmFormat::Ascii => {
            for _ in 0..count {
                let tok = cur.token().ok_or(Error::TruncatedPixelData)?;
                let value = std::str::from_utf8(tok)
                    .ok()
                    .and_then(|s| s.parse::<u32>().ok())
                    .ok_or_else(|| Error::PgmSample(String::from_utf8_lossy(tok).into_owned()))?;
                if value > 255 {
                    return Err(Error::PgmSample(format!("{value} exceeds maxval {maxval}")));
                }
                samples.push(value as u8);
            }
        }
    }
    if let Some(&v) = samples.iter().find(|&&v| usize::from(v) > maxval) {
        return Err(Error::PgmSample(format!("{v} exceeds maxval {maxval}")));
    }
    if maxval != 255 {
        let m = maxval as u32;
        for v in &mut samples {
            *v = ((u32::from(*v) * 510 + m) / (2 * m)) as u8;
        }
    }
    GrayImage::new(width, height, samples)
}

/// Decodes PGM input, and PNG when built with the `png` feature.
pub fn decode_image(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        return read_pgm(bytes);
    }
    decode_other(bytes)
}

#[cfg(feature = "png")]
fn decode_other(bytes: &[u8]) -> Result<GrayImage> {
    use crate::preprocess::{to_gray, ColorImage};

    let rgba = image::load_from_memory(bytes)
        .map_err(|e| Error::Decode(e.to_string()))?
        .to_rgba8();
    let (width, height) = rgba.dimensions();
    to_gray(&ColorImage {
        width: width as usize,
        height: height as usize,
        channels: 4,
        bit_depth: 8,
        samples: rgba.into_raw(),
    })
}

#[cfg(not(feature = "png"))]
fn decode_other(_bytes: &[u8]) -> Result<GrayImage> {
    Err(Error::Decode(
        "not a PGM file (PNG input needs the `png` feature)".into(),
    ))
}

/// Parses comma-separated rows of non-negative integers. Blank lines are
/// ignored.
pub fn read_matrix_csv(text: &str) -> Result<CostMatrix> {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<u32>().map_err(|_| Error::Csv {
                    line: i + 1,
                    message: format!("'{tok}' is not a non-negative integer"),
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Csv {
                    line: i + 1,
                    message: format!("expected {} entries, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Csv {
            line: 1,
            message: "no rows".into(),
        });
    }
    CostMatrix::from_rows(&rows)
}

fn write_rows<T: std::fmt::Display>(
    rows: usize,
    cols: usize,
    get: impl Fn(usize, usize) -> T,
) -> String {
    let mut out = String::new();
    for r in 0..rows {
        for c in 0..cols {
            if c > 0 {
                out.push(',');
            }
            write!(out, "{}", get(r, c)).expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(matrix: &CostMatrix) -> String {
    write_rows(matrix.rows(), matrix.cols(), |r, c| matrix.get(r, c))
}

/// One line per grid row, cells separated by commas.
pub fn write_degree_csv(map: &DegreeMap) -> String {
    write_rows(map.grid_rows(), map.grid_cols(), |r, c| map.get(r, c))
}
