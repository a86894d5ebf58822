use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {actual}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },

    #[error("column sums of a {rows}x{cols} matrix with maximum entry {max_entry} overflow u64")]
    Overflow {
        rows: usize,
        cols: usize,
        max_entry: u32,
    },

    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("column {col} is not a permutation of the row indices")]
    InvalidPermutation { col: usize },

    #[error("column {col} decreases at row {row}; expected a column-sorted matrix")]
    UnsortedColumn { col: usize, row: usize },

    #[error("variable index {index} is out of range for {rows} rows")]
    VariableIndex { index: u32, rows: usize },

    #[error("polynomial coefficients overflow u64")]
    CoefficientOverflow,

    #[error("assignment has {actual} variables, polynomial has {expected}")]
    AssignmentLength { expected: usize, actual: usize },

    #[error("image of {width}x{height} needs {expected} pixels, got {actual}")]
    PixelCount {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },

    #[error("pixel value {value} is out of range for {levels} levels")]
    PixelOutOfRange { value: u32, levels: u32 },

    #[error("unsupported image format: {channels} channel(s) at {bit_depth} bits")]
    UnsupportedFormat { channels: usize, bit_depth: u8 },

    #[error("gaussian sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),

    #[error("quantization levels must be in 2..=256, got {0}")]
    InvalidLevels(u32),

    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),

    #[error("image of {width}x{height} is smaller than the {patch_height}x{patch_width} patch")]
    ImageTooSmall {
        width: usize,
        height: usize,
        patch_height: usize,
        patch_width: usize,
    },

    #[error("patch at ({row}, {col}) does not fit inside a {width}x{height} image")]
    PatchOutOfBounds {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },

    #[error("malformed PGM header: {0}")]
    PgmHeader(String),

    #[error("truncated pixel data")]
    TruncatedPixelData,

    #[error("invalid PGM sample: {0}")]
    PgmSample(String),

    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("could not decode image: {0}")]
    Decode(String),
}
