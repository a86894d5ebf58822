//! Edge detection with penalty-based pseudo-Boolean polynomials.
//!
//! An image patch is read as a cost matrix whose rows are spatial regions and
//! whose columns are pixel positions. Sorting every column and taking first
//! differences yields a pseudo-Boolean polynomial; after merging monomials that
//! share a variable set, the polynomial's degree measures how many distinct
//! intensity regions the patch straddles. A patch is an edge when that degree
//! exceeds a truncation threshold `p`, and a blob otherwise.
//!
//! The crate is split along the processing chain:
//!
//! - [`pbp`]: exact integer algebra on cost matrices and polynomials.
//! - [`preprocess`]: grayscale conversion, Gaussian smoothing and intensity
//!   quantization.
//! - [`scanner`]: sliding patches, degree maps, edge masks, hysteresis and
//!   grouping of equivalent patches.
//! - [`baseline`]: a Sobel detector for side-by-side comparison.
//! - [`imageio`]: PGM and CSV readers and writers.
//! - [`pipeline`]: the end-to-end `detect` chain used by the CLI.

pub mod baseline;
mod error;
pub mod imageio;
pub mod pbp;
pub mod pipeline;
pub mod preprocess;
pub mod scanner;

pub use error::{Error, Result};
