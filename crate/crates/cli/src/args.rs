use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pbp_edge::pbp::TruncationThreshold;
use pbp_edge::pipeline::DetectConfig;
use pbp_edge::preprocess::{PreprocessConfig, Quantizer};
use pbp_edge::scanner::{Combine, Hysteresis, ScanConfig};

/// Edge detection with pseudo-Boolean polynomial degrees over image patches.
#[derive(Debug, Parser)]
#[command(name = "pbpedge", version, propagate_version = true)]
pub struct Cli {
    /// Print machine-readable JSON reports.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an edge mask for a PGM image.
    Detect {
        /// Input image, `-` for stdin.
        input: PathBuf,
        /// Output mask (binary PGM), `-` for stdout.
        #[arg(short, long, default_value = "mask.pgm")]
        output: PathBuf,
        /// Also write the degree map as CSV.
        #[arg(long)]
        degree_csv: Option<PathBuf>,
        #[command(flatten)]
        opts: PipelineOpts,
    },
    /// Write the per-patch degree map as CSV.
    DegreeMap {
        input: PathBuf,
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
        #[command(flatten)]
        opts: PipelineOpts,
    },
    /// Print the reduced polynomial of a CSV matrix and its degree.
    Algebra {
        /// Comma-separated matrix, `-` for stdin.
        matrix: PathBuf,
        /// Use the transposed matrix.
        #[arg(long)]
        transpose: bool,
    },
    /// Compare the polynomial mask with a Sobel mask.
    Compare {
        input: PathBuf,
        /// Directory for pbp_mask.pgm, sobel_mask.pgm, diff.pgm and report.json.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Sobel magnitude above which a pixel is an edge.
        #[arg(long, default_value_t = 128)]
        sobel_threshold: u32,
        #[command(flatten)]
        opts: PipelineOpts,
    },
    /// Group patches whose reduced polynomials are identical.
    Group {
        input: PathBuf,
        #[command(flatten)]
        opts: PipelineOpts,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantizerArg {
    Uniform,
    Quantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CombineArg {
    Max,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineOpts {
    /// Gaussian sigma in pixels; 0 disables smoothing.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Number of intensity levels after quantization (2..=256).
    #[arg(long, default_value_t = 10)]
    pub levels: u32,
    #[arg(long, value_enum, default_value_t = QuantizerArg::Uniform)]
    pub quantizer: QuantizerArg,
    /// Patch size as HxW.
    #[arg(long, default_value = "6x6", value_parser = parse_patch)]
    pub patch: (usize, usize),
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// A patch is an edge when its degree is above this value.
    #[arg(long = "degree-threshold", default_value_t = 3)]
    pub degree_threshold: u32,
    #[arg(long, value_enum, default_value_t = CombineArg::Max)]
    pub combine: CombineArg,
    /// Degree hysteresis as LOW,HIGH.
    #[arg(long, value_parser = parse_hysteresis)]
    pub hysteresis: Option<(u32, u32)>,
}

impl PipelineOpts {
    pub fn to_config(&self) -> DetectConfig {
        DetectConfig {
            preprocess: PreprocessConfig {
                sigma: self.sigma,
                levels: self.levels,
                quantizer: match self.quantizer {
                    QuantizerArg::Uniform => Quantizer::Uniform,
                    QuantizerArg::Quantile => Quantizer::Quantile,
                },
            },
            scan: ScanConfig {
                patch_height: self.patch.0,
                patch_width: self.patch.1,
                stride: self.stride,
                threshold: TruncationThreshold::new(self.degree_threshold),
                combine: match self.combine {
                    CombineArg::Max => Combine::Max,
                    CombineArg::Both => Combine::Both,
                },
                hysteresis: self.hysteresis.map(|(low, high)| Hysteresis { low, high }),
            },
        }
    }
}

fn parse_patch(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got '{s}'"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid patch size '{s}'"))
    };
    Ok((parse(h)?, parse(w)?))
}

fn parse_hysteresis(s: &str) -> Result<(u32, u32), String> {
    let (low, high) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LOW,HIGH, got '{s}'"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<u32>()
            .map_err(|_| format!("invalid hysteresis '{s}'"))
    };
    Ok((parse(low)?, parse(high)?))
}
