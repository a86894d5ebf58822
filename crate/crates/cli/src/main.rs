mod args;

use std::fmt;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use pbp_edge::baseline::{sobel, sobel_mask};
use pbp_edge::imageio::{decode_image, read_matrix_csv, write_degree_csv, write_pgm, PgmFormat};
use pbp_edge::pbp::PseudoBooleanPolynomial;
use pbp_edge::pipeline::{detect, DetectConfig, Detection};
use pbp_edge::preprocess::{gaussian_blur, GrayImage};
use pbp_edge::scanner::group_equivalent;
use serde::Serialize;

use args::{Cli, Command, PipelineOpts};

#[derive(Debug)]
enum CliError {
    /// Reading, writing or decoding a file failed.
    Io(String),
    /// Flags or inputs are inconsistent.
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(msg) | CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(err: pbp_edge::Error) -> CliError {
    CliError::Usage(err.to_string())
}

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    let mut bytes = Vec::new();
    let result = if is_stdio(path) {
        io::stdin().read_to_end(&mut bytes).map(|_| ())
    } else {
        std::fs::read(path).map(|b| bytes = b)
    };
    result.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(bytes)
}

fn read_image(path: &Path) -> CliResult<GrayImage> {
    let bytes = read_input(path)?;
    decode_image(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory so a failed run
/// never leaves a partial output behind.
fn write_output(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let fail = |e: io::Error| CliError::Io(format!("{}: {e}", path.display()));
    if is_stdio(path) {
        let mut out = io::stdout().lock();
        return out.write_all(bytes).and_then(|_| out.flush()).map_err(fail);
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Reports go to stdout unless stdout already carries an output file.
fn emit_report(text: &str, stdout_busy: bool) {
    if stdout_busy {
        eprintln!("{text}");
    } else {
        println!("{text}");
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn run_detection(img: &GrayImage, opts: &PipelineOpts) -> CliResult<(DetectConfig, Detection)> {
    let cfg = opts.to_config();
    let detection = detect(img, &cfg).map_err(usage)?;
    if detection.quantize_fell_back {
        eprintln!("warning: histogram too concentrated for quantile bins; used uniform bins");
    }
    Ok((cfg, detection))
}

#[derive(Serialize)]
struct DetectReport {
    width: usize,
    height: usize,
    edge_px: usize,
    grid_rows: usize,
    grid_cols: usize,
    max_degree: usize,
    quantile_fallback: bool,
}

impl DetectReport {
    fn new(d: &Detection) -> Self {
        Self {
            width: d.mask.width(),
            height: d.mask.height(),
            edge_px: d.mask.edge_count(),
            grid_rows: d.degree_map.grid_rows(),
            grid_cols: d.degree_map.grid_cols(),
            max_degree: d.degree_map.max_degree(),
            quantile_fallback: d.quantize_fell_back,
        }
    }
}

#[derive(Serialize)]
struct AlgebraReport {
    polynomial: String,
    degree: usize,
    monomials: usize,
    rows: usize,
    cols: usize,
}

#[derive(Serialize)]
struct CompareReport {
    pbp_edge_px: usize,
    sobel_edge_px: usize,
    agreement: f64,
}

#[derive(Serialize)]
struct GroupReport {
    polynomial: String,
    degree: usize,
    count: usize,
    positions: Vec<[usize; 2]>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Detect {
            input,
            output,
            degree_csv,
            opts,
        } => {
            opts.to_config().validate().map_err(usage)?;
            let img = read_image(&input)?;
            let (_, detection) = run_detection(&img, &opts)?;
            write_output(&output, &write_pgm(&detection.mask, PgmFormat::Binary))?;
            if let Some(path) = &degree_csv {
                write_output(path, write_degree_csv(&detection.degree_map).as_bytes())?;
            }
            let busy = is_stdio(&output) || degree_csv.as_deref().is_some_and(is_stdio);
            let report = DetectReport::new(&detection);
            if cli.json {
                emit_report(&to_json(&report), busy);
            } else {
                emit_report(
                    &format!(
                        "{}x{} image, {} edge pixels, max degree {} -> {}",
                        report.width,
                        report.height,
                        report.edge_px,
                        report.max_degree,
                        output.display()
                    ),
                    busy,
                );
            }
        }
        Command::DegreeMap {
            input,
            output,
            opts,
        } => {
            opts.to_config().validate().map_err(usage)?;
            let img = read_image(&input)?;
            let (_, detection) = run_detection(&img, &opts)?;
            write_output(&output, write_degree_csv(&detection.degree_map).as_bytes())?;
        }
        Command::Algebra { matrix, transpose } => {
            let text = read_input(&matrix)?;
            let text = String::from_utf8(text)
                .map_err(|_| CliError::Usage(format!("{}: not UTF-8 text", matrix.display())))?;
            let mut m = read_matrix_csv(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", matrix.display())))?;
            if transpose {
                m = m.transpose();
            }
            let poly = PseudoBooleanPolynomial::from_matrix(&m);
            if cli.json {
                println!(
                    "{}",
                    to_json(&AlgebraReport {
                        polynomial: poly.to_string(),
                        degree: poly.degree(),
                        monomials: poly.len(),
                        rows: m.rows(),
                        cols: m.cols(),
                    })
                );
            } else {
                println!("{poly}");
                println!("degree={}", poly.degree());
            }
        }
        Command::Compare {
            input,
            out_dir,
            sobel_threshold,
            opts,
        } => {
            opts.to_config().validate().map_err(usage)?;
            let img = read_image(&input)?;
            let (cfg, detection) = run_detection(&img, &opts)?;
            let smoothed = gaussian_blur(&img, cfg.preprocess.sigma).map_err(usage)?;
            let sobel_edges = sobel_mask(&sobel(&smoothed).map_err(usage)?, sobel_threshold);
            let diff = detection.mask.difference(&sobel_edges).map_err(usage)?;
            let report = CompareReport {
                pbp_edge_px: detection.mask.edge_count(),
                sobel_edge_px: sobel_edges.edge_count(),
                agreement: detection.mask.agreement(&sobel_edges).map_err(usage)?,
            };
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
            let file = |name: &str| -> PathBuf { out_dir.join(name) };
            let json = to_json(&report);
            write_output(
                &file("pbp_mask.pgm"),
                &write_pgm(&detection.mask, PgmFormat::Binary),
            )?;
            write_output(
                &file("sobel_mask.pgm"),
                &write_pgm(&sobel_edges, PgmFormat::Binary),
            )?;
            write_output(&file("diff.pgm"), &write_pgm(&diff, PgmFormat::Binary))?;
            write_output(&file("report.json"), format!("{json}\n").as_bytes())?;
            if cli.json {
                println!("{json}");
            } else {
                println!(
                    "pbp edge pixels: {}\nsobel edge pixels: {}\nagreement: {:.4}",
                    report.pbp_edge_px, report.sobel_edge_px, report.agreement
                );
            }
        }
        Command::Group { input, opts } => {
            let cfg = opts.to_config();
            cfg.validate().map_err(usage)?;
            let img = read_image(&input)?;
            let quantized = cfg.preprocess.apply(&img).map_err(usage)?;
            if quantized.fell_back {
                eprintln!(
                    "warning: histogram too concentrated for quantile bins; used uniform bins"
                );
            }
            let groups = group_equivalent(&quantized.image, &cfg.scan).map_err(usage)?;
            let reports: Vec<GroupReport> = groups
                .iter()
                .map(|g| GroupReport {
                    polynomial: g.polynomial.to_string(),
                    degree: g.polynomial.degree(),
                    count: g.positions.len(),
                    positions: g.positions.iter().map(|p| [p.row, p.col]).collect(),
                })
                .collect();
            if cli.json {
                println!("{}", to_json(&reports));
            } else {
                println!("groups={}", reports.len());
                for r in &reports {
                    let first = r.positions[0];
                    println!(
                        "{}\t{}\t({}, {})\t{}",
                        r.count, r.degree, first[0], first[1], r.polynomial
                    );
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
