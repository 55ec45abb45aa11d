//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::entropy::{core_entropy_with_limit, EntropyError, DEFAULT_BASIS_LIMIT};
use crate::linalg::EigenError;
use crate::portrait::{hausdorff_distance, major_metric_md, CriticalPortrait, PortraitError};
use crate::scan::{
    continuity_probe_with, scan_to_csv, CustomSlice, EntropyCache, ScanError, SequenceSpec,
    SliceKind, SliceSpec, Step, DEFAULT_MD_RESOLUTION,
};
use crate::wedge::{
    build_truncated_graph_with, growth_rate_with, GrowthOptions, Restriction, WedgeError,
    DEFAULT_MAX_VERTICES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_FAILURE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "core-entropy", version, about = "Core entropy of polynomials from critical portraits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy from the finite transition matrix.
    Entropy {
        #[arg(long)]
        portrait: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Largest arc basis allowed.
        #[arg(long, default_value_t = DEFAULT_BASIS_LIMIT)]
        max_basis: usize,
    },
    /// Growth rate of the truncated non-diagonal wedge graph.
    Growth {
        #[arg(long)]
        portrait: PathBuf,
        /// Truncation bound N (height <= N, width <= 2N).
        #[arg(long)]
        max_length: usize,
        /// Print the integer coefficients of the truncated spectral determinant.
        #[arg(long)]
        emit_poly: bool,
        /// Degree of the spectral determinant (default min(N-2, 24)).
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
        max_vertices: usize,
        #[arg(long)]
        no_stabilization_check: bool,
        /// Write the non-diagonal edge list to this file.
        #[arg(long)]
        dump_edges: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Entropy along a slice of primitive majors, written as CSV.
    Scan {
        #[arg(long)]
        slice: SliceKind,
        #[arg(long)]
        step: Step,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Slice definition for `--slice custom`.
        #[arg(long)]
        custom: Option<PathBuf>,
    },
    /// Distance between the primitive majors induced by two portraits.
    Metric {
        #[arg(long)]
        m1: PathBuf,
        #[arg(long)]
        m2: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MD_RESOLUTION)]
        resolution: usize,
    },
    /// Convergence table along a sequence of majors.
    Probe {
        /// `example1`, `example2` or a sequence JSON file.
        #[arg(long)]
        sequence: String,
        #[arg(long, value_delimiter = ',', default_values_t = crate::scan::DEFAULT_NS)]
        ns: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_MD_RESOLUTION)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Error with its exit status.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<PortraitError> for Failure {
    fn from(e: PortraitError) -> Self {
        Failure::new(EXIT_INVALID_INPUT, format!("invalid portrait: {e}"))
    }
}

impl From<EntropyError> for Failure {
    fn from(e: EntropyError) -> Self {
        match e {
            EntropyError::BasisTooLarge { .. } => Failure::new(EXIT_BUDGET, format!("budget exceeded: {e}")),
            EntropyError::Eigen(e) => e.into(),
        }
    }
}

impl From<EigenError> for Failure {
    fn from(e: EigenError) -> Self {
        Failure::new(EXIT_FAILURE, e.to_string())
    }
}

impl From<WedgeError> for Failure {
    fn from(e: WedgeError) -> Self {
        let code = match e {
            WedgeError::TooManyVertices { .. }
            | WedgeError::TooManyCycles { .. }
            | WedgeError::TooManyMulticycles { .. }
            | WedgeError::Overflow { .. } => EXIT_BUDGET,
            WedgeError::ZeroBound | WedgeError::DegreeTooLarge { .. } => EXIT_INVALID_INPUT,
            _ => EXIT_FAILURE,
        };
        let prefix = if code == EXIT_BUDGET { "budget exceeded: " } else { "" };
        Failure::new(code, format!("{prefix}{e}"))
    }
}

impl From<ScanError> for Failure {
    fn from(e: ScanError) -> Self {
        let code = match e {
            ScanError::Portrait(_)
            | ScanError::BadStep(_)
            | ScanError::BadExpression { .. }
            | ScanError::Json(_)
            | ScanError::HeaderMismatch { .. }
            | ScanError::MissingMember(_) => EXIT_INVALID_INPUT,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_FAILURE, e.to_string())
    }
}

fn load(path: &Path) -> Result<CriticalPortrait, Failure> {
    Ok(CriticalPortrait::from_path(path)?)
}

/// Runs the CLI on `argv` (including the program name), writing to the given
/// streams. Returns the exit status.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Entropy {
            portrait,
            format,
            max_basis,
        } => {
            let xi = load(&portrait)?;
            let fe = core_entropy_with_limit(&xi, max_basis)?;
            match format {
                Format::Text => writeln!(out, "rho = {:.12}, h = {:.12}", fe.rho, fe.entropy)?,
                Format::Json => writeln!(
                    out,
                    "{}",
                    json!({
                        "rho": fe.rho,
                        "entropy": fe.entropy,
                        "basis_size": fe.basis_size(),
                    })
                )?,
            }
        }
        Command::Growth {
            portrait,
            max_length,
            emit_poly,
            degree,
            max_vertices,
            no_stabilization_check,
            dump_edges,
            format,
        } => {
            let xi = load(&portrait)?;
            let opts = GrowthOptions {
                bound: max_length,
                degree,
                max_vertices,
                check_stabilization: !no_stabilization_check,
            };
            let est = growth_rate_with(&xi, &opts)?;
            if let Some(path) = dump_edges {
                let g = build_truncated_graph_with(&xi, max_length, max_vertices)?;
                std::fs::write(&path, g.edge_list(Restriction::NonDiagonal))?;
            }
            match format {
                Format::Text => {
                    writeln!(
                        out,
                        "rate = {:.12}, h = {:.12}, series_rate = {:.12}",
                        est.rate,
                        est.entropy(),
                        est.series_rate
                    )?;
                    if emit_poly {
                        writeln!(out, "{:?}", est.series.coefficients())?;
                    }
                }
                Format::Json => {
                    let mut v = json!({
                        "rate": est.rate,
                        "entropy": est.entropy(),
                        "series_rate": est.series_rate,
                        "bound": est.bound,
                        "stabilized": est.stabilized,
                    });
                    if emit_poly {
                        let coeffs: Vec<String> =
                            est.series.coefficients().iter().map(i128::to_string).collect();
                        v["coefficients"] = json!(coeffs);
                    }
                    writeln!(out, "{v}")?;
                }
            }
        }
        Command::Scan {
            slice,
            step,
            out: path,
            jobs,
            custom,
        } => {
            let spec = match (slice, custom) {
                (SliceKind::Custom, Some(file)) => {
                    let text = std::fs::read_to_string(&file)?;
                    let c: CustomSlice = serde_json::from_str(&text)
                        .map_err(|e| Failure::new(EXIT_INVALID_INPUT, format!("{}: {e}", file.display())))?;
                    SliceSpec::custom(c, step)
                }
                (SliceKind::Custom, None) => {
                    return Err(Failure::new(EXIT_USAGE, "--slice custom requires --custom FILE"))
                }
                (kind, _) => SliceSpec::new(kind, step),
            };
            let cache = EntropyCache::from_env()?;
            let written = scan_to_csv(&spec, &path, &cache, jobs)?;
            writeln!(out, "wrote {written} rows to {}", path.display())?;
        }
        Command::Metric { m1, m2, resolution } => {
            let (a, b) = (load(&m1)?, load(&m2)?);
            let md = major_metric_md(&a.induced_major(), &b.induced_major(), resolution)?;
            writeln!(out, "md = {}", md.value)?;
            writeln!(out, "md_upper = {}", md.upper)?;
            writeln!(out, "md_status = approximate")?;
            writeln!(out, "hausdorff = {:.12}", hausdorff_distance(&a, &b))?;
        }
        Command::Probe {
            sequence,
            ns,
            resolution,
            format,
        } => {
            let spec: SequenceSpec = sequence.parse()?;
            let table = continuity_probe_with(&spec, &ns, resolution)?;
            match format {
                Format::Text => write!(out, "{}", table.to_text())?,
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string(&table).map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?
                )?,
            }
        }
    }
    Ok(())
}
