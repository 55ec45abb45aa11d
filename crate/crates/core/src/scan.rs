//! Entropy sweeps over slices of the space of primitive majors, and
//! convergence tables along sequences of majors.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::Angle;
use crate::entropy::{core_entropy_with_limit, DEFAULT_BASIS_LIMIT};
use crate::portrait::{
    hausdorff_distance, major_metric_md, validate_portrait, CriticalPortrait, PortraitError,
    PortraitFile,
};

pub const CSV_HEADER: [&str; 6] = ["param_a", "param_b", "entropy", "rho", "basis_size", "status"];
pub const CACHE_DIR_ENV: &str = "CORE_ENTROPY_CACHE_DIR";
const CACHE_FILE: &str = "entropy_cache.jsonl";
const CHUNK: usize = 256;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("step must be a positive rational, got {0}")]
    BadStep(String),
    #[error("invalid expression {expr:?}: {reason}")]
    BadExpression { expr: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: existing output has header {found:?}")]
    HeaderMismatch { path: PathBuf, found: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Portrait(#[from] PortraitError),
    #[error("sequence has no member for n = {0}")]
    MissingMember(usize),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScanError + '_ {
    move |source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Positive rational grid step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step(BigRational);

impl Step {
    pub fn new(r: BigRational) -> Result<Self, ScanError> {
        if r.is_positive() {
            Ok(Step(r))
        } else {
            Err(ScanError::BadStep(r.to_string()))
        }
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// `k * step` for `k = 0, 1, ...` up to and including `hi`.
    fn grid(&self, lo: &BigRational, hi: &BigRational) -> Vec<BigRational> {
        let count = ((hi - lo) / &self.0).floor().to_integer();
        let count = count.to_usize().unwrap_or(0);
        (0..=count)
            .map(|k| lo + &self.0 * BigRational::from_integer(BigInt::from(k)))
            .collect()
    }
}

impl FromStr for Step {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let r = BigRational::from_str(s.trim()).map_err(|_| ScanError::BadStep(s.to_string()))?;
        Step::new(r)
    }
}

/// `c + x a + y b` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineExpr {
    constant: BigRational,
    a: BigRational,
    b: BigRational,
}

impl AffineExpr {
    pub fn eval(&self, a: &BigRational, b: &BigRational) -> Angle {
        Angle::from_rational(&self.constant + &self.a * a + &self.b * b)
    }

    pub fn uses_b(&self) -> bool {
        !self.b.is_zero()
    }
}

impl FromStr for AffineExpr {
    type Err = ScanError;

    /// Sums and differences of `a`, `b` and rationals, e.g. `a+1/3` or `b-a+1/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| ScanError::BadExpression {
            expr: s.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut e = AffineExpr {
            constant: BigRational::zero(),
            a: BigRational::zero(),
            b: BigRational::zero(),
        };
        let mut sign = BigRational::one();
        let mut term = String::new();
        let mut flush = |term: &mut String, sign: &BigRational| -> Result<(), ScanError> {
            match term.as_str() {
                "" => return Err(bad("missing term")),
                "a" => e.a += sign,
                "b" => e.b += sign,
                t => {
                    let r = BigRational::from_str(t).map_err(|_| bad("not a rational"))?;
                    e.constant += sign * r;
                }
            }
            term.clear();
            Ok(())
        };
        for (idx, c) in compact.chars().enumerate() {
            match c {
                '+' | '-' if idx == 0 => {
                    if c == '-' {
                        sign = -BigRational::one();
                    }
                }
                '+' | '-' => {
                    flush(&mut term, &sign)?;
                    sign = if c == '-' { -BigRational::one() } else { BigRational::one() };
                }
                _ => term.push(c),
            }
        }
        flush(&mut term, &sign)?;
        Ok(e)
    }
}

/// A two-parameter family of portraits; leaves are affine in `a` and `b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CustomSlice {
    pub degree: u32,
    pub leaves: Vec<Vec<String>>,
    pub a: (String, String),
    #[serde(default)]
    pub b: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SliceKind {
    /// `{(a, a+1/3, a+2/3)}`, `0 <= a <= 1/3`.
    Unicritical,
    /// `{(a, a+1/3), (a+1/2, a+5/6)}`, `0 <= a <= 1/2`.
    Symmetric,
    /// `{(a, a+1/3), (b, b+1/3)}` with `a+1/3 <= b <= a+2/3`, `0 <= a < 1`.
    Strip,
    /// `{(a, a+1/2)}`, `0 <= a <= 1/2`.
    Quadratic,
    Custom,
}

impl FromStr for SliceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unicritical" | "unicritical-cubic" => Ok(SliceKind::Unicritical),
            "symmetric" | "symmetric-cubic" => Ok(SliceKind::Symmetric),
            "strip" | "cubic-strip" => Ok(SliceKind::Strip),
            "quadratic" | "quadratic-circle" => Ok(SliceKind::Quadratic),
            "custom" => Ok(SliceKind::Custom),
            other => Err(format!("unknown slice {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SliceSpec {
    pub kind: SliceKind,
    pub step: Step,
    pub custom: Option<CustomSlice>,
}

/// One grid point of a slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPoint {
    pub a: BigRational,
    pub b: Option<BigRational>,
    pub degree: u32,
    pub leaves: Vec<Vec<Angle>>,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn shifted(a: &BigRational, offsets: &[BigRational]) -> Vec<Angle> {
    offsets.iter().map(|o| Angle::from_rational(a + o)).collect()
}

impl SliceSpec {
    pub fn new(kind: SliceKind, step: Step) -> Self {
        SliceSpec {
            kind,
            step,
            custom: None,
        }
    }

    pub fn custom(slice: CustomSlice, step: Step) -> Self {
        SliceSpec {
            kind: SliceKind::Custom,
            step,
            custom: Some(slice),
        }
    }

    /// Grid points in output order.
    pub fn points(&self) -> Result<Vec<GridPoint>, ScanError> {
        let zero = BigRational::zero();
        let one_param = |hi: BigRational, degree: u32, build: &dyn Fn(&BigRational) -> Vec<Vec<Angle>>| {
            self.step
                .grid(&zero, &hi)
                .into_iter()
                .map(|a| GridPoint {
                    leaves: build(&a),
                    a,
                    b: None,
                    degree,
                })
                .collect::<Vec<_>>()
        };
        Ok(match self.kind {
            SliceKind::Unicritical => one_param(q(1, 3), 3, &|a| {
                vec![shifted(a, &[q(0, 1), q(1, 3), q(2, 3)])]
            }),
            SliceKind::Symmetric => one_param(q(1, 2), 3, &|a| {
                vec![shifted(a, &[q(0, 1), q(1, 3)]), shifted(a, &[q(1, 2), q(5, 6)])]
            }),
            SliceKind::Quadratic => one_param(q(1, 2), 2, &|a| vec![shifted(a, &[q(0, 1), q(1, 2)])]),
            SliceKind::Strip => {
                let step = self.step.value();
                let mut out = Vec::new();
                let mut a = BigRational::zero();
                while a < BigRational::one() {
                    let first = (q(1, 3) / step).ceil().to_integer();
                    let last = (q(2, 3) / step).floor().to_integer();
                    let mut k = first;
                    while k <= last {
                        let b = Angle::from_rational(&a + step * BigRational::from_integer(k.clone()));
                        out.push(GridPoint {
                            leaves: vec![
                                shifted(&a, &[q(0, 1), q(1, 3)]),
                                shifted(b.as_rational(), &[q(0, 1), q(1, 3)]),
                            ],
                            a: a.clone(),
                            b: Some(b.as_rational().clone()),
                            degree: 3,
                        });
                        k += 1;
                    }
                    a += step;
                }
                out
            }
            SliceKind::Custom => {
                let c = self.custom.as_ref().ok_or_else(|| ScanError::BadExpression {
                    expr: String::new(),
                    reason: "custom slice needs a definition".into(),
                })?;
                let exprs: Vec<Vec<AffineExpr>> = c
                    .leaves
                    .iter()
                    .map(|l| l.iter().map(|s| s.parse()).collect())
                    .collect::<Result<_, _>>()?;
                let bound = |s: &str| -> Result<BigRational, ScanError> {
                    BigRational::from_str(s.trim()).map_err(|_| ScanError::BadExpression {
                        expr: s.to_string(),
                        reason: "bound is not a rational".into(),
                    })
                };
                let a_grid = self.step.grid(&bound(&c.a.0)?, &bound(&c.a.1)?);
                let b_grid: Vec<Option<BigRational>> = match &c.b {
                    Some((lo, hi)) => self.step.grid(&bound(lo)?, &bound(hi)?).into_iter().map(Some).collect(),
                    None => vec![None],
                };
                let mut out = Vec::with_capacity(a_grid.len() * b_grid.len());
                for a in &a_grid {
                    for b in &b_grid {
                        let bv = b.clone().unwrap_or_else(BigRational::zero);
                        out.push(GridPoint {
                            a: a.clone(),
                            b: b.clone(),
                            degree: c.degree,
                            leaves: exprs
                                .iter()
                                .map(|l| l.iter().map(|e| e.eval(a, &bv)).collect())
                                .collect(),
                        });
                    }
                }
                out
            }
        })
    }
}

/// Exact fraction and 12-digit decimal, e.g. `1/12=0.083333333333`.
pub fn format_param(r: &BigRational) -> String {
    let exact = if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    };
    format!("{exact}={:.12}", r.to_f64().unwrap_or(f64::NAN))
}

/// Parses the exact part of a [`format_param`] cell.
pub fn parse_param(cell: &str) -> Option<BigRational> {
    let exact = cell.split('=').next()?;
    BigRational::from_str(exact.trim()).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub param_a: String,
    pub param_b: String,
    pub entropy: Option<f64>,
    pub rho: Option<f64>,
    pub basis_size: Option<usize>,
    pub status: String,
}

impl ScanRow {
    fn record(&self) -> [String; 6] {
        let num = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.12}"));
        [
            self.param_a.clone(),
            self.param_b.clone(),
            num(self.entropy),
            num(self.rho),
            self.basis_size.map_or(String::new(), |b| b.to_string()),
            self.status.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub slice: SliceKind,
    pub step: String,
    pub timestamp: u64,
    pub version: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub metadata: ScanMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CachedEntropy {
    pub rho: f64,
    pub entropy: f64,
    pub basis_size: usize,
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    key: String,
    #[serde(flatten)]
    value: CachedEntropy,
}

/// Concurrent portrait -> entropy cache keyed by the canonical serialization of
/// the induced major, optionally persisted as JSON lines.
#[derive(Debug, Default)]
pub struct EntropyCache {
    map: DashMap<String, CachedEntropy>,
    file: Option<PathBuf>,
    pending: DashMap<String, CachedEntropy>,
}

impl EntropyCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Uses `$CORE_ENTROPY_CACHE_DIR/entropy_cache.jsonl` when the variable is set.
    pub fn from_env() -> Result<Self, ScanError> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) => Self::persistent(Path::new(&dir)),
            None => Ok(Self::in_memory()),
        }
    }

    pub fn persistent(dir: &Path) -> Result<Self, ScanError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join(CACHE_FILE);
        let map = DashMap::new();
        if path.exists() {
            let f = File::open(&path).map_err(io_err(&path))?;
            for line in BufReader::new(f).lines() {
                let line = line.map_err(io_err(&path))?;
                // a torn last line from an interrupted run is ignored
                if let Ok(entry) = serde_json::from_str::<CacheLine>(&line) {
                    map.insert(entry.key, entry.value);
                }
            }
        }
        Ok(EntropyCache {
            map,
            file: Some(path),
            pending: DashMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get_or_compute(&self, major: &CriticalPortrait) -> Result<CachedEntropy, String> {
        let key = major.canonical_key();
        if let Some(v) = self.map.get(&key) {
            return Ok(*v);
        }
        let fe = core_entropy_with_limit(major, DEFAULT_BASIS_LIMIT).map_err(|e| e.to_string())?;
        let value = CachedEntropy {
            rho: fe.rho,
            entropy: fe.entropy,
            basis_size: fe.basis_size(),
        };
        self.map.insert(key.clone(), value);
        if self.file.is_some() {
            self.pending.insert(key, value);
        }
        Ok(value)
    }

    /// Appends entries computed since the last flush.
    pub fn flush(&self) -> Result<(), ScanError> {
        let Some(path) = &self.file else { return Ok(()) };
        if self.pending.is_empty() {
            return Ok(());
        }
        let mut entries: Vec<(String, CachedEntropy)> = self
            .pending
            .iter()
            .map(|e| (e.key().clone(), *e.value()))
            .collect();
        entries.sort_by(|x, y| x.0.cmp(&y.0));
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(path))?;
        for (key, value) in entries {
            let line = serde_json::to_string(&CacheLine { key: key.clone(), value })?;
            writeln!(f, "{line}").map_err(io_err(path))?;
            self.pending.remove(&key);
        }
        Ok(())
    }
}

/// Entropy of one grid point. Non-primitive portraits are replaced by their
/// induced major.
pub fn evaluate_point(point: &GridPoint, cache: &EntropyCache) -> ScanRow {
    let param_a = format_param(&point.a);
    let param_b = point.b.as_ref().map(format_param).unwrap_or_default();
    let failed = |status: String| ScanRow {
        param_a: param_a.clone(),
        param_b: param_b.clone(),
        entropy: None,
        rho: None,
        basis_size: None,
        status,
    };
    let xi = match validate_portrait(point.degree, point.leaves.clone()) {
        Ok(xi) => xi,
        Err(e) => return failed(format!("invalid: {e}")),
    };
    let (major, status) = if xi.is_primitive_major() {
        (xi, "ok")
    } else {
        (xi.induced_major().into_portrait(), "identified")
    };
    match cache.get_or_compute(&major) {
        Ok(v) => ScanRow {
            param_a,
            param_b,
            entropy: Some(v.entropy),
            rho: Some(v.rho),
            basis_size: Some(v.basis_size),
            status: status.to_string(),
        },
        Err(e) => failed(format!("error: {e}")),
    }
}

fn evaluate_all(points: &[GridPoint], cache: &EntropyCache, jobs: Option<usize>) -> Result<Vec<ScanRow>, ScanError> {
    let run = || points.par_iter().map(|p| evaluate_point(p, cache)).collect();
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| ScanError::Pool(e.to_string()))
            .map(|pool| pool.install(run)),
        None => Ok(run()),
    }
}

fn metadata(spec: &SliceSpec, rows: usize) -> ScanMetadata {
    ScanMetadata {
        slice: spec.kind.clone(),
        step: spec.step.value().to_string(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        version: env!("CARGO_PKG_VERSION").to_string(),
        rows,
    }
}

/// Evaluates every grid point in memory.
pub fn scan_slice(spec: &SliceSpec) -> Result<ScanResult, ScanError> {
    scan_slice_with(spec, &EntropyCache::in_memory(), None)
}

pub fn scan_slice_with(
    spec: &SliceSpec,
    cache: &EntropyCache,
    jobs: Option<usize>,
) -> Result<ScanResult, ScanError> {
    let points = spec.points()?;
    let rows = evaluate_all(&points, cache, jobs)?;
    cache.flush()?;
    Ok(ScanResult {
        metadata: metadata(spec, rows.len()),
        rows,
    })
}

/// Path of the metadata file written next to a scan CSV.
pub fn metadata_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

/// Number of complete data rows in an existing scan file.
fn existing_rows(path: &Path) -> Result<usize, ScanError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(ScanError::HeaderMismatch {
            path: path.to_path_buf(),
            found: header.join(","),
        });
    }
    let mut n = 0;
    for rec in reader.records() {
        match rec {
            Ok(r) if r.len() == CSV_HEADER.len() => n += 1,
            _ => break,
        }
    }
    Ok(n)
}

/// Streams rows to `out` in grid order, flushing after every chunk. If `out`
/// already holds rows, they are kept and the scan resumes after them.
/// Returns the number of rows written by this call.
pub fn scan_to_csv(
    spec: &SliceSpec,
    out: &Path,
    cache: &EntropyCache,
    jobs: Option<usize>,
) -> Result<usize, ScanError> {
    let points = spec.points()?;
    let done = if out.exists() && fs::metadata(out).map_err(io_err(out))?.len() > 0 {
        existing_rows(out)?
    } else {
        let mut w = csv::Writer::from_path(out)?;
        w.write_record(CSV_HEADER)?;
        w.flush().map_err(io_err(out))?;
        0
    };
    if done > 0 {
        truncate_to_rows(out, done)?;
    }
    let file = OpenOptions::new().append(true).open(out).map_err(io_err(out))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let mut written = 0;
    for chunk in points[done.min(points.len())..].chunks(CHUNK) {
        let rows = evaluate_all(chunk, cache, jobs)?;
        for row in &rows {
            w.write_record(row.record())?;
        }
        w.flush().map_err(io_err(out))?;
        cache.flush()?;
        written += rows.len();
    }
    let meta = metadata(spec, points.len());
    fs::write(metadata_path(out), serde_json::to_string_pretty(&meta)?)
        .map_err(io_err(&metadata_path(out)))?;
    Ok(written)
}

/// Drops a partially written trailing line.
fn truncate_to_rows(path: &Path, rows: usize) -> Result<(), ScanError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let keep: Vec<&str> = text.lines().take(rows + 1).collect();
    let mut body = keep.join("\n");
    body.push('\n');
    if body != text {
        fs::write(path, body).map_err(io_err(path))?;
    }
    Ok(())
}

pub fn write_csv<W: Write>(rows: &[ScanRow], w: W) -> Result<(), ScanError> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(|source| ScanError::Io {
        path: PathBuf::from("<writer>"),
        source,
    })?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<ScanRow>, ScanError> {
    let mut reader = csv::Reader::from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(ScanError::HeaderMismatch {
            path: PathBuf::from("<reader>"),
            found: header.join(","),
        });
    }
    let opt_f = |s: &str| if s.is_empty() { None } else { s.parse().ok() };
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            Ok(ScanRow {
                param_a: rec[0].to_string(),
                param_b: rec[1].to_string(),
                entropy: opt_f(&rec[2]),
                rho: opt_f(&rec[3]),
                basis_size: if rec[4].is_empty() { None } else { rec[4].parse().ok() },
                status: rec[5].to_string(),
            })
        })
        .collect()
}

/// A sequence of majors `m_n` together with a target portrait.
#[derive(Debug, Clone)]
pub enum SequenceSpec {
    /// `{(1/n, 1/3+1/n), (-1/n, 2/3-1/n)}` towards `{(0,1/3), (0,2/3)}`.
    Example1,
    /// Even `n` as in `Example1`, odd `n` the triangle `{(1/n, 1/3+1/n, 2/3+1/n)}`.
    Example2,
    File(SequenceFile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceMember {
    pub n: usize,
    pub portrait: PortraitFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFile {
    pub target: PortraitFile,
    pub members: Vec<SequenceMember>,
}

impl SequenceSpec {
    pub fn from_path(path: &Path) -> Result<Self, ScanError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Ok(SequenceSpec::File(serde_json::from_str(&text)?))
    }

    pub fn target(&self) -> Result<CriticalPortrait, ScanError> {
        match self {
            SequenceSpec::Example1 | SequenceSpec::Example2 => Ok(validate_portrait(
                3,
                vec![
                    vec![Angle::zero(), Angle::new(1, 3)],
                    vec![Angle::zero(), Angle::new(2, 3)],
                ],
            )?),
            SequenceSpec::File(f) => Ok(CriticalPortrait::try_from(f.target.clone())?),
        }
    }

    pub fn member(&self, n: usize) -> Result<CriticalPortrait, ScanError> {
        let n_big = BigInt::from(n);
        let shift = |c: BigRational, sign: i64| {
            Angle::from_rational(c + BigRational::new(BigInt::from(sign), n_big.clone()))
        };
        let pair = || {
            vec![
                vec![shift(q(0, 1), 1), shift(q(1, 3), 1)],
                vec![shift(q(0, 1), -1), shift(q(2, 3), -1)],
            ]
        };
        let leaves = match self {
            SequenceSpec::Example1 => pair(),
            SequenceSpec::Example2 if n.is_multiple_of(2) => pair(),
            SequenceSpec::Example2 => vec![vec![shift(q(0, 1), 1), shift(q(1, 3), 1), shift(q(2, 3), 1)]],
            SequenceSpec::File(f) => {
                let m = f
                    .members
                    .iter()
                    .find(|m| m.n == n)
                    .ok_or(ScanError::MissingMember(n))?;
                return Ok(CriticalPortrait::try_from(m.portrait.clone())?);
            }
        };
        Ok(validate_portrait(3, leaves)?)
    }

    /// Indices available in a file sequence, or `None` for the built-in families.
    pub fn available(&self) -> Option<Vec<usize>> {
        match self {
            SequenceSpec::File(f) => Some(f.members.iter().map(|m| m.n).collect()),
            _ => None,
        }
    }
}

impl FromStr for SequenceSpec {
    type Err = ScanError;

    /// `example1`, `example2`, or a path to a sequence JSON file.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "example1" => Ok(SequenceSpec::Example1),
            "example2" => Ok(SequenceSpec::Example2),
            path => SequenceSpec::from_path(Path::new(path)),
        }
    }
}

pub const DEFAULT_NS: [usize; 5] = [6, 12, 24, 48, 96];
pub const DEFAULT_MD_RESOLUTION: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    /// Grid lower bound for `md(m_n, m)`.
    pub md: f64,
    pub md_upper: f64,
    pub entropy: f64,
    pub entropy_gap: f64,
    /// Hausdorff distance between `m_n` and the target portrait.
    pub hausdorff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTable {
    pub target_entropy: f64,
    pub rows: Vec<ProbeRow>,
}

pub fn continuity_probe(spec: &SequenceSpec, ns: &[usize]) -> Result<ProbeTable, ScanError> {
    continuity_probe_with(spec, ns, DEFAULT_MD_RESOLUTION)
}

pub fn continuity_probe_with(
    spec: &SequenceSpec,
    ns: &[usize],
    resolution: usize,
) -> Result<ProbeTable, ScanError> {
    let target = spec.target()?;
    let m = target.induced_major();
    let cache = EntropyCache::in_memory();
    let entropy_of = |p: &CriticalPortrait| -> Result<f64, ScanError> {
        cache
            .get_or_compute(p)
            .map(|v| v.entropy)
            .map_err(|e| ScanError::BadExpression {
                expr: p.to_string(),
                reason: e,
            })
    };
    let target_entropy = entropy_of(m.portrait())?;
    let rows = ns
        .par_iter()
        .map(|&n| {
            let xi_n = spec.member(n)?;
            let m_n = xi_n.induced_major();
            let md = major_metric_md(&m_n, &m, resolution)?;
            let entropy = entropy_of(m_n.portrait())?;
            Ok(ProbeRow {
                n,
                md: md.value_f64(),
                md_upper: md.upper_f64(),
                entropy,
                entropy_gap: (entropy - target_entropy).abs(),
                hausdorff: hausdorff_distance(&xi_n, &target),
            })
        })
        .collect::<Result<Vec<_>, ScanError>>()?;
    Ok(ProbeTable {
        target_entropy,
        rows,
    })
}

impl ProbeTable {
    pub fn to_text(&self) -> String {
        let mut out = format!("h(m) = {:.12}\n", self.target_entropy);
        out.push_str("n,md,md_upper,h_n,abs_dh,hausdorff\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.12},{:.12},{:.12},{:.12},{:.12}\n",
                r.n, r.md, r.md_upper, r.entropy, r.entropy_gap, r.hausdorff
            ));
        }
        out
    }
}
