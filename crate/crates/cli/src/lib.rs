//! The `tensor-orbits` command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 invalid spec, 4 size guard
//! exceeded, 5 verification failure, 1 anything else (I/O, internal errors).

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use tensor_orbits::contraction::{
    check_gauge_invariance, check_unitary_invariance, CheckOptions, GaugeMode, InvarianceReport,
    UnitaryMode, DEFAULT_TOL,
};
use tensor_orbits::counting::{
    count_fixed, count_multi, count_table_family, count_table_fixed, scientific, sigma_space_size,
    symmetry_group_order, CountTable,
};
use tensor_orbits::oracle::{
    catalog_to_graphs, count_orbits_bruteforce, count_orbits_burnside, Limits, OrbitRecord,
    SectorHistogram, DEFAULT_BOUND,
};
use tensor_orbits::specfile::{parse_spec, spec_digest, SpecFile};
use tensor_orbits::{ContractionSpec, Error};

/// Environment variable overriding the oracle size guard.
pub const MAX_SPACE_ENV: &str = "TENSOR_ORBITS_MAX_SPACE";

pub const EXIT_OK: u8 = 0;
pub const EXIT_OTHER: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SPEC: u8 = 3;
pub const EXIT_TOO_LARGE: u8 = 4;
pub const EXIT_VERIFY: u8 = 5;

/// Counts beyond this are also shown in scientific notation.
const SCI_THRESHOLD: u64 = 100_000_000;

#[derive(Debug, Parser)]
#[command(name = "tensor-orbits", version, about = "Count and enumerate unitary invariants of mixed-order complex tensors")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count orbits with the closed formulas.
    #[command(subcommand)]
    Count(CountCommand),
    /// Print a grid of counts.
    Table(TableArgs),
    /// Cross-check counts or invariance on a spec.
    Verify(VerifyArgs),
    /// Write one representative graph per orbit, plus a manifest.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Subcommand)]
enum CountCommand {
    /// n tensors of order d against n conjugates.
    Fixed {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        order: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
    /// Mixed orders, from a JSON spec file.
    Multi {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableMode {
    /// Rows n, columns d.
    Fixed,
    /// The built-in classification families: rows s, columns d in 3..=9.
    MultiFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    mode: TableMode,
    /// Orders d, e.g. `1..8` (inclusive). Defaults: 1..8 fixed, 3..9 multi-family.
    #[arg(long)]
    orders: Option<InclusiveRange>,
    /// Row parameter (n or s), e.g. `1..10` (inclusive). Default 1..10.
    #[arg(long)]
    rows: Option<InclusiveRange>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyWhat {
    /// Formula, Burnside and brute force must agree.
    Oracle,
    /// Random unitary rotations must leave the contraction unchanged.
    Unitary,
    /// Gauge relabelings must leave the contraction unchanged.
    Gauge,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum)]
    what: VerifyWhat,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    dim: u64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Run the negative control instead (non-unitary matrix, or a relabeling
    /// across types); succeeds when the check detects the violation.
    #[arg(long)]
    control: bool,
    /// Size guard for the exhaustive oracle (overrides the environment).
    #[arg(long)]
    max_space: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: GraphFormat,
    /// Size guard for the σ-space (overrides the environment).
    #[arg(long)]
    max_space: Option<u64>,
}

/// `a..b`, `a..=b` (both inclusive) or a single `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InclusiveRange {
    pub start: u32,
    pub end: u32,
}

impl InclusiveRange {
    pub fn to_range(self) -> RangeInclusive<u32> {
        self.start..=self.end
    }
}

impl FromStr for InclusiveRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad bound {t:?}: {e}"))
        };
        match s.split_once("..") {
            Some((a, b)) => Ok(Self {
                start: num(a)?,
                end: num(b.strip_prefix('=').unwrap_or(b))?,
            }),
            None => {
                let v = num(s)?;
                Ok(Self { start: v, end: v })
            }
        }
    }
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(PathBuf, std::io::Error),
    SpecRead(PathBuf, std::io::Error),
    Verify(String),
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) => match e {
                Error::EmptyRange(_) => EXIT_USAGE,
                Error::TooLarge { .. } => EXIT_TOO_LARGE,
                Error::NonIntegral { .. } | Error::Dimension { .. } | Error::MissingTensor(_) => {
                    EXIT_OTHER
                }
                _ => EXIT_SPEC,
            },
            CliError::Io(..) => EXIT_OTHER,
            CliError::SpecRead(..) => EXIT_SPEC,
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::SpecRead(p, e) => write!(f, "cannot read spec {}: {e}", p.display()),
            CliError::Verify(msg) => write!(f, "verification failed: {msg}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Errors go to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, out, &mut std::io::stderr())
}

/// [`run`] with an explicit error stream.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let io = |e| CliError::Io(PathBuf::from("<stdout>"), e);
    match cli.command {
        Command::Count(CountCommand::Fixed { order, n }) => {
            writeln!(out, "{}", display_count(&count_fixed(order, n)?)).map_err(io)
        }
        Command::Count(CountCommand::Multi { spec }) => {
            let spec = load_spec(&spec)?;
            writeln!(out, "{}", display_count(&count_multi(&spec)?)).map_err(io)
        }
        Command::Table(args) => {
            let table = build_table(&args)?;
            let text = match args.format {
                TableFormat::Csv => table_to_csv(&table),
                TableFormat::Json => table_to_json(&table),
            };
            write!(out, "{text}").map_err(io)
        }
        Command::Verify(args) => verify(&args, out),
        Command::Enumerate(args) => enumerate(&args, out),
    }
}

/// The exact integer, followed by its 3-digit scientific form when large.
pub fn display_count(v: &BigUint) -> String {
    if *v >= BigUint::from(SCI_THRESHOLD) {
        format!("{v} ({})", scientific(v, 3))
    } else {
        v.to_string()
    }
}

fn load_spec(path: &Path) -> CliResult<ContractionSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::SpecRead(path.to_path_buf(), e))?;
    Ok(parse_spec(&text)?)
}

fn limits(flag: Option<u64>) -> CliResult<Limits> {
    if let Some(b) = flag {
        return Ok(Limits::uniform(b));
    }
    match std::env::var(MAX_SPACE_ENV) {
        Ok(v) => v.trim().parse().map(Limits::uniform).map_err(|_| {
            CliError::Usage(format!("{MAX_SPACE_ENV}={v:?} is not a nonnegative integer"))
        }),
        Err(_) => Ok(Limits::uniform(DEFAULT_BOUND)),
    }
}

fn build_table(args: &TableArgs) -> CliResult<CountTable> {
    let rows = args.rows.unwrap_or(InclusiveRange { start: 1, end: 10 }).to_range();
    Ok(match args.mode {
        TableMode::Fixed => {
            let orders = args.orders.unwrap_or(InclusiveRange { start: 1, end: 8 });
            count_table_fixed(orders.to_range(), rows)?
        }
        TableMode::MultiFamily => {
            let orders = args.orders.unwrap_or(InclusiveRange { start: 3, end: 9 });
            count_table_family(orders.to_range(), rows)?
        }
    })
}

/// CSV with header `n\d,1,2,...` (or `s\d,...`) and exact integer cells.
pub fn table_to_csv(table: &CountTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![format!("{}\\d", table.row_label)];
    header.extend(table.columns.iter().map(u32::to_string));
    w.write_record(&header).expect("in-memory write");
    for (r, cells) in table.rows.iter().zip(&table.cells) {
        let mut rec = vec![r.to_string()];
        rec.extend(cells.iter().map(BigUint::to_string));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Inverse of [`table_to_csv`].
pub fn table_from_csv(text: &str) -> Result<CountTable, String> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = r.records();
    let header = records
        .next()
        .ok_or("empty table")?
        .map_err(|e| e.to_string())?;
    let first = header.get(0).ok_or("empty header")?;
    let row_label = first
        .strip_suffix("\\d")
        .ok_or_else(|| format!("bad corner cell {first:?}"))?
        .to_string();
    let parse_u32 = |s: &str| s.parse::<u32>().map_err(|e| format!("{s:?}: {e}"));
    let columns = header.iter().skip(1).map(parse_u32).collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| e.to_string())?;
        rows.push(parse_u32(rec.get(0).ok_or("empty row")?)?);
        let row = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<BigUint>().map_err(|e| format!("{s:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != columns.len() {
            return Err(format!("row has {} cells, header {}", row.len(), columns.len()));
        }
        cells.push(row);
    }
    Ok(CountTable {
        row_label,
        rows,
        columns,
        cells,
    })
}

#[derive(Serialize)]
struct TableJson<'a> {
    row_label: &'a str,
    rows: &'a [u32],
    columns: &'a [u32],
    /// Exact integers as decimal strings.
    cells: Vec<Vec<String>>,
}

pub fn table_to_json(table: &CountTable) -> String {
    let json = TableJson {
        row_label: &table.row_label,
        rows: &table.rows,
        columns: &table.columns,
        cells: table
            .cells
            .iter()
            .map(|r| r.iter().map(BigUint::to_string).collect())
            .collect(),
    };
    pretty(&json) + "\n"
}

#[derive(Serialize)]
struct OracleReport {
    check: &'static str,
    spec_digest: String,
    formula: String,
    burnside: String,
    bruteforce: String,
    agree: bool,
}

#[derive(Serialize)]
struct ControlReport {
    control: bool,
    detected: bool,
    #[serde(flatten)]
    report: InvarianceReport,
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = load_spec(&args.spec)?;
    let io = |e| CliError::Io(PathBuf::from("<stdout>"), e);
    match args.what {
        VerifyWhat::Oracle => {
            let lim = limits(args.max_space)?;
            let formula = count_multi(&spec)?;
            let burnside = count_orbits_burnside(&spec, lim)?;
            let brute = count_orbits_bruteforce(&spec, lim)?.count();
            let agree = formula == burnside && burnside == brute;
            let report = OracleReport {
                check: "oracle",
                spec_digest: spec_digest(&spec),
                formula: formula.to_string(),
                burnside: burnside.to_string(),
                bruteforce: brute.to_string(),
                agree,
            };
            writeln!(out, "{}", pretty(&report)).map_err(io)?;
            if !agree {
                return Err(CliError::Verify(format!(
                    "formula {formula}, burnside {burnside}, brute force {brute}"
                )));
            }
            Ok(())
        }
        VerifyWhat::Unitary | VerifyWhat::Gauge => {
            let opts = CheckOptions {
                dim: args.dim as usize,
                trials: args.trials as usize,
                seed: args.seed,
                tol: args.tol,
            };
            let report = match (args.what, args.control) {
                (VerifyWhat::Unitary, false) => check_unitary_invariance(&spec, opts, UnitaryMode::AllColors)?,
                (VerifyWhat::Unitary, true) => check_unitary_invariance(&spec, opts, UnitaryMode::NonUnitary)?,
                (_, false) => check_gauge_invariance(&spec, opts, GaugeMode::Symmetry)?,
                (_, true) => check_gauge_invariance(&spec, opts, GaugeMode::CrossType)?,
            };
            if args.control {
                let detected = !report.pass;
                let max = report.max_deviation;
                writeln!(out, "{}", pretty(&ControlReport { control: true, detected, report })).map_err(io)?;
                if !detected {
                    return Err(CliError::Verify(format!(
                        "negative control not detected (max deviation {max:e})"
                    )));
                }
            } else {
                writeln!(out, "{}", pretty(&report)).map_err(io)?;
                if !report.pass {
                    return Err(CliError::Verify(format!(
                        "max deviation {:e} in trial {} exceeds tolerance {:e}",
                        report.max_deviation, report.worst_trial, report.tol
                    )));
                }
            }
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes")
}

#[derive(Serialize)]
struct ManifestEntry {
    index: usize,
    file: String,
    orbit_size: u64,
    components: usize,
    sectors_separated: bool,
}

#[derive(Serialize)]
struct Manifest {
    spec_digest: String,
    spec: SpecFile,
    orbit_count: usize,
    sigma_space_size: String,
    group_order: String,
    histogram: SectorHistogram,
    orbits: Vec<ManifestEntry>,
}

fn enumerate(args: &EnumerateArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = load_spec(&args.spec)?;
    let catalog = count_orbits_bruteforce(&spec, limits(args.max_space)?)?;
    let graphs = catalog_to_graphs(&catalog)?;
    let dir = &args.out;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    let width = graphs.len().to_string().len().max(3);
    let mut entries = Vec::with_capacity(graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        let (file, body) = match args.format {
            GraphFormat::Dot => (format!("orbit_{i:0width$}.dot"), g.graph.to_dot()),
            GraphFormat::Json => (
                format!("orbit_{i:0width$}.json"),
                pretty(&OrbitRecord::new(i, g)?) + "\n",
            ),
        };
        let path = dir.join(&file);
        std::fs::write(&path, body).map_err(|e| CliError::Io(path, e))?;
        entries.push(ManifestEntry {
            index: i,
            file,
            orbit_size: g.orbit_size,
            components: g.components,
            sectors_separated: g.sectors_separated,
        });
    }
    let manifest = Manifest {
        spec_digest: spec_digest(&spec),
        spec: SpecFile::from_spec(&spec),
        orbit_count: graphs.len(),
        sigma_space_size: sigma_space_size(&spec).to_string(),
        group_order: symmetry_group_order(&spec).to_string(),
        histogram: SectorHistogram::of(&graphs),
        orbits: entries,
    };
    let path = dir.join("manifest.json");
    let text = pretty(&manifest) + "\n";
    std::fs::write(&path, text).map_err(|e| CliError::Io(path.clone(), e))?;
    writeln!(out, "{} orbits written to {}", graphs.len(), dir.display())
        .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!("1..8".parse(), Ok(InclusiveRange { start: 1, end: 8 }));
        assert_eq!("3..=9".parse(), Ok(InclusiveRange { start: 3, end: 9 }));
        assert_eq!("4".parse(), Ok(InclusiveRange { start: 4, end: 4 }));
        assert!("a..3".parse::<InclusiveRange>().is_err());
    }

    #[test]
    fn large_counts_get_scientific_suffix() {
        assert_eq!(display_count(&BigUint::from(43u32)), "43");
        assert_eq!(display_count(&BigUint::from(191_374_041u32)), "191374041 (1.91e+08)");
    }

    #[test]
    fn csv_round_trip() {
        let t = count_table_fixed(1..=8, 1..=10).unwrap();
        let text = table_to_csv(&t);
        assert!(text.starts_with("n\\d,1,2,3,4,5,6,7,8\n"));
        assert_eq!(table_from_csv(&text).unwrap(), t);
        let f = count_table_family(3..=5, 1..=4).unwrap();
        assert_eq!(table_from_csv(&table_to_csv(&f)).unwrap(), f);
    }
}
