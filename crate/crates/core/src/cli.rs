//! Command-line front end.
//!
//! Every subcommand produces one report, rendered as canonical JSON or CSV.
//! A run manifest records the command line and the SHA-256 of the canonical
//! JSON rendering, so a run can be replayed and compared byte for byte.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::clusters::{
    arc_window_sweep, connes_threshold, decomposition_gap, partition, random_sign_function, CutoffSpec,
};
use crate::error::{Error, Result};
use crate::lattice::{cap_statistics, enumerate_sphere, CapStatistics, SphereSet, DEFAULT_EXACT_LIMIT};
use crate::observability::{
    exponent_tables, family_hyperplane, family_simple, family_wigert, gram_matrix, min_eigenvalue, upper_bound_eval,
};
use crate::report::{canonical_json, render_csv, Cell, Format, Report, Table};
use crate::spectral::{gamma_bounds, gamma_max, kernel_vector, moment_matrix, GammaBounds, RationalVector};
use crate::turan::{extremal_scaling_suite, nazarov_trials, turan_ratio, SetDescriptor, TrialConfig};
use crate::expoly::ExponentialPolynomial;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

/// Largest sphere handed to the dense eigensolver from the command line.
pub const GRAM_POINT_CAP: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "torus-obs", version, about = "Lattice points on spheres and observability of toral eigenfunctions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: OutputFormat,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Append a run manifest (one JSON line) to this file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Enumerate integer points on a sphere.
    Sphere(SphereArgs),
    /// Maximal vanishing order and its bracketing bounds.
    Gamma(GammaArgs),
    /// Smallest Gram eigenvalue on a sphere for a list of radii.
    Observability(ObservabilityArgs),
    /// Proximity clusters, hyperplane thresholds and the decomposition gap.
    Cluster(ClusterArgs),
    /// Arc-window checks for integer points on circles.
    Jarnik(JarnikArgs),
    /// Sup-norm ratios of exponential polynomials.
    Turan(TuranArgs),
    /// Extremal eigenfunction families.
    Family(FamilyArgs),
    /// Constant-free bound evaluators.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SphereArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub dim: u32,
    #[arg(long)]
    pub norm: i64,
    /// Also report cap statistics for this radius.
    #[arg(long)]
    pub cap_radius: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    pub exact_limit: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct GammaArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub dim: u32,
    #[arg(long)]
    pub norm: i64,
    #[arg(long, default_value_t = 64)]
    pub max_order: u32,
    /// Constant in the arithmetic upper bound for d ≥ 3.
    #[arg(long, default_value_t = 1.0)]
    pub c_arith: f64,
    /// Also emit the kernel vector at this order.
    #[arg(long)]
    pub kernel_order: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct ObservabilityArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub dim: u32,
    #[arg(long)]
    pub norm: i64,
    /// Ball radii, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub r: Vec<f64>,
    #[arg(long, default_value_t = crate::observability::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterMode {
    Partition,
    Connes,
    Decomposition,
}

#[derive(Debug, Args, Serialize)]
pub struct ClusterArgs {
    #[arg(long, value_enum)]
    pub mode: ClusterMode,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub dim: u32,
    #[arg(long)]
    pub norm: i64,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Cutoff support radius for the decomposition gap.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct JarnikArgs {
    #[arg(long)]
    pub n_max: i64,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Report only the n with violations.
    #[arg(long)]
    pub violations_only: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TuranMode {
    Ratio,
    Extremal,
    Trials,
}

#[derive(Debug, Args, Serialize)]
pub struct TuranArgs {
    #[arg(long, value_enum)]
    pub mode: TuranMode,
    /// Exponent n of (1 − cos x)^n for the ratio mode.
    #[arg(long, default_value_t = 1)]
    pub power: u32,
    #[arg(long, default_value_t = 8)]
    pub n_max: u32,
    /// Half-widths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.5,1.0")]
    pub r: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, default_value_t = TrialConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub max_terms: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Simple,
    Hyperplane,
    Wigert,
}

#[derive(Debug, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub kind: FamilyKind,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub index: i64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 5)]
    pub m: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundsKind {
    Upper,
    Exponents,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub kind: BoundsKind,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0.0)]
    pub diam: f64,
    #[arg(long, default_value_t = 0)]
    pub order: i64,
    #[arg(long, default_value_t = 3)]
    pub dim: u32,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub big_d: f64,
}

/// A rendered result: its JSON value and its CSV table.
pub struct Output {
    pub json: Value,
    pub table: Table,
}

impl Output {
    fn of<R: Report>(r: &R) -> Result<Self> {
        Ok(Self {
            json: serde_json::to_value(r)?,
            table: r.table(),
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => canonical_json(&self.json),
            Format::Csv => render_csv(&self.table),
        }
    }
}

#[derive(Serialize)]
struct SphereReport<'a> {
    d: usize,
    n: u64,
    count: usize,
    points: &'a [crate::lattice::LatticePoint],
    cap: Option<CapStatistics>,
}

struct SphereOut<'a>(SphereReport<'a>, &'a SphereSet);

impl Serialize for SphereOut<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl Report for SphereOut<'_> {
    fn table(&self) -> Table {
        let d = self.1.dim();
        let mut t = Table {
            header: (1..=d).map(|i| format!("x{i}")).collect(),
            rows: Vec::new(),
        };
        for p in self.1.points() {
            t.rows.push(p.coords().iter().map(|&c| Cell::from(c)).collect());
        }
        t
    }
}

#[derive(Serialize)]
struct GammaReport {
    d: usize,
    n: i64,
    gamma_max: i64,
    bounds: GammaBounds,
    kernel: Option<RationalVector>,
}

impl Report for GammaReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["d", "n", "count", "gamma_max", "lower", "upper"]);
        t.push(vec![
            self.d.into(),
            self.n.into(),
            self.bounds.count.into(),
            self.gamma_max.into(),
            self.bounds.lower.into(),
            self.bounds.upper().into(),
        ]);
        t
    }
}

#[derive(Serialize)]
struct ObservabilityRow {
    r: f64,
    m: f64,
    sweeps: usize,
}

#[derive(Serialize)]
struct ObservabilityReport {
    d: usize,
    n: u64,
    count: usize,
    rows: Vec<ObservabilityRow>,
}

impl Report for ObservabilityReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["d", "n", "count", "r", "m"]);
        for row in &self.rows {
            t.push(vec![self.d.into(), self.n.into(), self.count.into(), row.r.into(), row.m.into()]);
        }
        t
    }
}

#[derive(Serialize)]
struct UpperBound {
    count: usize,
    diam: f64,
    order: i64,
    r: f64,
    value: f64,
    notes: Vec<&'static str>,
}

impl Report for UpperBound {
    fn table(&self) -> Table {
        let mut t = Table::new(&["count", "diam", "order", "r", "value"]);
        t.push(vec![
            self.count.into(),
            self.diam.into(),
            self.order.into(),
            self.r.into(),
            self.value.into(),
        ]);
        t
    }
}

fn sphere(dim: u32, norm: i64) -> Result<SphereSet> {
    enumerate_sphere(dim as usize, norm)
}

/// Runs a parsed command; `progress` receives human-readable status lines.
pub fn execute(command: &Command, progress: &(dyn Fn(&str) + Sync)) -> Result<Output> {
    match command {
        Command::Sphere(a) => {
            let s = sphere(a.dim, a.norm)?;
            let cap = a.cap_radius.map(|r| cap_statistics(&s, r, a.exact_limit)).transpose()?;
            Output::of(&SphereOut(
                SphereReport {
                    d: s.dim(),
                    n: s.norm(),
                    count: s.len(),
                    points: s.points(),
                    cap,
                },
                &s,
            ))
        }
        Command::Gamma(a) => {
            let d = a.dim as usize;
            let bounds = gamma_bounds(d, a.norm, a.c_arith)?;
            let g = gamma_max(d, a.norm, a.max_order)?;
            let kernel = match a.kernel_order {
                Some(order) => {
                    let s = sphere(a.dim, a.norm)?;
                    kernel_vector(&moment_matrix(s.points(), order, true)?)?
                }
                None => None,
            };
            Output::of(&GammaReport {
                d,
                n: a.norm,
                gamma_max: g,
                bounds,
                kernel,
            })
        }
        Command::Observability(a) => {
            let s = sphere(a.dim, a.norm)?;
            if s.is_empty() {
                return Err(Error::EmptySphere {
                    d: a.dim as usize,
                    n: a.norm.max(0) as u64,
                });
            }
            if s.len() > GRAM_POINT_CAP {
                return Err(Error::Range(format!(
                    "{} points exceed the eigensolver cap {GRAM_POINT_CAP}",
                    s.len()
                )));
            }
            let mut rows = Vec::new();
            for &r in &a.r {
                let e = min_eigenvalue(&gram_matrix(s.points(), r)?, a.tol)?;
                rows.push(ObservabilityRow {
                    r,
                    m: e.value,
                    sweeps: e.sweeps,
                });
            }
            Output::of(&ObservabilityReport {
                d: s.dim(),
                n: s.norm(),
                count: s.len(),
                rows,
            })
        }
        Command::Cluster(a) => {
            let s = sphere(a.dim, a.norm)?;
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| Error::Domain(format!("--{name} is required for this mode")))
            };
            match a.mode {
                ClusterMode::Partition => Output::of(&partition(s.points(), need(a.rho, "rho")?)?),
                ClusterMode::Connes => Output::of(&connes_threshold(&s)?),
                ClusterMode::Decomposition => {
                    let u = random_sign_function(s.points(), a.seed)?;
                    Output::of(&decomposition_gap(
                        &u,
                        need(a.rho, "rho")?,
                        need(a.r, "r")?,
                        &CutoffSpec::new(a.sigma)?,
                    )?)
                }
            }
        }
        Command::Jarnik(a) => {
            let step = (a.n_max / 20).max(1) as usize;
            let mut sweep = arc_window_sweep(a.n_max, a.m, |done| {
                if done % step == 0 {
                    progress(&format!("jarnik: {done}/{} done", a.n_max));
                }
            })?;
            if a.violations_only {
                sweep.checks.retain(|c| !c.violations.is_empty());
            }
            Output::of(&sweep)
        }
        Command::Turan(a) => match a.mode {
            TuranMode::Ratio => {
                let f = ExponentialPolynomial::one_minus_cos().pow(a.power)?;
                let half = *a.r.first().ok_or_else(|| Error::Domain("--r needs a value".into()))?;
                Output::of(&turan_ratio(&f, &SetDescriptor::centered_interval(half))?)
            }
            TuranMode::Extremal => Output::of(&extremal_scaling_suite(a.n_max, &a.r)?),
            TuranMode::Trials => Output::of(&nazarov_trials(&TrialConfig {
                trials: a.trials,
                seed: a.seed,
                max_terms: a.max_terms,
                ..TrialConfig::default()
            })?),
        },
        Command::Family(a) => Output::of(&match a.kind {
            FamilyKind::Simple => family_simple(a.dim, a.index, a.r)?,
            FamilyKind::Hyperplane => family_hyperplane(a.dim, a.k, a.r)?,
            FamilyKind::Wigert => family_wigert(a.m, a.r)?,
        }),
        Command::Bounds(a) => match a.kind {
            BoundsKind::Upper => Output::of(&UpperBound {
                count: a.count,
                diam: a.diam,
                order: a.order,
                r: a.r,
                value: upper_bound_eval(a.count, a.diam, a.order, a.r)?,
                notes: vec!["order-only: implied constant set to 1"],
            }),
            BoundsKind::Exponents => Output::of(&exponent_tables(a.dim, a.r, a.gamma, a.big_d)?),
        },
    }
}

fn seed_of(command: &Command) -> Option<u64> {
    match command {
        Command::Cluster(a) if a.mode == ClusterMode::Decomposition => Some(a.seed),
        Command::Turan(a) if a.mode == TuranMode::Trials => Some(a.seed),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub argv: Vec<String>,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// Hex SHA-256 of the canonical JSON report.
    pub digest: String,
}

pub fn digest_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        Error::Domain(_)
        | Error::IndexMismatch(_)
        | Error::Range(_)
        | Error::Precondition(_)
        | Error::ZeroFunction(_)
        | Error::Unsupported(_)
        | Error::EmptySphere { .. } => EXIT_DOMAIN,
        Error::Consistency(_) | Error::Io(_) | Error::Json(_) => EXIT_FAILURE,
    }
}

/// Caps the worker pool from `TORUS_OBS_THREADS`.
fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("TORUS_OBS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("TORUS_OBS_THREADS must be an integer ≥ 1, got {v:?}"))?;
    // a pool that is already configured (e.g. in-process replays) is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses and runs `argv` (including the program name), writing the report
/// and optional manifest. Returns the process exit code.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        EXIT_OK
                    }
                }
                _ => {
                    let msg = e.render().to_string();
                    let line = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
                    eprintln!("error: usage: {line}");
                    EXIT_USAGE
                }
            };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: usage: {msg}");
        return EXIT_USAGE;
    }
    match run(&cli, &argv) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            error_code(&e)
        }
    }
}

fn run(cli: &Cli, argv: &[String]) -> Result<()> {
    let out = execute(&cli.command, &|line| eprintln!("{line}"))?;
    let rendered = out.render(cli.format.into());
    match &cli.out {
        Some(path) => std::fs::write(path, rendered.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(rendered.as_bytes())?;
            stdout.flush()?;
        }
    }
    if let Some(path) = &cli.manifest {
        let manifest = RunManifest {
            argv: argv.to_vec(),
            params: serde_json::to_value(&cli.command)?,
            seed: seed_of(&cli.command),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            digest: digest_hex(&canonical_json(&out.json)),
        };
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(canonical_json(&serde_json::to_value(&manifest)?).as_bytes())?;
    }
    Ok(())
}

/// Re-runs a manifest's command in process and returns the fresh digest
/// together with whether it matches the recorded one.
pub fn replay(manifest: &RunManifest) -> Result<(String, bool)> {
    let cli = Cli::try_parse_from(&manifest.argv)
        .map_err(|e| Error::Domain(format!("manifest argv does not parse: {}", e.kind())))?;
    let out = execute(&cli.command, &|_| {})?;
    let digest = digest_hex(&canonical_json(&out.json));
    let same = digest == manifest.digest;
    Ok((digest, same))
}

/// Reads every manifest line of a JSONL file.
pub fn read_manifests(path: &std::path::Path) -> Result<Vec<RunManifest>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// The JSON report a command line would produce, without side effects.
pub fn report_json(argv: &[&str]) -> Result<Value> {
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Domain(format!("arguments: {}", e.kind())))?;
    Ok(execute(&cli.command, &|_| {})?.json)
}
