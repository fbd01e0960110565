//! Command-line front end for `lp_extremal`.
//!
//! [`run`] parses arguments, runs one subcommand and writes its result as JSON
//! (default) or CSV. Every document carries a `schema` number and the
//! [`RunManifest`] of the run that produced it.

mod json;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lp_extremal::construct::{case_two_branch, CaseTwoBranch};
use lp_extremal::format::sig17;
use lp_extremal::{
    audit_chain_with, build_configuration_with, certificate_bound, epsilon_threshold, is_equilateral, minimize_ratio,
    radon_partition_with, ratio_report, schuette_bound, BoundRow, BoundTable, ChainAudit, Configuration,
    ConstructionSolution, EquilateralCheck, Point, RadonCertificate, RatioReport, SearchResult, Seeds, Tolerances,
};
use serde::{Deserialize, Serialize};

pub use json::{read_json, to_json, Envelope, SCHEMA};
pub use manifest::RunManifest;

/// Environment variable capping the worker threads used by `search`.
pub const THREADS_ENV: &str = "LP_EXTREMAL_THREADS";

#[derive(Parser, Debug)]
#[command(name = "lp-extremal", version, about = "Distance ratios and equilateral sets in l_p^n")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write JSON (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Write CSV instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    /// Set every tolerance (equality, residual, slack) to this value.
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower bound on the distance ratio of n + 2 points and the equilateral threshold.
    Bound {
        #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
        n: Option<u64>,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        /// Inclusive range of dimensions, `N1..N2`.
        #[arg(long, value_name = "N1..N2", value_parser = parse_sweep)]
        sweep: Option<(u64, u64)>,
    },
    /// Build the two-block n + 2 point configuration in l_4^n.
    Construct {
        #[arg(long)]
        n: u64,
        /// Also solve the y < 0 branch of the block equations.
        #[arg(long)]
        both_branches: bool,
    },
    /// Radon partition and certificate of an n + 2 point configuration.
    Certify { file: PathBuf },
    /// Certificate plus both sides of every inequality behind it.
    Audit { file: PathBuf },
    /// Random search for n + 2 points in l_4^n with small distance ratio.
    Search {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start from this configuration instead of the automatic seeds.
        #[arg(long, value_name = "FILE")]
        from: Option<PathBuf>,
        /// Also write the best configuration as a standalone configuration file.
        #[arg(long, value_name = "PATH")]
        config_out: Option<PathBuf>,
    },
    /// Test whether all pairwise distances agree.
    CheckEquilateral {
        file: PathBuf,
        /// Exponent to measure in; defaults to the file's `p`.
        #[arg(long)]
        p: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bound { .. } => "bound",
            Command::Construct { .. } => "construct",
            Command::Certify { .. } => "certify",
            Command::Audit { .. } => "audit",
            Command::Search { .. } => "search",
            Command::CheckEquilateral { .. } => "check-equilateral",
        }
    }
}

fn parse_sweep(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected N1..N2, got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

/// Why a run failed. Precondition failures exit with 1, I/O and parse failures with 2.
#[derive(Debug)]
pub enum Failure {
    Core(lp_extremal::Error),
    Precondition { kind: &'static str, message: String },
    Io(String),
    Parse(String),
}

impl From<lp_extremal::Error> for Failure {
    fn from(e: lp_extremal::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(_) | Failure::Precondition { .. } => 1,
            Failure::Io(_) | Failure::Parse(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Core(e) => e.kind(),
            Failure::Precondition { kind, .. } => kind,
            Failure::Io(_) => "io",
            Failure::Parse(_) => "parse",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Precondition { message, .. } | Failure::Io(message) | Failure::Parse(message) => message.clone(),
        }
    }
}

/// The machine-readable object written to stderr on failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub schema: u32,
    pub error: ErrorBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructDiagnostics {
    pub n: u64,
    /// One solution for even `n`, two (`k` and `k + 1`) for odd `n`.
    pub blocks: Vec<ConstructionSolution>,
    pub expected_ratio: f64,
    pub achieved: RatioReport,
    pub relative_gap: f64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case_two: Option<Vec<CaseTwoBranch>>,
}

/// `construct` output: a configuration file with a diagnostics block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructOutput {
    pub p: f64,
    pub points: Vec<Point>,
    pub diagnostics: ConstructDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOutput {
    pub n: usize,
    pub certificate: RadonCertificate,
    pub certificate_bound: f64,
    pub ratio: RatioReport,
    pub ratio_fourth: f64,
    /// Fourth power of the lower bound for `n + 2` points in `l_4^n`.
    pub bound_fourth: f64,
    /// `ratio^4 >= certificate >= bound^4` up to the slack tolerance.
    pub sandwich_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditOutput {
    #[serde(flatten)]
    pub certify: CertifyOutput,
    pub audit: ChainAudit,
    pub all_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardinalityNote {
    /// The `p` the threshold is centred on, 2 or 4.
    pub center: f64,
    pub epsilon: f64,
    pub max_equilateral: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutput {
    pub n: usize,
    pub points: usize,
    pub p: f64,
    pub check: EquilateralCheck,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cardinality: Option<CardinalityNote>,
    /// False when the set tested equilateral although its size rules that out;
    /// the tolerance is then too loose to decide.
    pub consistent: bool,
}

/// Parse `argv` (program name first), run the subcommand and return the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(cli, argv.get(1..).unwrap_or_default().to_vec()) {
        Ok((target, text)) => match write_output(target.as_deref(), &text, out) {
            Ok(()) => 0,
            Err(f) => report(&f, err),
        },
        Err(f) => report(&f, err),
    }
}

fn report(f: &Failure, err: &mut dyn Write) -> i32 {
    let body = ErrorBody { kind: f.kind().to_owned(), message: f.message(), exit_code: f.exit_code() };
    let _ = writeln!(err, "{}", to_json(&ErrorReport { schema: SCHEMA, error: body }));
    f.exit_code()
}

fn write_output(target: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match target {
        Some(path) => write_file(path, text),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
struct ConfigurationFile {
    p: f64,
    points: Vec<Vec<f64>>,
}

/// Read a configuration from any JSON object with `p` and `points`; other fields are ignored.
pub fn read_configuration(path: &Path) -> Result<Configuration, Failure> {
    let raw: ConfigurationFile = read_json(path)?;
    Ok(Configuration::from_rows(raw.points, raw.p)?)
}

fn check_tolerance(tol: Option<f64>) -> Result<(), Failure> {
    match tol {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(Failure::Precondition {
            kind: "invalid_tolerance",
            message: format!("--tol must be positive and finite, got {t}"),
        }),
        _ => Ok(()),
    }
}

fn thread_cap() -> Result<Option<usize>, Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Some(n)),
        _ => Err(Failure::Precondition {
            kind: "invalid_thread_count",
            message: format!("{THREADS_ENV} must be a positive integer, got {raw:?}"),
        }),
    }
}

fn execute(cli: Cli, args: Vec<String>) -> Result<(Option<PathBuf>, String), Failure> {
    check_tolerance(cli.output.tol)?;
    let csv = cli.output.csv;
    let rng_seed = match &cli.command {
        Command::Search { seed, .. } => Some(*seed),
        _ => None,
    };
    let manifest = RunManifest::new(cli.command.name(), args, cli.output.tol, rng_seed);
    let tol = manifest.tolerances;
    let text = match cli.command {
        Command::Bound { n, p, sweep } => bound(manifest, n, p, sweep, csv)?,
        Command::Construct { n, both_branches } => construct(manifest, n, both_branches, csv)?,
        Command::Certify { file } => {
            let config = read_configuration(&file)?;
            let out = certify(&config, &tol)?;
            if csv {
                certify_csv(&manifest, &out)
            } else {
                to_json(&Envelope::new(manifest, out))
            }
        }
        Command::Audit { file } => {
            let config = read_configuration(&file)?;
            let certify = certify(&config, &tol)?;
            let audit = audit_chain_with(&config, &certify.certificate, &tol)?;
            let out = AuditOutput { certify, all_hold: audit.all_hold(), audit };
            if csv {
                let rows = out
                    .audit
                    .rows()
                    .into_iter()
                    .map(|(name, r)| vec![name.to_owned(), sig17(r.lhs), sig17(r.rhs), r.holds.to_string()]);
                json::csv_document(&manifest, "inequality,lhs,rhs,holds", rows)
            } else {
                to_json(&Envelope::new(manifest, out))
            }
        }
        Command::Search { n, budget, seed, from, config_out } => {
            let seeds = match &from {
                Some(path) => Seeds::Given(vec![read_configuration(path)?]),
                None => Seeds::Auto,
            };
            let result = search(n, budget, &seeds, seed)?;
            if let Some(path) = config_out {
                write_file(&path, &(to_json(&Envelope::new(manifest.clone(), &result.best_config)) + "\n"))?;
            }
            if csv {
                points_csv(&manifest, &result.best_config)
            } else {
                to_json(&Envelope::new(manifest, result))
            }
        }
        Command::CheckEquilateral { file, p } => {
            let config = read_configuration(&file)?;
            let config = match p {
                Some(p) => config.with_p(p)?,
                None => config,
            };
            let out = check_equilateral(&config, &tol)?;
            if csv {
                let c = &out.check;
                let row = vec![
                    out.n.to_string(),
                    out.points.to_string(),
                    sig17(out.p),
                    c.equilateral.to_string(),
                    sig17(c.max_dist),
                    sig17(c.min_dist),
                    c.lambda.map(sig17).unwrap_or_default(),
                    out.cardinality.is_some().to_string(),
                    out.consistent.to_string(),
                ];
                json::csv_document(
                    &manifest,
                    "n,points,p,equilateral,max_dist,min_dist,lambda,cardinality_bound,consistent",
                    [row],
                )
            } else {
                to_json(&Envelope::new(manifest, out))
            }
        }
    };
    let text = if text.ends_with('\n') { text } else { text + "\n" };
    Ok((cli.output.out, text))
}

fn bound(
    manifest: RunManifest,
    n: Option<u64>,
    p: f64,
    sweep: Option<(u64, u64)>,
    csv: bool,
) -> Result<String, Failure> {
    let table = match (n, sweep) {
        (_, Some((first, last))) => BoundTable::sweep(first, last, p)?,
        (Some(n), None) => BoundTable { rows: vec![BoundRow::new(n, p)?] },
        (None, None) => unreachable!("clap requires --n or --sweep"),
    };
    Ok(if csv {
        format!("# {}\n{}", to_json(&manifest), table.to_csv())
    } else {
        to_json(&Envelope::new(manifest, table))
    })
}

fn construct(manifest: RunManifest, n: u64, both_branches: bool, csv: bool) -> Result<String, Failure> {
    let tol = manifest.tolerances;
    let built = build_configuration_with(n, &tol)?;
    if csv {
        return Ok(points_csv(&manifest, &built.config));
    }
    let achieved = ratio_report(&built.config)?;
    let case_two = if both_branches {
        let ks = [Some(built.block.k), built.odd_block.as_ref().map(|b| b.k)];
        Some(ks.into_iter().flatten().map(case_two_branch).collect::<Result<Vec<_>, _>>()?)
    } else {
        None
    };
    let diagnostics = ConstructDiagnostics {
        n,
        relative_gap: (achieved.ratio - built.expected_ratio) / built.expected_ratio,
        expected_ratio: built.expected_ratio,
        achieved,
        bound: schuette_bound(n, 4.0)?,
        blocks: std::iter::once(built.block).chain(built.odd_block).collect(),
        case_two,
    };
    let payload = ConstructOutput { p: built.config.p(), points: built.config.points().to_vec(), diagnostics };
    Ok(to_json(&Envelope::new(manifest, payload)))
}

fn points_csv(manifest: &RunManifest, config: &Configuration) -> String {
    let rows = config.points().iter().map(|pt| pt.coords().iter().map(|&x| sig17(x)).collect());
    json::csv_document(manifest, &json::coordinate_header(config.dim()), rows)
}

/// Radon partition, certificate and the sandwich `ratio^4 >= certificate >= bound^4`.
pub fn certify(config: &Configuration, tol: &Tolerances) -> Result<CertifyOutput, Failure> {
    let certificate = radon_partition_with(config.points(), tol)?;
    let bound = certificate_bound(&certificate)?;
    let ratio = ratio_report(config)?;
    let n = config.dim();
    let ratio_fourth = ratio.ratio.powi(4);
    let bound_fourth = schuette_bound(n as u64, 4.0)?.powi(4);
    let sandwich_holds = ratio_fourth >= bound * (1.0 - tol.slack) && bound >= bound_fourth * (1.0 - tol.slack);
    Ok(CertifyOutput { n, certificate, certificate_bound: bound, ratio, ratio_fourth, bound_fourth, sandwich_holds })
}

fn certify_csv(manifest: &RunManifest, out: &CertifyOutput) -> String {
    let c = &out.certificate;
    let a = c.side_a.iter().zip(&c.alphas).map(|(&i, &w)| (i, "a", w));
    let b = c.side_b.iter().zip(&c.betas).map(|(&i, &w)| (i, "b", w));
    let mut rows: Vec<_> = a.chain(b).collect();
    rows.sort_by_key(|r| r.0);
    let rows = rows.into_iter().map(|(i, side, w)| vec![i.to_string(), side.to_owned(), sig17(w)]);
    json::csv_document(manifest, "index,side,weight", rows)
}

/// [`minimize_ratio`] on a pool capped by `LP_EXTREMAL_THREADS` when it is set.
pub fn search(n: u64, budget: u64, seeds: &Seeds, seed: u64) -> Result<SearchResult, Failure> {
    match thread_cap()? {
        None => Ok(minimize_ratio(n, budget, seeds, seed)?),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
            Ok(pool.install(|| minimize_ratio(n, budget, seeds, seed))?)
        }
    }
}

/// Equilateral test plus the cardinality limit near `p = 4` and `p = 2`.
pub fn check_equilateral(config: &Configuration, tol: &Tolerances) -> Result<CheckOutput, Failure> {
    let check = is_equilateral(config, tol.equality)?;
    let (n, m, p) = (config.dim(), config.len(), config.p());
    let mut cardinality = None;
    if m > n + 1 {
        for center in [4.0, 2.0] {
            let epsilon = epsilon_threshold(n as u64, center)?;
            if (p - center).abs() < epsilon {
                cardinality = Some(CardinalityNote {
                    center,
                    epsilon,
                    max_equilateral: n + 1,
                    message: format!(
                        "|p - {center}| < {} so an equilateral set in l_p^{n} has at most {} points; these {m} points cannot be equilateral",
                        sig17(epsilon),
                        n + 1
                    ),
                });
                break;
            }
        }
    }
    let consistent = !(check.equilateral && cardinality.is_some());
    Ok(CheckOutput { n, points: m, p, check, cardinality, consistent })
}
