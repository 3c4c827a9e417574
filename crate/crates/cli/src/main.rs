//! Command-line front end: parses kernel specs and point sets, dispatches to
//! the analysis library, and emits machine-readable reports.
//!
//! Exit codes: 0 when a verdict was computed (whatever it says), 2 when
//! `--expect-pass` is set and the verdict is a failure, 64 for unusable
//! input (flags, files that do not exist or parse), 65 for domain/validation
//! violations, 70 for internal errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use rkhs_douglas::douglas::matrix_pairs;
use rkhs_douglas::number::C64;
use rkhs_douglas::{
    corona_condition_check, diagonal_np_oracle, douglas_solve, gram, growth_report,
    growth_report_csv, minimal_norm_solve, np_test, verify_identity, CoreError, KernelSpec,
    LemmaId, PointSet, PolynomialMatrix,
};

const SEED_ENV: &str = "RKHS_DOUGLAS_SEED";

#[derive(Parser)]
#[command(
    name = "rkhs-douglas",
    version,
    about = "Kernel positivity tests, Douglas-lemma factorization certificates, and exact shift-operator identity checks"
)]
struct Cli {
    /// JSON config file; command-line flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Eigenvalue/residual tolerance
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Seed recorded in reports (falls back to RKHS_DOUGLAS_SEED)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the report here (atomically) instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Report format
    #[arg(long, global = true, value_parser = ["json", "csv", "text"])]
    format: Option<String>,

    /// Exit 2 when the computed verdict is a failure
    #[arg(long, global = true)]
    expect_pass: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gram matrix of a kernel on a point set
    Gram {
        /// Builtin kernel name or path to a kernel JSON file
        #[arg(long)]
        kernel: String,
        /// CSV of points: re1,im1[,re2,im2,...] per line, optional header
        #[arg(long)]
        points: PathBuf,
    },
    /// Schur-complement positivity test at a base point
    NpTest {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        points: PathBuf,
        /// Base point as re,im[,re,im,...]; defaults to the origin
        #[arg(long)]
        base: Option<String>,
    },
    /// Reciprocal-series sign oracle for diagonal kernels
    NpOracle {
        #[arg(long)]
        kernel: String,
        /// Series order M
        #[arg(long)]
        order: usize,
    },
    /// Minimal-norm solve of AX = B with majorization certificate
    DouglasSolve {
        /// JSON matrix file: rows of [re, im] pairs
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Kernel-compressed majorization check for polynomial multiplier rows
    CoronaCheck {
        /// JSON polynomial matrix file
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        points: PathBuf,
    },
    /// Exact shift-operator identity verification
    VerifyIdentity {
        /// Identity: 4.1/bergman, 4.2/bidisk, or 4.3/ball
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        n: usize,
        /// Truncation degree (defaults to n + 8)
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Norm certificate for one first-row instance
    Counterexample {
        #[arg(long)]
        n: usize,
        /// Total-degree bound for the solution search (defaults to n)
        #[arg(long)]
        degree_bound: Option<usize>,
        /// Torus grid resolution per axis
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Norm-growth table across instances 1..=n-max
    GrowthReport {
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
}

/// Settings resolved from the config file, environment, and flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct Settings {
    tolerance: f64,
    seed: Option<u64>,
    format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tolerance: 1e-10,
            seed: None,
            format: "json".into(),
            output: None,
        }
    }
}

enum Failure {
    /// Unusable input: bad flags, missing or unparseable files. Exit 64.
    Usage(String),
    /// Domain or validation violation in otherwise well-formed input. Exit 65.
    Data(String),
    /// Bug or environment problem. Exit 70.
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Data(_) => 65,
            Failure::Internal(_) => 70,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

fn classify(err: CoreError) -> Failure {
    match err {
        CoreError::Parse { .. } => Failure::Usage(err.to_string()),
        _ => Failure::Data(err.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!("{e}");
            return ExitCode::from(64);
        }
        Err(e) => {
            // --help / --version land here.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn resolve_settings(cli: &Cli) -> Result<Settings, Failure> {
    let mut settings = Settings::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        settings = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
    }
    if settings.seed.is_none() {
        if let Ok(env_seed) = std::env::var(SEED_ENV) {
            let parsed = env_seed
                .parse::<u64>()
                .map_err(|_| Failure::Usage(format!("{SEED_ENV}=`{env_seed}` is not a u64")))?;
            settings.seed = Some(parsed);
        }
    }
    if let Some(t) = cli.tolerance {
        settings.tolerance = t;
    }
    if let Some(s) = cli.seed {
        settings.seed = Some(s);
    }
    if let Some(f) = &cli.format {
        settings.format = f.clone();
    }
    if let Some(o) = &cli.output {
        settings.output = Some(o.clone());
    }
    if !(settings.tolerance > 0.0) || !settings.tolerance.is_finite() {
        return Err(Failure::Usage("tolerance must be positive and finite".into()));
    }
    if !["json", "csv", "text"].contains(&settings.format.as_str()) {
        return Err(Failure::Usage(format!(
            "unknown format `{}`; expected json, csv, or text",
            settings.format
        )));
    }
    Ok(settings)
}

const BUILTIN_KERNELS: [&str; 6] = [
    "szego_disk",
    "bergman_disk",
    "hardy_bidisk",
    "hardy_ball2",
    "fock_plane",
    "example51",
];

fn parse_kernel(value: &str) -> Result<KernelSpec, Failure> {
    if BUILTIN_KERNELS.contains(&value) {
        let spec: KernelSpec = serde_json::from_value(json!({ "variant": value }))
            .map_err(|e| Failure::Internal(format!("builtin kernel table: {e}")))?;
        return Ok(spec);
    }
    let path = Path::new(value);
    if !path.exists() {
        return Err(Failure::Usage(format!(
            "`{value}` is neither a builtin kernel ({}) nor an existing file",
            BUILTIN_KERNELS.join(", ")
        )));
    }
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read kernel {value}: {e}")))?;
    let spec: KernelSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("kernel {value}: {e}")))?;
    spec.validate().map_err(classify)?;
    Ok(spec)
}

fn parse_points(path: &Path) -> Result<PointSet, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read points {}: {e}", path.display())))?;
    PointSet::from_csv(&text)
        .map_err(|e| Failure::Usage(format!("points {}: {e}", path.display())))
}

fn parse_base(value: Option<&str>, dimension: usize) -> Result<Vec<C64>, Failure> {
    let Some(value) = value else {
        return Ok(vec![C64::new(0.0, 0.0); dimension]);
    };
    let nums: Result<Vec<f64>, _> = value.split(',').map(|f| f.trim().parse::<f64>()).collect();
    let nums =
        nums.map_err(|_| Failure::Usage(format!("base `{value}` must be re,im[,re,im,...]")))?;
    if nums.len() != 2 * dimension {
        return Err(Failure::Usage(format!(
            "base `{value}` has {} numbers; the kernel needs {}",
            nums.len(),
            2 * dimension
        )));
    }
    Ok(nums.chunks(2).map(|c| C64::new(c[0], c[1])).collect())
}

type Matrix = nalgebra::DMatrix<C64>;

#[derive(Deserialize)]
struct MatrixFile(#[serde(with = "matrix_pairs")] Matrix);

fn parse_matrix(path: &Path) -> Result<Matrix, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read matrix {}: {e}", path.display())))?;
    let parsed: MatrixFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("matrix {}: {e}", path.display())))?;
    Ok(parsed.0)
}

fn parse_poly_matrix(path: &Path) -> Result<PolynomialMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::Usage(format!("cannot read polynomial matrix {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("polynomial matrix {}: {e}", path.display())))
}

/// What the report says, summarized for `--expect-pass` and the text format.
struct Outcome {
    /// `None` when the command has no pass/fail notion (plain data reports).
    passed: Option<bool>,
    summary: String,
    report: serde_json::Value,
    /// CSV rendering, for the commands that define one.
    csv: Option<String>,
    text: String,
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let settings = resolve_settings(&cli)?;
    if settings.format == "csv" && !matches!(cli.command, Command::GrowthReport { .. }) {
        return Err(Failure::Usage(
            "csv output is defined for growth-report only".into(),
        ));
    }
    let outcome = dispatch(&cli.command, &settings)?;

    let envelope = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": {
            "command": command_name(&cli.command),
            "tolerance": settings.tolerance,
            "seed": settings.seed,
            "format": settings.format,
        },
        "report": outcome.report,
    });
    let rendered = match settings.format.as_str() {
        "json" => {
            let mut s = serde_json::to_string_pretty(&envelope)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        "csv" => outcome
            .csv
            .clone()
            .ok_or_else(|| Failure::Internal("csv requested but not produced".into()))?,
        _ => outcome.text.clone(),
    };

    match &settings.output {
        Some(path) => {
            write_atomic(path, &rendered)?;
            println!("{}", outcome.summary);
            println!("report written to {}", path.display());
        }
        None => print!("{rendered}"),
    }

    if cli.expect_pass && outcome.passed == Some(false) {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Gram { .. } => "gram",
        Command::NpTest { .. } => "np-test",
        Command::NpOracle { .. } => "np-oracle",
        Command::DouglasSolve { .. } => "douglas-solve",
        Command::CoronaCheck { .. } => "corona-check",
        Command::VerifyIdentity { .. } => "verify-identity",
        Command::Counterexample { .. } => "counterexample",
        Command::GrowthReport { .. } => "growth-report",
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)
        .map_err(|e| Failure::Internal(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| Failure::Internal(format!("renaming into {}: {e}", path.display())))
}

fn dispatch(cmd: &Command, settings: &Settings) -> Result<Outcome, Failure> {
    match cmd {
        Command::Gram { kernel, points } => {
            let spec = parse_kernel(kernel)?;
            let pts = parse_points(points)?;
            let g = gram(&spec, &pts).map_err(classify)?;
            let report = json!({
                "kernel": spec,
                "size": g.size(),
                "entries": g,
                "seed": settings.seed,
            });
            let mut text = format!("gram matrix, {0}x{0}\n", g.size());
            for i in 0..g.size() {
                let row: Vec<String> = (0..g.size())
                    .map(|j| format!("{:+.6}{:+.6}i", g.entry(i, j).re, g.entry(i, j).im))
                    .collect();
                text.push_str(&row.join("  "));
                text.push('\n');
            }
            Ok(Outcome {
                passed: None,
                summary: format!("gram matrix of size {} computed", g.size()),
                report,
                csv: None,
                text,
            })
        }
        Command::NpTest { kernel, points, base } => {
            let spec = parse_kernel(kernel)?;
            let pts = parse_points(points)?;
            let base = parse_base(base.as_deref(), spec.dimension())?;
            let mut rep = np_test(&spec, &pts, &base, settings.tolerance).map_err(classify)?;
            rep.seed = settings.seed;
            let passed = rep.is_psd();
            let summary = match passed {
                Some(true) => format!(
                    "PSD (min eigenvalue {:.3e}); evidence only, finite resolution",
                    rep.min_eigenvalue().unwrap()
                ),
                Some(false) => format!(
                    "not PSD: min eigenvalue {:.6}, kernel certified non-Pick",
                    rep.min_eigenvalue().unwrap()
                ),
                None => format!(
                    "no verdict: kernel vanished on pairs {:?}",
                    rep.kernel_zero_pairs
                ),
            };
            let report = serde_json::to_value(&rep).map_err(|e| Failure::Internal(e.to_string()))?;
            Ok(Outcome {
                passed,
                summary: summary.clone(),
                report,
                csv: None,
                text: format!("{summary}\n"),
            })
        }
        Command::NpOracle { kernel, order } => {
            let spec = parse_kernel(kernel)?;
            let oracle = diagonal_np_oracle(&spec, *order).map_err(classify)?;
            let summary = if oracle.is_np_at_order {
                format!("Pick through order {order}: no positive reciprocal coefficient")
            } else {
                format!(
                    "not Pick: reciprocal coefficient c_{} is positive",
                    oracle.first_failing_index.unwrap()
                )
            };
            let passed = Some(oracle.is_np_at_order);
            let mut report =
                serde_json::to_value(&oracle).map_err(|e| Failure::Internal(e.to_string()))?;
            report["kernel"] = serde_json::to_value(&spec).unwrap();
            report["seed"] = json!(settings.seed);
            Ok(Outcome {
                passed,
                summary: summary.clone(),
                report,
                csv: None,
                text: format!("{summary}\n"),
            })
        }
        Command::DouglasSolve { a, b } => {
            let a = parse_matrix(a)?;
            let b = parse_matrix(b)?;
            let result = douglas_solve(&a, &b, settings.tolerance).map_err(classify)?;
            let summary = format!(
                "majorized={} feasible={} borderline={} residual={:.3e} norm={:.12}",
                result.majorized,
                result.feasible,
                result.borderline,
                result.residual,
                result.solution_norm
            );
            let passed = Some(result.feasible);
            let mut report =
                serde_json::to_value(&result).map_err(|e| Failure::Internal(e.to_string()))?;
            report["seed"] = json!(settings.seed);
            Ok(Outcome {
                passed,
                summary: summary.clone(),
                report,
                csv: None,
                text: format!("{summary}\n"),
            })
        }
        Command::CoronaCheck { phi, psi, kernel, points } => {
            let phi = parse_poly_matrix(phi)?;
            let psi = parse_poly_matrix(psi)?;
            let spec = parse_kernel(kernel)?;
            let pts = parse_points(points)?;
            let verdict = corona_condition_check(&phi, &psi, &spec, &pts, settings.tolerance)
                .map_err(classify)?;
            let summary = if verdict.is_psd {
                format!(
                    "compressed block PSD (min eigenvalue {:.3e}); evidence only",
                    verdict.min_eigenvalue
                )
            } else {
                format!(
                    "compressed block not PSD: min eigenvalue {:.6}; operator inequality fails",
                    verdict.min_eigenvalue
                )
            };
            let passed = Some(verdict.is_psd);
            let report = json!({
                "kernel": spec,
                "verdict": verdict,
                "evidence_only": passed == Some(true),
                "seed": settings.seed,
            });
            Ok(Outcome {
                passed,
                summary: summary.clone(),
                report,
                csv: None,
                text: format!("{summary}\n"),
            })
        }
        Command::VerifyIdentity { lemma, n, degree } => {
            let lemma: LemmaId = lemma.parse().map_err(classify)?;
            let degree = degree.unwrap_or(n + 8);
            let report = verify_identity(lemma, *n, degree).map_err(classify)?;
            let summary = if report.exact_zero {
                format!("identity {lemma} holds exactly at N={n}, degree {degree}")
            } else {
                format!(
                    "identity {lemma} FAILS at N={n}: {} nonzero defects",
                    report.defect_entries.len()
                )
            };
            let mut text = format!("{summary}\n");
            if !report.defect_entries.is_empty() {
                text.push_str("monomial        defect\n");
                for d in &report.defect_entries {
                    text.push_str(&format!(
                        "{:<15} {}\n",
                        d.monomial,
                        rkhs_douglas::number::rat_to_string(&d.value)
                    ));
                }
            }
            let passed = Some(report.exact_zero);
            let mut value =
                serde_json::to_value(&report).map_err(|e| Failure::Internal(e.to_string()))?;
            value["seed"] = json!(settings.seed);
            Ok(Outcome {
                passed,
                summary,
                report: value,
                csv: None,
                text,
            })
        }
        Command::Counterexample { n, degree_bound, grid } => {
            let bound = degree_bound.unwrap_or(*n);
            let cert = minimal_norm_solve(*n, bound, *grid).map_err(classify)?;
            let summary = format!(
                "N={n}: operator lower bound {:.12}, achieved {:.12}, optimal={}",
                cert.operator_norm_lower_bound,
                cert.achieved_norm.unwrap_or(f64::NAN),
                cert.optimal
            );
            let passed = Some(cert.optimal);
            let mut report =
                serde_json::to_value(&cert).map_err(|e| Failure::Internal(e.to_string()))?;
            report["seed"] = json!(settings.seed);
            Ok(Outcome {
                passed,
                summary: summary.clone(),
                report,
                csv: None,
                text: format!("{summary}\n"),
            })
        }
        Command::GrowthReport { n_max, grid } => {
            let rows = growth_report(*n_max, *grid).map_err(classify)?;
            let all_optimal = rows.iter().all(|r| r.optimal);
            let csv = growth_report_csv(&rows);
            let summary = format!(
                "{} instances, norms {:.4} .. {:.4}, all optimal: {all_optimal}",
                rows.len(),
                rows.first().map(|r| r.achieved_norm).unwrap_or(f64::NAN),
                rows.last().map(|r| r.achieved_norm).unwrap_or(f64::NAN),
            );
            let report = json!({ "rows": rows, "seed": settings.seed });
            Ok(Outcome {
                passed: Some(all_optimal),
                summary,
                report,
                csv: Some(csv.clone()),
                text: csv,
            })
        }
    }
}
