//! Command-line front end for the minimal-class CohFT engine.
//!
//! Subcommands: `eval` (single evaluations), `verify` (axiom sweep with
//! a deterministic report), `deform-check` (first-order deformation
//! axioms for a JSON table), `dims` (genus-1 minimal-class dimension
//! tables). Configuration precedence is CLI flags over config-file
//! entries over built-in defaults; the `COHFT_JOBS` environment variable
//! overrides `--jobs`. Exit codes: 0 success, 1 counterexample found,
//! 2 usage or validation error, 3 I/O error.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cohft_core::deformations::{
    check_deformation_axioms, extract_minimal_candidates, ExplicitTable,
};
use cohft_core::{
    evaluate_topft_closed, verify_theorem_1, BasisVector, FormalGamma, GradingMode, Omega,
    StateSpace, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "cohft",
    version,
    about = "Exact verification engine for CohFTs built from minimal classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the corrected theory (or its topological part) on one insertion tuple
    Eval(EvalArgs),
    /// Sweep the CohFT axioms for a formal minimal class and emit a report
    Verify(VerifyArgs),
    /// Check the first-order deformation axioms for a JSON table
    DeformCheck(DeformCheckArgs),
    /// Emit the genus-1 minimal-class dimension table
    Dims(DimsArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Evaluate the topological part only (no class parameters needed)
    #[arg(long)]
    topft: bool,
    /// Genus of the space carrying the minimal class
    #[arg(long)]
    h: Option<usize>,
    /// Marking count of the space carrying the minimal class
    #[arg(long)]
    m: usize,
    /// Cohomological degree of the minimal class
    #[arg(long)]
    deg: Option<usize>,
    /// Genus of the evaluation
    #[arg(long)]
    g: usize,
    /// Comma-separated basis tokens, e.g. b1,a,b2
    #[arg(long, value_delimiter = ',')]
    insertions: Vec<String>,
    /// graded or ungraded
    #[arg(long, default_value = "graded")]
    mode: String,
}

#[derive(Args, Default)]
struct SweepFlags {
    #[arg(long)]
    g_max: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    n_exh: Option<usize>,
    #[arg(long)]
    sample_count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tuple_cap: Option<usize>,
    #[arg(long)]
    pair_budget: Option<usize>,
    #[arg(long)]
    orbit_samples: Option<usize>,
    #[arg(long)]
    perm_samples: Option<usize>,
    /// Worker threads (default: available cores); COHFT_JOBS overrides
    #[arg(long)]
    jobs: Option<usize>,
    /// Report destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// json, csv or text
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    deg: Option<usize>,
    #[arg(long)]
    mode: Option<String>,
    /// Config file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    sweep: SweepFlags,
}

#[derive(Args)]
struct DeformCheckArgs {
    /// JSON deformation table
    #[arg(long)]
    table: PathBuf,
    /// Also list the all-b entries with their boundary checks
    #[arg(long)]
    candidates: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    sweep: SweepFlags,
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long, default_value_t = 20)]
    n_max: usize,
    /// Emit the weight-graded table instead of the minimal-class table
    #[arg(long)]
    grw: bool,
    /// csv, json or text
    #[arg(long, default_value = "csv")]
    format: String,
}

enum CliError {
    Validation(String),
    Io(String),
}

impl From<cohft_core::Error> for CliError {
    fn from(err: cohft_core::Error) -> CliError {
        CliError::Validation(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> CliError {
        CliError::Io(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Verify(args) => cmd_verify(args),
        Command::DeformCheck(args) => cmd_deform_check(args),
        Command::Dims(args) => cmd_dims(args),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Validation(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Io(message)) => {
            eprintln!("I/O error: {message}");
            ExitCode::from(3)
        }
    }
}

fn parse_insertions(space: &StateSpace, tokens: &[String]) -> Result<Vec<BasisVector>, CliError> {
    let refs: Vec<&str> = tokens
        .iter()
        .flat_map(|t| t.split(','))
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .collect();
    Ok(space.parse_insertions(&refs)?)
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode, CliError> {
    let mode = GradingMode::parse(&args.mode)?;
    if args.topft {
        let space = cohft_core::build_state_space(args.m, mode);
        let insertions = parse_insertions(&space, &args.insertions)?;
        let value = evaluate_topft_closed(&space, args.g, &insertions)?;
        println!("{value}");
        return Ok(ExitCode::SUCCESS);
    }
    let (Some(h), Some(deg)) = (args.h, args.deg) else {
        return Err(CliError::Validation(
            "eval needs --h and --deg (or --topft for the topological part)".to_string(),
        ));
    };
    let gamma = FormalGamma::new(h, args.m, deg, mode)?;
    let omega = Omega::new(gamma);
    let insertions = parse_insertions(omega.space(), &args.insertions)?;
    let value = omega.evaluate(args.g, &insertions)?;
    println!("{value}");
    Ok(ExitCode::SUCCESS)
}

/// `key = value` lines; `#` starts a comment.
fn read_config(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Validation(format!(
                "config line {} is not `key = value`: {raw}",
                lineno + 1
            )));
        };
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn config_get<T: std::str::FromStr>(
    config: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    match config.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            CliError::Validation(format!("config key `{key}` has unparsable value `{raw}`"))
        }),
    }
}

struct Resolved {
    cfg: SweepConfig,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    format: String,
}

fn resolve_sweep(
    flags: &SweepFlags,
    config: &HashMap<String, String>,
    defaults: SweepConfig,
) -> Result<Resolved, CliError> {
    let cfg = SweepConfig {
        g_max: flags
            .g_max
            .or(config_get(config, "g_max")?)
            .unwrap_or(defaults.g_max),
        n_max: flags
            .n_max
            .or(config_get(config, "n_max")?)
            .unwrap_or(defaults.n_max),
        n_exh: flags
            .n_exh
            .or(config_get(config, "n_exh")?)
            .unwrap_or(defaults.n_exh),
        tuple_cap: flags
            .tuple_cap
            .or(config_get(config, "tuple_cap")?)
            .unwrap_or(defaults.tuple_cap),
        sample_count: flags
            .sample_count
            .or(config_get(config, "sample_count")?)
            .unwrap_or(defaults.sample_count),
        orbit_samples: flags
            .orbit_samples
            .or(config_get(config, "orbit_samples")?)
            .unwrap_or(defaults.orbit_samples),
        perm_cap: defaults.perm_cap,
        perm_samples: flags
            .perm_samples
            .or(config_get(config, "perm_samples")?)
            .unwrap_or(defaults.perm_samples),
        pair_budget: flags
            .pair_budget
            .or(config_get(config, "pair_budget")?)
            .unwrap_or(defaults.pair_budget),
        counterexample_cap: defaults.counterexample_cap,
        seed: flags
            .seed
            .or(config_get(config, "seed")?)
            .unwrap_or(defaults.seed),
    };
    let jobs = match std::env::var("COHFT_JOBS") {
        Ok(raw) => Some(raw.parse::<usize>().map_err(|_| {
            CliError::Validation(format!("COHFT_JOBS has unparsable value `{raw}`"))
        })?),
        Err(_) => match flags.jobs {
            Some(j) => Some(j),
            None => config_get(config, "jobs")?,
        },
    };
    let out = flags
        .out
        .clone()
        .or_else(|| config.get("out").map(PathBuf::from));
    let format = flags
        .format
        .clone()
        .or_else(|| config.get("format").cloned())
        .unwrap_or_else(|| "json".to_string());
    if !matches!(format.as_str(), "json" | "csv" | "text") {
        return Err(CliError::Validation(format!(
            "format must be json, csv or text, got `{format}`"
        )));
    }
    Ok(Resolved {
        cfg,
        jobs,
        out,
        format,
    })
}

fn with_pool<T: Send>(jobs: Option<usize>, body: impl FnOnce() -> T + Send) -> T {
    match jobs {
        None => body(),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .expect("worker pool")
            .install(body),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let config = match &args.config {
        Some(path) => read_config(path)?,
        None => HashMap::new(),
    };
    let h = args
        .h
        .or(config_get(&config, "h")?)
        .ok_or_else(|| CliError::Validation("verify needs --h".to_string()))?;
    let m = args
        .m
        .or(config_get(&config, "m")?)
        .ok_or_else(|| CliError::Validation("verify needs --m".to_string()))?;
    let deg = args
        .deg
        .or(config_get(&config, "deg")?)
        .ok_or_else(|| CliError::Validation("verify needs --deg".to_string()))?;
    let mode = GradingMode::parse(
        &args
            .mode
            .clone()
            .or_else(|| config.get("mode").cloned())
            .unwrap_or_else(|| "graded".to_string()),
    )?;
    let gamma = FormalGamma::new(h, m, deg, mode)?;
    let resolved = resolve_sweep(&args.sweep, &config, SweepConfig::for_gamma(&gamma))?;

    let report = with_pool(resolved.jobs, || verify_theorem_1(&gamma, &resolved.cfg));
    let rendered = match resolved.format.as_str() {
        "json" => report.to_json(),
        "csv" => report.to_csv(),
        _ => report.to_text(),
    };
    emit(&rendered, resolved.out.as_deref())?;
    eprintln!(
        "verify: {} identities passed, {} failed, {} untested",
        report.totals.passed, report.totals.failed, report.totals.untested
    );
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_deform_check(args: DeformCheckArgs) -> Result<ExitCode, CliError> {
    let config = match &args.config {
        Some(path) => read_config(path)?,
        None => HashMap::new(),
    };
    let text = std::fs::read_to_string(&args.table)?;
    let table = ExplicitTable::from_json(&text)?;
    let (table_g, table_n) = cohft_core::deformations::Deformation::bounds(&table);
    let defaults = SweepConfig {
        g_max: table_g,
        n_max: table_n,
        ..SweepConfig::default()
    };
    let resolved = resolve_sweep(&args.sweep, &config, defaults)?;

    let report = with_pool(resolved.jobs, || {
        check_deformation_axioms(&table, &resolved.cfg)
    });
    let mut rendered = match resolved.format.as_str() {
        "json" => report.to_json(),
        "csv" => {
            let mut out = String::from("axiom,g,n,items,passed,failed,untested\n");
            for row in &report.checks {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    row.axiom, row.g, row.n, row.items, row.passed, row.failed, row.untested
                ));
            }
            out
        }
        _ => report.to_text(),
    };
    if args.candidates {
        let candidates = extract_minimal_candidates(&table, 1024)?;
        if resolved.format == "json" {
            rendered.push('\n');
            rendered.push_str(
                &serde_json::to_string_pretty(&candidates)
                    .map_err(|e| CliError::Validation(e.to_string()))?,
            );
        } else {
            for c in &candidates {
                rendered.push_str(&format!(
                    "candidate (g={}, n={}) [{}] = {} — boundary restrictions vanish: {}\n",
                    c.g,
                    c.n,
                    c.insertions.join(","),
                    c.value,
                    c.pullbacks_vanish
                ));
            }
        }
    }
    emit(&rendered, resolved.out.as_deref())?;
    eprintln!(
        "deform-check: {} passed, {} failed, {} untested; isotropic: {}",
        report.totals.passed, report.totals.failed, report.totals.untested, report.isotropic
    );
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_dims(args: DimsArgs) -> Result<ExitCode, CliError> {
    use cohft_core::genus1_dimensions::{dim_grw_k, dim_minimal, dims_csv, grw_csv};
    if args.n_max < 1 {
        return Err(CliError::Validation(
            "dims needs n_max >= 1 (genus 1 requires a marking)".to_string(),
        ));
    }
    let rendered = match (args.grw, args.format.as_str()) {
        (false, "csv") => dims_csv(args.n_max),
        (true, "csv") => grw_csv(args.n_max),
        (false, "json") => {
            let rows: Vec<serde_json::Value> = (1..=args.n_max)
                .flat_map(|n| {
                    (0..=2 * n).map(move |j| {
                        serde_json::json!({"n": n, "j": j, "dim_minimal": dim_minimal(n, j)})
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("json table")
        }
        (true, "json") => {
            let rows: Vec<serde_json::Value> = (1..=args.n_max)
                .flat_map(|n| {
                    (0..=n).map(move |k| {
                        serde_json::json!({"n": n, "k": k, "dim_grw": dim_grw_k(n, k)})
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("json table")
        }
        (grw, "text") => {
            let csv = if grw {
                grw_csv(args.n_max)
            } else {
                dims_csv(args.n_max)
            };
            csv.replace(',', "\t")
        }
        (_, other) => {
            return Err(CliError::Validation(format!(
                "format must be json, csv or text, got `{other}`"
            )));
        }
    };
    print!("{rendered}");
    Ok(ExitCode::SUCCESS)
}
