use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::ingest::{load_benchmark, load_issue_list, load_lexicon, load_results, load_surveys, IssueList};
use crate::leaning::{issue_scores, IssueClassification, IssueThresholds};
use crate::model::{validate_config, AuditConfig, Benchmark, BenchmarkKind, Scheme};
use crate::sim::{audit_plan, load_engine_specs, run_audit, simulate_human_pacing, PacingConfig};

use super::{analyze, write_report, AnalyzeOptions, Extractor, HolmContext, ReportError};

#[derive(Debug, Parser)]
#[command(
    name = "salience",
    version,
    about = "Audit political salience in search and chat results"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract mentions from a capture and test them against benchmarks.
    Analyze(AnalyzeArgs),
    /// Run a simulated audit and write a capture file.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Capture file (JSON Lines).
    #[arg(long)]
    pub capture: PathBuf,
    /// Output directory for the report files.
    #[arg(long)]
    pub out: PathBuf,
    /// Leaning scheme: eu5, usparty or usissue5.
    #[arg(long)]
    pub scheme: Scheme,
    /// Entity lexicon (eu5, usparty).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Issue synonym table (usissue5).
    #[arg(long)]
    pub issues: Option<PathBuf>,
    /// Survey tables for issue leanings (usissue5), repeatable.
    #[arg(long = "surveys")]
    pub surveys: Vec<PathBuf>,
    /// Benchmark as `kind=path`, or `uniform`. Repeatable; defaults to uniform.
    #[arg(long = "benchmark")]
    pub benchmarks: Vec<String>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 9999)]
    pub perms: usize,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    /// Holm–Bonferroni family grouping.
    #[arg(long, value_enum, default_value_t = HolmContext::Platform)]
    pub context: HolmContext,
    /// Keep only SERP results ranked 1..=k.
    #[arg(long)]
    pub top_k: Option<u32>,
    #[arg(long, default_value_t = 0.05)]
    pub issue_t1: f64,
    #[arg(long, default_value_t = 0.15)]
    pub issue_t2: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Audit configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Engine spec file (TOML, one `[[engine]]` table per engine).
    #[arg(long)]
    pub specs: PathBuf,
    /// Capture file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a bot action log with simulated human pacing.
    #[arg(long)]
    pub pacing_log: Option<PathBuf>,
}

fn parse_benchmark_arg(raw: &str) -> Result<(BenchmarkKind, Option<PathBuf>), ReportError> {
    let (kind, path) = match raw.split_once('=') {
        Some((k, p)) => (k, Some(PathBuf::from(p))),
        None => (raw, None),
    };
    let kind: BenchmarkKind = kind
        .parse()
        .map_err(|_| ReportError::Usage(format!("unknown benchmark kind in {raw:?}")))?;
    if kind != BenchmarkKind::Uniform && path.is_none() {
        return Err(ReportError::Usage(format!(
            "benchmark {raw:?} needs a file: use {kind}=<path>"
        )));
    }
    Ok((kind, path))
}

fn load_benchmarks(args: &AnalyzeArgs) -> Result<Vec<Benchmark>, ReportError> {
    let raw: Vec<String> = if args.benchmarks.is_empty() {
        vec!["uniform".into()]
    } else {
        args.benchmarks.clone()
    };
    let mut out: Vec<Benchmark> = Vec::new();
    for r in &raw {
        let (kind, path) = parse_benchmark_arg(r)?;
        if out.iter().any(|b| b.kind == kind) {
            return Err(ReportError::Usage(format!("benchmark kind {kind} given twice")));
        }
        out.push(load_benchmark(path.as_deref(), kind, args.scheme)?);
    }
    Ok(out)
}

fn load_extractor(args: &AnalyzeArgs) -> Result<Extractor, ReportError> {
    match args.scheme {
        Scheme::EU5 | Scheme::USParty => {
            let path = args
                .lexicon
                .as_ref()
                .ok_or_else(|| ReportError::Usage(format!("--lexicon is required for scheme {}", args.scheme)))?;
            Ok(Extractor::Entities(load_lexicon(path)?))
        }
        Scheme::USIssue5 => {
            if args.surveys.is_empty() {
                return Err(ReportError::Usage("--surveys is required for scheme usissue5".into()));
            }
            let issues = match &args.issues {
                Some(p) => load_issue_list(p)?,
                None => IssueList::bare(),
            };
            let thresholds = IssueThresholds::new(args.issue_t1, args.issue_t2)?;
            let surveys = load_surveys(&args.surveys)?;
            let scores = issue_scores(&surveys, thresholds)?;
            Ok(Extractor::Issues {
                issues,
                classification: IssueClassification::from_scores(&scores),
            })
        }
    }
}

/// Runs the analysis and writes the report files; returns their names.
pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Vec<String>, ReportError> {
    let records = load_results(&args.capture)?;
    let extractor = load_extractor(args)?;
    let benchmarks = load_benchmarks(args)?;
    let opts = AnalyzeOptions {
        scheme: args.scheme,
        alpha: args.alpha,
        seed: args.seed,
        n_perms: args.perms,
        n_bootstrap: args.bootstrap,
        ci_level: 0.95,
        context: args.context,
        top_k: args.top_k,
    };
    if opts.n_perms == 0 || opts.n_bootstrap == 0 {
        return Err(ReportError::Usage("--perms and --bootstrap must be positive".into()));
    }
    let analysis = analyze(&records, &extractor, &benchmarks, &opts)?;
    write_report(&analysis, &args.out, &opts)
}

pub fn load_config(path: &Path) -> Result<AuditConfig, ReportError> {
    let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config = AuditConfig::from_toml(&text)
        .map_err(|e| ReportError::Config(format!("{}: {}", path.display(), e.message())))?;
    validate_config(config).map_err(|errs| {
        let msgs: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        ReportError::Config(format!("{}: {}", path.display(), msgs.join("; ")))
    })
}

/// Runs a simulated audit and writes the capture; returns its path.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<PathBuf, ReportError> {
    let config = load_config(&args.config)?;
    let specs = load_engine_specs(&args.specs)?;
    let out = run_audit(&config, &specs, &args.out)?;
    if let Some(log_path) = &args.pacing_log {
        let plan = audit_plan(&config, &specs)?;
        let pacing = PacingConfig {
            seed: config.seed,
            ..Default::default()
        };
        let mut text = String::new();
        for e in simulate_human_pacing(&plan, &pacing) {
            text.push_str(&serde_json::to_string(&e).expect("events serialize"));
            text.push('\n');
        }
        fs::write(log_path, text).map_err(|source| ReportError::Io {
            path: log_path.clone(),
            source,
        })?;
    }
    Ok(out)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a).map(|files| {
            println!("wrote {} files to {}", files.len(), a.out.display());
        }),
        Command::Simulate(s) => cmd_simulate(s).map(|p| {
            println!("wrote {}", p.display());
        }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
