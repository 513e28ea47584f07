//! Analysis pipeline and report generation.
//!
//! [`analyze`] runs extraction, leaning resolution and the statistical
//! battery over a capture; [`write_report`] renders the result to text, CSV
//! and LaTeX files. The `salience` binary wraps both in [`cli`].

pub mod cli;
mod table;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::extract::{dedupe, match_issues, match_lexicon, CategoryResolver, ExtractError};
use crate::ingest::{EntityLexicon, IngestError, IssueList};
use crate::leaning::{IssueClassification, LeaningError};
use crate::model::{
    Benchmark, BenchmarkKind, Category, Mention, Platform, ResultRecord, Scheme, TestKind, TestOutcome,
};
use crate::sim::SimError;
use crate::stats::{
    adaptive_test_with, binom_z, bootstrap_ci, holm, omnibus, stouffer, AdaptiveOptions, QueryObservation, StatsError,
    StratumResult,
};

pub use table::{format_cell, format_pp, format_table, round_pp, significance_marker, TableFormat, TableStyle};

/// Stratum label for results pooled over all locations.
pub const ALL_STRATA: &str = "ALL";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Leaning(#[from] LeaningError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("outcomes mix schemes {0} and {1}")]
    MixedSchemes(Scheme, Scheme),
    #[error("two outcomes for row {0:?}, category {1}")]
    DuplicateCell(String, Category),
    #[error("benchmark {kind} is for scheme {found}, analysis uses {expected}")]
    BenchmarkScheme {
        kind: BenchmarkKind,
        found: Scheme,
        expected: Scheme,
    },
    #[error("benchmark {kind} has no row for stratum {stratum:?}")]
    BenchmarkStratum { kind: BenchmarkKind, stratum: String },
    #[error("statistics failed: {0}")]
    Stats(#[from] StatsError),
}

impl ReportError {
    /// 2 for input problems, 3 for failures inside the statistics.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Stats(_) => 3,
            _ => 2,
        }
    }
}

/// How Holm–Bonferroni families are formed. Families are always split by
/// scheme and by test level (aggregated vs. per-query).
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum HolmContext {
    /// One family per platform (search engines, chat models).
    Platform,
    /// One family per engine.
    Engine,
    /// A single family.
    All,
}

/// Where mentions come from.
pub enum Extractor {
    Entities(EntityLexicon),
    Issues {
        issues: IssueList,
        classification: IssueClassification,
    },
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub scheme: Scheme,
    pub alpha: f64,
    pub seed: u64,
    pub n_perms: usize,
    pub n_bootstrap: usize,
    pub ci_level: f64,
    pub context: HolmContext,
    /// Keep only SERP results ranked at or above this position.
    pub top_k: Option<u32>,
}

impl AnalyzeOptions {
    pub fn new(scheme: Scheme) -> Self {
        AnalyzeOptions {
            scheme,
            alpha: 0.05,
            seed: 0,
            n_perms: 9999,
            n_bootstrap: 1000,
            ci_level: 0.95,
            context: HolmContext::Platform,
            top_k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProportionRow {
    pub column: String,
    pub stratum: String,
    pub category: Category,
    pub mentions: u64,
    pub share_pct: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratumRow {
    pub column: String,
    pub benchmark_kind: BenchmarkKind,
    pub category: Category,
    pub result: StratumResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmnibusRow {
    pub column: String,
    pub benchmark_kind: BenchmarkKind,
    pub chi2: Option<f64>,
    pub df: usize,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub scheme: Scheme,
    pub n_records: usize,
    pub n_records_with_mentions: usize,
    pub mentions: Vec<Mention>,
    pub columns: BTreeMap<String, Platform>,
    pub proportions: Vec<ProportionRow>,
    /// Mention-level binomial tests, Holm-adjusted.
    pub aggregated: Vec<TestOutcome>,
    /// Query-level tests combined across strata, Holm-adjusted.
    pub query_level: Vec<TestOutcome>,
    pub strata: Vec<StratumRow>,
    pub omnibus: Vec<OmnibusRow>,
}

impl Analysis {
    pub fn mention_rate(&self) -> f64 {
        if self.n_records == 0 {
            0.0
        } else {
            self.n_records_with_mentions as f64 / self.n_records as f64 * 100.0
        }
    }

    pub fn tests_run(&self) -> bool {
        !self.aggregated.is_empty()
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &TestOutcome> {
        self.aggregated.iter().chain(&self.query_level)
    }
}

/// Independent 64-bit seed for one sub-analysis.
fn derive_seed(seed: u64, parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

fn extract_mentions(
    records: &[&ResultRecord],
    extractor: &Extractor,
    scheme: Scheme,
) -> Result<Vec<Vec<Mention>>, ReportError> {
    records
        .iter()
        .map(|r| {
            let (hits, resolver): (_, &dyn CategoryResolver) = match extractor {
                Extractor::Entities(lex) => (match_lexicon(r, lex), lex),
                Extractor::Issues { issues, classification } => (match_issues(r, issues), classification),
            };
            Ok(dedupe(&hits, scheme, resolver)?)
        })
        .collect()
}

fn dominant_kind(strata: &[StratumResult]) -> TestKind {
    let lrt = strata.iter().filter(|s| s.test_kind == TestKind::BetaBinLRT).count();
    let perm = strata.iter().filter(|s| s.test_kind == TestKind::SignFlipPerm).count();
    if lrt == 0 && perm == 0 {
        TestKind::Descriptive
    } else if lrt >= perm {
        TestKind::BetaBinLRT
    } else {
        TestKind::SignFlipPerm
    }
}

fn platform_name(p: Platform) -> &'static str {
    match p {
        Platform::SE => "SE",
        Platform::LLM => "LLM",
    }
}

/// Runs extraction and the full statistical battery.
pub fn analyze(
    records: &[ResultRecord],
    extractor: &Extractor,
    benchmarks: &[Benchmark],
    opts: &AnalyzeOptions,
) -> Result<Analysis, ReportError> {
    let scheme = opts.scheme;
    for b in benchmarks {
        if b.scheme != scheme {
            return Err(ReportError::BenchmarkScheme {
                kind: b.kind,
                found: b.scheme,
                expected: scheme,
            });
        }
    }
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(ReportError::Usage(format!(
            "alpha must lie in (0, 1), got {}",
            opts.alpha
        )));
    }
    let kept: Vec<&ResultRecord> = records
        .iter()
        .filter(|r| match (opts.top_k, r.section.is_serp(), r.rank) {
            (Some(k), true, Some(rank)) => rank <= k,
            _ => true,
        })
        .collect();
    let per_record = extract_mentions(&kept, extractor, scheme)?;

    let columns: BTreeMap<String, Platform> = kept.iter().map(|r| (r.engine.clone(), r.platform())).collect();
    let n_records_with_mentions = per_record.iter().filter(|m| !m.is_empty()).count();
    let mentions: Vec<Mention> = per_record.iter().flatten().cloned().collect();

    let mut analysis = Analysis {
        scheme,
        n_records: kept.len(),
        n_records_with_mentions,
        mentions,
        columns: columns.clone(),
        proportions: Vec::new(),
        aggregated: Vec::new(),
        query_level: Vec::new(),
        strata: Vec::new(),
        omnibus: Vec::new(),
    };
    if analysis.mentions.is_empty() {
        return Ok(analysis);
    }

    // engine → location → query → (category counts, total)
    type QueryCounts = (BTreeMap<Category, u64>, u64);
    let mut nested: BTreeMap<&str, BTreeMap<&str, BTreeMap<&str, QueryCounts>>> = BTreeMap::new();
    let mut by_column: BTreeMap<&str, Vec<Mention>> = BTreeMap::new();
    let mut by_cell: BTreeMap<(&str, &str), Vec<Mention>> = BTreeMap::new();
    for (r, ms) in kept.iter().zip(&per_record) {
        let entry = nested
            .entry(&r.engine)
            .or_default()
            .entry(&r.location)
            .or_default()
            .entry(&r.query_id)
            .or_default();
        for m in ms {
            *entry.0.entry(m.category).or_default() += 1;
            entry.1 += 1;
        }
        by_column.entry(&r.engine).or_default().extend(ms.iter().cloned());
        by_cell
            .entry((&r.engine, &r.location))
            .or_default()
            .extend(ms.iter().cloned());
    }

    // Proportions with bootstrap intervals, pooled and per stratum.
    let mut groups: Vec<(&str, &str, &Vec<Mention>)> = by_column.iter().map(|(c, m)| (*c, ALL_STRATA, m)).collect();
    groups.extend(by_cell.iter().map(|((c, s), m)| (*c, *s, m)));
    for (column, stratum, ms) in groups {
        let mut counts: BTreeMap<Category, u64> = BTreeMap::new();
        for m in ms {
            *counts.entry(m.category).or_default() += 1;
        }
        let total = ms.len() as f64;
        let ci = if ms.is_empty() {
            None
        } else {
            Some(bootstrap_ci(
                ms,
                scheme,
                opts.n_bootstrap,
                opts.ci_level,
                derive_seed(opts.seed, &["bootstrap", column, stratum]),
            )?)
        };
        for &c in scheme.categories() {
            let k = counts.get(&c).copied().unwrap_or(0);
            let (lo, hi) = ci.as_ref().map_or((0.0, 0.0), |ci| ci[&c]);
            analysis.proportions.push(ProportionRow {
                column: column.to_string(),
                stratum: stratum.to_string(),
                category: c,
                mentions: k,
                share_pct: if total > 0.0 { k as f64 / total * 100.0 } else { 0.0 },
                ci_lo: lo,
                ci_hi: hi,
            });
        }
    }

    let adaptive = AdaptiveOptions {
        n_perms: opts.n_perms,
        ..Default::default()
    };
    let mut aggregated = Vec::new();
    let mut query_level = Vec::new();
    for bench in benchmarks {
        for (column, locations) in &nested {
            let strata: Vec<&str> = locations.keys().copied().collect();
            let expected = bench.mean_row(&strata).ok_or_else(|| ReportError::BenchmarkStratum {
                kind: bench.kind,
                stratum: strata
                    .iter()
                    .find(|s| bench.row(s).is_none())
                    .map(|s| s.to_string())
                    .unwrap_or_default(),
            })?;
            let col_mentions = &by_column[column];
            let n_total = col_mentions.len() as u64;
            let mut z_query: BTreeMap<Category, f64> = BTreeMap::new();
            for &cat in scheme.categories() {
                let p0 = expected.get(&cat).copied().unwrap_or(0.0);
                let k = col_mentions.iter().filter(|m| m.category == cat).count() as u64;

                // Aggregated mention-level test.
                let share = if n_total > 0 { k as f64 / n_total as f64 } else { 0.0 };
                let diff_pp = 100.0 * (share - p0);
                let agg = match binom_z(k, n_total, p0) {
                    Ok((z, p)) => (z, Some(p), TestKind::BinomZ),
                    Err(StatsError::DegenerateP0(_) | StatsError::BadCounts { .. }) => {
                        (0.0, None, TestKind::Descriptive)
                    }
                    Err(e) => return Err(e.into()),
                };
                aggregated.push(TestOutcome {
                    scheme,
                    category: cat,
                    column: column.to_string(),
                    stratum: ALL_STRATA.to_string(),
                    benchmark_kind: bench.kind,
                    diff_pp,
                    statistic: agg.0,
                    test_kind: agg.2,
                    p_raw: agg.1,
                    p_adjusted: None,
                    n_units: n_total as usize,
                });

                // Query-level test per stratum, combined across strata.
                let mut stratum_results = Vec::new();
                let mut deviations = Vec::new();
                for (loc, queries) in locations {
                    let row = bench.row(loc).ok_or_else(|| ReportError::BenchmarkStratum {
                        kind: bench.kind,
                        stratum: loc.to_string(),
                    })?;
                    let p0_s = row.get(&cat).copied().unwrap_or(0.0);
                    let obs: Vec<QueryObservation> = queries
                        .iter()
                        .map(|(q, (counts, n))| QueryObservation {
                            query_id: q.to_string(),
                            stratum: loc.to_string(),
                            k: counts.get(&cat).copied().unwrap_or(0),
                            n: *n,
                        })
                        .collect();
                    deviations.extend(obs.iter().map(|o| o.p_q() - p0_s));
                    let seed = derive_seed(opts.seed, &["query", column, loc, bench.kind.name(), cat.name()]);
                    let r = adaptive_test_with(&obs, p0_s, seed, &adaptive);
                    analysis.strata.push(StratumRow {
                        column: column.to_string(),
                        benchmark_kind: bench.kind,
                        category: cat,
                        result: r.clone(),
                    });
                    stratum_results.push(r);
                }
                let mean_dev = deviations.iter().sum::<f64>() / deviations.len().max(1) as f64;
                let kind = dominant_kind(&stratum_results);
                let (z, p, kind) = match stouffer(&stratum_results) {
                    Ok((z, p)) => (z, Some(p), kind),
                    Err(StatsError::NoTestableStrata) => (0.0, None, TestKind::Descriptive),
                    Err(e) => return Err(e.into()),
                };
                if p.is_some() {
                    z_query.insert(cat, z);
                }
                query_level.push(TestOutcome {
                    scheme,
                    category: cat,
                    column: column.to_string(),
                    stratum: ALL_STRATA.to_string(),
                    benchmark_kind: bench.kind,
                    diff_pp: 100.0 * mean_dev,
                    statistic: z,
                    test_kind: kind,
                    p_raw: p,
                    p_adjusted: None,
                    n_units: deviations.len(),
                });
            }
            let k = scheme.k();
            let om = if z_query.len() == k {
                let o = omnibus(&z_query, scheme)?;
                (Some(o.chi2), Some(o.p_value))
            } else {
                (None, None)
            };
            analysis.omnibus.push(OmnibusRow {
                column: column.to_string(),
                benchmark_kind: bench.kind,
                chi2: om.0,
                df: k - 1,
                p_value: om.1,
            });
        }
    }

    // Holm–Bonferroni within each context.
    let mut keyed: BTreeMap<(String, (usize, usize)), f64> = BTreeMap::new();
    for (level, list) in [&aggregated, &query_level].into_iter().enumerate() {
        let level_name = ["aggregated", "query"][level];
        for (i, o) in list.iter().enumerate() {
            let Some(p) = o.p_raw else { continue };
            let platform = platform_name(columns[&o.column]);
            let context = match opts.context {
                HolmContext::Platform => format!("{}-{}-{}", scheme.slug(), platform, level_name),
                HolmContext::Engine => format!("{}-{}-{}", scheme.slug(), o.column, level_name),
                HolmContext::All => scheme.slug().to_string(),
            };
            keyed.insert((context, (level, i)), p);
        }
    }
    for ((_, (level, i)), adj) in holm(&keyed, opts.alpha) {
        let list = if level == 0 { &mut aggregated } else { &mut query_level };
        list[i].p_adjusted = Some(adj.p_adjusted);
    }
    analysis.aggregated = aggregated;
    analysis.query_level = query_level;
    Ok(analysis)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), ReportError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| ReportError::Io { path, source })
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v}"))
}

fn csv_string<F>(header: &[&str], mut rows: F) -> String
where
    F: FnMut(&mut csv::Writer<Vec<u8>>),
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    rows(&mut w);
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// Writes the report files into `dir` and returns their names.
pub fn write_report(analysis: &Analysis, dir: &Path, opts: &AnalyzeOptions) -> Result<Vec<String>, ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let mut summary = String::new();
    let _ = writeln!(summary, "scheme: {}", analysis.scheme.slug());
    let _ = writeln!(summary, "records: {}", analysis.n_records);
    let _ = writeln!(summary, "records with mentions: {}", analysis.n_records_with_mentions);
    let _ = writeln!(summary, "mentions: {}", analysis.mentions.len());
    let _ = writeln!(summary, "mention rate: {:.1}%", analysis.mention_rate());
    if let Some(k) = opts.top_k {
        let _ = writeln!(summary, "top-k: {k}");
    }
    let _ = writeln!(summary, "seed: {}", opts.seed);
    if !analysis.tests_run() {
        let _ = writeln!(summary, "0% mention rate, no tests run");
        write_file(dir, "summary.txt", &summary)?;
        written.push("summary.txt".to_string());
        return Ok(written);
    }
    let _ = writeln!(summary, "alpha: {}", opts.alpha);
    let _ = writeln!(summary, "permutations: {}", opts.n_perms);
    let _ = writeln!(summary, "bootstrap resamples: {}", opts.n_bootstrap);
    let rejected = analysis
        .outcomes()
        .filter(|o| o.p_adjusted.is_some_and(|p| p <= opts.alpha))
        .count();
    let _ = writeln!(
        summary,
        "hypotheses: {}, rejected after Holm: {rejected}",
        analysis.outcomes().filter(|o| o.p_raw.is_some()).count()
    );

    // Proportions.
    let mut txt = String::new();
    let _ = writeln!(
        txt,
        "Share of political mentions (%), {:.0}% bootstrap intervals",
        opts.ci_level * 100.0
    );
    let mut current = None;
    for row in &analysis.proportions {
        let key = (row.column.clone(), row.stratum.clone());
        if current.as_ref() != Some(&key) {
            let _ = writeln!(txt, "\n{} / {}", row.column, row.stratum);
            current = Some(key);
        }
        let _ = writeln!(
            txt,
            "  {:<10} {:>6.1}  [{:>5.1}, {:>5.1}]  n={}",
            row.category.label(),
            row.share_pct,
            row.ci_lo,
            row.ci_hi,
            row.mentions
        );
    }
    write_file(dir, "proportions.txt", &txt)?;
    let csv = csv_string(
        &[
            "column",
            "stratum",
            "category",
            "mentions",
            "share_pct",
            "ci_lo",
            "ci_hi",
        ],
        |w| {
            for r in &analysis.proportions {
                w.write_record([
                    r.column.clone(),
                    r.stratum.clone(),
                    r.category.name().to_string(),
                    r.mentions.to_string(),
                    format!("{}", r.share_pct),
                    format!("{}", r.ci_lo),
                    format!("{}", r.ci_hi),
                ])
                .expect("in-memory write");
            }
        },
    );
    write_file(dir, "proportions.csv", &csv)?;
    let plot = csv_string(&["column", "category", "value", "ci_lo", "ci_hi"], |w| {
        for r in analysis.proportions.iter().filter(|r| r.stratum == ALL_STRATA) {
            w.write_record([
                r.column.clone(),
                r.category.name().to_string(),
                format!("{}", r.share_pct),
                format!("{}", r.ci_lo),
                format!("{}", r.ci_hi),
            ])
            .expect("in-memory write");
        }
    });
    write_file(dir, "plot_data.csv", &plot)?;

    // Deviation tables.
    let plain = TableStyle {
        format: TableFormat::Plain,
        alpha: opts.alpha,
    };
    let latex = TableStyle {
        format: TableFormat::Latex,
        alpha: opts.alpha,
    };
    let kinds: BTreeSet<BenchmarkKind> = analysis.outcomes().map(|o| o.benchmark_kind).collect();
    let mut diffs = String::new();
    let mut tex = String::new();
    for kind in &kinds {
        for (list, title) in [
            (&analysis.aggregated, "aggregated mention test"),
            (&analysis.query_level, "query-level test"),
        ] {
            let sel: Vec<TestOutcome> = list.iter().filter(|o| o.benchmark_kind == *kind).cloned().collect();
            let _ = writeln!(diffs, "Deviation from {} benchmark, {title}", kind.name());
            let _ = writeln!(
                diffs,
                "(** adj. p < 0.01, * adj. p < 0.05, [..] significant after Holm-Bonferroni)\n"
            );
            diffs.push_str(&format_table(&sel, plain)?);
            diffs.push('\n');
            let _ = writeln!(tex, "% Deviation from {} benchmark, {title}", kind.name());
            tex.push_str(&format_table(&sel, latex)?);
            tex.push('\n');
        }
    }
    write_file(dir, "diffs.txt", &diffs)?;
    write_file(dir, "diffs.tex", &tex)?;
    let outcomes_csv = csv_string(
        &[
            "scheme",
            "column",
            "stratum",
            "benchmark",
            "level",
            "category",
            "diff_pp",
            "statistic",
            "test_kind",
            "p_raw",
            "p_adjusted",
            "n_units",
            "direction",
        ],
        |w| {
            let levels = analysis
                .aggregated
                .iter()
                .map(|o| ("aggregated", o))
                .chain(analysis.query_level.iter().map(|o| ("query", o)));
            for (level, o) in levels {
                w.write_record([
                    o.scheme.slug().to_string(),
                    o.column.clone(),
                    o.stratum.clone(),
                    o.benchmark_kind.name().to_string(),
                    level.to_string(),
                    o.category.name().to_string(),
                    format!("{}", o.diff_pp),
                    format!("{}", o.statistic),
                    format!("{:?}", o.test_kind),
                    opt_num(o.p_raw),
                    opt_num(o.p_adjusted),
                    o.n_units.to_string(),
                    o.direction().to_string(),
                ])
                .expect("in-memory write");
            }
        },
    );
    write_file(dir, "outcomes.csv", &outcomes_csv)?;
    let strata_csv = csv_string(
        &[
            "column",
            "benchmark",
            "category",
            "stratum",
            "test_kind",
            "n",
            "mean_deviation",
            "statistic",
            "z",
            "p",
        ],
        |w| {
            for s in &analysis.strata {
                w.write_record([
                    s.column.clone(),
                    s.benchmark_kind.name().to_string(),
                    s.category.name().to_string(),
                    s.result.stratum.clone(),
                    format!("{:?}", s.result.test_kind),
                    s.result.n.to_string(),
                    format!("{}", s.result.mean_deviation),
                    format!("{}", s.result.statistic),
                    format!("{}", s.result.z_equivalent),
                    opt_num(s.result.p),
                ])
                .expect("in-memory write");
            }
        },
    );
    write_file(dir, "strata.csv", &strata_csv)?;

    // Omnibus.
    let mut om = String::from("Omnibus test of the full category distribution (query-level z)\n\n");
    let _ = writeln!(
        om,
        "{:<16} {:<16} {:>10} {:>4} {:>12}",
        "column", "benchmark", "chi2", "df", "p"
    );
    for r in &analysis.omnibus {
        let _ = writeln!(
            om,
            "{:<16} {:<16} {:>10} {:>4} {:>12}",
            r.column,
            r.benchmark_kind.name(),
            r.chi2.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}")),
            r.df,
            r.p_value.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3e}")),
        );
    }
    write_file(dir, "omnibus.txt", &om)?;
    let om_csv = csv_string(&["column", "benchmark", "chi2", "df", "p"], |w| {
        for r in &analysis.omnibus {
            w.write_record([
                r.column.clone(),
                r.benchmark_kind.name().to_string(),
                opt_num(r.chi2),
                r.df.to_string(),
                opt_num(r.p_value),
            ])
            .expect("in-memory write");
        }
    });
    write_file(dir, "omnibus.csv", &om_csv)?;
    write_file(dir, "summary.txt", &summary)?;
    written.extend(
        [
            "proportions.txt",
            "proportions.csv",
            "plot_data.csv",
            "diffs.txt",
            "diffs.tex",
            "outcomes.csv",
            "strata.csv",
            "omnibus.txt",
            "omnibus.csv",
            "summary.txt",
        ]
        .map(String::from),
    );
    Ok(written)
}
