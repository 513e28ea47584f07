//! Deterministic simulated audits.
//!
//! A [`SimDriver`] plays the role of one fresh browser instance: it visits an
//! engine from a location, types a query, scrolls and collects one page of
//! results. Pages are generated from an [`EngineSpec`]: templated results in
//! which planted political entities appear with a configurable category
//! distribution. Every page draws from its own ChaCha8 stream derived from
//! the audit seed and the page coordinates, so adding replicas, engines or
//! locations never changes existing pages.

mod pacing;

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ingest::write_results;
use crate::model::{AuditConfig, Category, Platform, ResultRecord, Section};

pub use pacing::{simulate_human_pacing, Delay, PacingConfig, PacingEvent, PageAction};

/// 2024-06-06T00:00:00Z, the first voting day of the simulated election.
pub const BASE_TIMESTAMP_MS: i64 = 1_717_632_000_000;

const REFUSAL_TEXT: &str = "I'm sorry, but I can't help with questions about elections and voting.";

#[derive(Debug, Error)]
pub enum SimError {
    #[error("no engine spec for engine {engine:?} and query {query:?}")]
    MissingSpec { engine: String, query: String },
    #[error("bad category distribution: {0}")]
    BadDistribution(String),
    #[error("engine spec {engine:?}: {message}")]
    BadSpec { engine: String, message: String },
    #[error("driver used out of order: {0}")]
    DriverState(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

/// One result slot on a page. `{entity}`, `{slug}`, `{query}`, `{location}`
/// and `{rank}` are substituted when the page is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageTemplate {
    #[serde(default = "default_url")]
    pub url: String,
    pub headline: String,
    #[serde(default = "default_section")]
    pub section: Section,
}

fn default_url() -> String {
    "https://news.example.com/{slug}".into()
}

fn default_section() -> Section {
    Section::Main
}

fn default_page_size() -> u32 {
    8
}

fn default_rate() -> f64 {
    1.0
}

fn default_filler() -> Vec<String> {
    vec![
        "Polling station opening hours".into(),
        "How to register before the deadline".into(),
        "Live coverage of election night".into(),
    ]
}

/// Mock engine behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSpec {
    pub engine_id: String,
    #[serde(default = "default_platform")]
    pub platform: Platform,
    /// Result templates per query id; `*` applies to any query.
    pub pages: BTreeMap<String, Vec<PageTemplate>>,
    pub mention_distribution: BTreeMap<Category, f64>,
    /// Surface forms planted for each category.
    pub entities: BTreeMap<Category, Vec<String>>,
    #[serde(default = "default_page_size")]
    pub results_per_page: u32,
    /// Probability that a result carries a planted entity.
    #[serde(default = "default_rate")]
    pub mention_rate: f64,
    /// Headlines for results without a planted entity.
    #[serde(default = "default_filler")]
    pub filler_headlines: Vec<String>,
    #[serde(default)]
    pub noise_seed: u64,
    /// LLM engines only: probability of a refusal answer.
    #[serde(default)]
    pub refusal_probability: f64,
    /// Probability that a bot fails and collects nothing.
    #[serde(default)]
    pub failure_probability: f64,
}

fn default_platform() -> Platform {
    Platform::SE
}

#[derive(Debug, Deserialize)]
struct SpecFile {
    engine: Vec<EngineSpec>,
}

impl EngineSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |message: String| SimError::BadSpec {
            engine: self.engine_id.clone(),
            message,
        };
        if self.engine_id.trim().is_empty() {
            return Err(bad("engine_id is empty".into()));
        }
        if self.results_per_page == 0 {
            return Err(bad("results_per_page must be at least 1".into()));
        }
        for (name, p) in [
            ("mention_rate", self.mention_rate),
            ("refusal_probability", self.refusal_probability),
            ("failure_probability", self.failure_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(bad(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if self.pages.values().any(|t| t.is_empty()) {
            return Err(bad("a page lists no templates".into()));
        }
        if self.mention_rate < 1.0 && self.filler_headlines.is_empty() {
            return Err(bad("filler_headlines is empty".into()));
        }
        check_distribution(&self.mention_distribution)?;
        for (c, w) in &self.mention_distribution {
            if *w > 0.0 && self.entities.get(c).is_none_or(|v| v.is_empty()) {
                return Err(bad(format!("category {c} has weight but no entities")));
            }
        }
        Ok(())
    }

    fn templates(&self, query_id: &str) -> Option<&[PageTemplate]> {
        self.pages
            .get(query_id)
            .or_else(|| self.pages.get("*"))
            .map(Vec::as_slice)
    }
}

fn check_distribution(dist: &BTreeMap<Category, f64>) -> Result<(), SimError> {
    if let Some((c, w)) = dist.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
        return Err(SimError::BadDistribution(format!("weight {w} for {c}")));
    }
    if dist.values().all(|w| *w == 0.0) {
        return Err(SimError::BadDistribution("all weights are zero".into()));
    }
    let mut schemes = dist.keys().map(|c| c.scheme());
    let first = schemes.next();
    if schemes.any(|s| Some(s) != first) {
        return Err(SimError::BadDistribution("categories from several schemes".into()));
    }
    Ok(())
}

/// Parses a spec file holding one or more `[[engine]]` tables.
pub fn parse_engine_specs(text: &str, path: &Path) -> Result<Vec<EngineSpec>, SimError> {
    let file: SpecFile = toml::from_str(text).map_err(|e| SimError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    for s in &file.engine {
        s.validate()?;
    }
    Ok(file.engine)
}

pub fn load_engine_specs(path: &Path) -> Result<Vec<EngineSpec>, SimError> {
    let text = fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_engine_specs(&text, path)
}

/// Replaces the engine's category weights with `target`, normalized.
pub fn plant_bias(spec: &EngineSpec, target: &BTreeMap<Category, f64>) -> Result<EngineSpec, SimError> {
    check_distribution(target)?;
    let total: f64 = target.values().sum();
    let mut out = spec.clone();
    out.mention_distribution = target.iter().map(|(c, w)| (*c, w / total)).collect();
    out.validate()?;
    Ok(out)
}

/// Browser contract for one bot. A live implementation would drive a real
/// browser; [`SimDriver`] generates pages from an [`EngineSpec`].
pub trait Driver {
    fn visit(&mut self, engine: &str, location: &str) -> Result<(), SimError>;
    fn type_query(&mut self, query_id: &str, text: &str, language: &str) -> Result<(), SimError>;
    fn scroll(&mut self) -> Result<(), SimError>;
    fn collect(&mut self) -> Result<Vec<ResultRecord>, SimError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Fresh,
    Visited,
    Typed,
    Scrolled,
}

/// A single-use simulated browser for one page.
pub struct SimDriver<'a> {
    spec: &'a EngineSpec,
    audit_seed: u64,
    replica: u32,
    query_index: usize,
    stage: Stage,
    location: String,
    query_id: String,
    query_text: String,
    language: String,
}

impl<'a> SimDriver<'a> {
    pub fn new(spec: &'a EngineSpec, audit_seed: u64, replica: u32, query_index: usize) -> Self {
        SimDriver {
            spec,
            audit_seed,
            replica,
            query_index,
            stage: Stage::Fresh,
            location: String::new(),
            query_id: String::new(),
            query_text: String::new(),
            language: String::new(),
        }
    }

    fn page_rng(&self) -> ChaCha8Rng {
        let mut h = Sha256::new();
        for part in [
            self.spec.engine_id.as_bytes(),
            self.location.as_bytes(),
            self.query_id.as_bytes(),
        ] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(part);
        }
        h.update(self.replica.to_le_bytes());
        h.update(self.audit_seed.to_le_bytes());
        h.update(self.spec.noise_seed.to_le_bytes());
        let digest = h.finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        ChaCha8Rng::from_seed(seed)
    }

    fn draw_entity(&self, rng: &mut ChaCha8Rng) -> Option<&'a str> {
        let spec = self.spec;
        if rng.gen::<f64>() >= spec.mention_rate {
            return None;
        }
        let total: f64 = spec.mention_distribution.values().sum();
        let mut x = rng.gen::<f64>() * total;
        let mut chosen = None;
        for (c, w) in &spec.mention_distribution {
            if *w <= 0.0 {
                continue;
            }
            chosen = Some(*c);
            if x < *w {
                break;
            }
            x -= w;
        }
        let list = &spec.entities[&chosen?];
        Some(list[rng.gen_range(0..list.len())].as_str())
    }

    fn fill(&self, template: &str, entity: &str, rank: u32) -> String {
        template
            .replace("{entity}", entity)
            .replace("{slug}", &slugify(entity))
            .replace("{query}", &self.query_text)
            .replace("{location}", &self.location)
            .replace("{rank}", &rank.to_string())
    }

    fn record(&self, section: Section, rank: u32) -> ResultRecord {
        let section_slug = match section {
            Section::Main => "main",
            Section::TopNews => "news",
            Section::PeopleAlsoAsk => "paa",
            Section::LlmAnswer => "answer",
        };
        ResultRecord {
            record_id: format!(
                "{}:{}:{}:r{}:{}:{}",
                self.spec.engine_id, self.location, self.query_id, self.replica, section_slug, rank
            ),
            engine: self.spec.engine_id.clone(),
            location: self.location.clone(),
            language: self.language.clone(),
            query_id: self.query_id.clone(),
            replica: self.replica,
            rank: Some(rank),
            section,
            url: None,
            headline: None,
            answer_text: None,
            site_category: None,
            collected_at: BASE_TIMESTAMP_MS + self.query_index as i64 * 60_000 + (rank as i64 - 1) * 100,
        }
    }

    fn generate(&self) -> Result<Vec<ResultRecord>, SimError> {
        let spec = self.spec;
        let templates = spec.templates(&self.query_id).ok_or_else(|| SimError::MissingSpec {
            engine: spec.engine_id.clone(),
            query: self.query_id.clone(),
        })?;
        let mut rng = self.page_rng();
        if rng.gen::<f64>() < spec.failure_probability {
            return Ok(Vec::new());
        }
        let mut slots = Vec::with_capacity(spec.results_per_page as usize);
        for i in 0..spec.results_per_page {
            let t = &templates[i as usize % templates.len()];
            let text = match self.draw_entity(&mut rng) {
                Some(entity) => (self.fill(&t.headline, entity, i + 1), self.fill(&t.url, entity, i + 1)),
                None => {
                    let h = &spec.filler_headlines[rng.gen_range(0..spec.filler_headlines.len())];
                    (
                        self.fill(h, "", i + 1),
                        self.fill(&t.url, &format!("story {}", i + 1), i + 1),
                    )
                }
            };
            slots.push((t.section, text));
        }
        match spec.platform {
            Platform::SE => Ok(slots
                .into_iter()
                .enumerate()
                .map(|(i, (section, (headline, url)))| {
                    let section = if section == Section::LlmAnswer {
                        Section::Main
                    } else {
                        section
                    };
                    let mut r = self.record(section, i as u32 + 1);
                    r.headline = Some(headline);
                    r.url = Some(url);
                    r
                })
                .collect()),
            Platform::LLM => {
                let mut r = self.record(Section::LlmAnswer, 1);
                let refused = rng.gen::<f64>() < spec.refusal_probability;
                r.answer_text = Some(if refused {
                    REFUSAL_TEXT.to_string()
                } else {
                    slots
                        .into_iter()
                        .map(|(_, (sentence, _))| sentence)
                        .collect::<Vec<_>>()
                        .join(". ")
                });
                Ok(vec![r])
            }
        }
    }
}

impl Driver for SimDriver<'_> {
    fn visit(&mut self, engine: &str, location: &str) -> Result<(), SimError> {
        if self.stage != Stage::Fresh {
            return Err(SimError::DriverState("visit on a used instance"));
        }
        if engine != self.spec.engine_id {
            return Err(SimError::MissingSpec {
                engine: engine.to_string(),
                query: String::new(),
            });
        }
        self.location = location.to_string();
        self.stage = Stage::Visited;
        Ok(())
    }

    fn type_query(&mut self, query_id: &str, text: &str, language: &str) -> Result<(), SimError> {
        if self.stage != Stage::Visited {
            return Err(SimError::DriverState("type before visit"));
        }
        self.query_id = query_id.to_string();
        self.query_text = text.to_string();
        self.language = language.to_string();
        self.stage = Stage::Typed;
        Ok(())
    }

    fn scroll(&mut self) -> Result<(), SimError> {
        if self.stage != Stage::Typed {
            return Err(SimError::DriverState("scroll before typing"));
        }
        self.stage = Stage::Scrolled;
        Ok(())
    }

    fn collect(&mut self) -> Result<Vec<ResultRecord>, SimError> {
        if self.stage != Stage::Scrolled {
            return Err(SimError::DriverState("collect before scrolling"));
        }
        self.generate()
    }
}

fn slugify(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            out.push(c);
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    out.trim_end_matches('-').to_string()
}

/// One bot run: a fresh browser for a single (engine, location, query, replica).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedVisit {
    pub engine: String,
    pub location: String,
    pub query_index: usize,
    pub query_id: String,
    pub query_text: String,
    pub language: String,
    pub replica: u32,
}

/// Expands the configuration into bot runs. Queries run only on engines of
/// the same platform.
pub fn audit_plan(config: &AuditConfig, specs: &[EngineSpec]) -> Result<Vec<PlannedVisit>, SimError> {
    let mut plan = Vec::new();
    for engine in &config.engines {
        let spec = find_spec(specs, engine, "*")?;
        for loc in &config.locations {
            for (qi, q) in config.queries.iter().enumerate() {
                if q.platform != spec.platform {
                    continue;
                }
                let query_id = config.query_id(qi);
                if spec.templates(&query_id).is_none() {
                    return Err(SimError::MissingSpec {
                        engine: engine.clone(),
                        query: query_id,
                    });
                }
                for replica in 1..=config.replicas_per_location {
                    plan.push(PlannedVisit {
                        engine: engine.clone(),
                        location: loc.country_or_county.clone(),
                        query_index: qi,
                        query_id: query_id.clone(),
                        query_text: q.text.clone(),
                        language: q.language.clone(),
                        replica,
                    });
                }
            }
        }
    }
    Ok(plan)
}

fn find_spec<'a>(specs: &'a [EngineSpec], engine: &str, query: &str) -> Result<&'a EngineSpec, SimError> {
    specs
        .iter()
        .find(|s| s.engine_id == engine)
        .ok_or_else(|| SimError::MissingSpec {
            engine: engine.to_string(),
            query: query.to_string(),
        })
}

fn run_visit(visit: &PlannedVisit, specs: &[EngineSpec], seed: u64) -> Result<Vec<ResultRecord>, SimError> {
    let spec = find_spec(specs, &visit.engine, &visit.query_id)?;
    let mut driver = SimDriver::new(spec, seed, visit.replica, visit.query_index);
    driver.visit(&visit.engine, &visit.location)?;
    driver.type_query(&visit.query_id, &visit.query_text, &visit.language)?;
    driver.scroll()?;
    driver.collect()
}

fn canonical_key(r: &ResultRecord) -> (String, String, String, u32, Section, Option<u32>) {
    (
        r.engine.clone(),
        r.location.clone(),
        r.query_id.clone(),
        r.replica,
        r.section,
        r.rank,
    )
}

/// Runs every planned bot and returns the records in canonical order
/// (engine, location, query, replica, section, rank). Engines run on
/// separate threads.
pub fn simulate(config: &AuditConfig, specs: &[EngineSpec]) -> Result<Vec<ResultRecord>, SimError> {
    for s in specs {
        s.validate()?;
    }
    let plan = audit_plan(config, specs)?;
    let mut by_engine: BTreeMap<&str, Vec<&PlannedVisit>> = BTreeMap::new();
    for v in &plan {
        by_engine.entry(v.engine.as_str()).or_default().push(v);
    }
    let results: Vec<Result<Vec<ResultRecord>, SimError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = by_engine
            .values()
            .map(|visits| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for v in visits {
                        out.extend(run_visit(v, specs, config.seed)?);
                    }
                    Ok(out)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bot thread panicked"))
            .collect()
    });
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    records.sort_by_cached_key(canonical_key);
    Ok(records)
}

/// Simulates the audit and writes the capture to `out`.
pub fn run_audit(config: &AuditConfig, specs: &[EngineSpec], out: &Path) -> Result<PathBuf, SimError> {
    let records = simulate(config, specs)?;
    let io = |source| SimError::Io {
        path: out.to_path_buf(),
        source,
    };
    let file = fs::File::create(out).map_err(io)?;
    let mut w = BufWriter::new(file);
    write_results(&mut w, &records).map_err(io)?;
    std::io::Write::flush(&mut w).map_err(io)?;
    Ok(out.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Election, LocationSpec, QueryKind, QuerySpec};
    use Category::*;

    fn eu_spec(engine: &str) -> EngineSpec {
        let entities = BTreeMap::from([
            (RadLeft, vec!["Die Linke".to_string()]),
            (MainLeft, vec!["SPD".to_string()]),
            (Greens, vec!["Die Grünen".to_string()]),
            (MainRight, vec!["CDU".to_string()]),
            (RadRight, vec!["AfD".to_string()]),
        ]);
        EngineSpec {
            engine_id: engine.into(),
            platform: Platform::SE,
            pages: BTreeMap::from([(
                "*".to_string(),
                vec![PageTemplate {
                    url: default_url(),
                    headline: "{entity} rally draws crowds".into(),
                    section: Section::Main,
                }],
            )]),
            mention_distribution: [RadLeft, MainLeft, Greens, MainRight, RadRight]
                .iter()
                .map(|&c| (c, 1.0))
                .collect(),
            entities,
            results_per_page: 8,
            mention_rate: 1.0,
            filler_headlines: default_filler(),
            noise_seed: 1,
            refusal_probability: 0.0,
            failure_probability: 0.0,
        }
    }

    fn config(engines: &[&str], locs: &[&str], n_q: usize, replicas: u32) -> AuditConfig {
        AuditConfig {
            election: Election::EU2024,
            engines: engines.iter().map(|s| s.to_string()).collect(),
            locations: locs
                .iter()
                .map(|l| LocationSpec {
                    country_or_county: l.to_string(),
                    poll_leaning: None,
                })
                .collect(),
            languages: vec!["de".into()],
            queries: (0..n_q)
                .map(|i| QuerySpec {
                    id: None,
                    text: format!("europawahl frage {i}"),
                    language: "de".into(),
                    kind: QueryKind::EntityQuery,
                    platform: Platform::SE,
                })
                .collect(),
            replicas_per_location: replicas,
            seed: 42,
        }
    }

    #[test]
    fn page_counting() {
        let recs = simulate(&config(&["google"], &["DE"], 1, 5), &[eu_spec("google")]).unwrap();
        assert_eq!(recs.len(), 40);
        let pages: std::collections::BTreeSet<u32> = recs.iter().map(|r| r.replica).collect();
        assert_eq!(pages.len(), 5);
        assert!(recs.iter().all(|r| r.check().is_ok()));
    }

    #[test]
    fn degenerate_weights_plant_one_category() {
        let spec = plant_bias(&eu_spec("g"), &BTreeMap::from([(RadRight, 1.0), (Greens, 0.0)])).unwrap();
        let recs = simulate(&config(&["g"], &["DE"], 2, 2), &[spec]).unwrap();
        assert!(recs
            .iter()
            .all(|r| r.headline.as_deref() == Some("AfD rally draws crowds")));
    }

    #[test]
    fn plant_bias_shares_and_errors() {
        let target = BTreeMap::from([
            (RadRight, 0.6),
            (MainRight, 0.1),
            (MainLeft, 0.1),
            (Greens, 0.1),
            (RadLeft, 0.1),
        ]);
        let spec = plant_bias(&eu_spec("g"), &target).unwrap();
        // 250 pages × 8 results = 2,000 planted mentions.
        let recs = simulate(&config(&["g"], &["DE"], 50, 5), &[spec]).unwrap();
        assert_eq!(recs.len(), 2000);
        let rr = recs
            .iter()
            .filter(|r| r.headline.as_deref().unwrap().starts_with("AfD"))
            .count();
        assert!((rr as f64 / 2000.0 - 0.6).abs() < 0.03);
        assert!(matches!(
            plant_bias(&eu_spec("g"), &BTreeMap::from([(RadRight, -0.1)])),
            Err(SimError::BadDistribution(_))
        ));
        assert!(matches!(
            plant_bias(&eu_spec("g"), &BTreeMap::from([(RadRight, 0.5), (Dem, 0.5)])),
            Err(SimError::BadDistribution(_))
        ));
    }

    #[test]
    fn replica_independence() {
        let specs = [eu_spec("g")];
        let three = simulate(&config(&["g"], &["DE", "AT"], 3, 3), &specs).unwrap();
        let four = simulate(&config(&["g"], &["DE", "AT"], 3, 4), &specs).unwrap();
        let kept: Vec<_> = four.into_iter().filter(|r| r.replica <= 3).collect();
        assert_eq!(three, kept);
    }

    #[test]
    fn missing_spec() {
        let err = simulate(&config(&["g", "bing"], &["DE"], 1, 1), &[eu_spec("g")]).unwrap_err();
        assert!(matches!(err, SimError::MissingSpec { engine, .. } if engine == "bing"));
    }

    #[test]
    fn driver_enforces_order() {
        let spec = eu_spec("g");
        let mut d = SimDriver::new(&spec, 1, 1, 0);
        assert!(matches!(d.collect(), Err(SimError::DriverState(_))));
    }

    #[test]
    fn llm_refusals_carry_no_entities() {
        let mut spec = eu_spec("chat");
        spec.platform = Platform::LLM;
        spec.refusal_probability = 1.0;
        let mut cfg = config(&["chat"], &["DE"], 2, 2);
        for q in &mut cfg.queries {
            q.platform = Platform::LLM;
        }
        let recs = simulate(&cfg, &[spec]).unwrap();
        assert_eq!(recs.len(), 4);
        assert!(recs
            .iter()
            .all(|r| r.answer_text.as_deref() == Some(REFUSAL_TEXT) && r.check().is_ok()));
    }

    #[test]
    fn spec_file_round_trip() {
        let text = r#"
[[engine]]
engine_id = "google"
results_per_page = 4

[engine.mention_distribution]
RadRight = 3
MainLeft = 1

[engine.entities]
RadRight = ["AfD"]
MainLeft = ["SPD"]

[[engine.pages."*"]]
headline = "{entity} news"
"#;
        let specs = parse_engine_specs(text, Path::new("specs.toml")).unwrap();
        assert_eq!(specs[0].results_per_page, 4);
        assert_eq!(specs[0].mention_distribution[&RadRight], 3.0);
        assert_eq!(specs[0].pages["*"][0].section, Section::Main);
    }
}
