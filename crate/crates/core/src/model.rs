//! Shared domain types: audit configuration, captured results, leaning
//! schemes, mentions, benchmarks and test outcomes.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Election {
    EU2024,
    US2024,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PollLeaning {
    Dem,
    Rep,
    Contested,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationSpec {
    pub country_or_county: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poll_leaning: Option<PollLeaning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueryKind {
    EntityQuery,
    IssueQuery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Platform {
    SE,
    LLM,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    /// Stable identifier used in captures. Defaults to `q<position>` (1-based).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub text: String,
    pub language: String,
    pub kind: QueryKind,
    pub platform: Platform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub election: Election,
    pub engines: Vec<String>,
    pub locations: Vec<LocationSpec>,
    pub languages: Vec<String>,
    pub queries: Vec<QuerySpec>,
    pub replicas_per_location: u32,
    #[serde(serialize_with = "ser_seed", deserialize_with = "de_seed")]
    pub seed: u64,
}

// TOML integers are signed 64-bit; seeds above i64::MAX travel as strings.
fn ser_seed<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(*seed) {
        Ok(v) => s.serialize_i64(v),
        Err(_) => s.serialize_str(&seed.to_string()),
    }
}

fn de_seed<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Str(String),
    }
    match Raw::deserialize(d)
        .map_err(|_| serde::de::Error::custom("seed must be a non-negative integer or a decimal string"))?
    {
        Raw::Int(v) => u64::try_from(v).map_err(|_| serde::de::Error::custom("seed must be non-negative")),
        Raw::Str(s) => s
            .trim()
            .parse::<u64>()
            .map_err(|_| serde::de::Error::custom(format!("seed {s:?} is not a 64-bit unsigned integer"))),
    }
}

impl AuditConfig {
    pub fn query_id(&self, index: usize) -> String {
        self.queries[index]
            .id
            .clone()
            .unwrap_or_else(|| format!("q{}", index + 1))
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("audit config always serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("configuration lists no queries")]
    EmptyQuerySet,
    #[error("query {query:?} uses language {language:?} which is not listed in `languages`")]
    UnknownLanguage { query: String, language: String },
    #[error("replicas_per_location must be at least 1 (got {0})")]
    BadReplicaCount(u32),
    #[error("configuration lists no engines")]
    NoEngines,
    #[error("engine id at position {0} is empty")]
    EmptyEngineId(usize),
    #[error("configuration lists no locations")]
    NoLocations,
    #[error("location id at position {0} is empty")]
    EmptyLocationId(usize),
    #[error("location {0:?} is listed more than once")]
    DuplicateLocation(String),
    #[error("query at position {0} has empty text")]
    EmptyQueryText(usize),
    #[error("query {0:?} is listed more than once")]
    DuplicateQueryId(String),
    #[error("query {0:?} is an IssueQuery, which is only defined for US2024")]
    IssueQueryNotAllowed(String),
}

/// Checks every invariant of an [`AuditConfig`] and reports all violations at once.
pub fn validate_config(config: AuditConfig) -> Result<AuditConfig, Vec<ConfigError>> {
    let mut errors = Vec::new();
    if config.engines.is_empty() {
        errors.push(ConfigError::NoEngines);
    }
    for (i, e) in config.engines.iter().enumerate() {
        if e.trim().is_empty() {
            errors.push(ConfigError::EmptyEngineId(i));
        }
    }
    if config.locations.is_empty() {
        errors.push(ConfigError::NoLocations);
    }
    let mut seen = HashSet::new();
    for (i, loc) in config.locations.iter().enumerate() {
        if loc.country_or_county.trim().is_empty() {
            errors.push(ConfigError::EmptyLocationId(i));
        } else if !seen.insert(loc.country_or_county.as_str()) {
            errors.push(ConfigError::DuplicateLocation(loc.country_or_county.clone()));
        }
    }
    if config.queries.is_empty() {
        errors.push(ConfigError::EmptyQuerySet);
    }
    if config.replicas_per_location == 0 {
        errors.push(ConfigError::BadReplicaCount(0));
    }
    let mut ids = HashSet::new();
    for (i, q) in config.queries.iter().enumerate() {
        let id = config.query_id(i);
        if q.text.trim().is_empty() {
            errors.push(ConfigError::EmptyQueryText(i));
        }
        if !config.languages.iter().any(|l| l == &q.language) {
            errors.push(ConfigError::UnknownLanguage {
                query: id.clone(),
                language: q.language.clone(),
            });
        }
        if q.kind == QueryKind::IssueQuery && config.election != Election::US2024 {
            errors.push(ConfigError::IssueQueryNotAllowed(id.clone()));
        }
        if !ids.insert(id.clone()) {
            errors.push(ConfigError::DuplicateQueryId(id));
        }
    }
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(errors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Section {
    Main,
    TopNews,
    PeopleAlsoAsk,
    LlmAnswer,
}

impl Section {
    pub fn is_serp(self) -> bool {
        self != Section::LlmAnswer
    }
}

/// Website taxonomy used to classify SERP domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteCategory {
    News,
    MediaPublications,
    ReferenceDefinition,
    ScienceAcademic,
    Political,
    SocialMedia,
    ForumsDiscussionBoards,
    EntertainmentServices,
    EcommerceRetailPlatforms,
    CorporateWebsites,
    EducationalPlatforms,
    SearchEnginesAggregators,
    UtilitiesTools,
    Blogs,
    AdultGamblingRestricted,
    FactCheckers,
}

impl SiteCategory {
    pub const ALL: [SiteCategory; 16] = [
        SiteCategory::News,
        SiteCategory::MediaPublications,
        SiteCategory::ReferenceDefinition,
        SiteCategory::ScienceAcademic,
        SiteCategory::Political,
        SiteCategory::SocialMedia,
        SiteCategory::ForumsDiscussionBoards,
        SiteCategory::EntertainmentServices,
        SiteCategory::EcommerceRetailPlatforms,
        SiteCategory::CorporateWebsites,
        SiteCategory::EducationalPlatforms,
        SiteCategory::SearchEnginesAggregators,
        SiteCategory::UtilitiesTools,
        SiteCategory::Blogs,
        SiteCategory::AdultGamblingRestricted,
        SiteCategory::FactCheckers,
    ];
}

/// One collected unit: a SERP item or an LLM answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub record_id: String,
    pub engine: String,
    pub location: String,
    pub language: String,
    pub query_id: String,
    pub replica: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    pub section: Section,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headline: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_category: Option<SiteCategory>,
    /// UTC epoch milliseconds.
    pub collected_at: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("field `{0}` is required")]
    Missing(&'static str),
    #[error("field `{0}` is not allowed for this section")]
    Forbidden(&'static str),
    #[error("rank must be >= 1")]
    BadRank,
    #[error("record_id is empty")]
    EmptyId,
}

impl ResultRecord {
    /// Checks the per-record invariants. Rank uniqueness spans records and is
    /// checked by the capture loader.
    pub fn check(&self) -> Result<(), RecordError> {
        if self.record_id.is_empty() {
            return Err(RecordError::EmptyId);
        }
        if self.section.is_serp() {
            if self.answer_text.is_some() {
                return Err(RecordError::Forbidden("answer_text"));
            }
            if self.url.is_none() {
                return Err(RecordError::Missing("url"));
            }
            if self.headline.is_none() {
                return Err(RecordError::Missing("headline"));
            }
            match self.rank {
                None => return Err(RecordError::Missing("rank")),
                Some(0) => return Err(RecordError::BadRank),
                Some(_) => {}
            }
        } else {
            if self.url.is_some() {
                return Err(RecordError::Forbidden("url"));
            }
            if self.headline.is_some() {
                return Err(RecordError::Forbidden("headline"));
            }
            if self.answer_text.is_none() {
                return Err(RecordError::Missing("answer_text"));
            }
            if self.rank == Some(0) {
                return Err(RecordError::BadRank);
            }
        }
        Ok(())
    }

    pub fn platform(&self) -> Platform {
        if self.section.is_serp() {
            Platform::SE
        } else {
            Platform::LLM
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    EU5,
    USParty,
    USIssue5,
}

impl Scheme {
    pub fn categories(self) -> &'static [Category] {
        use Category::*;
        match self {
            Scheme::EU5 => &[RadLeft, MainLeft, Greens, MainRight, RadRight],
            Scheme::USParty => &[Dem, Rep],
            Scheme::USIssue5 => &[RepPlusPlus, RepPlus, Neutral, DemPlus, DemPlusPlus],
        }
    }

    /// Number of categories in the scheme.
    pub fn k(self) -> usize {
        self.categories().len()
    }

    pub fn contains(self, c: Category) -> bool {
        c.scheme() == self
    }

    pub fn slug(self) -> &'static str {
        match self {
            Scheme::EU5 => "eu5",
            Scheme::USParty => "usparty",
            Scheme::USIssue5 => "usissue5",
        }
    }
}

impl FromStr for Scheme {
    type Err = ParseLabelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eu5" => Ok(Scheme::EU5),
            "usparty" | "us-party" => Ok(Scheme::USParty),
            "usissue5" | "us-issue5" | "usissue" => Ok(Scheme::USIssue5),
            _ => Err(ParseLabelError("scheme", s.to_string())),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {0} {1:?}")]
pub struct ParseLabelError(pub &'static str, pub String);

/// A leaning category. Declaration order within each scheme matches
/// [`Scheme::categories`], so the derived `Ord` is the reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    RadLeft,
    MainLeft,
    Greens,
    MainRight,
    RadRight,
    Dem,
    Rep,
    RepPlusPlus,
    RepPlus,
    Neutral,
    DemPlus,
    DemPlusPlus,
}

impl Category {
    pub fn scheme(self) -> Scheme {
        use Category::*;
        match self {
            RadLeft | MainLeft | Greens | MainRight | RadRight => Scheme::EU5,
            Dem | Rep => Scheme::USParty,
            RepPlusPlus | RepPlus | Neutral | DemPlus | DemPlusPlus => Scheme::USIssue5,
        }
    }

    /// Canonical identifier used in files.
    pub fn name(self) -> &'static str {
        use Category::*;
        match self {
            RadLeft => "RadLeft",
            MainLeft => "MainLeft",
            Greens => "Greens",
            MainRight => "MainRight",
            RadRight => "RadRight",
            Dem => "Dem",
            Rep => "Rep",
            RepPlusPlus => "Rep++",
            RepPlus => "Rep+",
            Neutral => "Neutral",
            DemPlus => "Dem+",
            DemPlusPlus => "Dem++",
        }
    }

    /// Short label used in rendered tables.
    pub fn label(self) -> &'static str {
        use Category::*;
        match self {
            RadLeft => "R. Left",
            MainLeft => "M. Left",
            Greens => "Greens",
            MainRight => "M. Right",
            RadRight => "R. Right",
            Dem => "Dem.",
            Rep => "Rep.",
            RepPlusPlus => "Rep ++",
            RepPlus => "Rep +",
            Neutral => "Neutral",
            DemPlus => "Dem +",
            DemPlusPlus => "Dem ++",
        }
    }

    /// The category on the opposite side of the axis (issue scheme only;
    /// other categories map to themselves).
    pub fn mirror(self) -> Category {
        use Category::*;
        match self {
            RepPlusPlus => DemPlusPlus,
            RepPlus => DemPlus,
            DemPlus => RepPlus,
            DemPlusPlus => RepPlusPlus,
            other => other,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = ParseLabelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use Category::*;
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| !matches!(c, ' ' | '.' | '_' | '-'))
            .collect();
        let c = match key.as_str() {
            "radleft" | "rl" | "radicalleft" | "rleft" => RadLeft,
            "mainleft" | "ml" | "mainstreamleft" | "mleft" => MainLeft,
            "greens" | "g" | "green" => Greens,
            "mainright" | "mr" | "mainstreamright" | "mright" => MainRight,
            "radright" | "rr" | "radicalright" | "rright" => RadRight,
            "dem" | "democratic" | "democrat" | "d" => Dem,
            "rep" | "republican" | "r" => Rep,
            "rep++" => RepPlusPlus,
            "rep+" => RepPlus,
            "neutral" => Neutral,
            "dem+" => DemPlus,
            "dem++" => DemPlusPlus,
            _ => return Err(ParseLabelError("category", s.to_string())),
        };
        Ok(c)
    }
}

impl Serialize for Category {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Category {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SourceField {
    Headline,
    Url,
    AnswerText,
}

/// A deduplicated reference to a political entity or issue in one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub record_id: String,
    pub raw_surface: String,
    pub resolved_party_or_topic: String,
    pub category: Category,
    pub source_field: SourceField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BenchmarkKind {
    Uniform,
    Media,
    Polls,
    PriorResults,
    IssueImportance,
}

impl BenchmarkKind {
    pub fn name(self) -> &'static str {
        match self {
            BenchmarkKind::Uniform => "uniform",
            BenchmarkKind::Media => "media",
            BenchmarkKind::Polls => "polls",
            BenchmarkKind::PriorResults => "prior",
            BenchmarkKind::IssueImportance => "issues",
        }
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkKind {
    type Err = ParseLabelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(BenchmarkKind::Uniform),
            "media" => Ok(BenchmarkKind::Media),
            "polls" | "poll" => Ok(BenchmarkKind::Polls),
            "prior" | "priorresults" | "prior_results" | "previous" => Ok(BenchmarkKind::PriorResults),
            "issues" | "issueimportance" | "issue_importance" => Ok(BenchmarkKind::IssueImportance),
            _ => Err(ParseLabelError("benchmark kind", s.to_string())),
        }
    }
}

pub const GLOBAL_STRATUM: &str = "GLOBAL";

/// Expected proportion per category, per stratum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub kind: BenchmarkKind,
    pub scheme: Scheme,
    pub strata: BTreeMap<String, BTreeMap<Category, f64>>,
}

impl Benchmark {
    pub fn uniform(scheme: Scheme) -> Self {
        let k = scheme.k() as f64;
        let row = scheme.categories().iter().map(|&c| (c, 1.0 / k)).collect();
        let mut strata = BTreeMap::new();
        strata.insert(GLOBAL_STRATUM.to_string(), row);
        Benchmark {
            kind: BenchmarkKind::Uniform,
            scheme,
            strata,
        }
    }

    /// The expected row for a stratum, falling back to the `GLOBAL` row.
    pub fn row(&self, stratum: &str) -> Option<&BTreeMap<Category, f64>> {
        self.strata.get(stratum).or_else(|| self.strata.get(GLOBAL_STRATUM))
    }

    /// Unweighted mean of the given strata's expected values.
    pub fn mean_row(&self, strata: &[&str]) -> Option<BTreeMap<Category, f64>> {
        let rows: Vec<_> = strata.iter().map(|s| self.row(s)).collect::<Option<_>>()?;
        if rows.is_empty() {
            return None;
        }
        let n = rows.len() as f64;
        Some(
            self.scheme
                .categories()
                .iter()
                .map(|&c| {
                    (
                        c,
                        rows.iter().map(|r| r.get(&c).copied().unwrap_or(0.0)).sum::<f64>() / n,
                    )
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestKind {
    BinomZ,
    BetaBinLRT,
    SignFlipPerm,
    Descriptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub scheme: Scheme,
    pub category: Category,
    /// Column the outcome is reported under (engine id).
    pub column: String,
    pub stratum: String,
    pub benchmark_kind: BenchmarkKind,
    pub diff_pp: f64,
    pub statistic: f64,
    pub test_kind: TestKind,
    pub p_raw: Option<f64>,
    pub p_adjusted: Option<f64>,
    pub n_units: usize,
}

impl TestOutcome {
    pub fn direction(&self) -> i8 {
        if self.diff_pp > 0.0 {
            1
        } else if self.diff_pp < 0.0 {
            -1
        } else {
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_eu() -> AuditConfig {
        AuditConfig {
            election: Election::EU2024,
            engines: vec!["google".into()],
            locations: vec![LocationSpec {
                country_or_county: "DE".into(),
                poll_leaning: None,
            }],
            languages: vec!["en".into()],
            queries: vec![QuerySpec {
                id: None,
                text: "european parliament elections".into(),
                language: "en".into(),
                kind: QueryKind::EntityQuery,
                platform: Platform::SE,
            }],
            replicas_per_location: 1,
            seed: 7,
        }
    }

    #[test]
    fn minimal_config_validates() {
        assert!(validate_config(minimal_eu()).is_ok());
    }

    #[test]
    fn zero_replicas_rejected() {
        let mut c = minimal_eu();
        c.replicas_per_location = 0;
        let errs = validate_config(c).unwrap_err();
        assert_eq!(errs, vec![ConfigError::BadReplicaCount(0)]);
    }

    #[test]
    fn issue_query_is_us_only() {
        let mut c = minimal_eu();
        c.queries[0].kind = QueryKind::IssueQuery;
        let errs = validate_config(c.clone()).unwrap_err();
        assert!(matches!(errs[0], ConfigError::IssueQueryNotAllowed(_)));
        c.election = Election::US2024;
        assert!(validate_config(c).is_ok());
    }

    #[test]
    fn every_violation_is_listed() {
        let mut c = minimal_eu();
        c.queries.clear();
        c.engines.clear();
        c.replicas_per_location = 0;
        let errs = validate_config(c).unwrap_err();
        assert!(errs.contains(&ConfigError::EmptyQuerySet));
        assert!(errs.contains(&ConfigError::NoEngines));
        assert!(errs.contains(&ConfigError::BadReplicaCount(0)));
    }

    #[test]
    fn unknown_language_and_duplicate_location() {
        let mut c = minimal_eu();
        c.queries[0].language = "pt".into();
        c.locations.push(c.locations[0].clone());
        let errs = validate_config(c).unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, ConfigError::UnknownLanguage { .. })));
        assert!(errs.contains(&ConfigError::DuplicateLocation("DE".into())));
    }

    #[test]
    fn seed_accepts_string_and_rejects_garbage() {
        let mut text = minimal_eu().to_toml();
        text = text.replace("seed = 7", "seed = \"18446744073709551615\"");
        assert_eq!(AuditConfig::from_toml(&text).unwrap().seed, u64::MAX);
        let bad = text.replace("seed = \"18446744073709551615\"", "seed = \"abc\"");
        assert!(AuditConfig::from_toml(&bad).is_err());
        let float = text.replace("seed = \"18446744073709551615\"", "seed = 1.5");
        assert!(AuditConfig::from_toml(&float).is_err());
    }

    #[test]
    fn scheme_sizes_and_order() {
        assert_eq!(Scheme::EU5.k(), 5);
        assert_eq!(Scheme::USParty.k(), 2);
        assert_eq!(Scheme::USIssue5.k(), 5);
        for s in [Scheme::EU5, Scheme::USParty, Scheme::USIssue5] {
            let cats = s.categories();
            assert!(cats.windows(2).all(|w| w[0] < w[1]));
            assert!(cats.iter().all(|c| c.scheme() == s));
        }
    }

    #[test]
    fn category_names_round_trip() {
        for s in [Scheme::EU5, Scheme::USParty, Scheme::USIssue5] {
            for &c in s.categories() {
                assert_eq!(c.name().parse::<Category>().unwrap(), c);
                assert_eq!(c.label().parse::<Category>().unwrap(), c);
            }
        }
        assert_eq!("RR".parse::<Category>().unwrap(), Category::RadRight);
    }

    #[test]
    fn serp_and_llm_record_shapes() {
        let mut r = ResultRecord {
            record_id: "x".into(),
            engine: "google".into(),
            location: "DE".into(),
            language: "en".into(),
            query_id: "q1".into(),
            replica: 0,
            rank: Some(1),
            section: Section::Main,
            url: Some("https://example.de/afd".into()),
            headline: Some("AfD".into()),
            answer_text: None,
            site_category: None,
            collected_at: 0,
        };
        assert!(r.check().is_ok());
        r.answer_text = Some("text".into());
        assert_eq!(r.check(), Err(RecordError::Forbidden("answer_text")));
        r.section = Section::LlmAnswer;
        r.url = None;
        r.headline = None;
        r.rank = None;
        assert!(r.check().is_ok());
    }

    #[test]
    fn uniform_benchmark_rows() {
        let b = Benchmark::uniform(Scheme::EU5);
        let row = b.row("anything").unwrap();
        assert!(row.values().all(|&v| (v - 0.2).abs() < 1e-15));
    }
}
