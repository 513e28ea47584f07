//! Loaders for capture files, benchmark tables, entity lexicons, issue
//! synonym lists and voter-survey tables.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::model::{Benchmark, BenchmarkKind, Category, ResultRecord, Scheme};
use crate::text::tokenize;

/// The fifteen policy issues tracked in the US issue scheme.
pub const ISSUE_TOPICS: [&str; 15] = [
    "Abortion",
    "Economy",
    "Healthcare",
    "Supreme Court appointments",
    "Foreign policy",
    "Violent crime",
    "Immigration",
    "Gun policy",
    "Terrorism",
    "Taxes and government spending",
    "Social Security",
    "Climate change and the environment",
    "Education",
    "Racial and ethnic inequality",
    "Civil rights and civil liberties",
];

/// Resolves a topic name to its canonical spelling, ignoring case and spacing
/// ("Health care" and "healthcare" both give "Healthcare").
pub fn canonical_topic(name: &str) -> Option<&'static str> {
    let key = |s: &str| -> String {
        s.chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect()
    };
    let k = key(name);
    ISSUE_TOPICS.iter().copied().find(|t| key(t) == k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineError {
    Parse { line: usize, message: String },
    Schema { line: usize, field: String },
}

impl std::fmt::Display for LineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LineError::Parse { line, message } => write!(f, "line {line}: parse error: {message}"),
            LineError::Schema { line, field } => write!(f, "line {line}: schema violation: {field}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid capture file:\n{}", .errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
    InvalidCapture { path: PathBuf, errors: Vec<LineError> },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: benchmark kind {kind} requires a file")]
    MissingPath { path: PathBuf, kind: BenchmarkKind },
    #[error("{path}: negative value for {category} in stratum {stratum:?}")]
    NegativeValue {
        path: PathBuf,
        stratum: String,
        category: Category,
    },
    #[error("{path}: stratum {stratum:?} is missing category {category}")]
    MissingCategory {
        path: PathBuf,
        stratum: String,
        category: Category,
    },
    #[error("{path}: stratum {stratum:?} sums to zero")]
    ZeroTotal { path: PathBuf, stratum: String },
    #[error("{path}: column {column:?} is not a category of scheme {scheme}")]
    ForeignCategory {
        path: PathBuf,
        column: String,
        scheme: Scheme,
    },
    #[error("{path}: unreadable value {value:?} at line {line}")]
    BadValue { path: PathBuf, line: usize, value: String },
    #[error("{path}: duplicate stratum {stratum:?}")]
    DuplicateStratum { path: PathBuf, stratum: String },
    #[error("{path}: surface {surface:?} is listed twice for country {country:?}")]
    DuplicateSurface {
        path: PathBuf,
        surface: String,
        country: String,
    },
    #[error("{path}: {id:?} has no party or family mapping")]
    UnmappedParty { path: PathBuf, id: String },
    #[error("{path}: line {line}: {message}")]
    BadRow {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: survey {survey:?} topic {topic:?}: selections exceed totals")]
    SelectionExceedsTotal {
        path: PathBuf,
        survey: String,
        topic: String,
    },
    #[error("{path}: unknown issue topic {topic:?}")]
    UnknownTopic { path: PathBuf, topic: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> IngestError + '_ {
    move |source| IngestError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

// ---------------------------------------------------------------- captures

/// Parses newline-delimited JSON capture records. Blank lines are skipped.
pub fn parse_results<R: Read>(reader: R, path: &Path) -> Result<Vec<ResultRecord>, IngestError> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut ranks: HashMap<(String, String, u32, String, crate::model::Section, u32), usize> = HashMap::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ResultRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                errors.push(LineError::Parse {
                    line: lineno,
                    message: e.to_string(),
                });
                continue;
            }
        };
        if let Err(e) = rec.check() {
            errors.push(LineError::Schema {
                line: lineno,
                field: e.to_string(),
            });
            continue;
        }
        if let Some(rank) = rec.rank {
            let key = (
                rec.engine.clone(),
                rec.location.clone(),
                rec.replica,
                rec.query_id.clone(),
                rec.section,
                rank,
            );
            if let Some(first) = ranks.insert(key, lineno) {
                errors.push(LineError::Schema {
                    line: lineno,
                    field: format!("rank {rank} already used on line {first}"),
                });
                continue;
            }
        }
        records.push(rec);
    }
    if errors.is_empty() {
        Ok(records)
    } else {
        Err(IngestError::InvalidCapture {
            path: path.to_path_buf(),
            errors,
        })
    }
}

pub fn load_results(path: &Path) -> Result<Vec<ResultRecord>, IngestError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    parse_results(file, path)
}

/// Serializes records in the capture format, one JSON object per line.
pub fn write_results<W: Write>(mut out: W, records: &[ResultRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

// -------------------------------------------------------------- benchmarks

fn parse_number(raw: &str) -> Option<f64> {
    let t = raw.trim().trim_end_matches('%').trim();
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses a wide benchmark table: a `stratum` column followed by one column
/// per category. Values may be counts, proportions or percentages; each
/// stratum is normalized to sum to one.
pub fn parse_benchmark<R: Read>(
    reader: R,
    path: &Path,
    kind: BenchmarkKind,
    scheme: Scheme,
) -> Result<Benchmark, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let mut columns: Vec<(usize, Category)> = Vec::new();
    let mut stratum_col = None;
    for (i, h) in headers.iter().enumerate() {
        if h.eq_ignore_ascii_case("stratum") {
            stratum_col = Some(i);
            continue;
        }
        match h.parse::<Category>() {
            Ok(c) if scheme.contains(c) => columns.push((i, c)),
            _ => {
                return Err(IngestError::ForeignCategory {
                    path: path.to_path_buf(),
                    column: h.to_string(),
                    scheme,
                })
            }
        }
    }
    let stratum_col = stratum_col.ok_or_else(|| IngestError::BadRow {
        path: path.to_path_buf(),
        line: 1,
        message: "header has no `stratum` column".into(),
    })?;

    let mut strata = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_err(path))?;
        let line = i + 2;
        let stratum = row.get(stratum_col).unwrap_or("").to_string();
        let mut values = BTreeMap::new();
        for (col, cat) in &columns {
            let raw = row.get(*col).unwrap_or("");
            if raw.trim().is_empty() {
                continue;
            }
            let v = parse_number(raw).ok_or_else(|| IngestError::BadValue {
                path: path.to_path_buf(),
                line,
                value: raw.to_string(),
            })?;
            if v < 0.0 {
                return Err(IngestError::NegativeValue {
                    path: path.to_path_buf(),
                    stratum,
                    category: *cat,
                });
            }
            values.insert(*cat, v);
        }
        if let Some(&missing) = scheme.categories().iter().find(|c| !values.contains_key(c)) {
            return Err(IngestError::MissingCategory {
                path: path.to_path_buf(),
                stratum,
                category: missing,
            });
        }
        let total: f64 = values.values().sum();
        if total <= 0.0 {
            return Err(IngestError::ZeroTotal {
                path: path.to_path_buf(),
                stratum,
            });
        }
        let row: BTreeMap<Category, f64> = values.into_iter().map(|(c, v)| (c, v / total)).collect();
        if strata.insert(stratum.clone(), row).is_some() {
            return Err(IngestError::DuplicateStratum {
                path: path.to_path_buf(),
                stratum,
            });
        }
    }
    Ok(Benchmark { kind, scheme, strata })
}

/// Loads a benchmark. The uniform benchmark needs no file.
pub fn load_benchmark(path: Option<&Path>, kind: BenchmarkKind, scheme: Scheme) -> Result<Benchmark, IngestError> {
    if kind == BenchmarkKind::Uniform {
        return Ok(Benchmark::uniform(scheme));
    }
    let path = path.ok_or_else(|| IngestError::MissingPath {
        path: PathBuf::new(),
        kind,
    })?;
    let file = fs::File::open(path).map_err(io_err(path))?;
    parse_benchmark(file, path, kind, scheme)
}

// ----------------------------------------------------------------- lexicon

/// What a lexicon surface resolves to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconTarget {
    /// A national party (or US party) id in `party_map`.
    Party(String),
    /// An EU parliamentary group / family id in `family_map`.
    Family(String),
    /// A political-spectrum term ("the left") with no explicit mapping.
    Spectrum,
}

impl LexiconTarget {
    pub fn id(&self) -> &str {
        match self {
            LexiconTarget::Party(id) | LexiconTarget::Family(id) => id,
            LexiconTarget::Spectrum => crate::extract::UNRESOLVED_SPECTRUM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// Case-folded surface form as written in the lexicon.
    pub surface: String,
    pub tokens: Vec<String>,
    pub target: LexiconTarget,
    /// Location the entry applies to; `None` applies everywhere.
    pub country: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyInfo {
    pub family: Option<String>,
    /// Explicit leaning; `None` defers to the family. Excluded parties carry
    /// `Some(None)`.
    pub leaning: Option<Option<Category>>,
}

/// Surface patterns, party→family and family→category associations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityLexicon {
    pub entries: Vec<LexiconEntry>,
    pub party_map: BTreeMap<String, PartyInfo>,
    /// Family id → category. `None` marks a family excluded from counting
    /// (non-attached members, for instance).
    pub family_map: BTreeMap<String, Option<Category>>,
    /// Institution names masked before matching.
    pub ignore: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
struct LexiconRow {
    kind: String,
    key: String,
    #[serde(default)]
    target: String,
    #[serde(default)]
    extra: String,
}

fn parse_optional_category(raw: &str) -> Result<Option<Option<Category>>, String> {
    let t = raw.trim();
    if t.is_empty() {
        return Ok(None);
    }
    if t.eq_ignore_ascii_case("none") || t == "-" {
        return Ok(Some(None));
    }
    t.parse::<Category>().map(|c| Some(Some(c))).map_err(|e| e.to_string())
}

/// Parses a lexicon table with header `kind,key,target,extra`.
///
/// | kind     | key             | target                   | extra                 |
/// |----------|-----------------|--------------------------|-----------------------|
/// | entity   | surface form    | party or family id       | country (blank = any) |
/// | spectrum | surface form    | (blank)                  | country               |
/// | ignore   | surface form    |                          |                       |
/// | party    | party id        | family id (optional)     | leaning / `none`      |
/// | family   | family id       | category / `none` / blank (mode of members) |  |
pub fn parse_lexicon<R: Read>(reader: R, path: &Path) -> Result<EntityLexicon, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let bad = |line: usize, message: String| IngestError::BadRow {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lex = EntityLexicon::default();
    let mut explicit_families: BTreeMap<String, Option<Category>> = BTreeMap::new();
    let mut declared_families: HashSet<String> = HashSet::new();
    let mut raw_entries: Vec<(usize, String, String, String, bool)> = Vec::new();

    for (i, row) in rdr.deserialize::<LexiconRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(csv_err(path))?;
        match row.kind.to_ascii_lowercase().as_str() {
            "entity" => raw_entries.push((line, row.key, row.target, row.extra, false)),
            "spectrum" => raw_entries.push((line, row.key, row.target, row.extra, true)),
            "ignore" => {
                let toks = tokenize(&row.key);
                if toks.is_empty() {
                    return Err(bad(line, "empty ignore pattern".into()));
                }
                lex.ignore.push(toks);
            }
            "party" => {
                let leaning = parse_optional_category(&row.extra).map_err(|m| bad(line, m))?;
                let family = Some(row.target.clone()).filter(|f| !f.is_empty());
                if let Some(f) = &family {
                    declared_families.insert(f.clone());
                }
                if lex
                    .party_map
                    .insert(row.key.clone(), PartyInfo { family, leaning })
                    .is_some()
                {
                    return Err(bad(line, format!("party {:?} defined twice", row.key)));
                }
            }
            "family" => {
                declared_families.insert(row.key.clone());
                if let Some(c) = parse_optional_category(&row.target).map_err(|m| bad(line, m))? {
                    explicit_families.insert(row.key.clone(), c);
                }
            }
            other => return Err(bad(line, format!("unknown row kind {other:?}"))),
        }
    }

    // Families without an explicit category take the mode of their member
    // parties' leanings; ties go to the earliest category in scheme order.
    for fam in &declared_families {
        if let Some(c) = explicit_families.get(fam) {
            lex.family_map.insert(fam.clone(), *c);
            continue;
        }
        let mut counts: BTreeMap<Category, usize> = BTreeMap::new();
        for p in lex.party_map.values() {
            if p.family.as_deref() == Some(fam.as_str()) {
                if let Some(Some(c)) = p.leaning {
                    *counts.entry(c).or_default() += 1;
                }
            }
        }
        let best = counts
            .iter()
            .map(|(&c, &n)| (n, c))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        match best {
            Some((_, c)) => {
                lex.family_map.insert(fam.clone(), Some(c));
            }
            None => {
                return Err(IngestError::UnmappedParty {
                    path: path.to_path_buf(),
                    id: fam.clone(),
                })
            }
        }
    }

    for (id, info) in &lex.party_map {
        let resolvable = match info.leaning {
            Some(_) => true,
            None => info.family.as_ref().is_some_and(|f| lex.family_map.contains_key(f)),
        };
        if !resolvable {
            return Err(IngestError::UnmappedParty {
                path: path.to_path_buf(),
                id: id.clone(),
            });
        }
    }

    let mut seen: HashSet<(Vec<String>, String)> = HashSet::new();
    for (line, surface, target, country, spectrum) in raw_entries {
        let tokens = tokenize(&surface);
        if tokens.is_empty() {
            return Err(bad(line, format!("surface {surface:?} has no word characters")));
        }
        let target = if target.is_empty() {
            if spectrum {
                LexiconTarget::Spectrum
            } else {
                return Err(IngestError::UnmappedParty {
                    path: path.to_path_buf(),
                    id: surface,
                });
            }
        } else if lex.party_map.contains_key(&target) {
            LexiconTarget::Party(target)
        } else if lex.family_map.contains_key(&target) {
            LexiconTarget::Family(target)
        } else {
            return Err(IngestError::UnmappedParty {
                path: path.to_path_buf(),
                id: target,
            });
        };
        if !seen.insert((tokens.clone(), country.clone())) {
            return Err(IngestError::DuplicateSurface {
                path: path.to_path_buf(),
                surface,
                country,
            });
        }
        lex.entries.push(LexiconEntry {
            surface: surface.to_lowercase(),
            tokens,
            target,
            country: Some(country).filter(|c| !c.is_empty()),
        });
    }
    Ok(lex)
}

pub fn load_lexicon(path: &Path) -> Result<EntityLexicon, IngestError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    parse_lexicon(file, path)
}

// ------------------------------------------------------------------ issues

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueTopic {
    pub name: &'static str,
    /// Tokenized patterns: the topic name itself plus every synonym.
    pub patterns: Vec<Vec<String>>,
}

/// The canonical issue topics with their synonym patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueList {
    pub topics: Vec<IssueTopic>,
}

impl IssueList {
    /// Topic names only, no synonyms.
    pub fn bare() -> Self {
        IssueList {
            topics: ISSUE_TOPICS
                .iter()
                .map(|&name| IssueTopic {
                    name,
                    patterns: vec![tokenize(name)],
                })
                .collect(),
        }
    }
}

/// Parses a `topic,synonym` table; every canonical topic is always present.
pub fn parse_issue_list<R: Read>(reader: R, path: &Path) -> Result<IssueList, IngestError> {
    let mut list = IssueList::bare();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_err(path))?;
        let topic = row.get(0).unwrap_or("");
        let synonym = row.get(1).unwrap_or("");
        let name = canonical_topic(topic).ok_or_else(|| IngestError::UnknownTopic {
            path: path.to_path_buf(),
            topic: topic.to_string(),
        })?;
        let toks = tokenize(synonym);
        if toks.is_empty() {
            return Err(IngestError::BadRow {
                path: path.to_path_buf(),
                line: i + 2,
                message: "empty synonym".into(),
            });
        }
        let entry = list.topics.iter_mut().find(|t| t.name == name).expect("canonical");
        if !entry.patterns.contains(&toks) {
            entry.patterns.push(toks);
        }
    }
    Ok(list)
}

pub fn load_issue_list(path: &Path) -> Result<IssueList, IngestError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    parse_issue_list(file, path)
}

// ----------------------------------------------------------------- surveys

/// Per-topic counts of Republican and Democratic respondents selecting it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyTable {
    pub survey_id: String,
    /// topic → (n_rep_selected, n_dem_selected)
    pub rows: BTreeMap<String, (u64, u64)>,
    pub n_rep_total: u64,
    pub n_dem_total: u64,
}

#[derive(Debug, Deserialize)]
struct SurveyRow {
    survey_id: String,
    topic: String,
    n_rep_selected: u64,
    n_dem_selected: u64,
    n_rep_total: u64,
    n_dem_total: u64,
}

/// Parses survey rows with header
/// `survey_id,topic,n_rep_selected,n_dem_selected,n_rep_total,n_dem_total`.
/// One file may hold several surveys; totals must agree within a survey.
pub fn parse_surveys<R: Read>(reader: R, path: &Path) -> Result<Vec<SurveyTable>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut tables: Vec<SurveyTable> = Vec::new();
    for (i, row) in rdr.deserialize::<SurveyRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(csv_err(path))?;
        let topic = canonical_topic(&row.topic).ok_or_else(|| IngestError::UnknownTopic {
            path: path.to_path_buf(),
            topic: row.topic.clone(),
        })?;
        if row.n_rep_total == 0 || row.n_dem_total == 0 {
            return Err(IngestError::BadRow {
                path: path.to_path_buf(),
                line,
                message: "totals must be positive".into(),
            });
        }
        if row.n_rep_selected > row.n_rep_total || row.n_dem_selected > row.n_dem_total {
            return Err(IngestError::SelectionExceedsTotal {
                path: path.to_path_buf(),
                survey: row.survey_id,
                topic: topic.to_string(),
            });
        }
        let idx = match tables.iter().position(|t| t.survey_id == row.survey_id) {
            Some(idx) => idx,
            None => {
                tables.push(SurveyTable {
                    survey_id: row.survey_id.clone(),
                    rows: BTreeMap::new(),
                    n_rep_total: row.n_rep_total,
                    n_dem_total: row.n_dem_total,
                });
                tables.len() - 1
            }
        };
        let table = &mut tables[idx];
        if table.n_rep_total != row.n_rep_total || table.n_dem_total != row.n_dem_total {
            return Err(IngestError::BadRow {
                path: path.to_path_buf(),
                line,
                message: format!("totals disagree with earlier rows of survey {:?}", row.survey_id),
            });
        }
        if table
            .rows
            .insert(topic.to_string(), (row.n_rep_selected, row.n_dem_selected))
            .is_some()
        {
            return Err(IngestError::BadRow {
                path: path.to_path_buf(),
                line,
                message: format!("topic {topic:?} repeated"),
            });
        }
    }
    Ok(tables)
}

pub fn load_surveys<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<SurveyTable>, IngestError> {
    let mut out = Vec::new();
    for p in paths {
        let path = p.as_ref();
        let file = fs::File::open(path).map_err(io_err(path))?;
        out.extend(parse_surveys(file, path)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("test.csv")
    }

    const SERP_LINE: &str = r#"{"record_id":"g:DE:q1:r0:Main:1","engine":"google","location":"DE","language":"en","query_id":"q1","replica":0,"rank":1,"section":"Main","url":"https://example.de/afd-news","headline":"AfD surges in polls","collected_at":1717632000000}"#;

    #[test]
    fn empty_capture_is_empty() {
        assert!(parse_results("".as_bytes(), p()).unwrap().is_empty());
    }

    #[test]
    fn single_serp_line() {
        let recs = parse_results(SERP_LINE.as_bytes(), p()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].section, crate::model::Section::Main);
    }

    #[test]
    fn url_plus_answer_is_schema_violation() {
        let line = SERP_LINE.replace(r#""collected_at""#, r#""answer_text":"hi","collected_at""#);
        match parse_results(line.as_bytes(), p()) {
            Err(IngestError::InvalidCapture { errors, .. }) => {
                assert!(matches!(&errors[0], LineError::Schema { line: 1, field } if field.contains("answer_text")))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_reported_with_numbers() {
        let text = format!("{SERP_LINE}\n\nnot json\n{SERP_LINE}\n");
        match parse_results(text.as_bytes(), p()) {
            Err(IngestError::InvalidCapture { errors, .. }) => {
                assert_eq!(errors.len(), 2);
                assert!(matches!(errors[0], LineError::Parse { line: 3, .. }));
                // same rank reused within the page
                assert!(matches!(errors[1], LineError::Schema { line: 4, .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn seats_normalize_to_proportions() {
        let csv = "stratum,RR,MR,ML,G,RL\nDE,2,3,3,1,1\n";
        let b = parse_benchmark(csv.as_bytes(), p(), BenchmarkKind::Polls, Scheme::EU5).unwrap();
        let row = &b.strata["DE"];
        let expect = [
            (Category::RadRight, 0.2),
            (Category::MainRight, 0.3),
            (Category::MainLeft, 0.3),
            (Category::Greens, 0.1),
            (Category::RadLeft, 0.1),
        ];
        for (c, v) in expect {
            assert!((row[&c] - v).abs() < 1e-12, "{c}");
        }
    }

    #[test]
    fn percentages_accepted() {
        let csv = "stratum,Dem,Rep\nPA,48.5%,51.5%\n";
        let b = parse_benchmark(csv.as_bytes(), p(), BenchmarkKind::Polls, Scheme::USParty).unwrap();
        assert!((b.strata["PA"][&Category::Dem] - 0.485).abs() < 1e-12);
    }

    #[test]
    fn uniform_eu5_is_a_fifth_each() {
        let b = load_benchmark(None, BenchmarkKind::Uniform, Scheme::EU5).unwrap();
        for &c in Scheme::EU5.categories() {
            assert_eq!(b.row("GLOBAL").unwrap()[&c], 0.2);
        }
    }

    #[test]
    fn benchmark_errors() {
        let missing = "stratum,RadRight,MainRight,MainLeft,RadLeft\nDE,1,1,1,1\n";
        assert!(matches!(
            parse_benchmark(missing.as_bytes(), p(), BenchmarkKind::Polls, Scheme::EU5),
            Err(IngestError::MissingCategory {
                category: Category::Greens,
                ..
            })
        ));
        let blank = "stratum,RadRight,MainRight,MainLeft,Greens,RadLeft\nDE,1,1,1,,1\n";
        assert!(matches!(
            parse_benchmark(blank.as_bytes(), p(), BenchmarkKind::Polls, Scheme::EU5),
            Err(IngestError::MissingCategory { .. })
        ));
        let neg = "stratum,Dem,Rep\nUS,-1,2\n";
        assert!(matches!(
            parse_benchmark(neg.as_bytes(), p(), BenchmarkKind::Polls, Scheme::USParty),
            Err(IngestError::NegativeValue { .. })
        ));
        let zero = "stratum,Dem,Rep\nUS,0,0\n";
        assert!(matches!(
            parse_benchmark(zero.as_bytes(), p(), BenchmarkKind::Polls, Scheme::USParty),
            Err(IngestError::ZeroTotal { .. })
        ));
        assert!(matches!(
            load_benchmark(None, BenchmarkKind::Media, Scheme::USParty),
            Err(IngestError::MissingPath { .. })
        ));
    }

    const LEX: &str = "kind,key,target,extra
family,ID,RadRight,
family,ECR,,
party,Alternative for Germany - Germany,ID,
party,Brothers of Italy - Italy,ECR,RadRight
party,Law and Justice - Poland,ECR,RadRight
entity,afd,Alternative for Germany - Germany,
entity,ECR,ECR,
";

    #[test]
    fn lexicon_resolves_entries_and_family_mode() {
        let lex = parse_lexicon(LEX.as_bytes(), p()).unwrap();
        assert_eq!(lex.entries.len(), 2);
        assert_eq!(
            lex.entries[0].target,
            LexiconTarget::Party("Alternative for Germany - Germany".into())
        );
        assert_eq!(lex.entries[1].target, LexiconTarget::Family("ECR".into()));
        assert_eq!(lex.family_map["ECR"], Some(Category::RadRight));
    }

    #[test]
    fn lexicon_rejects_unmapped_and_duplicates() {
        let unmapped = "kind,key,target,extra\nentity,xyz,Nobody Party,\n";
        assert!(matches!(
            parse_lexicon(unmapped.as_bytes(), p()),
            Err(IngestError::UnmappedParty { .. })
        ));
        let dup = format!("{LEX}entity,AfD,Alternative for Germany - Germany,\n");
        assert!(matches!(
            parse_lexicon(dup.as_bytes(), p()),
            Err(IngestError::DuplicateSurface { .. })
        ));
        let orphan = "kind,key,target,extra\nparty,Loose Party,,\n";
        assert!(matches!(
            parse_lexicon(orphan.as_bytes(), p()),
            Err(IngestError::UnmappedParty { .. })
        ));
    }

    #[test]
    fn empty_lexicon_is_valid() {
        let lex = parse_lexicon("kind,key,target,extra\n".as_bytes(), p()).unwrap();
        assert!(lex.entries.is_empty());
    }

    #[test]
    fn survey_rows_stored_verbatim() {
        let csv = "survey_id,topic,n_rep_selected,n_dem_selected,n_rep_total,n_dem_total
pew,Economy,600,200,1000,1000
";
        let t = parse_surveys(csv.as_bytes(), p()).unwrap();
        assert_eq!(t[0].rows["Economy"], (600, 200));
        assert_eq!((t[0].n_rep_total, t[0].n_dem_total), (1000, 1000));
    }

    #[test]
    fn survey_selection_over_total_rejected() {
        let csv = "survey_id,topic,n_rep_selected,n_dem_selected,n_rep_total,n_dem_total
pew,Economy,1001,200,1000,1000
";
        assert!(matches!(
            parse_surveys(csv.as_bytes(), p()),
            Err(IngestError::SelectionExceedsTotal { .. })
        ));
    }

    #[test]
    fn topic_spelling_is_canonicalized() {
        assert_eq!(canonical_topic("Health care"), Some("Healthcare"));
        assert_eq!(
            canonical_topic("civil rights and civil liberties"),
            Some("Civil rights and civil liberties")
        );
        assert_eq!(canonical_topic("Weather"), None);
    }
}
