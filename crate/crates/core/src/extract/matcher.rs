use crate::ingest::{EntityLexicon, IssueList, LexiconEntry};
use crate::model::{ResultRecord, SourceField};
use crate::text::{find_token_runs, tokenize};

use super::RawHit;

fn record_fields(record: &ResultRecord) -> Vec<(SourceField, &str)> {
    let mut out = Vec::new();
    if record.section.is_serp() {
        if let Some(h) = &record.headline {
            out.push((SourceField::Headline, h.as_str()));
        }
        if let Some(u) = &record.url {
            out.push((SourceField::Url, u.as_str()));
        }
    } else if let Some(a) = &record.answer_text {
        out.push((SourceField::AnswerText, a.as_str()));
    }
    out
}

// Matched or ignored spans are blanked so shorter patterns cannot re-match
// inside them. Blank tokens never equal a pattern token.
fn mask(tokens: &mut [String], at: usize, len: usize) {
    for t in &mut tokens[at..at + len] {
        t.clear();
    }
}

/// Longest-pattern-first matching over one field. Each pattern is reported
/// at most once per field.
fn scan<'a, T>(text: &str, ignore: &[Vec<String>], patterns: &[(&'a [String], T)]) -> Vec<(usize, &'a [String], T)>
where
    T: Copy,
{
    let mut tokens = tokenize(text);
    for pat in ignore {
        for at in find_token_runs(&tokens, pat) {
            mask(&mut tokens, at, pat.len());
        }
    }
    let mut order: Vec<usize> = (0..patterns.len()).collect();
    order.sort_by(|&a, &b| patterns[b].0.len().cmp(&patterns[a].0.len()).then(a.cmp(&b)));
    let mut found = Vec::new();
    for i in order {
        let (pat, payload) = patterns[i];
        let runs = find_token_runs(&tokens, pat);
        // Runs are rechecked after each mask: overlapping runs of the same
        // pattern must not both count.
        let mut first = None;
        for at in runs {
            if tokens[at..at + pat.len()] == *pat {
                mask(&mut tokens, at, pat.len());
                first.get_or_insert(at);
            }
        }
        if let Some(at) = first {
            found.push((at, pat, payload));
        }
    }
    found.sort_by_key(|(at, _, _)| *at);
    found
}

fn applicable<'a>(lexicon: &'a EntityLexicon, location: &str) -> Vec<&'a LexiconEntry> {
    // Country-specific entries shadow global entries with the same tokens.
    let specific: Vec<&LexiconEntry> = lexicon
        .entries
        .iter()
        .filter(|e| e.country.as_deref() == Some(location))
        .collect();
    let mut out = specific.clone();
    out.extend(
        lexicon
            .entries
            .iter()
            .filter(|e| e.country.is_none() && !specific.iter().any(|s| s.tokens == e.tokens)),
    );
    out
}

/// Finds lexicon surfaces in a record with word-boundary, case-insensitive
/// semantics. SERP records scan headline and URL, LLM records the answer.
pub fn match_lexicon(record: &ResultRecord, lexicon: &EntityLexicon) -> Vec<RawHit> {
    let entries = applicable(lexicon, &record.location);
    let patterns: Vec<(&[String], &LexiconEntry)> = entries.iter().map(|e| (e.tokens.as_slice(), *e)).collect();
    let mut hits = Vec::new();
    for (field, text) in record_fields(record) {
        for (_, _, entry) in scan(text, &lexicon.ignore, &patterns) {
            hits.push(RawHit {
                record_id: record.record_id.clone(),
                surface: entry.surface.clone(),
                party_or_topic: entry.target.id().to_string(),
                source_field: field,
            });
        }
    }
    hits
}

/// Finds issue topics (by name or synonym) in a record.
pub fn match_issues(record: &ResultRecord, issues: &IssueList) -> Vec<RawHit> {
    let patterns: Vec<(&[String], &'static str)> = issues
        .topics
        .iter()
        .flat_map(|t| t.patterns.iter().map(move |p| (p.as_slice(), t.name)))
        .collect();
    let mut hits = Vec::new();
    for (field, text) in record_fields(record) {
        let mut seen = Vec::new();
        for (_, pat, topic) in scan(text, &[], &patterns) {
            if seen.contains(&topic) {
                continue;
            }
            seen.push(topic);
            hits.push(RawHit {
                record_id: record.record_id.clone(),
                surface: pat.join(" "),
                party_or_topic: topic.to_string(),
                source_field: field,
            });
        }
    }
    hits
}
