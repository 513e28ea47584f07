//! Remote entity extraction through a chat-completion endpoint.
//!
//! Prompts are plain-text templates with `{url}`, `{headline}` and `{answer}`
//! placeholders. The model is expected to reply with a line of the form
//!
//! ```text
//! ENTITIES: Christian Democratic Union - Germany; Alternative for Germany - Germany
//! ```
//!
//! or `ENTITIES: none`. Replies without that line are format errors and the
//! record is flagged for manual review.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde_json::json;
use thiserror::Error;

use crate::ingest::EntityLexicon;
use crate::model::{ResultRecord, SourceField};

use super::RawHit;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RemoteError {
    #[error("remote extractor unavailable: {0}")]
    RemoteUnavailable(String),
    #[error("remote extractor returned an unparseable reply: {0}")]
    RemoteFormatError(String),
    #[error("remote extractor rate limited")]
    RateLimited,
}

/// One chat-style completion round trip.
pub trait ChatClient: Sync {
    fn complete(&self, prompt: &str) -> Result<String, RemoteError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("prompt template has none of the placeholders {{url}}, {{headline}}, {{answer}}")]
    NoPlaceholders,
    #[error("cannot read prompt template {0}: {1}")]
    Io(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    text: String,
}

impl PromptTemplate {
    pub fn new(text: impl Into<String>) -> Result<Self, TemplateError> {
        let text = text.into();
        if !["{url}", "{headline}", "{answer}"].iter().any(|p| text.contains(p)) {
            return Err(TemplateError::NoPlaceholders);
        }
        Ok(PromptTemplate { text })
    }

    pub fn load(path: &Path) -> Result<Self, TemplateError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| TemplateError::Io(path.display().to_string(), e.to_string()))?;
        Self::new(text)
    }

    pub fn render(&self, record: &ResultRecord) -> String {
        self.text
            .replace("{url}", record.url.as_deref().unwrap_or(""))
            .replace("{headline}", record.headline.as_deref().unwrap_or(""))
            .replace("{answer}", record.answer_text.as_deref().unwrap_or(""))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_millis(500),
        }
    }
}

/// Parses the `ENTITIES:` line of a model reply into names.
pub fn parse_entity_reply(reply: &str) -> Result<Vec<String>, RemoteError> {
    let line = reply
        .lines()
        .map(str::trim)
        .find_map(|l| {
            let (head, rest) = l.split_once(':')?;
            head.trim().eq_ignore_ascii_case("entities").then_some(rest)
        })
        .ok_or_else(|| RemoteError::RemoteFormatError(reply.chars().take(80).collect()))?;
    let rest = line.trim();
    if rest.is_empty() || rest.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    Ok(rest
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect())
}

fn complete_with_retry(client: &dyn ChatClient, prompt: &str, retry: RetryPolicy) -> Result<String, RemoteError> {
    let mut attempt = 0;
    loop {
        attempt += 1;
        match client.complete(prompt) {
            Err(RemoteError::RateLimited) if attempt < retry.max_attempts => {
                std::thread::sleep(retry.base_delay * 2u32.pow(attempt - 1));
            }
            other => return other,
        }
    }
}

/// Extracts hits for one record through `client`. Names that match a lexicon
/// party or family id (case-insensitively) are mapped to that id; others are
/// kept verbatim and left for the resolver to drop.
pub fn extract_remote(
    record: &ResultRecord,
    client: &dyn ChatClient,
    template: &PromptTemplate,
    lexicon: &EntityLexicon,
    retry: RetryPolicy,
) -> Result<Vec<RawHit>, RemoteError> {
    let reply = complete_with_retry(client, &template.render(record), retry)?;
    let field = if record.section.is_serp() {
        SourceField::Headline
    } else {
        SourceField::AnswerText
    };
    let resolve = |name: &str| -> String {
        lexicon
            .party_map
            .keys()
            .chain(lexicon.family_map.keys())
            .find(|k| k.eq_ignore_ascii_case(name))
            .cloned()
            .unwrap_or_else(|| name.to_string())
    };
    Ok(parse_entity_reply(&reply)?
        .into_iter()
        .map(|name| RawHit {
            record_id: record.record_id.clone(),
            party_or_topic: resolve(&name),
            surface: name,
            source_field: field,
        })
        .collect())
}

#[derive(Debug, Default)]
pub struct RemoteBatch {
    /// Hits per record, ordered by record id.
    pub hits: Vec<(String, Vec<RawHit>)>,
    /// Records needing manual review, with the reason, ordered by record id.
    pub flagged: Vec<(String, RemoteError)>,
}

/// Runs [`extract_remote`] over many records with at most `concurrency`
/// requests in flight. Output order depends only on record ids.
pub fn extract_remote_batch(
    records: &[ResultRecord],
    client: &dyn ChatClient,
    template: &PromptTemplate,
    lexicon: &EntityLexicon,
    retry: RetryPolicy,
    concurrency: usize,
) -> RemoteBatch {
    let next = AtomicUsize::new(0);
    type Slot = (usize, Result<Vec<RawHit>, RemoteError>);
    let results: Mutex<Vec<Slot>> = Mutex::new(Vec::new());
    let workers = concurrency.max(1).min(records.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(rec) = records.get(i) else { break };
                let r = extract_remote(rec, client, template, lexicon, retry);
                results.lock().expect("poisoned").push((i, r));
            });
        }
    });
    let mut results = results.into_inner().expect("poisoned");
    results.sort_by(|a, b| records[a.0].record_id.cmp(&records[b.0].record_id).then(a.0.cmp(&b.0)));
    let mut batch = RemoteBatch::default();
    for (i, r) in results {
        let id = records[i].record_id.clone();
        match r {
            Ok(h) => batch.hits.push((id, h)),
            Err(e) => batch.flagged.push((id, e)),
        }
    }
    batch
}

/// OpenAI-style chat-completions client over HTTP.
pub struct HttpChatClient {
    endpoint: String,
    api_key: String,
    model: String,
    agent: ureq::Agent,
}

impl HttpChatClient {
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>, model: impl Into<String>) -> Self {
        HttpChatClient {
            endpoint: endpoint.into(),
            api_key: api_key.into(),
            model: model.into(),
            agent: ureq::AgentBuilder::new().timeout(Duration::from_secs(60)).build(),
        }
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, prompt: &str) -> Result<String, RemoteError> {
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        });
        let resp = self
            .agent
            .post(&self.endpoint)
            .set("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(body);
        let resp = match resp {
            Ok(r) => r,
            Err(ureq::Error::Status(429, _)) => return Err(RemoteError::RateLimited),
            Err(ureq::Error::Status(code, _)) => return Err(RemoteError::RemoteUnavailable(format!("HTTP {code}"))),
            Err(e) => return Err(RemoteError::RemoteUnavailable(e.to_string())),
        };
        let value: serde_json::Value = resp
            .into_json()
            .map_err(|e| RemoteError::RemoteFormatError(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| RemoteError::RemoteFormatError("missing choices[0].message.content".into()))
    }
}
