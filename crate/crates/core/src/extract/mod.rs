//! Mention extraction: deterministic lexicon and issue matching, the
//! per-record dedup rules, and a remote chat-model extractor.

mod dedupe;
mod matcher;
pub mod remote;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::EntityLexicon;
use crate::leaning::{map_party, IssueClassification};
use crate::model::{Category, SourceField};

pub use dedupe::dedupe;
pub use matcher::{match_issues, match_lexicon};

/// Resolution id for spectrum terms ("the left") that carry no mapping.
pub const UNRESOLVED_SPECTRUM: &str = "unresolved_spectrum";

/// A raw, not yet deduplicated, lexicon or remote hit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawHit {
    pub record_id: String,
    pub surface: String,
    pub party_or_topic: String,
    pub source_field: SourceField,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("hits from several records passed to dedupe: {0:?} and {1:?}")]
    MixedRecordIds(String, String),
}

/// Maps a resolved party or topic id to a leaning category.
pub trait CategoryResolver {
    fn resolve(&self, id: &str) -> Option<Category>;
}

impl CategoryResolver for EntityLexicon {
    fn resolve(&self, id: &str) -> Option<Category> {
        map_party(id, self).ok()
    }
}

impl CategoryResolver for IssueClassification {
    fn resolve(&self, id: &str) -> Option<Category> {
        self.topics.get(id).copied()
    }
}
