//! Party → leaning resolution and survey-based issue leaning scores.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{EntityLexicon, SurveyTable};
use crate::model::Category;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LeaningError {
    #[error("{0:?} has no party or family mapping")]
    UnmappedParty(String),
    #[error("{0:?} is mapped but excluded from leaning counts")]
    Excluded(String),
    #[error("topic {0:?} does not appear in any survey")]
    TopicAbsentEverywhere(String),
    #[error("no surveys supplied")]
    NoSurveys,
    #[error("thresholds must satisfy 0 < t1 < t2 (got t1={t1}, t2={t2})")]
    BadThresholds { t1: f64, t2: f64 },
}

/// Resolves a party id (or an EU group id) to its leaning category.
///
/// A party's own leaning wins; otherwise its group's category applies. Group
/// ids resolve directly through the family map, whose unset entries were
/// filled with the mode of member-party leanings at load time.
pub fn map_party(party_id: &str, lexicon: &EntityLexicon) -> Result<Category, LeaningError> {
    let family_category = |fam: &str| match lexicon.family_map.get(fam) {
        Some(Some(c)) => Ok(*c),
        Some(None) => Err(LeaningError::Excluded(party_id.to_string())),
        None => Err(LeaningError::UnmappedParty(party_id.to_string())),
    };
    if let Some(info) = lexicon.party_map.get(party_id) {
        return match info.leaning {
            Some(Some(c)) => Ok(c),
            Some(None) => Err(LeaningError::Excluded(party_id.to_string())),
            None => match &info.family {
                Some(f) => family_category(f),
                None => Err(LeaningError::UnmappedParty(party_id.to_string())),
            },
        };
    }
    family_category(party_id)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IssueLeaning {
    pub topic: String,
    /// Republican share selecting the topic, per survey id.
    pub rep_share: BTreeMap<String, f64>,
    /// Democratic share selecting the topic, per survey id.
    pub dem_share: BTreeMap<String, f64>,
    /// Mean of per-survey `rep − dem`, in [−1, 1].
    pub score: f64,
    pub category: crate::model::Category,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IssueThresholds {
    pub issue_t1: f64,
    pub issue_t2: f64,
}

impl Default for IssueThresholds {
    fn default() -> Self {
        IssueThresholds {
            issue_t1: 0.05,
            issue_t2: 0.15,
        }
    }
}

impl IssueThresholds {
    pub fn new(t1: f64, t2: f64) -> Result<Self, LeaningError> {
        if !(t1 > 0.0 && t1 < t2 && t2.is_finite()) {
            return Err(LeaningError::BadThresholds { t1, t2 });
        }
        Ok(IssueThresholds {
            issue_t1: t1,
            issue_t2: t2,
        })
    }
}

/// Piecewise classification of a leaning score into the five issue categories.
pub fn classify_issue(score: f64, thresholds: IssueThresholds) -> Result<Category, LeaningError> {
    let IssueThresholds {
        issue_t1: t1,
        issue_t2: t2,
    } = IssueThresholds::new(thresholds.issue_t1, thresholds.issue_t2)?;
    Ok(if score >= t2 {
        Category::RepPlusPlus
    } else if score >= t1 {
        Category::RepPlus
    } else if score > -t1 {
        Category::Neutral
    } else if score > -t2 {
        Category::DemPlus
    } else {
        Category::DemPlusPlus
    })
}

/// Leaning score per topic across all surveys that contain it, classified
/// with `thresholds`. Output is sorted by topic name, so survey order does
/// not matter.
pub fn issue_scores(surveys: &[SurveyTable], thresholds: IssueThresholds) -> Result<Vec<IssueLeaning>, LeaningError> {
    if surveys.is_empty() {
        return Err(LeaningError::NoSurveys);
    }
    let mut topics: Vec<&String> = surveys.iter().flat_map(|s| s.rows.keys()).collect();
    topics.sort();
    topics.dedup();
    topics
        .into_iter()
        .map(|t| issue_score(t, surveys, thresholds))
        .collect()
}

pub fn issue_score(
    topic: &str,
    surveys: &[SurveyTable],
    thresholds: IssueThresholds,
) -> Result<IssueLeaning, LeaningError> {
    let mut rep_share = BTreeMap::new();
    let mut dem_share = BTreeMap::new();
    for s in surveys {
        if let Some(&(r, d)) = s.rows.get(topic) {
            rep_share.insert(s.survey_id.clone(), r as f64 / s.n_rep_total as f64);
            dem_share.insert(s.survey_id.clone(), d as f64 / s.n_dem_total as f64);
        }
    }
    if rep_share.is_empty() {
        return Err(LeaningError::TopicAbsentEverywhere(topic.to_string()));
    }
    // BTreeMap iteration keeps the summation order independent of input order.
    let diffs: Vec<f64> = rep_share.iter().map(|(id, r)| r - dem_share[id]).collect();
    let score = diffs.iter().sum::<f64>() / diffs.len() as f64;
    Ok(IssueLeaning {
        topic: topic.to_string(),
        rep_share,
        dem_share,
        score,
        category: classify_issue(score, thresholds)?,
    })
}

/// Topic → issue category lookup built from survey scores.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IssueClassification {
    pub topics: BTreeMap<String, Category>,
}

impl IssueClassification {
    pub fn from_scores(scores: &[IssueLeaning]) -> Self {
        IssueClassification {
            topics: scores.iter().map(|s| (s.topic.clone(), s.category)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_lexicon, parse_surveys};
    use std::path::Path;

    fn survey(id: &str, rows: &[(&str, u64, u64)], total: u64) -> SurveyTable {
        SurveyTable {
            survey_id: id.into(),
            rows: rows.iter().map(|&(t, r, d)| (t.to_string(), (r, d))).collect(),
            n_rep_total: total,
            n_dem_total: total,
        }
    }

    #[test]
    fn single_survey_score() {
        let s = [survey("pew", &[("Economy", 600, 200)], 1000)];
        let l = issue_scores(&s, IssueThresholds::default()).unwrap();
        assert!((l[0].score - 0.4).abs() < 1e-12);
    }

    #[test]
    fn two_surveys_averaged() {
        let s = [
            survey("pew", &[("Economy", 600, 200)], 1000),
            survey("yougov", &[("Economy", 300, 100)], 1000),
        ];
        let l = issue_score("Economy", &s, IssueThresholds::default()).unwrap();
        assert!((l.score - 0.3).abs() < 1e-12);
    }

    #[test]
    fn single_survey_topic_used_directly() {
        let s = [
            survey("pew", &[("Economy", 600, 200)], 1000),
            survey("yougov", &[("Civil rights and civil liberties", 50, 300)], 1000),
        ];
        let l = issue_score("Civil rights and civil liberties", &s, IssueThresholds::default()).unwrap();
        assert!((l.score + 0.25).abs() < 1e-12);
        assert_eq!(
            issue_score("Terrorism", &s, IssueThresholds::default()),
            Err(LeaningError::TopicAbsentEverywhere("Terrorism".into()))
        );
    }

    #[test]
    fn classification_rule() {
        let t = IssueThresholds::default();
        assert_eq!(classify_issue(0.0, t).unwrap(), Category::Neutral);
        assert_eq!(classify_issue(1.0, t).unwrap(), Category::RepPlusPlus);
        assert_eq!(classify_issue(0.08, t).unwrap(), Category::RepPlus);
        assert_eq!(classify_issue(-0.08, t).unwrap(), Category::DemPlus);
        assert_eq!(classify_issue(0.15, t).unwrap(), Category::RepPlusPlus);
        assert_eq!(classify_issue(-0.15, t).unwrap(), Category::DemPlusPlus);
        assert_eq!(classify_issue(0.05, t).unwrap(), Category::RepPlus);
        assert_eq!(classify_issue(-0.05, t).unwrap(), Category::DemPlus);
    }

    #[test]
    fn bad_thresholds() {
        for (t1, t2) in [(0.2, 0.1), (0.0, 0.1), (0.1, 0.1), (-0.1, 0.2)] {
            assert!(matches!(
                classify_issue(
                    0.0,
                    IssueThresholds {
                        issue_t1: t1,
                        issue_t2: t2
                    }
                ),
                Err(LeaningError::BadThresholds { .. })
            ));
        }
    }

    #[test]
    fn map_party_examples() {
        let lex = parse_lexicon(
            "kind,key,target,extra
family,ECR,,
family,S&D,MainLeft,
party,Brothers of Italy - Italy,ECR,RadRight
party,Law and Justice - Poland,ECR,RadRight
party,Civic Platform - Poland,ECR,MainRight
party,Socialist Party - Portugal,S&D,
party,Unknown Indie,,none
"
            .as_bytes(),
            Path::new("lex.csv"),
        )
        .unwrap();
        assert_eq!(map_party("Brothers of Italy - Italy", &lex), Ok(Category::RadRight));
        assert_eq!(map_party("ECR", &lex), Ok(Category::RadRight));
        assert_eq!(map_party("Socialist Party - Portugal", &lex), Ok(Category::MainLeft));
        assert!(matches!(map_party("Nope", &lex), Err(LeaningError::UnmappedParty(_))));
        assert!(matches!(
            map_party("Unknown Indie", &lex),
            Err(LeaningError::Excluded(_))
        ));
    }

    #[test]
    fn survey_loader_feeds_scores() {
        let csv = "survey_id,topic,n_rep_selected,n_dem_selected,n_rep_total,n_dem_total
a,Gun policy,100,98,1000,1000
";
        let s = parse_surveys(csv.as_bytes(), Path::new("s.csv")).unwrap();
        let l = issue_scores(&s, IssueThresholds::default()).unwrap();
        assert_eq!(l[0].category, Category::Neutral);
    }
}
