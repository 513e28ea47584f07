use std::collections::BTreeMap;

use crate::model::{Category, Mention, Scheme};

use super::{CategoryResolver, ExtractError, RawHit, UNRESOLVED_SPECTRUM};

/// Collapses the hits of one record into mentions: one per leaning category.
///
/// A party found in both headline and URL counts once, and several entities
/// of the same family count as a single mention of that family. Unresolved
/// spectrum terms, unmapped ids and categories outside `scheme` are dropped.
/// The first hit (in input order) supplies the surface and source field.
pub fn dedupe(hits: &[RawHit], scheme: Scheme, resolver: &dyn CategoryResolver) -> Result<Vec<Mention>, ExtractError> {
    if let Some(first) = hits.first() {
        if let Some(other) = hits.iter().find(|h| h.record_id != first.record_id) {
            return Err(ExtractError::MixedRecordIds(
                first.record_id.clone(),
                other.record_id.clone(),
            ));
        }
    }
    let mut by_category: BTreeMap<Category, Mention> = BTreeMap::new();
    for h in hits {
        if h.party_or_topic == UNRESOLVED_SPECTRUM {
            continue;
        }
        let Some(category) = resolver.resolve(&h.party_or_topic) else {
            continue;
        };
        if !scheme.contains(category) {
            continue;
        }
        by_category.entry(category).or_insert_with(|| Mention {
            record_id: h.record_id.clone(),
            raw_surface: h.surface.clone(),
            resolved_party_or_topic: h.party_or_topic.clone(),
            category,
            source_field: h.source_field,
        });
    }
    Ok(by_category.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::match_lexicon;
    use crate::ingest::{parse_lexicon, EntityLexicon};
    use crate::model::{ResultRecord, Section, SourceField};
    use proptest::prelude::*;
    use std::path::Path;

    fn lexicon() -> EntityLexicon {
        parse_lexicon(
            "kind,key,target,extra
family,ID,RadRight,
family,EPP,MainRight,
family,S&D,MainLeft,
party,Alternative for Germany - Germany,ID,
party,Christian Democratic Union - Germany,EPP,
party,Social Democratic Party of Germany - Germany,S&D,
entity,AfD,Alternative for Germany - Germany,
entity,Maximilian Krah,Alternative for Germany - Germany,
entity,ID,ID,
entity,CDU,Christian Democratic Union - Germany,
entity,SPD,Social Democratic Party of Germany - Germany,
spectrum,the left,,
"
            .as_bytes(),
            Path::new("lex.csv"),
        )
        .unwrap()
    }

    fn hit(surface: &str, party: &str, field: SourceField) -> RawHit {
        RawHit {
            record_id: "r1".into(),
            surface: surface.into(),
            party_or_topic: party.into(),
            source_field: field,
        }
    }

    #[test]
    fn headline_and_url_duplicate_counts_once() {
        let afd = "Alternative for Germany - Germany";
        let hits = [
            hit("afd", afd, SourceField::Headline),
            hit("afd", afd, SourceField::Url),
        ];
        let m = dedupe(&hits, Scheme::EU5, &lexicon()).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].category, Category::RadRight);
        assert_eq!(m[0].source_field, SourceField::Headline);
    }

    #[test]
    fn same_family_triple_counts_once() {
        let rec = ResultRecord {
            record_id: "r1".into(),
            engine: "g".into(),
            location: "DE".into(),
            language: "de".into(),
            query_id: "q1".into(),
            replica: 0,
            rank: Some(1),
            section: Section::Main,
            url: Some("https://news.de/krah".into()),
            headline: Some("Maximilian Krah, AfD, ID: what next".into()),
            answer_text: None,
            site_category: None,
            collected_at: 0,
        };
        let hits = match_lexicon(&rec, &lexicon());
        assert_eq!(hits.len(), 3);
        let m = dedupe(&hits, Scheme::EU5, &lexicon()).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].category, Category::RadRight);
    }

    #[test]
    fn distinct_families_count_separately() {
        let hits = [
            hit("cdu", "Christian Democratic Union - Germany", SourceField::Headline),
            hit(
                "spd",
                "Social Democratic Party of Germany - Germany",
                SourceField::Headline,
            ),
        ];
        let m = dedupe(&hits, Scheme::EU5, &lexicon()).unwrap();
        let cats: Vec<_> = m.iter().map(|m| m.category).collect();
        assert_eq!(cats, [Category::MainLeft, Category::MainRight]);
    }

    #[test]
    fn mixed_records_rejected() {
        let mut b = hit("cdu", "Christian Democratic Union - Germany", SourceField::Url);
        b.record_id = "r2".into();
        let hits = [hit("cdu", "Christian Democratic Union - Germany", SourceField::Url), b];
        assert!(matches!(
            dedupe(&hits, Scheme::EU5, &lexicon()),
            Err(ExtractError::MixedRecordIds(..))
        ));
    }

    #[test]
    fn spectrum_and_foreign_scheme_dropped() {
        let hits = [hit("the left", UNRESOLVED_SPECTRUM, SourceField::Headline)];
        assert!(dedupe(&hits, Scheme::EU5, &lexicon()).unwrap().is_empty());
        let hits = [hit(
            "cdu",
            "Christian Democratic Union - Germany",
            SourceField::Headline,
        )];
        assert!(dedupe(&hits, Scheme::USParty, &lexicon()).unwrap().is_empty());
    }

    fn to_hits(m: &[Mention]) -> Vec<RawHit> {
        m.iter()
            .map(|m| RawHit {
                record_id: m.record_id.clone(),
                surface: m.raw_surface.clone(),
                party_or_topic: m.resolved_party_or_topic.clone(),
                source_field: m.source_field,
            })
            .collect()
    }

    const PARTIES: [&str; 5] = [
        "Alternative for Germany - Germany",
        "Christian Democratic Union - Germany",
        "Social Democratic Party of Germany - Germany",
        "ID",
        UNRESOLVED_SPECTRUM,
    ];

    proptest! {
        #[test]
        fn idempotent_and_bounded(picks in proptest::collection::vec((0usize..5, 0usize..3), 0..20)) {
            let fields = [SourceField::Headline, SourceField::Url, SourceField::AnswerText];
            let hits: Vec<RawHit> = picks.iter().map(|&(p, f)| hit("s", PARTIES[p], fields[f])).collect();
            let once = dedupe(&hits, Scheme::EU5, &lexicon()).unwrap();
            let twice = dedupe(&to_hits(&once), Scheme::EU5, &lexicon()).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert!(once.len() <= Scheme::EU5.k());
        }
    }
}
