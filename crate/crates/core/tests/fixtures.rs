mod common;

use std::path::{Path, PathBuf};

use salience::ingest::{load_benchmark, load_issue_list, load_lexicon, load_surveys};
use salience::leaning::{issue_scores, map_party, IssueThresholds, LeaningError};
use salience::model::{BenchmarkKind, Category, Scheme};
use salience::stats::{adaptive_test, QueryObservation};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

#[test]
fn every_shipped_party_and_family_resolves() {
    for (path, scheme) in [("eu/lexicon.csv", Scheme::EU5), ("us/lexicon.csv", Scheme::USParty)] {
        let lex = load_lexicon(&data(path)).unwrap();
        for id in lex.party_map.keys().chain(lex.family_map.keys()) {
            match map_party(id, &lex) {
                Ok(c) => assert!(scheme.contains(c), "{id} -> {c}"),
                Err(e) => assert!(matches!(e, LeaningError::Excluded(_)), "{id}: {e}"),
            }
        }
    }
}

#[test]
fn eu_groups_map_as_expected() {
    let lex = load_lexicon(&data("eu/lexicon.csv")).unwrap();
    let expect = [
        ("ID", Category::RadRight),
        ("ECR", Category::RadRight),
        ("EPP", Category::MainRight),
        ("Renew", Category::MainRight),
        ("Greens/EFA", Category::Greens),
        ("S&D", Category::MainLeft),
        ("The Left", Category::RadLeft),
    ];
    for (family, cat) in expect {
        assert_eq!(map_party(family, &lex).unwrap(), cat, "{family}");
    }
    assert!(map_party("NI", &lex).is_err());
    assert!(map_party("Sweden Democrats - Sweden", &lex).is_err());
}

#[test]
fn survey_fixtures_give_expected_issue_classes() {
    let surveys = load_surveys(&[data("us/surveys_a.csv"), data("us/surveys_b.csv")]).unwrap();
    let scores = issue_scores(&surveys, IssueThresholds::new(0.05, 0.15).unwrap()).unwrap();
    let class = |t: &str| scores.iter().find(|s| s.topic == t).unwrap().category;
    assert_eq!(class("Economy"), Category::RepPlus);
    assert_eq!(class("Immigration"), Category::RepPlusPlus);
    assert_eq!(class("Abortion"), Category::DemPlus);
    assert_eq!(class("Civil rights and civil liberties"), Category::DemPlusPlus);
    assert_eq!(class("Gun policy"), Category::Neutral);
    assert_eq!(scores.len(), 15);
    load_issue_list(&data("us/issues.csv")).unwrap();
}

#[test]
fn benchmark_fixtures_load_and_normalize() {
    let cases = [
        ("eu/benchmarks/polls.csv", BenchmarkKind::Polls, Scheme::EU5),
        (
            "eu/benchmarks/prior_results.csv",
            BenchmarkKind::PriorResults,
            Scheme::EU5,
        ),
        ("eu/benchmarks/media.csv", BenchmarkKind::Media, Scheme::EU5),
        ("us/benchmarks/polls.csv", BenchmarkKind::Polls, Scheme::USParty),
        (
            "us/benchmarks/prior_results.csv",
            BenchmarkKind::PriorResults,
            Scheme::USParty,
        ),
        (
            "us/benchmarks/issue_importance.csv",
            BenchmarkKind::IssueImportance,
            Scheme::USIssue5,
        ),
    ];
    for (path, kind, scheme) in cases {
        let b = load_benchmark(Some(&data(path)), kind, scheme).unwrap();
        for (stratum, row) in &b.strata {
            let total: f64 = row.values().sum();
            assert!((total - 1.0).abs() < 1e-9, "{path} {stratum}");
        }
    }
}

#[test]
fn null_calibration_with_two_hundred_queries() {
    let reps = 1000u64;
    let mut rejections = 0;
    for rep in 0..reps {
        let obs: Vec<QueryObservation> = common::binomial_sample(90_000 + rep, 200, 8, 0.2)
            .into_iter()
            .enumerate()
            .map(|(q, (k, n))| QueryObservation {
                query_id: format!("q{q}"),
                stratum: "S".into(),
                k,
                n,
            })
            .collect();
        if adaptive_test(&obs, 0.2, rep).p.is_some_and(|p| p < 0.05) {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / reps as f64;
    assert!((rate - 0.05).abs() <= 0.02, "rejection rate {rate}");
}
