use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
        .display()
        .to_string()
}

fn salience(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_salience"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, config: &str, specs: &str) -> PathBuf {
    let out = dir.join("capture.jsonl");
    let o = salience(&[
        "simulate",
        "--config",
        &data(config),
        "--specs",
        &data(specs),
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn eu_simulate_then_analyze() {
    let tmp = tempfile::tempdir().unwrap();
    let capture = simulate(tmp.path(), "eu/audit.toml", "eu/engines.toml");
    let report = tmp.path().join("report");
    let o = salience(&[
        "analyze",
        "--capture",
        path_str(&capture),
        "--out",
        path_str(&report),
        "--scheme",
        "eu5",
        "--lexicon",
        &data("eu/lexicon.csv"),
        "--benchmark",
        "uniform",
        "--benchmark",
        &format!("polls={}", data("eu/benchmarks/polls.csv")),
        "--benchmark",
        &format!("prior_results={}", data("eu/benchmarks/prior_results.csv")),
        "--perms",
        "999",
        "--bootstrap",
        "200",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "summary.txt",
        "diffs.txt",
        "diffs.tex",
        "outcomes.csv",
        "proportions.csv",
        "plot_data.csv",
        "omnibus.csv",
    ] {
        assert!(report.join(f).is_file(), "missing {f}");
    }
    let diffs = fs::read_to_string(report.join("diffs.txt")).unwrap();
    assert!(diffs.contains("R. Right"));
    let tex = fs::read_to_string(report.join("diffs.tex")).unwrap();
    assert!(tex.contains("\\begin{tabular}") && tex.contains("\\textbf{"));
}

#[test]
fn us_party_and_issue_schemes() {
    let tmp = tempfile::tempdir().unwrap();
    let party = simulate(tmp.path(), "us/audit.toml", "us/engines_party.toml");
    let o = salience(&[
        "analyze",
        "--capture",
        path_str(&party),
        "--out",
        path_str(&tmp.path().join("party")),
        "--scheme",
        "usparty",
        "--lexicon",
        &data("us/lexicon.csv"),
        "--benchmark",
        &format!("polls={}", data("us/benchmarks/polls.csv")),
        "--perms",
        "499",
        "--bootstrap",
        "100",
        "--context",
        "engine",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let issue_dir = tmp.path().join("issue_capture");
    fs::create_dir(&issue_dir).unwrap();
    let issue = simulate(&issue_dir, "us/audit.toml", "us/engines_issue.toml");
    let o = salience(&[
        "analyze",
        "--capture",
        path_str(&issue),
        "--out",
        path_str(&tmp.path().join("issue")),
        "--scheme",
        "usissue5",
        "--issues",
        &data("us/issues.csv"),
        "--surveys",
        &data("us/surveys_a.csv"),
        "--surveys",
        &data("us/surveys_b.csv"),
        "--benchmark",
        "uniform",
        "--benchmark",
        &format!("issues={}", data("us/benchmarks/issue_importance.csv")),
        "--perms",
        "499",
        "--bootstrap",
        "100",
        "--top-k",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(tmp.path().join("issue/summary.txt")).unwrap();
    assert!(summary.contains("top-k: 3"));
}

#[test]
fn missing_benchmark_file_exits_two_and_names_path() {
    let tmp = tempfile::tempdir().unwrap();
    let capture = simulate(tmp.path(), "eu/audit.toml", "eu/engines.toml");
    let missing = tmp.path().join("no_such_polls.csv");
    let o = salience(&[
        "analyze",
        "--capture",
        path_str(&capture),
        "--out",
        path_str(&tmp.path().join("r")),
        "--scheme",
        "eu5",
        "--lexicon",
        &data("eu/lexicon.csv"),
        "--benchmark",
        &format!("polls={}", missing.display()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no_such_polls.csv"));
}

#[test]
fn negative_seed_in_config_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data("eu/audit.toml")).unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, text.replace("seed = 20240606", "seed = -3")).unwrap();
    let o = salience(&[
        "simulate",
        "--config",
        path_str(&bad),
        "--specs",
        &data("eu/engines.toml"),
        "--out",
        path_str(&tmp.path().join("c.jsonl")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(salience(&["analyze"]).status.code(), Some(2));
    assert_eq!(salience(&["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(salience(&["--help"]).status.code(), Some(0));
}

#[test]
fn capture_without_mentions_writes_summary_only() {
    let tmp = tempfile::tempdir().unwrap();
    let capture = tmp.path().join("empty.jsonl");
    let line = r#"{"record_id":"g:DE:q1:r1:main:1","engine":"google","location":"DE","language":"de","query_id":"q1","replica":1,"rank":1,"section":"Main","url":"https://weather.example.com/today","headline":"Sunny spells expected","collected_at":0}"#;
    fs::write(&capture, format!("{line}\n")).unwrap();
    let report = tmp.path().join("r");
    let o = salience(&[
        "analyze",
        "--capture",
        path_str(&capture),
        "--out",
        path_str(&report),
        "--scheme",
        "eu5",
        "--lexicon",
        &data("eu/lexicon.csv"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let files: Vec<_> = fs::read_dir(&report).unwrap().collect();
    assert_eq!(files.len(), 1);
    let summary = fs::read_to_string(report.join("summary.txt")).unwrap();
    assert!(summary.contains("0% mention rate, no tests run"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let dir = tmp.path().join(format!("run{run}"));
        fs::create_dir(&dir).unwrap();
        let capture = simulate(&dir, "us/audit.toml", "us/engines_party.toml");
        let report = dir.join("report");
        let o = salience(&[
            "analyze",
            "--capture",
            path_str(&capture),
            "--out",
            path_str(&report),
            "--scheme",
            "usparty",
            "--lexicon",
            &data("us/lexicon.csv"),
            "--seed",
            "42",
            "--perms",
            "499",
            "--bootstrap",
            "100",
        ]);
        assert!(o.status.success());
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&report)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files.push(("capture".into(), fs::read(&capture).unwrap()));
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
}
