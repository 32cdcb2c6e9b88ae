use std::path::{Path, PathBuf};
use std::process::Command;

use clap::Parser;
use qualmetrics::cli::{self, Cli, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, METADATA_FILE};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qualmetrics"))
}

fn run_in(args: &[&str], env_seed: Option<&str>) -> i32 {
    let mut full = vec!["qualmetrics"];
    full.extend_from_slice(args);
    cli::run(&Cli::try_parse_from(full).unwrap(), env_seed)
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn metadata(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(METADATA_FILE)).unwrap()).unwrap()
}

#[test]
fn synth_then_all_stamps_every_output() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let out = tmp.path().join("out");
    let synth = bin()
        .args(["synth", "--applications", "120", "--disciplines", "6", "--seed", "9", "--out"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(synth.status.success(), "{}", String::from_utf8_lossy(&synth.stderr));
    assert!(data.join("corpus.jsonl").is_file());
    assert_eq!(metadata(&data)["command"], "synth");

    let all = bin()
        .args(["all", "--bootstrap", "50", "--workers", "2", "--corpus"])
        .arg(data.join("corpus.jsonl"))
        .arg("--thresholds")
        .arg(data.join("thresholds.csv"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(all.status.success(), "{}", String::from_utf8_lossy(&all.stderr));

    let meta = metadata(&out);
    let digest = meta["config_digest"].as_str().unwrap().to_string();
    assert_eq!(digest.len(), 64);
    let listed = meta["files"].as_array().unwrap();
    let files = files_under(&out);
    assert_eq!(listed.len() + 1, files.len());
    for f in files.iter().filter(|f| !f.ends_with(METADATA_FILE)) {
        let text = std::fs::read_to_string(f).unwrap();
        assert!(text.contains("config_digest"), "{}", f.display());
        assert!(text.contains(&digest), "{} lacks the run digest", f.display());
    }
    for stage in ["ingest", "indicators", "reports", "graph", "stats", "tabulate"] {
        assert!(out.join(stage).is_dir(), "{stage}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(run_in(&["ingest", "--out", out], None), EXIT_USAGE);
    assert_eq!(run_in(&["ingest", "--corpus", "/nonexistent/c.jsonl", "--out", out], None), EXIT_USAGE);
    let corpus = fixture("corpus_edge.jsonl");
    let c = corpus.to_str().unwrap();
    assert_eq!(run_in(&["stats", "--corpus", c, "--out", out, "--level", "1.5"], None), EXIT_USAGE);
    assert_eq!(run_in(&["stats", "--corpus", c, "--out", out, "--sample-size", "1"], None), EXIT_USAGE);
    assert_eq!(run_in(&["stats", "--corpus", c, "--out", out], Some("not-a-number")), EXIT_USAGE);
    assert_eq!(cli::main_with_args(["qualmetrics", "frobnicate"]), EXIT_USAGE);
    assert_eq!(cli::main_with_args(["qualmetrics", "all", "--seed", "x"]), EXIT_USAGE);
    let st = bin().arg("--no-such-flag").output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_USAGE));
}

#[test]
fn invalid_corpus_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("bad.jsonl");
    let mut text = std::fs::read_to_string(fixture("corpus_edge.jsonl")).unwrap();
    text.push_str("{\"record\":\"application\",\"serial_id\":\"oops\"}\n");
    std::fs::write(&corpus, text).unwrap();
    let out = tmp.path().join("out");
    let (c, o) = (corpus.to_str().unwrap(), out.to_str().unwrap());

    // analysis stages refuse a corpus with rejected records
    assert_eq!(run_in(&["tabulate", "--corpus", c, "--out", o], None), EXIT_VALIDATION);
    // ingest writes its report, then signals the rejects
    assert_eq!(run_in(&["ingest", "--corpus", c, "--out", o], None), EXIT_VALIDATION);
    let rejects = std::fs::read_to_string(out.join("ingest/rejects.csv")).unwrap();
    assert_eq!(rejects.lines().filter(|l| !l.starts_with('#')).count(), 2);
    let quality = std::fs::read_to_string(out.join("ingest/data_quality.json")).unwrap();
    assert!(quality.contains("\"metadata\""));
}

#[test]
fn clean_ingest_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let c = fixture("corpus_edge.jsonl");
    let o = tmp.path().to_str().unwrap();
    assert_eq!(run_in(&["ingest", "--corpus", c.to_str().unwrap(), "--out", o], None), EXIT_OK);
}

#[test]
fn seed_precedence_flag_config_env() {
    let tmp = tempfile::tempdir().unwrap();
    let c = fixture("corpus_edge.jsonl");
    let c = c.to_str().unwrap();
    let seed_of = |dir: &Path| metadata(dir)["config"]["seed"].as_u64().unwrap();

    let a = tmp.path().join("a");
    assert_eq!(run_in(&["ingest", "--corpus", c, "--out", a.to_str().unwrap()], Some("77")), EXIT_OK);
    assert_eq!(seed_of(&a), 77);

    let cfg = tmp.path().join("run.conf");
    std::fs::write(&cfg, "# run settings\nseed = 5\nbootstrap-b = 100\n").unwrap();
    let b = tmp.path().join("b");
    let args = ["ingest", "--config", cfg.to_str().unwrap(), "--corpus", c, "--out", b.to_str().unwrap()];
    assert_eq!(run_in(&args, Some("77")), EXIT_OK);
    assert_eq!(seed_of(&b), 5);
    assert_eq!(metadata(&b)["config"]["bootstrap_b"], 100);

    let d = tmp.path().join("d");
    let args = ["ingest", "--config", cfg.to_str().unwrap(), "--corpus", c, "--out", d.to_str().unwrap(), "--seed", "3"];
    assert_eq!(run_in(&args, Some("77")), EXIT_OK);
    assert_eq!(seed_of(&d), 3);
    assert_ne!(metadata(&b)["config_digest"], metadata(&d)["config_digest"]);
}

#[test]
fn observation_year_flag_overrides_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let c = fixture("corpus_edge.jsonl");
    let o = tmp.path().to_str().unwrap();
    let args = ["ingest", "--corpus", c.to_str().unwrap(), "--out", o, "--observation-year", "2020"];
    assert_eq!(run_in(&args, None), EXIT_OK);
    assert_eq!(metadata(tmp.path())["config"]["observation_year"], 2020);
}
