use std::path::PathBuf;
use std::process::Command;

fn header_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header_dir().join("qualmetrics.h")).unwrap();
    for name in [
        "qm_last_error",
        "qm_levenshtein",
        "qm_normalized_levenshtein",
        "qm_german_tank",
        "qm_scientific_age",
        "qm_contemporary_h_index",
        "qm_meets_thresholds",
        "qm_corpus_load",
        "qm_corpus_free",
        "qm_graph_build",
        "qm_graph_export",
        "qm_graph_free",
        "typedef struct QmCorpus QmCorpus;",
        "QM_STATUS_OK = 0",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"qualmetrics.h\"\nint f(void) { size_t d; return (int)qm_levenshtein(\"a\", \"b\", &d); }\n",
    )
    .unwrap();
    for (compiler, extra) in [("cc", vec!["-std=c99"]), ("c++", vec!["-x", "c++"])] {
        let status = Command::new(compiler)
            .args(&extra)
            .arg("-fsyntax-only")
            .arg("-Wall")
            .arg("-Werror")
            .arg("-I")
            .arg(header_dir())
            .arg(&src)
            .status();
        match status {
            Ok(s) => assert!(s.success(), "{compiler} rejected the header"),
            Err(_) => eprintln!("{compiler} not available; skipped"),
        }
    }
}
