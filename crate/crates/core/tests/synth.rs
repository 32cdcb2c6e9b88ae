use qualmetrics::cli::{cmd_synth, synthesize, RunConfig, SynthParams};
use qualmetrics::corpus::{load_corpus, Format, Outcome};
use qualmetrics::stats::probit_fit;

#[test]
fn planted_age_slope_is_recovered() {
    let mut positive = 0;
    for seed in 0..100 {
        let params = SynthParams {
            seed,
            ..SynthParams::default()
        };
        let (corpus, _) = synthesize(&params).unwrap();
        let (mut ages, mut y) = (Vec::new(), Vec::new());
        for app in corpus.applications() {
            let born = corpus.applicant(&app.applicant_ref).unwrap().birth_date.unwrap();
            ages.push(f64::from(corpus.observation_year - chrono::Datelike::year(&born)));
            y.push(app.outcome == Outcome::Qualified);
        }
        if probit_fit(&ages, &y).unwrap().beta > 0.0 {
            positive += 1;
        }
    }
    assert!(positive >= 95, "sign recovered in {positive}/100 seeds");
}

#[test]
fn zero_applications_give_valid_empty_files() {
    let tmp = tempfile::tempdir().unwrap();
    let config = RunConfig {
        output_dir: tmp.path().to_path_buf(),
        ..RunConfig::default()
    };
    let params = SynthParams {
        applications: 0,
        ..SynthParams::default()
    };
    cmd_synth(&config, &params).unwrap();
    let corpus = load_corpus(tmp.path().join("corpus.jsonl"), Format::Jsonl).unwrap();
    assert!(corpus.applications.is_empty() && corpus.applicants.is_empty());
    let th = std::fs::read_to_string(tmp.path().join("thresholds.csv")).unwrap();
    assert_eq!(th.trim(), "discipline,role,t1,t2,t3");
}
