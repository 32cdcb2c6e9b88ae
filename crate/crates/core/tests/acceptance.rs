//! Acceptance checks. Runs without the libtest harness so every check prints
//! one PASS/FAIL line; the process fails if any check fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use qualmetrics::cli::{cmd_all, synthesize, DisciplineProfile, RunConfig, SynthParams, METADATA_FILE};
use qualmetrics::corpus::{Applicant, Discipline, DisciplineCode, DisciplineTable, Publication, PublicationCategory, Role};
use qualmetrics::graph::{maximal_cliques_of, Adjacency};
use qualmetrics::indicators::{compute_indicator_set, contemporary_h_index};
use qualmetrics::stats::{german_tank_ci, probit_fit, probit_gradient, probit_log_likelihood};
use qualmetrics::textmetrics::{
    compute_report_metrics, levenshtein_chars, levenshtein_reference, normalized_levenshtein,
    pairwise_distance_summary_with, quadrant_classify, QuadrantLabel, ReportOptions,
};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_chars(rng: &mut ChaCha8Rng, alphabet: &[char], len: usize) -> Vec<char> {
    (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

fn alphabet(n: usize) -> Vec<char> {
    "abcdefghijklmnopqrstuvwxyz0123456789".chars().take(n).collect()
}

fn tank_interval() -> Outcome {
    let t = Instant::now();
    let (lo, hi) = german_tank_ci(94765, 53805, 0.95).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure((lo - 94765.04).abs() <= 0.1, || format!("lower bound {lo}"))?;
    ensure((hi - 94771.5).abs() <= 0.1, || format!("upper bound {hi}"))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("[{lo:.3}, {hi:.3}] in {elapsed:?}"))
}

fn random_string_distance() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let abc = alphabet(30);
    let mut total = 0.0;
    for _ in 0..20 {
        let a: String = random_chars(&mut rng, &abc, 1000).into_iter().collect();
        let b: String = random_chars(&mut rng, &abc, 1000).into_iter().collect();
        total += normalized_levenshtein(&a, &b);
    }
    let mean = total / 20.0;
    let elapsed = t.elapsed();
    ensure((0.85..=0.95).contains(&mean), || format!("mean distance {mean}"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("mean {mean:.4} in {elapsed:?}"))
}

fn all_strings(abc: &[char], max_len: usize) -> Vec<Vec<char>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for &c in abc {
                let mut t: Vec<char> = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn levenshtein_matches_reference() -> Outcome {
    let small = all_strings(&['a', 'b', 'c'], 4);
    let mut checked = 0usize;
    for s in &small {
        for t in &small {
            let (fast, slow) = (levenshtein_chars(s, t), levenshtein_reference(s, t));
            ensure(fast == slow, || format!("{s:?} vs {t:?}: {fast} != {slow}"))?;
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..1200 {
        // the last 200 pairs run past one machine word
        let max = if k < 1000 { 60 } else { 300 };
        let abc = alphabet(rng.random_range(2..=8));
        let (la, lb) = (rng.random_range(0..=max), rng.random_range(0..=max));
        let a = random_chars(&mut rng, &abc, la);
        let b = random_chars(&mut rng, &abc, lb);
        let (fast, slow) = (levenshtein_chars(&a, &b), levenshtein_reference(&a, &b));
        ensure(fast == slow, || format!("random pair {k}: {fast} != {slow}"))?;
        checked += 1;
    }
    Ok(format!("{checked} pairs equal"))
}

fn metric_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..10_000 {
        let abc = alphabet(rng.random_range(2..=6));
        let draw = |rng: &mut ChaCha8Rng| {
            let n = rng.random_range(0..=40);
            random_chars(rng, &abc, n)
        };
        let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let ab = levenshtein_chars(&a, &b);
        let bc = levenshtein_chars(&b, &c);
        let ac = levenshtein_chars(&a, &c);
        ensure(ab == levenshtein_chars(&b, &a), || format!("asymmetric at triple {k}"))?;
        ensure(ac <= ab + bc, || format!("triangle violated at triple {k}: {ac} > {ab} + {bc}"))?;
        ensure((ab == 0) == (a == b), || format!("identity violated at triple {k}"))?;
    }
    Ok("10000 triples".into())
}

fn contemporary_h_brute(weights: &[f64]) -> u32 {
    (0..=weights.len())
        .filter(|&h| weights.iter().filter(|&&w| w >= h as f64).count() >= h)
        .max()
        .unwrap_or(0) as u32
}

fn h_index_matches_definition() -> Outcome {
    let obs = 2012;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut max_h = 0;
    for k in 0..500 {
        let n = rng.random_range(0..=50);
        let papers: Vec<Publication> = (0..n)
            .map(|_| {
                let cites = if rng.random_bool(0.2) { 0 } else { rng.random_range(0..200) };
                Publication::new(Some(rng.random_range(1975..=obs)), PublicationCategory::JournalPaper).with_citations(cites)
            })
            .collect();
        let weights: Vec<f64> = papers
            .iter()
            .map(|p| 4.0 / f64::from(obs - p.pub_year.unwrap() + 1) * p.citations.unwrap() as f64)
            .collect();
        let expected = contemporary_h_brute(&weights);
        let got = contemporary_h_index(&papers, obs).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("portfolio {k}: {got} != {expected}"))?;
        max_h = max_h.max(got);
    }
    Ok(format!("500 portfolios, largest h {max_h}"))
}

fn twin_paradox() -> Outcome {
    let obs = 2012;
    let table = DisciplineTable::bundled();
    let d: &Discipline = table.iter().find(|d| d.bibliometric).ok_or("no bibliometric discipline")?;
    let recent: Vec<Publication> = (2003..2008)
        .map(|y| Publication::new(Some(y), PublicationCategory::JournalPaper).with_citations(10))
        .collect();
    let person = |last: &str, publications: Vec<Publication>| Applicant {
        first_name: "Twin".into(),
        last_name: last.into(),
        birth_date: None,
        publications,
    };
    let twin = person("Young", recent.clone());
    let mut elder = person("Elder", recent);
    // one extra early paper stretches the scientific age
    elder
        .publications
        .push(Publication::new(Some(1985), PublicationCategory::JournalPaper).with_citations(0));
    let subset: BTreeSet<_> = twin.publications.iter().map(|p| format!("{p:?}")).collect();
    let superset: BTreeSet<_> = elder.publications.iter().map(|p| format!("{p:?}")).collect();
    ensure(subset.is_subset(&superset) && subset.len() < superset.len(), || "not a proper subset".into())?;
    let tops = Default::default();
    let v_small = compute_indicator_set(&twin, d, obs, &tops).map_err(|e| e.to_string())?.v1;
    let v_large = compute_indicator_set(&elder, d, obs, &tops).map_err(|e| e.to_string())?.v1;
    ensure(v_small > v_large, || format!("{v_small} <= {v_large}"))?;
    Ok(format!("5 papers score {v_small:.3}, the same plus one score {v_large:.3}"))
}

fn brute_cliques(n: usize, adj: &Adjacency) -> BTreeSet<Vec<usize>> {
    let is_clique = |mask: u32| {
        (0..n).all(|a| mask >> a & 1 == 0 || (a + 1..n).all(|b| mask >> b & 1 == 0 || adj.is_adjacent(a, b)))
    };
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        if !is_clique(mask) {
            continue;
        }
        let maximal = (0..n).all(|v| mask >> v & 1 == 1 || !is_clique(mask | 1 << v));
        if maximal {
            out.insert((0..n).filter(|v| mask >> v & 1 == 1).collect());
        }
    }
    out
}

fn cliques_match_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut total = 0;
    for k in 0..200 {
        let n = rng.random_range(0..=12);
        let density = rng.random_range(0.0..1.0);
        let mut adj = Adjacency::new(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(density) {
                    adj.add_edge(a, b);
                }
            }
        }
        let fast: BTreeSet<Vec<usize>> = maximal_cliques_of(&adj).into_iter().collect();
        let slow = brute_cliques(n, &adj);
        ensure(fast == slow, || format!("graph {k} (n = {n}) differs"))?;
        total += fast.len();
    }
    Ok(format!("200 graphs, {total} cliques"))
}

fn probit_calibration() -> Outcome {
    let normal = Normal::standard();
    let mut covered = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(800 + seed);
        let ages: Vec<f64> = (0..5000).map(|_| rng.random_range(25.0..=70.0)).collect();
        let y: Vec<bool> = ages.iter().map(|a| rng.random_bool(normal.cdf(0.02 * a))).collect();
        let fit = probit_fit(&ages, &y).map_err(|e| e.to_string())?;
        if fit.ci_low <= 0.02 && 0.02 <= fit.ci_high {
            covered += 1;
        }
    }
    ensure(covered >= 90, || format!("coverage {covered}/100"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(899);
    let ages: Vec<f64> = (0..5000).map(|_| rng.random_range(25.0..=70.0)).collect();
    let y: Vec<bool> = ages.iter().map(|a| rng.random_bool(normal.cdf(0.02 * a))).collect();
    let mut worst: f64 = 0.0;
    for beta in [-0.01, 0.005, 0.01, 0.03, 0.05] {
        let h = 1e-7;
        let numeric = (probit_log_likelihood(beta + h, &ages, &y) - probit_log_likelihood(beta - h, &ages, &y)) / (2.0 * h);
        let analytic = probit_gradient(beta, &ages, &y);
        let rel = (numeric - analytic).abs() / analytic.abs().max(1.0);
        ensure(rel <= 1e-5, || format!("gradient at {beta}: {analytic} vs {numeric}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("coverage {covered}/100, gradient relative error {worst:.1e}"))
}

fn code(s: &str) -> DisciplineCode {
    s.parse().unwrap()
}

fn cloning_detection() -> Outcome {
    let cloned = code("01/A1");
    let long = code("05/E1");
    let mut profiles = vec![
        DisciplineProfile { code: cloned, cloning: 1.0, report_words: 60 },
        DisciplineProfile { code: long, cloning: 0.0, report_words: 400 },
    ];
    for c in ["02/A1", "03/B1", "09/H1", "12/A1"] {
        profiles.push(DisciplineProfile { code: code(c), cloning: 0.5, report_words: 150 });
    }
    let params = SynthParams {
        applications: 900,
        seed: 9,
        overlap: 0.0,
        profiles,
        ..SynthParams::default()
    };
    let (corpus, _) = synthesize(&params).map_err(|e| e.to_string())?;
    let opts = ReportOptions { sample_size: 60, seed: 9, workers: None };
    let metrics = compute_report_metrics(&corpus, &opts).map_err(|e| e.to_string())?;
    let labels = quadrant_classify(&metrics);
    for role in [Role::Associate, Role::Full] {
        let m = metrics
            .iter()
            .find(|m| m.discipline == cloned && m.role == role)
            .ok_or("cloned group missing")?;
        ensure(m.median_pairwise_distance == Some(0.0), || format!("cloned distance {:?}", m.median_pairwise_distance))?;
        ensure(labels.get(&(cloned, role)) == Some(&QuadrantLabel::ShortSimilar), || {
            format!("cloned group labelled {:?}", labels.get(&(cloned, role)))
        })?;
        ensure(labels.get(&(long, role)) == Some(&QuadrantLabel::LongDistinct), || {
            format!("long group labelled {:?}", labels.get(&(long, role)))
        })?;
    }
    Ok(format!("{} groups labelled", labels.len()))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
                continue;
            }
            let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
            let mut bytes = std::fs::read(&p).unwrap();
            if rel == METADATA_FILE {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                for k in ["started_at", "finished_at", "elapsed_ms"] {
                    v.as_object_mut().unwrap().remove(k);
                }
                bytes = serde_json::to_vec(&v).unwrap();
            }
            out.push((rel, bytes));
        }
    }
    out.sort();
    out
}

fn deterministic_pipeline() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let t = Instant::now();
    let mut trees = Vec::new();
    for run in ["first", "second"] {
        let config = RunConfig {
            corpus_path: Some(fixture("corpus_500.jsonl")),
            thresholds_path: Some(fixture("thresholds_500.csv")),
            output_dir: tmp.path().join(run),
            seed: 42,
            workers: Some(1),
            ..RunConfig::default()
        };
        cmd_all(&config).map_err(|e| e.to_string())?;
        trees.push(tree(&config.output_dir));
    }
    let elapsed = t.elapsed();
    let names = |t: &[(String, Vec<u8>)]| t.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    ensure(names(&trees[0]) == names(&trees[1]), || "file sets differ".into())?;
    for ((name, a), (_, b)) in trees[0].iter().zip(&trees[1]) {
        ensure(a == b, || format!("{name} differs"))?;
    }
    ensure(trees[0].len() > 10, || format!("only {} files", trees[0].len()))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{} identical files, both runs in {elapsed:?}", trees[0].len()))
}

fn pairwise_performance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let abc = alphabet(36);
    let docs: Vec<String> = (0..100).map(|_| random_chars(&mut rng, &abc, 10_000).into_iter().collect()).collect();
    let t = Instant::now();
    let single = pairwise_distance_summary_with(&docs, Some(1)).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure(single.pairs == 4950, || format!("{} pairs", single.pairs))?;
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    for workers in [2, 4] {
        let multi = pairwise_distance_summary_with(&docs, Some(workers)).map_err(|e| e.to_string())?;
        ensure(multi == single, || format!("{workers} workers disagree"))?;
    }
    Ok(format!("4950 pairs in {elapsed:?} on one worker, median {:.4}", single.median))
}

fn main() {
    let checks: [Check; 11] = [
        ("german tank interval", tank_interval),
        ("random string distance", random_string_distance),
        ("levenshtein vs reference", levenshtein_matches_reference),
        ("metric axioms", metric_axioms),
        ("contemporary h-index vs definition", h_index_matches_definition),
        ("academic twins", twin_paradox),
        ("maximal cliques vs brute force", cliques_match_brute_force),
        ("probit calibration", probit_calibration),
        ("template cloning detection", cloning_detection),
        ("deterministic pipeline", deterministic_pipeline),
        ("pairwise distance performance", pairwise_performance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match result {
            Ok(detail) => println!("[{:>2}] PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[{:>2}] FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
