//! Synthetic corpus generator with controllable report cloning, report
//! length, age effect on qualification and co-qualification overlap.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::corpus::{
    Applicant, Application, Corpus, DisciplineCode, DisciplineTable, Outcome, Publication, PublicationCategory, Role,
    TitleCategory,
};
use crate::error::{Error, Result};
use crate::indicators::{compute_indicator_set, Thresholds};
use crate::stats::median;

/// Per-discipline knobs. `cloning` is the probability that a report is a
/// verbatim copy of the discipline template.
#[derive(Debug, Clone, PartialEq)]
pub struct DisciplineProfile {
    pub code: DisciplineCode,
    pub cloning: f64,
    pub report_words: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub applications: usize,
    pub seed: u64,
    /// Number of disciplines drawn when `profiles` is empty.
    pub disciplines: usize,
    pub cloning: f64,
    pub report_words: usize,
    /// Slope of `Pr(qualified | age) = Φ(beta * age)`.
    pub beta: f64,
    /// Probability that an applicant also applies in other disciplines.
    pub overlap: f64,
    pub observation_year: i32,
    pub profiles: Vec<DisciplineProfile>,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            applications: 500,
            seed: 1,
            disciplines: 24,
            cloning: 0.1,
            report_words: 150,
            beta: 0.02,
            overlap: 0.3,
            observation_year: crate::corpus::DEFAULT_OBSERVATION_YEAR,
            profiles: Vec::new(),
        }
    }
}

const VOCABULARY: &[&str] = &[
    "il", "candidato", "presenta", "una", "produzione", "scientifica", "ampia", "continua", "e", "di", "buona",
    "qualità", "con", "contributi", "originali", "nel", "settore", "la", "commissione", "ritiene", "che", "non",
    "raggiunge", "livello", "richiesto", "per", "abilitazione", "funzioni", "professore", "pubblicazioni",
    "collocazione", "editoriale", "rilevante", "internazionale", "impatto", "limitato", "attività", "didattica",
    "titoli", "valutati", "positivamente", "giudizio", "complessivo", "maturità", "piena", "coerenza", "tematiche",
    "metodologia", "rigorosa", "risultati", "significativi", "riviste", "monografie", "capitoli", "progetti",
    "ricerca", "partecipazione", "congressi", "premi", "unanimità", "maggioranza", "sufficiente", "insufficiente",
    "apprezzabile", "discreta", "ottima", "eccellente", "modesta", "autonomia", "collaborazione", "gruppo",
    "periodo", "estero", "direzione", "comitato", "ampiezza", "intensità", "temporale", "parametri", "mediane",
];

const FIRST_NAMES: &[&str] = &[
    "Giulia", "Marco", "Francesca", "Luca", "Chiara", "Andrea", "Sara", "Paolo", "Elena", "Matteo", "Anna",
    "Giorgio", "Laura", "Stefano", "Marta", "Davide",
];

const LAST_NAMES: &[&str] = &[
    "Rossi", "Bianchi", "Romano", "Colombo", "Ricci", "Marino", "Greco", "Bruno", "Gallo", "Conti", "Costa",
    "Giordano", "Mancini", "Rizzo", "Lombardi", "Moretti",
];

fn text(rng: &mut ChaCha8Rng, words: usize) -> String {
    let mut out = String::new();
    for i in 0..words {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(VOCABULARY[rng.random_range(0..VOCABULARY.len())]);
    }
    out
}

fn check_params(p: &SynthParams) -> Result<()> {
    let unit = |name: &str, v: f64| {
        if (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {v}")))
        }
    };
    unit("cloning", p.cloning)?;
    unit("overlap", p.overlap)?;
    for pr in &p.profiles {
        unit("cloning", pr.cloning)?;
    }
    if p.profiles.is_empty() && p.disciplines == 0 && p.applications > 0 {
        return Err(Error::InvalidArgument("at least one discipline is needed".into()));
    }
    if !p.beta.is_finite() {
        return Err(Error::InvalidArgument("beta must be finite".into()));
    }
    Ok(())
}

fn profiles(p: &SynthParams, rng: &mut ChaCha8Rng) -> Result<Vec<DisciplineProfile>> {
    if !p.profiles.is_empty() {
        let table = DisciplineTable::bundled();
        for pr in &p.profiles {
            if table.get(&pr.code).is_none() {
                return Err(Error::UnknownDiscipline {
                    code: pr.code.to_string(),
                    line: 0,
                });
            }
        }
        return Ok(p.profiles.clone());
    }
    let all: Vec<DisciplineCode> = DisciplineTable::bundled().iter().map(|d| d.code).collect();
    let n = p.disciplines.min(all.len());
    let mut picked: Vec<usize> = index::sample(rng, all.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|i| DisciplineProfile {
            code: all[i],
            cloning: p.cloning,
            report_words: ((p.report_words as f64) * rng.random_range(0.5..1.5)).round().max(3.0) as usize,
        })
        .collect())
}

fn publications(rng: &mut ChaCha8Rng, bibliometric: bool, area: u8, age: i32, obs: i32) -> Vec<Publication> {
    let n = rng.random_range(3..=40);
    let career = (age - 24).clamp(1, 35);
    let first = obs - rng.random_range(0..career);
    let cites = Geometric::new(0.08).expect("valid probability");
    (0..n)
        .map(|i| {
            let year = if i == 0 { first } else { rng.random_range(first..=obs) };
            let u: f64 = rng.random();
            let category = if bibliometric {
                match u {
                    u if u < 0.70 => PublicationCategory::JournalPaper,
                    u if u < 0.90 => PublicationCategory::ProceedingsPaper,
                    u if u < 0.95 => PublicationCategory::BookChapter,
                    _ => PublicationCategory::AbstractInJournal,
                }
            } else {
                match u {
                    u if u < 0.40 => PublicationCategory::JournalPaper,
                    u if u < 0.70 => PublicationCategory::BookChapter,
                    u if u < 0.80 => PublicationCategory::Monograph,
                    u if u < 0.87 => PublicationCategory::ReviewInVolume,
                    u if u < 0.93 => PublicationCategory::Preface,
                    u if u < 0.97 => PublicationCategory::Curatorship,
                    _ => PublicationCategory::ProceedingsPaper,
                }
            };
            let mut p = Publication::new(Some(year), category).with_citations(cites.sample(rng));
            if category == PublicationCategory::JournalPaper {
                p.venue = Some(format!("J{area:02}-{:02}", rng.random_range(0..20)));
            }
            p
        })
        .collect()
}

/// Generates a corpus and per-(discipline, role) thresholds set to the
/// medians of the generated indicator values.
pub fn synthesize(p: &SynthParams) -> Result<(Corpus, Vec<Thresholds>)> {
    check_params(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut corpus = Corpus::empty(p.observation_year);
    if p.applications == 0 {
        return Ok((corpus, Vec::new()));
    }
    let table = DisciplineTable::bundled();
    let profiles = profiles(p, &mut rng)?;
    let templates: Vec<String> = profiles.iter().map(|pr| text(&mut rng, pr.report_words)).collect();
    let normal = Normal::standard();

    for pr in &profiles {
        let d = table.get(&pr.code).expect("checked above");
        if !d.bibliometric {
            let venues = (0..5).map(|k| format!("J{:02}-{k:02}", d.area_id)).collect();
            corpus.top_journal_lists.insert(pr.code, venues);
        }
    }

    let mut serial = 0u64;
    let mut person = 0usize;
    while corpus.applications.len() < p.applications {
        person += 1;
        let primary = rng.random_range(0..profiles.len());
        let mut chosen = vec![primary];
        if rng.random_bool(p.overlap) && profiles.len() > 1 {
            let extra = rng.random_range(1..=3.min(profiles.len() - 1));
            let area = profiles[primary].code.area_id();
            let same: Vec<usize> = (0..profiles.len())
                .filter(|&i| i != primary && profiles[i].code.area_id() == area)
                .collect();
            for _ in 0..extra {
                let pick = if !same.is_empty() && rng.random_bool(0.7) {
                    same[rng.random_range(0..same.len())]
                } else {
                    rng.random_range(0..profiles.len())
                };
                if !chosen.contains(&pick) {
                    chosen.push(pick);
                }
            }
        }

        let age = rng.random_range(25..=70);
        let birth = NaiveDate::from_ymd_opt(p.observation_year - age, rng.random_range(1..=12), rng.random_range(1..=28))
            .expect("valid date");
        let primary_d = table.get(&profiles[primary].code).expect("checked above");
        let applicant = Applicant {
            first_name: FIRST_NAMES[person % FIRST_NAMES.len()].to_string(),
            last_name: format!("{}-{person}", LAST_NAMES[(person / FIRST_NAMES.len()) % LAST_NAMES.len()]),
            birth_date: Some(birth),
            publications: publications(&mut rng, primary_d.bibliometric, primary_d.area_id, age, p.observation_year),
        };
        let role = if rng.random_bool(0.6) { Role::Associate } else { Role::Full };
        let p_qualified = normal.cdf(p.beta * f64::from(age));

        for &i in &chosen {
            if corpus.applications.len() >= p.applications {
                break;
            }
            let pr = &profiles[i];
            serial += 1 + u64::from(rng.random_bool(0.05));
            let report_text = if rng.random_bool(pr.cloning) {
                templates[i].clone()
            } else {
                let words = ((pr.report_words as f64) * rng.random_range(0.6..1.4)).round().max(3.0) as usize;
                text(&mut rng, words)
            };
            let titles: BTreeSet<TitleCategory> = TitleCategory::ALL
                .iter()
                .enumerate()
                .filter(|(k, _)| rng.random_bool(0.05 + 0.03 * (*k % 10) as f64))
                .map(|(_, t)| *t)
                .collect();
            let outcome = if rng.random_bool(p_qualified) {
                Outcome::Qualified
            } else {
                Outcome::NotQualified
            };
            corpus.applications.insert(
                serial,
                Application {
                    serial_id: serial,
                    applicant_ref: applicant.key(),
                    discipline: pr.code,
                    role,
                    outcome,
                    report_text,
                    titles,
                },
            );
        }
        corpus.applicants.insert(applicant.key(), applicant);
    }
    let thresholds = median_thresholds(&corpus)?;
    Ok((corpus, thresholds))
}

/// Thresholds equal to the per-(discipline, role) medians of the corpus'
/// own indicator values.
pub fn median_thresholds(corpus: &Corpus) -> Result<Vec<Thresholds>> {
    let mut values: BTreeMap<(DisciplineCode, Role), [Vec<f64>; 3]> = BTreeMap::new();
    for app in corpus.applications() {
        let (Some(a), Some(d)) = (corpus.applicant(&app.applicant_ref), corpus.disciplines.get(&app.discipline)) else {
            continue;
        };
        let ind = compute_indicator_set(a, d, corpus.observation_year, &corpus.top_journal_lists)?;
        let slot = values.entry((app.discipline, app.role)).or_default();
        for (k, v) in ind.values().into_iter().enumerate() {
            slot[k].push(v);
        }
    }
    values
        .into_iter()
        .map(|((discipline, role), v)| {
            Ok(Thresholds {
                discipline,
                role,
                t1: median(&v[0])?,
                t2: median(&v[1])?,
                t3: median(&v[2])?,
            })
        })
        .collect()
}
