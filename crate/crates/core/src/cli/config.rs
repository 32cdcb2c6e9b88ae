use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{Format, DEFAULT_OBSERVATION_YEAR};
use crate::error::{Error, Result};
use crate::textmetrics::DEFAULT_SAMPLE_SIZE;

pub const DEFAULT_SEED: u64 = 20120;
pub const DEFAULT_LEVEL: f64 = 0.95;
pub const DEFAULT_BOOTSTRAP: usize = 2000;
pub const SEED_ENV: &str = "EVAL_SEED";

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub corpus_path: Option<PathBuf>,
    pub thresholds_path: Option<PathBuf>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub seed: u64,
    pub sample_size: usize,
    pub observation_year: i32,
    /// Whether the year was given explicitly; otherwise the corpus file's
    /// own year, if any, wins over the default.
    #[serde(skip)]
    pub observation_year_explicit: bool,
    pub ci_level: f64,
    pub bootstrap_b: usize,
    pub format: Option<String>,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus_path: None,
            thresholds_path: None,
            output_dir: PathBuf::from("out"),
            seed: DEFAULT_SEED,
            sample_size: DEFAULT_SAMPLE_SIZE,
            observation_year: DEFAULT_OBSERVATION_YEAR,
            observation_year_explicit: false,
            ci_level: DEFAULT_LEVEL,
            bootstrap_b: DEFAULT_BOOTSTRAP,
            format: None,
            workers: None,
        }
    }
}

/// Settings as given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub thresholds: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub sample_size: Option<usize>,
    pub observation_year: Option<i32>,
    pub level: Option<f64>,
    pub bootstrap: Option<usize>,
    pub format: Option<String>,
    pub workers: Option<usize>,
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// skipped; keys accept `-` or `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {}: expected `key = value`", i + 1)));
        };
        let key = k.trim().replace('-', "_");
        let value = v.trim().trim_matches('"').to_string();
        if out.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", i + 1)));
        }
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
}

impl RunConfig {
    /// Precedence: flag, then config file, then `EVAL_SEED` (seed only),
    /// then defaults.
    pub fn resolve(o: &Overrides, env_seed: Option<&str>) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(seed) = env_seed.filter(|s| !s.trim().is_empty()) {
            c.seed = parse_value(SEED_ENV, seed.trim())?;
        }
        if let Some(path) = &o.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new(""));
            for (k, v) in parse_config_file(&text)? {
                match k.as_str() {
                    "corpus" | "corpus_path" => c.corpus_path = Some(base.join(v)),
                    "thresholds" | "thresholds_path" => c.thresholds_path = Some(base.join(v)),
                    "out" | "output_dir" => c.output_dir = base.join(v),
                    "seed" => c.seed = parse_value(&k, &v)?,
                    "sample_size" => c.sample_size = parse_value(&k, &v)?,
                    "observation_year" => {
                        c.observation_year = parse_value(&k, &v)?;
                        c.observation_year_explicit = true;
                    }
                    "level" | "ci_level" => c.ci_level = parse_value(&k, &v)?,
                    "bootstrap" | "bootstrap_b" => c.bootstrap_b = parse_value(&k, &v)?,
                    "format" => c.format = Some(v),
                    "workers" => c.workers = Some(parse_value(&k, &v)?),
                    _ => return Err(Error::Config(format!("unknown key `{k}`"))),
                }
            }
        }
        if let Some(v) = &o.corpus {
            c.corpus_path = Some(v.clone());
        }
        if let Some(v) = &o.thresholds {
            c.thresholds_path = Some(v.clone());
        }
        if let Some(v) = &o.out {
            c.output_dir = v.clone();
        }
        c.seed = o.seed.unwrap_or(c.seed);
        c.sample_size = o.sample_size.unwrap_or(c.sample_size);
        if let Some(y) = o.observation_year {
            c.observation_year = y;
            c.observation_year_explicit = true;
        }
        c.ci_level = o.level.unwrap_or(c.ci_level);
        c.bootstrap_b = o.bootstrap.unwrap_or(c.bootstrap_b);
        if o.format.is_some() {
            c.format = o.format.clone();
        }
        if o.workers.is_some() {
            c.workers = o.workers;
        }
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        if self.sample_size < 2 {
            return Err(Error::Config("sample size must be at least 2".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config(format!("level {} outside (0, 1)", self.ci_level)));
        }
        if self.bootstrap_b == 0 {
            return Err(Error::Config("bootstrap replicates must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }

    pub fn corpus_format(&self) -> Result<Format> {
        match (&self.format, &self.corpus_path) {
            (Some(f), _) => f.parse().map_err(|_| Error::Config(format!("unknown format `{f}`"))),
            (None, Some(p)) => Ok(Format::from_path(p)),
            (None, None) => Ok(Format::Jsonl),
        }
    }

    pub fn require_corpus(&self) -> Result<&Path> {
        let p = self
            .corpus_path
            .as_deref()
            .ok_or_else(|| Error::Config("no corpus given (use --corpus)".into()))?;
        if !p.is_file() {
            return Err(Error::Config(format!("corpus file {} not found", p.display())));
        }
        Ok(p)
    }

    /// Settings that affect results, as `key=value` lines. Paths are left
    /// out; input content enters the digest through its hash instead.
    pub fn canonical_lines(&self) -> Vec<String> {
        vec![
            format!("seed={}", self.seed),
            format!("sample_size={}", self.sample_size),
            format!("observation_year={}", self.observation_year),
            format!("ci_level={}", self.ci_level),
            format!("bootstrap_b={}", self.bootstrap_b),
        ]
    }

    pub fn digest(&self, input_hashes: &[(&str, &str)]) -> String {
        let mut h = Sha256::new();
        for line in self.canonical_lines() {
            h.update(line.as_bytes());
            h.update(b"\n");
        }
        for (name, hash) in input_hashes {
            h.update(format!("{name}={hash}\n").as_bytes());
        }
        hex(&h.finalize())
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex(&Sha256::digest(&bytes)))
}
