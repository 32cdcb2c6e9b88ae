use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{hex, RunConfig};
use crate::error::{Error, Result};

pub const METADATA_FILE: &str = "run_metadata.json";

/// The provenance stamp embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub config_digest: String,
    pub seed: u64,
    pub sample_size: usize,
    pub observation_year: i32,
    pub ci_level: f64,
    pub bootstrap_b: usize,
}

impl Header {
    pub fn new(config: &RunConfig, config_digest: String) -> Self {
        Header {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest,
            seed: config.seed,
            sample_size: config.sample_size,
            observation_year: config.observation_year,
            ci_level: config.ci_level,
            bootstrap_b: config.bootstrap_b,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} config_digest={} seed={} sample_size={} observation_year={} ci_level={} bootstrap_b={}",
            self.tool,
            self.version,
            self.config_digest,
            self.seed,
            self.sample_size,
            self.observation_year,
            self.ci_level,
            self.bootstrap_b
        )
    }
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    metadata: &'a Header,
    data: &'a T,
}

/// Writes stamped files under one root and remembers what it wrote.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    header: Header,
    written: Vec<(String, String)>,
}

impl OutputDir {
    pub fn create(root: &Path, header: Header) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            header,
            written: Vec::new(),
        })
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Relative paths and SHA-256 of every file written so far.
    pub fn written(&self) -> &[(String, String)] {
        &self.written
    }

    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.written.push((rel.to_string(), hex(&Sha256::digest(bytes))));
        Ok(path)
    }

    /// Registers a file written by other means.
    pub fn record_existing(&mut self, rel: &str) -> Result<()> {
        let path = self.root.join(rel);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        self.written.push((rel.to_string(), hex(&Sha256::digest(&bytes))));
        Ok(())
    }

    /// CSV with a leading `# ` header comment.
    pub fn write_csv<R: Serialize>(&mut self, rel: &str, rows: &[R]) -> Result<PathBuf> {
        let mut buf = format!("# {}\n", self.header.line()).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush().map_err(|e| Error::io(self.root.join(rel), e))?;
        }
        self.write_bytes(rel, &buf)
    }

    /// CSV from explicit header and string rows; used when rows are empty
    /// and the column names must still appear.
    pub fn write_csv_records(&mut self, rel: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let mut buf = format!("# {}\n", self.header.line()).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(columns)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush().map_err(|e| Error::io(self.root.join(rel), e))?;
        }
        self.write_bytes(rel, &buf)
    }

    /// JSON document `{"metadata": header, "data": value}`.
    pub fn write_json<T: Serialize>(&mut self, rel: &str, data: &T) -> Result<PathBuf> {
        let doc = Stamped {
            metadata: &self.header,
            data,
        };
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        self.write_bytes(rel, &bytes)
    }

    /// Plain text whose first line is the header behind `comment`.
    pub fn write_text(&mut self, rel: &str, comment: &str, body: &str) -> Result<PathBuf> {
        let text = format!("{comment} {}\n{body}", self.header.line());
        self.write_bytes(rel, text.as_bytes())
    }
}

/// Formats an optional float for CSV cells; missing values are empty.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
