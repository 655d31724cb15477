//! Error shaping and artifact writing.
//!
//! Failures leave the process with a nonzero exit code and one JSON object on
//! stderr. Successful commands write every artifact under one directory, each
//! stamped with the tool version, the seed, and a hash of the full effective
//! configuration, so identical invocations produce identical bytes.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use qdirect_core::io::{config_hash, save_json, save_json_compact, Document, Meta};

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qdirect_core::Error),
    #[error("reading {path}: {source}")]
    Read { path: PathBuf, source: qdirect_core::Error },
    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: qdirect_core::Error },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(_) => "core",
            CliError::Read { .. } | CliError::Write { .. } => "io",
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }
}

/// Raw bytes of an input file, for content digests.
pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Read { path: path.to_owned(), source: e.into() })
}

/// Writer for one command's output directory. Every artifact carries the same
/// provenance header.
pub struct Artifacts {
    dir: PathBuf,
    meta: Meta,
}

impl Artifacts {
    /// Create the output directory and fix the provenance stamp. The hash
    /// covers `config`, which must capture everything that shapes the
    /// outputs, including the contents of any input files.
    pub fn new<C: Serialize>(dir: &Path, seed: u64, config: &C) -> Result<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Write { path: dir.to_owned(), source: e.into() })?;
        let hash = config_hash(config)?;
        let meta = Meta::new("qdirect", env!("CARGO_PKG_VERSION"), seed, hash);
        Ok(Artifacts { dir: dir.to_owned(), meta })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Human-oriented artifact: pretty-printed JSON.
    pub fn save_pretty<T: Serialize>(&self, name: &str, payload: T) -> Result<PathBuf> {
        let path = self.path(name);
        save_json(&path, &Document { meta: self.meta.clone(), payload })
            .map_err(|source| CliError::Write { path: path.clone(), source })?;
        Ok(path)
    }

    /// Bulk artifact: single-line JSON streamed to disk.
    pub fn save_compact<T: Serialize>(&self, name: &str, payload: T) -> Result<PathBuf> {
        let path = self.path(name);
        save_json_compact(&path, &Document { meta: self.meta.clone(), payload })
            .map_err(|source| CliError::Write { path: path.clone(), source })?;
        Ok(path)
    }

    /// Tabular artifact: a comment line with the provenance stamp, a header
    /// line, then one row per item, streamed so large tables never sit in
    /// memory whole.
    pub fn save_csv<I>(&self, name: &str, header: &str, rows: I) -> Result<PathBuf>
    where
        I: IntoIterator<Item = String>,
    {
        let path = self.path(name);
        let write = |path: &Path| -> std::io::Result<()> {
            let mut out = std::io::BufWriter::new(fs::File::create(path)?);
            writeln!(
                out,
                "# {} {} seed={} config_hash={}",
                self.meta.tool, self.meta.version, self.meta.seed, self.meta.config_hash
            )?;
            writeln!(out, "{header}")?;
            for row in rows {
                writeln!(out, "{row}")?;
            }
            out.flush()
        };
        write(&path).map_err(|e| CliError::Write { path: path.clone(), source: e.into() })?;
        Ok(path)
    }
}

/// Format a float so the value written is the value parsed back, without
/// locking artifact files to one fixed precision.
pub fn csv_float(v: f64) -> String {
    let mut s = format!("{v}");
    if s.bytes().all(|b| b.is_ascii_digit() || b == b'-') {
        s.push_str(".0");
    }
    s
}
