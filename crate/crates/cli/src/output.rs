//! Deterministic CSV assembly: UTF-8, LF line endings, shortest
//! round-trip float formatting, and no timestamps, so a rerun with the
//! same inputs reproduces every file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// One CSV file accumulated in memory.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push('\n');
        Self { buf }
    }

    /// Appends a row of numbers.
    pub fn row(&mut self, values: &[f64]) {
        self.row_opt(&values.iter().map(|&v| Some(v)).collect::<Vec<_>>());
    }

    /// Appends a row where `None` renders as an empty field, the marker
    /// for a column that does not apply to this row.
    pub fn row_opt(&mut self, values: &[Option<f64>]) {
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            if let Some(v) = v {
                let _ = write!(self.buf, "{v}");
            }
        }
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.buf.as_bytes())
    }
}

/// Creates `dir` (and parents) if needed and returns
/// `dir/prefix_stem.csv`.
pub fn csv_path(dir: &Path, prefix: &str, stem: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(format!("{prefix}_{stem}.csv")))
}

/// `dir/prefix_stem.ext` for non-CSV artifacts.
pub fn artifact_path(dir: &Path, prefix: &str, stem: &str, ext: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(format!("{prefix}_{stem}.{ext}")))
}
