//! CSV files with `#`-prefixed comment headers, written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvDocument {
    pub comments: Vec<String>,
    pub header: String,
    pub rows: Vec<String>,
}

impl CsvDocument {
    /// Starts with a `# <tool> <version> <command>` line.
    pub fn new(command: &str, header: &str) -> Self {
        Self {
            comments: vec![format!("{TOOL_NAME} {TOOL_VERSION} {command}")],
            header: header.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.header);
        for r in &self.rows {
            let _ = writeln!(out, "{r}");
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<PathBuf> {
        write_atomic(path, self.render().as_bytes())?;
        Ok(path.to_path_buf())
    }
}

/// Write to a temporary file in the target directory, then rename over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
