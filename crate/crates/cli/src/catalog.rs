use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use eacws::record::CodeRecord;

/// A directory of `<name>.json` code records.
pub struct Catalog {
    dir: PathBuf,
}

impl Catalog {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Catalog { dir: dir.into() }
    }

    pub fn path_of(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.json"))
    }

    /// Every record, sorted by `(n + c, K descending, name)`. A missing
    /// directory is an empty catalog.
    pub fn records(&self) -> Result<Vec<CodeRecord>> {
        if !self.dir.exists() {
            return Ok(Vec::new());
        }
        let entries = fs::read_dir(&self.dir)
            .with_context(|| format!("cannot read catalog {}", self.dir.display()))?;
        let mut out = Vec::new();
        for entry in entries {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            out.push(read_record(&path)?);
        }
        out.sort_by(|a, b| {
            (a.n + a.c, std::cmp::Reverse(a.k), &a.name).cmp(&(b.n + b.c, std::cmp::Reverse(b.k), &b.name))
        });
        Ok(out)
    }

    pub fn get(&self, name: &str) -> Result<Option<CodeRecord>> {
        let path = self.path_of(name);
        if path.exists() {
            read_record(&path).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Writes `rec` as `<name>.json`, replacing any existing file atomically.
    pub fn put(&self, rec: &CodeRecord) -> Result<PathBuf> {
        if rec.name.is_empty() || rec.name.contains(['/', '\\']) || rec.name.starts_with('.') {
            bail!("bad record name {:?}", rec.name);
        }
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("cannot create catalog {}", self.dir.display()))?;
        let path = self.path_of(&rec.name);
        write_atomic(&path, &rec.to_json())?;
        Ok(path)
    }
}

pub fn read_record(path: &Path) -> Result<CodeRecord> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    CodeRecord::from_json(&text).with_context(|| format!("malformed record {}", path.display()))
}

/// Replaces `path` with `text` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        tmp.write_all(b"\n")?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
