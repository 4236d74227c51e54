use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

/// Bad flags, missing inputs or incompatible files: exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn require_exists(path: &Path, what: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(usage(format!("{what} {} does not exist", path.display())))
    }
}

/// Output written to a temporary file beside its destination and renamed
/// into place by [`Staged::commit`]; dropped uncommitted, it leaves nothing.
pub struct Staged {
    target: PathBuf,
    file: NamedTempFile,
}

impl Staged {
    pub fn new(target: &Path) -> Result<Self> {
        let dir = match target.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let file =
            NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
        Ok(Self {
            target: target.to_path_buf(),
            file,
        })
    }

    pub fn write_with(&mut self, f: impl FnOnce(&mut BufWriter<&File>) -> std::io::Result<()>) -> Result<()> {
        let mut w = BufWriter::new(self.file.as_file());
        f(&mut w)
            .and_then(|()| w.flush())
            .with_context(|| format!("writing {}", self.target.display()))
    }

    pub fn commit(self) -> Result<()> {
        let target = self.target;
        self.file
            .persist(&target)
            .map(|_| ())
            .with_context(|| format!("moving output into {}", target.display()))
    }
}

pub type Writer<'a> = Box<dyn FnOnce(&mut BufWriter<&File>) -> std::io::Result<()> + 'a>;

/// Stages every file first and renames only once all of them were written.
pub fn write_all_atomic(outputs: Vec<(&Path, Writer<'_>)>) -> Result<()> {
    let mut staged = Vec::with_capacity(outputs.len());
    for (path, f) in outputs {
        let mut s = Staged::new(path)?;
        s.write_with(f)?;
        staged.push(s);
    }
    for s in staged {
        s.commit()?;
    }
    Ok(())
}

pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let mut s = Staged::new(path)?;
    s.write_with(|w| w.write_all(text.as_bytes()))?;
    s.commit()
}
