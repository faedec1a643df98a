use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Classify, Result};

/// Pretty JSON with a trailing newline.
pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).internal("serializing JSON")?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Files produced by one command, held in memory until all succeed.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }

    /// Writes every file into `dir`. Files are staged next to their
    /// destination and renamed into place only after all were written.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).internal(format!("creating {}", dir.display()))?;
        let staging = tempfile::Builder::new()
            .prefix(".swapsched-")
            .tempdir_in(dir)
            .internal(format!("staging outputs in {}", dir.display()))?;
        for (name, bytes) in &self.files {
            fs::write(staging.path().join(name), bytes).internal(format!("writing {name}"))?;
        }
        let mut written = Vec::with_capacity(self.files.len());
        for (name, _) in &self.files {
            let dest = dir.join(name);
            fs::rename(staging.path().join(name), &dest)
                .internal(format!("moving {name} into place"))?;
            written.push(dest);
        }
        Ok(written)
    }
}

/// CSV from a header and rows of already formatted fields.
pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).internal("writing CSV")?;
    for row in rows {
        w.write_record(row).internal("writing CSV")?;
    }
    w.into_inner()
        .map_err(|e| e.into_error())
        .internal("writing CSV")
}
