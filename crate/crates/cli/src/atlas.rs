//! Polynomial atlas persisted as a single JSON file.
//!
//! Entries are keyed by canonical polynomial string together with `(d, N)`;
//! the same polynomial can occur for different shapes, e.g. a Bell pair and a
//! single ququart.

use std::fs;
use std::io::Write;
use std::path::Path;

use entpoly_core::EntanglementPolynomial;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasEntry {
    pub polynomial: String,
    pub factorization: String,
    pub labels: Vec<String>,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Unix seconds of the last update.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Atlas {
    pub entries: Vec<AtlasEntry>,
}

impl Atlas {
    /// Missing file reads as an empty atlas.
    pub fn load(path: &Path) -> Result<Self> {
        let raw = match fs::read_to_string(path) {
            Ok(raw) => raw,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Self::default()),
            Err(e) => return Err(CliError::Io(format!("{}: {e}", path.display()))),
        };
        let atlas: Atlas = serde_json::from_str(&raw)
            .map_err(|e| CliError::Io(format!("{}: corrupt atlas: {e}", path.display())))?;
        for entry in &atlas.entries {
            let parsed: EntanglementPolynomial = entry.polynomial.parse().map_err(|e| {
                CliError::Io(format!(
                    "{}: entry {:?}: {e}",
                    path.display(),
                    entry.polynomial
                ))
            })?;
            if parsed.canonical_string() != entry.polynomial {
                return Err(CliError::Io(format!(
                    "{}: entry {:?} is not in canonical form",
                    path.display(),
                    entry.polynomial
                )));
            }
        }
        Ok(atlas)
    }

    /// Write to a temporary file in the same directory, then rename over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        let text = serde_json::to_string_pretty(self).expect("atlas serializes");
        tmp.write_all(text.as_bytes()).map_err(io)?;
        tmp.write_all(b"\n").map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// Insert or merge; returns the stored entry.
    pub fn upsert(&mut self, entry: AtlasEntry) -> &AtlasEntry {
        let pos = self
            .entries
            .iter()
            .position(|e| e.polynomial == entry.polynomial && e.d == entry.d && e.n == entry.n);
        let idx = match pos {
            Some(i) => {
                let existing = &mut self.entries[i];
                for label in entry.labels {
                    if !existing.labels.contains(&label) {
                        existing.labels.push(label);
                    }
                }
                existing.timestamp = entry.timestamp;
                i
            }
            None => {
                self.entries.push(entry);
                self.entries.len() - 1
            }
        };
        &self.entries[idx]
    }

    pub fn query(&self, polynomial: &str) -> Vec<&AtlasEntry> {
        self.entries
            .iter()
            .filter(|e| e.polynomial == polynomial)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(poly: &str, label: &str, d: usize, n: usize) -> AtlasEntry {
        AtlasEntry {
            polynomial: poly.into(),
            factorization: "irreducible".into(),
            labels: vec![label.into()],
            d,
            n,
            timestamp: 0,
        }
    }

    #[test]
    fn upsert_merges_labels_per_shape() {
        let mut atlas = Atlas::default();
        atlas.upsert(entry("1 + 3x", "bell", 2, 2));
        atlas.upsert(entry("1 + 3x", "bell", 2, 2));
        atlas.upsert(entry("1 + 3x", "ket(0)", 4, 1));
        let stored = atlas.upsert(entry("1 + 3x", "{explicit}", 2, 2));
        assert_eq!(stored.labels, vec!["bell", "{explicit}"]);
        assert_eq!(atlas.query("1 + 3x").len(), 2);
        assert!(atlas.query("1 + x").is_empty());
    }

    #[test]
    fn save_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("atlas.json");
        assert_eq!(Atlas::load(&path).unwrap(), Atlas::default());
        let mut atlas = Atlas::default();
        atlas.upsert(entry("1 + 6x + x^2", "w", 2, 3));
        atlas.save(&path).unwrap();
        assert_eq!(Atlas::load(&path).unwrap(), atlas);
    }

    #[test]
    fn corrupt_store_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("atlas.json");
        fs::write(&path, "{not json").unwrap();
        assert_eq!(Atlas::load(&path).unwrap_err().exit_code(), 4);
        fs::write(&path, r#"{"entries":[{"polynomial":"1+3x","factorization":"","labels":[],"d":2,"N":2,"timestamp":0}]}"#)
            .unwrap();
        assert_eq!(Atlas::load(&path).unwrap_err().exit_code(), 4);
    }
}
