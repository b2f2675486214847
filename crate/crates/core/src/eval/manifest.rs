//! Dataset manifests: one row per processed sequence with its subjective
//! ratings.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::EvalError;

pub const MOS_MIN: f64 = 1.0;
pub const MOS_MAX: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub src: String,
    pub hrc_baseline: String,
    pub hrc_rp: String,
    pub hrt: String,
    pub ref_path: PathBuf,
    pub test_path: PathBuf,
    pub mos: f64,
    pub dmos: Option<f64>,
    pub raw_scores: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    id: String,
    src: String,
    hrc_baseline: String,
    hrc_rp: String,
    hrt: String,
    ref_path: String,
    test_path: String,
    mos: f64,
    dmos: Option<f64>,
    raw_scores: Option<String>,
}

fn parse_raw(s: &str, line: usize) -> Result<Vec<f64>, EvalError> {
    s.split('|')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| EvalError::Manifest(format!("row {line}: raw score {t:?}: {e}")))
        })
        .collect()
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self, EvalError> {
        let m = Self { entries };
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let mut seen = HashSet::new();
        let mut raw_len = None;
        for e in &self.entries {
            if !seen.insert(e.id.as_str()) {
                return Err(EvalError::Manifest(format!("duplicate id {:?}", e.id)));
            }
            if !(MOS_MIN..=MOS_MAX).contains(&e.mos) {
                return Err(EvalError::Manifest(format!("{}: mos {} outside [1, 5]", e.id, e.mos)));
            }
            if let Some(r) = &e.raw_scores {
                match raw_len {
                    None => raw_len = Some(r.len()),
                    Some(n) if n != r.len() => {
                        return Err(EvalError::Manifest(format!(
                            "{}: {} raw scores, earlier entries have {n}",
                            e.id,
                            r.len()
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn from_reader(reader: impl Read) -> Result<Self, EvalError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut entries = Vec::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| EvalError::Manifest(format!("row {line}: {e}")))?;
            let raw_scores = match row.raw_scores.as_deref() {
                None | Some("") => None,
                Some(s) => Some(parse_raw(s, line)?),
            };
            entries.push(ManifestEntry {
                id: row.id,
                src: row.src,
                hrc_baseline: row.hrc_baseline,
                hrc_rp: row.hrc_rp,
                hrt: row.hrt,
                ref_path: row.ref_path.into(),
                test_path: row.test_path.into(),
                mos: row.mos,
                dmos: row.dmos,
                raw_scores,
            });
        }
        Self::new(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EvalError> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))?;
        Self::from_reader(f)
    }

    pub fn to_writer(&self, writer: impl Write) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(writer);
        for e in &self.entries {
            let raw = e.raw_scores.as_ref().map(|r| {
                r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("|")
            });
            w.serialize(Row {
                id: e.id.clone(),
                src: e.src.clone(),
                hrc_baseline: e.hrc_baseline.clone(),
                hrc_rp: e.hrc_rp.clone(),
                hrt: e.hrt.clone(),
                ref_path: e.ref_path.display().to_string(),
                test_path: e.test_path.display().to_string(),
                mos: e.mos,
                dmos: e.dmos,
                raw_scores: raw,
            })
            .map_err(|e| EvalError::Io(e.to_string()))?;
        }
        if self.entries.is_empty() {
            w.write_record(["id", "src", "hrc_baseline", "hrc_rp", "hrt", "ref_path", "test_path", "mos", "dmos", "raw_scores"])
                .map_err(|e| EvalError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| EvalError::Io(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EvalError> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))?;
        self.to_writer(f)
    }

    /// Makes relative sequence paths relative to `base` instead of the
    /// working directory.
    pub fn resolve_paths(&mut self, base: &Path) {
        for e in &mut self.entries {
            for p in [&mut e.ref_path, &mut e.test_path] {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
    }
}
