//! Directory store: `entries/<id>.json`, `edges/<sub>_<sup>.json` and
//! content-addressed `evidence/<sha256>.json`.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{verify_lattice, CatalogEntry, Evidence, Lattice, LatticeEdge};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

/// Single writer over a store directory; loads return snapshots.
#[derive(Debug)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: &Path) -> Result<Self, StoreError> {
        for sub in ["entries", "edges", "evidence"] {
            let p = root.join(sub);
            fs::create_dir_all(&p).map_err(io_err(&p))?;
        }
        Ok(Store { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn evidence_path(&self, hash: &str) -> PathBuf {
        self.root.join("evidence").join(format!("{hash}.json"))
    }

    fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), StoreError> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|source| StoreError::Json { path: path.display().to_string(), source })?;
        bytes.push(b'\n');
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, &bytes).map_err(io_err(&tmp))?;
        fs::rename(&tmp, path).map_err(io_err(path))
    }

    fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, StoreError> {
        let bytes = fs::read(path).map_err(io_err(path))?;
        serde_json::from_slice(&bytes).map_err(|source| StoreError::Json { path: path.display().to_string(), source })
    }

    pub fn write_entry(&mut self, e: &CatalogEntry) -> Result<(), StoreError> {
        Self::write_json(&self.root.join("entries").join(format!("{}.json", e.id)), e)
    }

    pub fn write_edge(&mut self, e: &LatticeEdge, ev: &Evidence) -> Result<(), StoreError> {
        let ep = self.evidence_path(&e.evidence);
        if !ep.exists() {
            Self::write_json(&ep, ev)?;
        }
        Self::write_json(&self.root.join("edges").join(format!("{}_{}.json", e.sub, e.sup)), e)
    }

    /// Write every entry and edge of a lattice, removing edge files that
    /// are no longer part of it.
    pub fn save(&mut self, l: &Lattice) -> Result<(), StoreError> {
        for e in &l.entries {
            self.write_entry(e)?;
        }
        let keep: std::collections::BTreeSet<String> =
            l.edges.iter().map(|e| format!("{}_{}.json", e.sub, e.sup)).collect();
        for e in &l.edges {
            if let Some(ev) = l.evidence.get(&e.evidence) {
                self.write_edge(e, ev)?;
            }
        }
        for f in Self::json_files(&self.root.join("edges"))? {
            if f.file_name().is_some_and(|n| !keep.contains(&*n.to_string_lossy())) {
                fs::remove_file(&f).map_err(io_err(&f))?;
            }
        }
        Ok(())
    }

    fn json_files(dir: &Path) -> Result<Vec<PathBuf>, StoreError> {
        let mut v: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(io_err(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        v.sort();
        Ok(v)
    }

    pub fn load_evidence(&self, hash: &str) -> Result<Evidence, StoreError> {
        Self::read_json(&self.evidence_path(hash))
    }

    /// Load a snapshot. Every edge's evidence is re-verified (witness
    /// checks only, no search reruns); edges whose evidence is missing,
    /// corrupt or fails are flagged `inconclusive`.
    pub fn load(&self) -> Result<Lattice, StoreError> {
        self.load_checked(false).map(|(l, _)| l)
    }

    /// Load and verify; `full` also reruns not-found searches. Returns the
    /// failures alongside the (flagged) lattice.
    pub fn load_checked(&self, full: bool) -> Result<(Lattice, Vec<(String, String, String)>), StoreError> {
        let mut l = Lattice::default();
        for p in Self::json_files(&self.root.join("entries"))? {
            l.entries.push(Self::read_json(&p)?);
        }
        for p in Self::json_files(&self.root.join("edges"))? {
            let e: LatticeEdge = Self::read_json(&p)?;
            if let Ok(ev) = self.load_evidence(&e.evidence) {
                l.evidence.insert(e.evidence.clone(), ev);
            }
            l.edges.push(e);
        }
        l.sort();
        let failures = verify_lattice(&mut l, full);
        Ok((l, failures))
    }
}
