//! CSV tables, manifests and writing an experiment's results to disk.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::fields::Snapshot;

/// Fixed float format of every table.
pub fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Lines starting with `#` appended after the rows.
    pub footer: Vec<String>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), footer: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.footer.push(line.into());
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        for f in &self.footer {
            s.push_str("# ");
            s.push_str(f);
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub config_hash: String,
    pub version: String,
    pub config: serde_json::Value,
    pub grids: Vec<usize>,
    pub constants: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub notes: Vec<String>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Manifest {
            kind: cfg.kind.name().to_string(),
            config_hash: cfg.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::from_str(&cfg.canonical_json()).expect("canonical json parses"),
            grids: Vec::new(),
            constants: BTreeMap::new(),
            flags: BTreeMap::new(),
            notes: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn grid(&mut self, n: usize) {
        if !self.grids.contains(&n) {
            self.grids.push(n);
        }
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.constants.insert(name.to_string(), value);
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.flags.insert(name.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Tables, snapshots and manifest of one experiment.
pub struct ExperimentOutput {
    pub manifest: Manifest,
    pub tables: Vec<(String, Table)>,
    pub snapshots: Vec<(String, Snapshot)>,
}

impl ExperimentOutput {
    pub fn new(manifest: Manifest) -> Self {
        ExperimentOutput { manifest, tables: Vec::new(), snapshots: Vec::new() }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn add_table(&mut self, name: impl Into<String>, table: Table) {
        let name = name.into();
        self.manifest.files.push(name.clone());
        self.tables.push((name, table));
    }

    pub fn add_snapshot(&mut self, name: impl Into<String>, snap: Snapshot) {
        let name = name.into();
        self.manifest.files.push(name.clone());
        self.snapshots.push((name, snap));
    }

    /// Write every table, snapshot and `manifest.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for (name, t) in &self.tables {
            let p = dir.join(name);
            std::fs::write(&p, t.to_csv())?;
            out.push(p);
        }
        for (name, s) in &self.snapshots {
            let p = dir.join(name);
            s.save(&p)?;
            out.push(p);
        }
        let p = dir.join("manifest.json");
        std::fs::write(&p, self.manifest.to_json())?;
        out.push(p);
        Ok(out)
    }
}
