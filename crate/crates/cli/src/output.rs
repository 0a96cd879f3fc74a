//! Output directory handling: provenance stamps and atomic writes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const CONFIG_HASH: &str = "config_hash";
pub const MASTER_SEED: &str = "master_seed";
pub const EXPERIMENT: &str = "experiment";
const GENERATOR: &str = "generator";

pub type Provenance = BTreeMap<String, String>;

pub fn provenance(experiment: &str, config_hash: &str, master_seed: u64) -> Provenance {
    BTreeMap::from([
        (EXPERIMENT.to_string(), experiment.to_string()),
        (CONFIG_HASH.to_string(), config_hash.to_string()),
        (MASTER_SEED.to_string(), master_seed.to_string()),
        (
            GENERATOR.to_string(),
            format!("tscl-coop {}", env!("CARGO_PKG_VERSION")),
        ),
    ])
}

/// Provenance keys a derived artifact inherits from its input.
pub fn inherit(from: &BTreeMap<String, String>) -> Option<Provenance> {
    let experiment = from.get(EXPERIMENT)?;
    let hash = from.get(CONFIG_HASH)?;
    let seed = from.get(MASTER_SEED)?.parse().ok()?;
    Some(provenance(experiment, hash, seed))
}

/// Prefixes CSV text with `# key=value` comment lines.
pub fn stamp_csv(prov: &Provenance, csv: &str) -> String {
    let mut out: String = prov.iter().map(|(k, v)| format!("# {k}={v}\n")).collect();
    out.push_str(csv);
    out
}

/// Files collected in memory and written together.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    /// `root/<experiment>`.
    pub fn new(root: &Path, experiment: &str) -> Self {
        Artifacts {
            dir: root.join(experiment),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    /// Fails when any file already exists, unless `force`.
    pub fn check(&self, names: &[String], force: bool) -> Result<(), CliError> {
        if force {
            return Ok(());
        }
        let existing: Vec<String> = names
            .iter()
            .map(|n| self.dir.join(n))
            .filter(|p| p.exists())
            .map(|p| p.display().to_string())
            .collect();
        if existing.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(format!(
                "refusing to overwrite without --force: {}",
                existing.join(", ")
            )))
        }
    }

    /// Writes every file through a temporary file and a rename.
    pub fn commit(self, force: bool) -> Result<Vec<PathBuf>, CliError> {
        let names: Vec<String> = self.files.iter().map(|(n, _)| n.clone()).collect();
        self.check(&names, force)?;
        let io = |what: &str, p: &Path, e: std::io::Error| {
            CliError::Runtime(format!("{what} {}: {e}", p.display()))
        };
        std::fs::create_dir_all(&self.dir).map_err(|e| io("cannot create", &self.dir, e))?;
        let mut written = Vec::new();
        for (name, contents) in self.files {
            let path = self.dir.join(&name);
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)
                .map_err(|e| io("cannot write in", &self.dir, e))?;
            tmp.write_all(&contents)
                .map_err(|e| io("cannot write", &path, e))?;
            tmp.persist(&path)
                .map_err(|e| io("cannot rename onto", &path, e.error))?;
            written.push(path);
        }
        Ok(written)
    }
}
