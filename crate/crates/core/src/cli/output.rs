use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::error::Error;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one run, sufficient to repeat it with `wh rerun`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Every subcommand flag with its resolved value.
    pub args: IndexMap<String, String>,
    pub threads: usize,
    pub out_dir: PathBuf,
    pub outputs: Vec<String>,
    /// Command-specific counts and summaries.
    pub stats: serde_json::Value,
    pub wall_seconds: f64,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Input(Error::io(path, e)))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: not a run manifest: {e}", path.display())))
    }
}

/// Output files held in memory until the run has succeeded, so a failing
/// run leaves nothing behind.
#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(String, Vec<u8>)>,
}

impl Staged {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_owned(), bytes));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Writes every file and then the manifest.
    pub fn commit(self, dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Input(Error::io(dir, e)))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| CliError::Input(Error::io(&path, e)))?;
        }
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
        std::fs::write(&path, json).map_err(|e| CliError::Input(Error::io(&path, e)))?;
        Ok(())
    }
}
