//! Run manifests written next to every output file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

/// Everything needed to regenerate an output exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub artifact_version: String,
    pub output_paths: Vec<PathBuf>,
    /// Column name to description, for tabular outputs.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub columns: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            parameters: BTreeMap::new(),
            seed: None,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            output_paths: Vec::new(),
            columns: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn output(mut self, path: impl Into<PathBuf>) -> Self {
        self.output_paths.push(path.into());
        self
    }

    pub fn column(mut self, name: &str, description: &str) -> Self {
        self.columns.insert(name.to_string(), description.to_string());
        self
    }

    /// `out.csv` gets `out.csv.json`.
    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(File::open(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("series.csv");
        let m = RunManifest::new("figures")
            .param("id", 3)
            .param("epsilon", [0.5, 1.0])
            .seed(9)
            .output(&out)
            .column("p_t", "true frequency");
        let side = RunManifest::sidecar_path(&out);
        assert!(side.to_string_lossy().ends_with("series.csv.json"));
        m.write(&side).unwrap();
        assert_eq!(RunManifest::read(&side).unwrap(), m);
    }
}
