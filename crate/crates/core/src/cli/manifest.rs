use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::math::quadrature::QuadratureConfig;
use crate::mc::MonteCarloConfig;
use crate::non_zec::SearchConfig;

/// Written next to every output file; `argv` re-runs the command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub tool_version: String,
    pub quadrature: QuadratureConfig,
    pub mc: MonteCarloConfig,
    pub search: SearchConfig,
    pub wall_time: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        serde_json::from_str(&text).map_err(|e| crate::Error::Parse {
            source_name: path.as_ref().display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serialises");
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// `results.csv` → `results.csv.manifest.json`
pub fn manifest_path(output: &Path) -> PathBuf {
    sibling(output, "manifest.json")
}

pub(crate) fn sibling(output: &Path, suffix: &str) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    output.with_file_name(name)
}
