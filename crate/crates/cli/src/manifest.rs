//! Run manifests written next to every output file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Every parameter after flags, config file and defaults are merged.
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    /// Hex SHA-256 of the data file.
    pub output_digest: String,
    pub output: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `<output>.manifest.json`
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Writes `data` to `output` and its manifest beside it.
pub fn write_with_manifest<P: Serialize>(
    output: &Path,
    data: &[u8],
    command: &str,
    parameters: &P,
    seed: Option<u64>,
) -> Result<RunManifest, CliError> {
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(output, data).map_err(|e| CliError::io(output, e))?;
    let manifest = RunManifest {
        command: command.to_string(),
        parameters: serde_json::to_value(parameters).map_err(|e| CliError::Numeric(e.to_string()))?,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        output_digest: sha256_hex(data),
        output: output.display().to_string(),
    };
    let side = sidecar_path(output);
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Numeric(e.to_string()))?;
    text.push('\n');
    fs::write(&side, text).map_err(|e| CliError::io(&side, e))?;
    Ok(manifest)
}
