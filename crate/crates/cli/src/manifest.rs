//! `manifest.json`, written next to every command's outputs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub base_seed: u64,
    /// RFC 3339; omitted when timing output is suppressed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub started_at: Option<String>,
    /// Every resolved setting, defaults included.
    pub config: serde_json::Value,
    /// File names relative to the output directory, each listed once.
    pub outputs: Vec<String>,
    /// Command-specific headline numbers.
    #[serde(default)]
    pub summary: serde_json::Value,
}

impl RunManifest {
    pub fn new(
        command: &str,
        base_seed: u64,
        config: &impl Serialize,
        timed: bool,
    ) -> CliResult<Self> {
        Ok(RunManifest {
            command: command.to_owned(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            base_seed,
            started_at: timed.then(|| chrono::Utc::now().to_rfc3339()),
            config: serde_json::to_value(config)?,
            outputs: Vec::new(),
            summary: serde_json::Value::Null,
        })
    }

    pub fn from_json(bytes: &[u8]) -> CliResult<Self> {
        let m: RunManifest = serde_json::from_slice(bytes)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> CliResult<()> {
        let mut seen = std::collections::HashSet::new();
        for o in &self.outputs {
            if !seen.insert(o.as_str()) {
                return Err(CliError::Format(format!("output {o:?} listed twice")));
            }
            if o.is_empty() || Path::new(o).is_absolute() || o.contains("..") {
                return Err(CliError::Format(format!(
                    "output {o:?} is not a plain relative name"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
