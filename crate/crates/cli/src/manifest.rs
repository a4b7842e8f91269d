//! Run manifest: config snapshot, per-stage input/output hashes and
//! counters. Re-running with identical inputs reproduces identical hashes.

use crate::config::RunConfig;
use crate::errors::CliResult;
use crate::io::{read_to_string_opt, sha256_file, write_json_pretty};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct StageRecord {
    /// path -> sha256 of the stage's inputs, in path order.
    pub inputs: BTreeMap<String, String>,
    /// path -> sha256 of the stage's outputs.
    pub outputs: BTreeMap<String, String>,
    /// Free-form counters (files lexed, rows written, cache hits...).
    pub counters: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: serde_json::Value,
    pub stages: BTreeMap<String, StageRecord>,
}

impl RunManifest {
    pub fn load_or_new(out_dir: &Path, config: &RunConfig) -> RunManifest {
        let path = out_dir.join("run_manifest.json");
        if let Some(text) = read_to_string_opt(&path) {
            if let Ok(mut m) = serde_json::from_str::<RunManifest>(&text) {
                m.tool_version = env!("CARGO_PKG_VERSION").to_string();
                m.config = serde_json::to_value(config).expect("config serializes");
                return m;
            }
        }
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::to_value(config).expect("config serializes"),
            stages: BTreeMap::new(),
        }
    }

    pub fn record_stage(&mut self, name: &str, record: StageRecord) {
        self.stages.insert(name.to_string(), record);
    }

    pub fn save(&self, out_dir: &Path) -> CliResult<()> {
        write_json_pretty(&out_dir.join("run_manifest.json"), self)
    }
}

impl StageRecord {
    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        if path.exists() {
            self.inputs
                .insert(path.display().to_string(), sha256_file(path)?);
        }
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> CliResult<()> {
        self.outputs
            .insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    pub fn count(&mut self, key: &str, value: u64) {
        self.counters.insert(key.to_string(), value);
    }
}
