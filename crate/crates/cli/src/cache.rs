//! Comment cache: append-only NDJSON shards per commit range.
//!
//! A shard covers a fixed span of chain ordinals. It can be reused when the
//! commit ids it covers and the extraction settings are unchanged, which
//! skips re-lexing those commits entirely; the surrounding history walk is
//! cheap and always re-runs.

use crate::errors::CliResult;
use crate::io::{ensure_dir, read_ndjson, read_to_string_opt, sha256_bytes, write_json_pretty};
use crate::rows::CommentRow;
use satdmine::history::CommitRecord;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const SHARD_COMMITS: usize = 512;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ShardEntry {
    pub file: String,
    pub first_ordinal: usize,
    pub last_ordinal: usize,
    /// sha256 over the covered commit ids, detects history rewrites.
    pub commits_hash: String,
    /// sha256 of the shard file itself, detects corruption.
    pub file_hash: String,
    pub records: usize,
    /// Lexer diagnostics captured when the shard was built, replayed on
    /// reuse so warm and cold runs emit identical diagnostics.
    #[serde(default)]
    pub lexer_diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct CacheManifest {
    /// Fingerprint of extraction settings (extension map + threshold);
    /// a change invalidates every shard.
    pub settings_fingerprint: String,
    pub shards: BTreeMap<usize, ShardEntry>,
}

pub struct CommentCache {
    dir: PathBuf,
    manifest: CacheManifest,
    fingerprint: String,
}

impl CommentCache {
    pub fn open(out_dir: &Path, settings_fingerprint: String) -> CliResult<CommentCache> {
        let dir = out_dir.join("cache");
        ensure_dir(&dir)?;
        let manifest = read_to_string_opt(&dir.join("manifest.json"))
            .and_then(|text| serde_json::from_str::<CacheManifest>(&text).ok())
            .filter(|m| m.settings_fingerprint == settings_fingerprint)
            .unwrap_or_default();
        Ok(CommentCache {
            dir,
            manifest,
            fingerprint: settings_fingerprint,
        })
    }

    pub fn shard_path(&self, shard: usize) -> PathBuf {
        self.dir.join(format!("comments-{shard:05}.ndjson"))
    }

    fn commits_hash(commits: &[CommitRecord]) -> String {
        let joined: String = commits
            .iter()
            .map(|c| c.commit_id.as_str())
            .collect::<Vec<_>>()
            .join("\n");
        sha256_bytes(joined.as_bytes())
    }

    /// A shard is reusable when its covered commits and its file bytes are
    /// exactly what the manifest recorded.
    pub fn reusable(&self, shard: usize, commits: &[CommitRecord]) -> bool {
        let Some(entry) = self.manifest.shards.get(&shard) else {
            return false;
        };
        if entry.first_ordinal != commits.first().map(|c| c.ordinal).unwrap_or(0)
            || entry.last_ordinal != commits.last().map(|c| c.ordinal).unwrap_or(0)
            || entry.commits_hash != Self::commits_hash(commits)
        {
            return false;
        }
        let path = self.dir.join(&entry.file);
        match std::fs::read(&path) {
            Ok(bytes) => sha256_bytes(&bytes) == entry.file_hash,
            Err(_) => false,
        }
    }

    /// Write a freshly lexed shard and record it together with the lexer
    /// diagnostics it produced.
    pub fn store_with_diagnostics(
        &mut self,
        shard: usize,
        commits: &[CommitRecord],
        rows: &[CommentRow],
        lexer_diagnostics: Vec<String>,
    ) -> CliResult<()> {
        let path = self.shard_path(shard);
        let mut bytes = Vec::new();
        for row in rows {
            bytes.extend_from_slice(serde_json::to_string(row).expect("row").as_bytes());
            bytes.push(b'\n');
        }
        crate::io::write_atomic(&path, &bytes)?;
        self.manifest.shards.insert(
            shard,
            ShardEntry {
                file: path
                    .file_name()
                    .expect("shard file name")
                    .to_string_lossy()
                    .into_owned(),
                first_ordinal: commits.first().map(|c| c.ordinal).unwrap_or(0),
                last_ordinal: commits.last().map(|c| c.ordinal).unwrap_or(0),
                commits_hash: Self::commits_hash(commits),
                file_hash: sha256_bytes(&bytes),
                records: rows.len(),
                lexer_diagnostics,
            },
        );
        Ok(())
    }

    pub fn shard_diagnostics(&self, shard: usize) -> Vec<String> {
        self.manifest
            .shards
            .get(&shard)
            .map(|e| e.lexer_diagnostics.clone())
            .unwrap_or_default()
    }

    pub fn read_shard(&self, shard: usize) -> CliResult<Vec<CommentRow>> {
        read_ndjson(&self.shard_path(shard))
    }

    /// Forget shards past the current chain length (branch rewound).
    pub fn truncate_beyond(&mut self, shard_count: usize) {
        self.manifest.shards.retain(|&k, _| k < shard_count);
    }

    pub fn save(&mut self) -> CliResult<()> {
        self.manifest.settings_fingerprint = self.fingerprint.clone();
        write_json_pretty(&self.dir.join("manifest.json"), &self.manifest)
    }

    /// All comment rows across shards, shard order.
    pub fn read_all(&self, shard_count: usize) -> CliResult<Vec<CommentRow>> {
        let mut rows = Vec::new();
        for shard in 0..shard_count {
            let path = self.shard_path(shard);
            if path.exists() {
                rows.extend(read_ndjson::<CommentRow>(&path)?);
            }
        }
        Ok(rows)
    }
}

pub fn shard_count(total_commits: usize) -> usize {
    total_commits.div_ceil(SHARD_COMMITS)
}
