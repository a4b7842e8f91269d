//! `extract`: linearize the branch, walk every touched file version, lex
//! comments into the shard cache, and emit the commits/fileversions/
//! identities artifacts.

use crate::cache::{shard_count, CommentCache, SHARD_COMMITS};
use crate::config::RunConfig;
use crate::diag::DiagSink;
use crate::errors::{config_error, repo_error, CliResult};
use crate::io::{ensure_dir, sha256_bytes, write_json_pretty, NdjsonWriter};
use crate::manifest::{RunManifest, StageRecord};
use crate::rows::{CommentRow, CommitRow, FileVersionRow};
use satdmine::comments::{enclosing_scopes, extract_comments};
use satdmine::history::{EnumerateStats, IdentityTable, Mailmap, RepoHistory};
use std::collections::BTreeSet;

pub fn run(config: &RunConfig) -> CliResult<()> {
    let repo_path = config.require_repo()?;
    ensure_dir(&config.out)?;
    let mut diag = DiagSink::new("extract");
    let mut stage = StageRecord::default();

    let history = RepoHistory::open(repo_path).map_err(|e| repo_error(e.to_string()))?;
    let commits = history
        .linearize(&config.branch)
        .map_err(|e| repo_error(e.to_string()))?;
    if commits.is_empty() {
        return Err(repo_error(format!("branch `{}` has no commits", config.branch)));
    }
    if let Some(release) = &config.release {
        if !commits.iter().any(|c| c.commit_id.starts_with(release)) {
            return Err(repo_error(format!(
                "release commit `{release}` is not on the first-parent chain of `{}`",
                config.branch
            )));
        }
    }

    let mailmap = match &config.mailmap {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                config_error(format!("cannot read mailmap `{}`: {e}", path.display()))
            })?;
            Some(Mailmap::parse(&text).map_err(|e| config_error(e.to_string()))?)
        }
        None => None,
    };
    let identities = IdentityTable::build(&commits, mailmap);

    // commits.ndjson with canonical authors
    let commits_path = config.out.join("commits.ndjson");
    let mut commits_writer = NdjsonWriter::create(&commits_path)?;
    for c in &commits {
        let id = identities.resolve(&c.author_name, &c.author_email);
        commits_writer.write(&CommitRow {
            commit_id: c.commit_id.clone(),
            ordinal: c.ordinal,
            timestamp: c.timestamp,
            author_name: id.canonical_name,
            author_email: id.canonical_email,
        })?;
    }
    commits_writer.finish()?;

    let identities_path = config.out.join("identities.json");
    write_json_pretty(&identities_path, &identities.identities().to_vec())?;

    // the chain length is the headline count; the all-ancestors total is
    // reported alongside since the two counting methods differ
    let all_ancestors = history
        .all_ancestors_count(&config.branch)
        .map_err(|e| repo_error(e.to_string()))?;

    let ext_map = config.extension_map();
    let fingerprint = sha256_bytes(
        format!(
            "{}|{}",
            serde_json::to_string(&ext_map).expect("map"),
            config.rename_threshold
        )
        .as_bytes(),
    );
    let mut cache = CommentCache::open(&config.out, fingerprint)?;
    let shards = shard_count(commits.len());
    cache.truncate_beyond(shards);

    let fileversions_path = config.out.join("fileversions.ndjson");
    let mut fv_writer = NdjsonWriter::create(&fileversions_path)?;

    let mut lineage_state = satdmine::history::LineageState::default();
    let mut enum_stats = EnumerateStats::default();
    let mut files_lexed = 0u64;
    let mut shards_reused = 0u64;
    let mut raw_rows = 0u64;
    let mut distinct: BTreeSet<(String, String, u32)> = BTreeSet::new();

    for shard in 0..shards {
        let lo = shard * SHARD_COMMITS;
        let hi = ((shard + 1) * SHARD_COMMITS).min(commits.len());
        let shard_commits = &commits[lo..hi];

        // the walk always runs: it feeds fileversions.ndjson and keeps the
        // rename/lineage state continuous across shards
        let mut batch: Vec<(FileVersionRow, String)> = Vec::new();
        for commit in shard_commits {
            let prev = if commit.ordinal == 0 {
                None
            } else {
                Some(&commits[commit.ordinal - 1])
            };
            let events = history
                .versions_for_commit(
                    prev,
                    commit,
                    &ext_map,
                    config.rename_threshold,
                    &mut lineage_state,
                    &mut enum_stats,
                )
                .map_err(|e| repo_error(e.to_string()))?;
            for ev in events {
                enum_stats.versions += 1;
                let id = identities.resolve(&ev.version.author_name, &ev.version.author_email);
                let row = FileVersionRow {
                    lineage_id: ev.version.lineage_id.clone(),
                    path: ev.version.path.clone(),
                    commit_id: ev.version.commit_id.clone(),
                    ordinal: ev.version.ordinal,
                    timestamp: ev.version.timestamp,
                    author_name: id.canonical_name,
                    author_email: id.canonical_email,
                    change_kind: ev.version.change_kind,
                    language: ev.version.language,
                };
                fv_writer.write(&row)?;
                if let Some(content) = ev.content {
                    batch.push((row, content));
                }
            }
        }

        let rows: Vec<CommentRow> = if cache.reusable(shard, shard_commits) {
            shards_reused += 1;
            cache.read_shard(shard)?
        } else {
            files_lexed += batch.len() as u64;
            let extracted = satdmine::par::map(&batch, |(row, content)| {
                let ex = extract_comments(content, row.language);
                let lines: Vec<u32> = ex.blocks.iter().map(|b| b.start_line).collect();
                let hints = enclosing_scopes(content, row.language, &lines);
                let rows: Vec<CommentRow> = ex
                    .blocks
                    .iter()
                    .zip(hints)
                    .map(|(block, hint)| CommentRow {
                        lineage_id: row.lineage_id.clone(),
                        path: row.path.clone(),
                        commit_id: row.commit_id.clone(),
                        start_line: block.start_line,
                        end_line: block.end_line,
                        style: block.style,
                        normalized_text: block.normalized_text.clone(),
                        enclosing_hint: hint,
                    })
                    .collect();
                let diags: Vec<String> = ex
                    .diagnostics
                    .iter()
                    .map(|d| format!("{} @ {}: {d}", row.commit_id, row.path))
                    .collect();
                (rows, diags)
            });
            let mut rows = Vec::new();
            let mut lexer_diags = Vec::new();
            for (mut r, d) in extracted {
                rows.append(&mut r);
                lexer_diags.extend(d);
            }
            cache.store_with_diagnostics(shard, shard_commits, &rows, lexer_diags)?;
            rows
        };
        for d in cache.shard_diagnostics(shard) {
            diag.push("lexer", d);
        }
        raw_rows += rows.len() as u64;
        // occurrence-indexed distinct identity per file version
        let mut per_version: std::collections::BTreeMap<(&str, &str, &str), u32> =
            std::collections::BTreeMap::new();
        for row in &rows {
            let slot = per_version
                .entry((&row.commit_id, &row.path, &row.normalized_text))
                .or_insert(0);
            distinct.insert((
                row.lineage_id.clone(),
                satdmine::lifecycle::text_hash(&row.normalized_text),
                *slot,
            ));
            *slot += 1;
        }
    }
    fv_writer.finish()?;
    cache.save()?;

    for d in &enum_stats.diagnostics {
        diag.push("enumerate", d);
    }

    stage.input(repo_path)?;
    if let Some(m) = &config.mailmap {
        stage.input(m)?;
    }
    stage.output(&commits_path)?;
    stage.output(&fileversions_path)?;
    stage.output(&identities_path)?;
    stage.count("commits_first_parent", commits.len() as u64);
    stage.count("commits_all_ancestors", all_ancestors as u64);
    stage.count("file_versions", enum_stats.versions as u64);
    stage.count("renames", enum_stats.renames as u64);
    stage.count("files_lexed", files_lexed);
    stage.count("shards_reused", shards_reused);
    stage.count("comment_rows_raw", raw_rows);
    stage.count("comments_distinct", distinct.len() as u64);

    let mut manifest = RunManifest::load_or_new(&config.out, config);
    manifest.record_stage("extract", stage);
    manifest.save(&config.out)?;
    diag.flush(&config.out)?;

    eprintln!(
        "extract: {} commits ({} with all ancestors), {} file versions, {} raw comment rows ({} distinct), {} lexed, {} shards reused",
        commits.len(),
        all_ancestors,
        enum_stats.versions,
        raw_rows,
        distinct.len(),
        files_lexed,
        shards_reused
    );
    Ok(())
}
