//! Repository access backed by libgit2.

use super::rename::detect_renames;
use super::{classify_path, ChangeKind, CommitRecord, FileVersion, HistoryError};
use crate::comments::Language;
use git2::{Delta, DiffOptions, Oid, Repository};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

/// One file version plus its content (None for deletions).
#[derive(Debug, Clone)]
pub struct VersionEvent {
    pub version: FileVersion,
    pub content: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct EnumerateStats {
    pub versions: usize,
    pub renames: usize,
    pub diagnostics: Vec<String>,
}

pub struct RepoHistory {
    repo: Repository,
}

impl RepoHistory {
    pub fn open(path: &Path) -> Result<RepoHistory, HistoryError> {
        let repo = Repository::open(path).map_err(|source| HistoryError::OpenRepo {
            path: path.display().to_string(),
            source,
        })?;
        Ok(RepoHistory { repo })
    }

    fn tip(&self, branch: &str) -> Result<git2::Commit<'_>, HistoryError> {
        if branch.is_empty() {
            return Err(HistoryError::MissingBranch(branch.to_string()));
        }
        if let Ok(b) = self.repo.find_branch(branch, git2::BranchType::Local) {
            return b
                .get()
                .peel_to_commit()
                .map_err(|_| HistoryError::EmptyHistory(branch.to_string()));
        }
        // tags and commit ids are accepted too; unresolvable means missing
        self.repo
            .revparse_single(branch)
            .map_err(|_| HistoryError::MissingBranch(branch.to_string()))?
            .peel_to_commit()
            .map_err(|_| HistoryError::MissingBranch(branch.to_string()))
    }

    /// First-parent ancestor chain of the branch tip, oldest first, with
    /// consecutive ordinals from zero.
    pub fn linearize(&self, branch: &str) -> Result<Vec<CommitRecord>, HistoryError> {
        let mut commit = self.tip(branch)?;
        let mut chain = Vec::new();
        loop {
            chain.push(commit.clone());
            match commit.parent(0) {
                Ok(parent) => commit = parent,
                Err(_) => break,
            }
        }
        chain.reverse();
        Ok(chain
            .into_iter()
            .enumerate()
            .map(|(ordinal, c)| {
                let author = c.author();
                CommitRecord {
                    commit_id: c.id().to_string(),
                    ordinal,
                    timestamp: author.when().seconds(),
                    author_name: String::from_utf8_lossy(author.name_bytes()).into_owned(),
                    author_email: String::from_utf8_lossy(author.email_bytes()).into_owned(),
                }
            })
            .collect())
    }

    /// Total ancestor count of the branch tip across all parents
    /// (diagnostic companion to the first-parent chain length).
    pub fn all_ancestors_count(&self, branch: &str) -> Result<usize, HistoryError> {
        let tip = self.tip(branch)?;
        let mut walk = self.repo.revwalk()?;
        walk.push(tip.id())?;
        Ok(walk.count())
    }

    /// Stream every added/modified/renamed/deleted file version along the
    /// chain in (ordinal, path) order. Rename pairing state lives in
    /// `lineages` across calls, so the chain must be visited in order.
    pub fn file_versions<F>(
        &self,
        commits: &[CommitRecord],
        extensions: &BTreeMap<String, Language>,
        rename_threshold: f64,
        mut sink: F,
    ) -> Result<EnumerateStats, HistoryError>
    where
        F: FnMut(VersionEvent),
    {
        let mut stats = EnumerateStats::default();
        let mut lineages = LineageState::default();
        for (i, commit) in commits.iter().enumerate() {
            let prev = if i == 0 { None } else { Some(&commits[i - 1]) };
            let events = self.versions_for_commit(
                prev,
                commit,
                extensions,
                rename_threshold,
                &mut lineages,
                &mut stats,
            )?;
            for ev in events {
                stats.versions += 1;
                sink(ev);
            }
        }
        Ok(stats)
    }

    /// File versions introduced by one commit relative to its predecessor
    /// in the chain (None for the root), sorted by path.
    pub fn versions_for_commit(
        &self,
        prev: Option<&CommitRecord>,
        commit: &CommitRecord,
        extensions: &BTreeMap<String, Language>,
        rename_threshold: f64,
        lineages: &mut LineageState,
        stats: &mut EnumerateStats,
    ) -> Result<Vec<VersionEvent>, HistoryError> {
        let cur_commit = self.repo.find_commit(Oid::from_str(&commit.commit_id)?)?;
        let cur_tree = cur_commit.tree()?;
        let prev_tree = match prev {
            Some(p) => Some(
                self.repo
                    .find_commit(Oid::from_str(&p.commit_id)?)?
                    .tree()?,
            ),
            None => None,
        };

        let mut opts = DiffOptions::new();
        opts.include_typechange(true);
        let diff =
            self.repo
                .diff_tree_to_tree(prev_tree.as_ref(), Some(&cur_tree), Some(&mut opts))?;

        // bucket deltas on paths that match the extension map
        let mut added: Vec<(String, Oid)> = Vec::new();
        let mut deleted: Vec<(String, Oid)> = Vec::new();
        let mut modified: Vec<(String, Oid)> = Vec::new();
        for delta in diff.deltas() {
            let (status, old_file, new_file) = (delta.status(), delta.old_file(), delta.new_file());
            let old_path = old_file.path().map(|p| p.to_string_lossy().into_owned());
            let new_path = new_file.path().map(|p| p.to_string_lossy().into_owned());
            match status {
                Delta::Added => {
                    if let Some(p) = new_path {
                        if classify_path(&p, extensions).is_some() {
                            added.push((p, new_file.id()));
                        }
                    }
                }
                Delta::Deleted => {
                    if let Some(p) = old_path {
                        if classify_path(&p, extensions).is_some() {
                            deleted.push((p, old_file.id()));
                        }
                    }
                }
                Delta::Modified | Delta::Typechange => {
                    if let Some(p) = new_path {
                        if classify_path(&p, extensions).is_some() {
                            modified.push((p, new_file.id()));
                        }
                    }
                }
                _ => {}
            }
        }

        // contents for rename similarity; unreadable blobs are skipped with
        // a diagnostic and the file treated as plain add/delete
        let read = |oid: Oid, path: &str, stats: &mut EnumerateStats| -> Option<String> {
            match self.repo.find_blob(oid) {
                Ok(blob) => Some(String::from_utf8_lossy(blob.content()).into_owned()),
                Err(e) => {
                    stats
                        .diagnostics
                        .push(format!("unreadable blob {oid} at {path}: {e}"));
                    None
                }
            }
        };

        let mut added_contents: Vec<(String, String)> = Vec::new();
        for (p, oid) in &added {
            if let Some(c) = read(*oid, p, stats) {
                added_contents.push((p.clone(), c));
            }
        }
        let mut deleted_contents: Vec<(String, String)> = Vec::new();
        for (p, oid) in &deleted {
            if let Some(c) = read(*oid, p, stats) {
                deleted_contents.push((p.clone(), c));
            } else {
                // content unavailable; it can still close its lineage
                deleted_contents.push((p.clone(), String::new()));
            }
        }

        let renames = detect_renames(&deleted_contents, &added_contents, rename_threshold)?;
        let renamed_old: HashMap<&str, &str> = renames
            .iter()
            .map(|r| (r.old_path.as_str(), r.new_path.as_str()))
            .collect();
        let renamed_new: HashMap<&str, &str> = renames
            .iter()
            .map(|r| (r.new_path.as_str(), r.old_path.as_str()))
            .collect();
        stats.renames += renames.len();

        let make_version = |path: &str, kind: ChangeKind, lineage_id: String| FileVersion {
            lineage_id,
            path: path.to_string(),
            commit_id: commit.commit_id.clone(),
            ordinal: commit.ordinal,
            timestamp: commit.timestamp,
            author_name: commit.author_name.clone(),
            author_email: commit.author_email.clone(),
            change_kind: kind,
            language: classify_path(path, extensions).unwrap_or(Language::Other),
        };

        let mut events = Vec::new();

        for (p, _) in &deleted {
            if renamed_old.contains_key(p.as_str()) {
                continue;
            }
            if let Some(lineage) = lineages.close(p) {
                events.push(VersionEvent {
                    version: make_version(p, ChangeKind::Deleted, lineage),
                    content: None,
                });
            }
        }

        for (p, content) in added_contents {
            let (kind, lineage) = match renamed_new.get(p.as_str()) {
                Some(old) => match lineages.rename(old, &p) {
                    Some(l) => (ChangeKind::Renamed, l),
                    None => (ChangeKind::Added, lineages.open(&p, &commit.commit_id)),
                },
                None => (ChangeKind::Added, lineages.open(&p, &commit.commit_id)),
            };
            events.push(VersionEvent {
                version: make_version(&p, kind, lineage),
                content: Some(content),
            });
        }

        for (p, oid) in &modified {
            let Some(content) = read(*oid, p, stats) else {
                continue;
            };
            let lineage = match lineages.current(p) {
                Some(l) => l,
                None => {
                    // extension flips (typechange into a mined suffix) start
                    // a fresh lineage
                    stats
                        .diagnostics
                        .push(format!("modified path without lineage, treating as added: {p}"));
                    lineages.open(p, &commit.commit_id)
                }
            };
            let kind = if lineages.is_new(p, &commit.commit_id) {
                ChangeKind::Added
            } else {
                ChangeKind::Modified
            };
            events.push(VersionEvent {
                version: make_version(p, kind, lineage),
                content: Some(content),
            });
        }

        events.sort_by(|a, b| a.version.path.cmp(&b.version.path));
        Ok(events)
    }
}

/// Path-to-lineage bookkeeping across the chain walk.
#[derive(Debug, Default)]
pub struct LineageState {
    current: HashMap<String, String>,
}

impl LineageState {
    fn open(&mut self, path: &str, commit_id: &str) -> String {
        let lineage = format!("{commit_id}:{path}");
        self.current.insert(path.to_string(), lineage.clone());
        lineage
    }

    fn close(&mut self, path: &str) -> Option<String> {
        self.current.remove(path)
    }

    fn rename(&mut self, old: &str, new: &str) -> Option<String> {
        let lineage = self.current.remove(old)?;
        self.current.insert(new.to_string(), lineage.clone());
        Some(lineage)
    }

    fn current(&self, path: &str) -> Option<String> {
        self.current.get(path).cloned()
    }

    fn is_new(&self, path: &str, commit_id: &str) -> bool {
        self.current
            .get(path)
            .map(|l| l.starts_with(commit_id))
            .unwrap_or(false)
    }
}
