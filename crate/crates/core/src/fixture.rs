//! Deterministic git repository builder for tests and benchmarks.
//!
//! Commits are assembled from in-memory snapshots with fixed author
//! signatures and timestamps, so the same script always produces the same
//! commit ids, byte for byte, on any machine.

use git2::{Oid, Repository, RepositoryInitOptions, Signature, Time};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// A branch line under construction: its file snapshot and tip commit.
#[derive(Debug, Clone, Default)]
pub struct Line {
    files: BTreeMap<String, String>,
    tip: Option<Oid>,
}

impl Line {
    pub fn tip_id(&self) -> Option<String> {
        self.tip.map(|oid| oid.to_string())
    }
}

/// One change applied by a commit.
#[derive(Debug, Clone)]
pub enum Change<'a> {
    /// Create or overwrite a file.
    Put(&'a str, &'a str),
    /// Delete a file.
    Remove(&'a str),
    /// Move a file keeping its content.
    Move(&'a str, &'a str),
}

pub struct FixtureRepo {
    repo: Repository,
    pub path: PathBuf,
}

impl FixtureRepo {
    /// Initialize an empty repository with `master` as the initial head.
    pub fn init(path: &Path) -> Result<FixtureRepo, git2::Error> {
        let mut opts = RepositoryInitOptions::new();
        opts.initial_head("master");
        let repo = Repository::init_opts(path, &opts)?;
        Ok(FixtureRepo {
            repo,
            path: path.to_path_buf(),
        })
    }

    pub fn new_line(&self) -> Line {
        Line::default()
    }

    pub fn fork(&self, line: &Line) -> Line {
        line.clone()
    }

    /// Commit `changes` on top of `line`, advancing its tip. Returns the
    /// commit id.
    pub fn commit(
        &self,
        line: &mut Line,
        message: &str,
        author: (&str, &str),
        time: i64,
        changes: &[Change<'_>],
    ) -> Result<String, git2::Error> {
        for change in changes {
            match change {
                Change::Put(path, content) => {
                    line.files.insert((*path).to_string(), (*content).to_string());
                }
                Change::Remove(path) => {
                    line.files.remove(*path);
                }
                Change::Move(old, new) => {
                    if let Some(content) = line.files.remove(*old) {
                        line.files.insert((*new).to_string(), content);
                    }
                }
            }
        }
        let tree_oid = self.write_tree(&line.files)?;
        let tree = self.repo.find_tree(tree_oid)?;
        let sig = Signature::new(author.0, author.1, &Time::new(time, 0))?;
        let parents: Vec<git2::Commit<'_>> = match line.tip {
            Some(oid) => vec![self.repo.find_commit(oid)?],
            None => vec![],
        };
        let parent_refs: Vec<&git2::Commit<'_>> = parents.iter().collect();
        let oid = self
            .repo
            .commit(None, &sig, &sig, message, &tree, &parent_refs)?;
        line.tip = Some(oid);
        Ok(oid.to_string())
    }

    /// Merge `theirs` into `ours` keeping ours' snapshot (an "ours" merge;
    /// enough to exercise first-parent linearization).
    pub fn merge(
        &self,
        ours: &mut Line,
        theirs: &Line,
        message: &str,
        author: (&str, &str),
        time: i64,
    ) -> Result<String, git2::Error> {
        let tree_oid = self.write_tree(&ours.files)?;
        let tree = self.repo.find_tree(tree_oid)?;
        let sig = Signature::new(author.0, author.1, &Time::new(time, 0))?;
        let first = self.repo.find_commit(ours.tip.expect("ours has commits"))?;
        let second = self
            .repo
            .find_commit(theirs.tip.expect("theirs has commits"))?;
        let oid = self
            .repo
            .commit(None, &sig, &sig, message, &tree, &[&first, &second])?;
        ours.tip = Some(oid);
        Ok(oid.to_string())
    }

    /// Point `refs/heads/<name>` at the line's tip.
    pub fn set_branch(&self, name: &str, line: &Line) -> Result<(), git2::Error> {
        let oid = line.tip.expect("line has commits");
        self.repo.reference(
            &format!("refs/heads/{name}"),
            oid,
            true,
            "fixture branch update",
        )?;
        Ok(())
    }

    /// Build a (possibly nested) tree from the snapshot.
    fn write_tree(&self, files: &BTreeMap<String, String>) -> Result<Oid, git2::Error> {
        #[derive(Default)]
        struct Dir {
            files: BTreeMap<String, Oid>,
            dirs: BTreeMap<String, Dir>,
        }
        let mut root = Dir::default();
        for (path, content) in files {
            let blob = self.repo.blob(content.as_bytes())?;
            let mut node = &mut root;
            let parts: Vec<&str> = path.split('/').collect();
            for part in &parts[..parts.len() - 1] {
                node = node.dirs.entry((*part).to_string()).or_default();
            }
            node.files.insert(parts[parts.len() - 1].to_string(), blob);
        }
        fn write(repo: &Repository, dir: &Dir) -> Result<Oid, git2::Error> {
            let mut builder = repo.treebuilder(None)?;
            for (name, sub) in &dir.dirs {
                let oid = write(repo, sub)?;
                builder.insert(name, oid, 0o040000)?;
            }
            for (name, blob) in &dir.files {
                builder.insert(name, *blob, 0o100644)?;
            }
            builder.write()
        }
        write(&self.repo, &root)
    }
}
