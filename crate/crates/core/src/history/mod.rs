//! Git history access: first-parent linearization, per-commit file version
//! enumeration with rename tracking, and author identity merging.

mod identity;
mod rename;
mod repo;

pub use identity::{AuthorIdentity, IdentityTable, Mailmap};
pub use rename::{detect_renames, token_similarity, RenamePair};
pub use repo::{EnumerateStats, LineageState, RepoHistory, VersionEvent};

use crate::comments::Language;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// One node of the linearized first-parent chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub commit_id: String,
    /// Zero-based position in the chain, root first.
    pub ordinal: usize,
    /// Author timestamp, UTC seconds.
    pub timestamp: i64,
    pub author_name: String,
    pub author_email: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    Added,
    Modified,
    Renamed,
    Deleted,
}

/// One snapshot of one file at one commit. A `Deleted` version has no
/// content; a `Renamed` version keeps the lineage id of the old path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileVersion {
    pub lineage_id: String,
    pub path: String,
    pub commit_id: String,
    pub ordinal: usize,
    pub timestamp: i64,
    pub author_name: String,
    pub author_email: String,
    pub change_kind: ChangeKind,
    pub language: Language,
}

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("cannot open repository at `{path}`: {source}")]
    OpenRepo { path: String, source: git2::Error },
    #[error("missing branch `{0}`")]
    MissingBranch(String),
    #[error("branch `{0}` has no commits")]
    EmptyHistory(String),
    #[error("rename similarity threshold must be in (0, 1], got {0}")]
    BadThreshold(f64),
    #[error("mailmap line {line}: expected `Name <email> Old Name <old@email>`")]
    MailmapSyntax { line: usize },
    #[error(transparent)]
    Git(#[from] git2::Error),
}

/// Extension-to-language map used to pick which files are mined.
/// `.c/.h` are C; `.cc/.cpp/.cxx/.hpp/.hh/.cu` are C++; `.java` Java;
/// `.py` Python.
pub fn default_extension_map() -> BTreeMap<String, Language> {
    let mut m = BTreeMap::new();
    for ext in [".c", ".h"] {
        m.insert(ext.to_string(), Language::C);
    }
    for ext in [".cc", ".cpp", ".cxx", ".hpp", ".hh", ".cu"] {
        m.insert(ext.to_string(), Language::Cpp);
    }
    m.insert(".java".to_string(), Language::Java);
    m.insert(".py".to_string(), Language::Python);
    m
}

/// Language of `path` under an extension map, None when the file is not a
/// mined source file.
pub fn classify_path(path: &str, extensions: &BTreeMap<String, Language>) -> Option<Language> {
    let name = path.rsplit('/').next().unwrap_or(path);
    let dot = name.rfind('.')?;
    extensions.get(&name[dot..].to_ascii_lowercase()).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_map_covers_the_four_languages() {
        let m = default_extension_map();
        assert_eq!(classify_path("src/a.c", &m), Some(Language::C));
        assert_eq!(classify_path("src/a.hh", &m), Some(Language::Cpp));
        assert_eq!(classify_path("A.JAVA", &m), Some(Language::Java));
        assert_eq!(classify_path("pkg/mod.py", &m), Some(Language::Python));
        assert_eq!(classify_path("README.md", &m), None);
        assert_eq!(classify_path("noext", &m), None);
        assert_eq!(classify_path("dir.py/file", &m), None);
    }
}
