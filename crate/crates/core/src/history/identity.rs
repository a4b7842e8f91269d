//! Author identity merging: mailmap rewrites first, then exact
//! lowercase-email equality.

use super::{CommitRecord, HistoryError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorIdentity {
    pub canonical_name: String,
    /// Always lowercase, never empty for identities built from commits.
    pub canonical_email: String,
    /// Raw (name, email) pairs merged into this identity.
    pub aliases: BTreeSet<(String, String)>,
}

#[derive(Debug, Clone, Default)]
pub struct Mailmap {
    /// (old_name, old_email_lower) -> (canonical_name, canonical_email_lower)
    entries: Vec<((String, String), (String, String))>,
}

impl Mailmap {
    /// Parse lines of the form `Canonical Name <canonical@email> Old Name
    /// <old@email>`. Blank lines and `#` comments are skipped; anything
    /// else is a syntax error naming the line.
    pub fn parse(text: &str) -> Result<Mailmap, HistoryError> {
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parts = split_mailmap_line(trimmed)
                .ok_or(HistoryError::MailmapSyntax { line: line_no })?;
            entries.push(parts);
        }
        Ok(Mailmap { entries })
    }

    /// Rewrite a raw author pair when a mailmap entry matches it (name
    /// exact, email case-insensitive).
    pub fn rewrite(&self, name: &str, email: &str) -> Option<(String, String)> {
        let email_lower = email.to_lowercase();
        self.entries
            .iter()
            .find(|((n, e), _)| n == name && *e == email_lower)
            .map(|(_, canonical)| canonical.clone())
    }

    fn canonical_names(&self) -> HashMap<String, String> {
        // canonical_email_lower -> canonical_name
        self.entries
            .iter()
            .map(|(_, (name, email))| (email.clone(), name.clone()))
            .collect()
    }
}

fn split_mailmap_line(line: &str) -> Option<((String, String), (String, String))> {
    // Canonical Name <canonical@email> Old Name <old@email>
    let open1 = line.find('<')?;
    let close1 = line[open1..].find('>')? + open1;
    let canonical_name = line[..open1].trim();
    let canonical_email = line[open1 + 1..close1].trim();
    let rest = &line[close1 + 1..];
    let open2 = rest.find('<')?;
    let close2 = rest[open2..].find('>')? + open2;
    let old_name = rest[..open2].trim();
    let old_email = rest[open2 + 1..close2].trim();
    if canonical_name.is_empty()
        || canonical_email.is_empty()
        || old_name.is_empty()
        || old_email.is_empty()
        || !rest[close2 + 1..].trim().is_empty()
    {
        return None;
    }
    Some((
        (old_name.to_string(), old_email.to_lowercase()),
        (canonical_name.to_string(), canonical_email.to_lowercase()),
    ))
}

/// Deterministic identity table over the commit chain.
#[derive(Debug, Clone)]
pub struct IdentityTable {
    identities: Vec<AuthorIdentity>,
    by_email: HashMap<String, usize>,
    mailmap: Mailmap,
}

impl IdentityTable {
    /// Merge the chain's raw authors: mailmap entries first, then exact
    /// lowercase-email equality. The canonical name is the mailmap target
    /// name when one exists, otherwise the first name seen in chain order.
    pub fn build(commits: &[CommitRecord], mailmap: Option<Mailmap>) -> IdentityTable {
        let mailmap = mailmap.unwrap_or_default();
        let mailmap_names = mailmap.canonical_names();
        let mut identities: Vec<AuthorIdentity> = Vec::new();
        let mut by_email: HashMap<String, usize> = HashMap::new();

        for commit in commits {
            let raw = (commit.author_name.clone(), commit.author_email.clone());
            let (name, email) = mailmap
                .rewrite(&raw.0, &raw.1)
                .unwrap_or_else(|| raw.clone());
            let email_lower = email.to_lowercase();
            let idx = *by_email.entry(email_lower.clone()).or_insert_with(|| {
                let canonical_name = mailmap_names
                    .get(&email_lower)
                    .cloned()
                    .unwrap_or_else(|| name.clone());
                identities.push(AuthorIdentity {
                    canonical_name,
                    canonical_email: email_lower.clone(),
                    aliases: BTreeSet::new(),
                });
                identities.len() - 1
            });
            identities[idx].aliases.insert(raw);
        }

        IdentityTable {
            identities,
            by_email,
            mailmap,
        }
    }

    /// Canonical identity for a raw (name, email) pair. Unknown pairs
    /// canonicalize to themselves with the email lowercased.
    pub fn resolve(&self, name: &str, email: &str) -> AuthorIdentity {
        let (n, e) = self
            .mailmap
            .rewrite(name, email)
            .unwrap_or_else(|| (name.to_string(), email.to_string()));
        let email_lower = e.to_lowercase();
        if let Some(&idx) = self.by_email.get(&email_lower) {
            return self.identities[idx].clone();
        }
        AuthorIdentity {
            canonical_name: n,
            canonical_email: email_lower,
            aliases: BTreeSet::from([(name.to_string(), email.to_string())]),
        }
    }

    pub fn identities(&self) -> &[AuthorIdentity] {
        &self.identities
    }

    /// Commits in the chain authored by `identity` with timestamp <= `time`.
    pub fn commit_count_at(
        &self,
        identity: &AuthorIdentity,
        time: i64,
        commits: &[CommitRecord],
    ) -> usize {
        commits
            .iter()
            .filter(|c| {
                c.timestamp <= time
                    && self
                        .resolve(&c.author_name, &c.author_email)
                        .canonical_email
                        == identity.canonical_email
            })
            .count()
    }
}
