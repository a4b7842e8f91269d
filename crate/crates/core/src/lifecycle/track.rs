//! Comment lineage tracking: first version containing a key introduces it,
//! first subsequent version of the lineage lacking it removes it.

use super::{CommentKey, EventRef, LifecycleError, RemovalReason};
use std::collections::BTreeMap;

/// One file version of one lineage with its normalized comment texts in
/// top-to-bottom order (empty for deletions).
#[derive(Debug, Clone, PartialEq)]
pub struct LineageVersion {
    pub lineage_id: String,
    pub commit_id: String,
    pub ordinal: usize,
    pub timestamp: i64,
    pub author_name: String,
    pub author_email: String,
    pub deleted: bool,
    pub comments: Vec<String>,
}

impl LineageVersion {
    fn event(&self) -> EventRef {
        EventRef {
            commit_id: self.commit_id.clone(),
            ordinal: self.ordinal,
            timestamp: self.timestamp,
            author_name: self.author_name.clone(),
            author_email: self.author_email.clone(),
        }
    }
}

/// A comment instance between introduction and removal (or still open).
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedInstance {
    pub key: CommentKey,
    pub intro: EventRef,
    pub removal: Option<(EventRef, RemovalReason)>,
}

/// Track every comment instance across the ordered version stream.
/// Versions are grouped by lineage; each lineage's versions must arrive in
/// ordinal order. Tracking one lineage is independent of the others, so
/// the per-lineage work fans out in parallel.
pub fn track_lineages(
    versions: &[LineageVersion],
) -> Result<Vec<TrackedInstance>, LifecycleError> {
    let mut by_lineage: BTreeMap<&str, Vec<&LineageVersion>> = BTreeMap::new();
    for v in versions {
        by_lineage.entry(&v.lineage_id).or_default().push(v);
    }
    for (lineage, vs) in &by_lineage {
        if vs.windows(2).any(|w| w[0].ordinal >= w[1].ordinal) {
            return Err(LifecycleError::UnorderedVersions((*lineage).to_string()));
        }
    }

    let lineages: Vec<Vec<&LineageVersion>> = by_lineage.into_values().collect();
    let mut results: Vec<Vec<TrackedInstance>> =
        crate::par::map(&lineages, |vs| track_one(vs));
    let mut out = Vec::new();
    for r in &mut results {
        out.append(r);
    }
    out.sort_by(|a, b| {
        (
            &a.key.lineage_id,
            a.intro.ordinal,
            &a.key.normalized_text,
            a.key.occurrence,
        )
            .cmp(&(
                &b.key.lineage_id,
                b.intro.ordinal,
                &b.key.normalized_text,
                b.key.occurrence,
            ))
    });
    Ok(out)
}

/// Keys of one version: normalized texts with occurrence indices assigned
/// top to bottom.
fn keys_of(version: &LineageVersion) -> BTreeMap<(String, u32), ()> {
    let mut seen: BTreeMap<&str, u32> = BTreeMap::new();
    let mut keys = BTreeMap::new();
    for text in &version.comments {
        let slot = seen.entry(text).or_insert(0);
        keys.insert((text.clone(), *slot), ());
        *slot += 1;
    }
    keys
}

fn track_one(versions: &[&LineageVersion]) -> Vec<TrackedInstance> {
    let mut alive: BTreeMap<(String, u32), EventRef> = BTreeMap::new();
    let mut done = Vec::new();
    for version in versions {
        let present = keys_of(version);
        let reason = if version.deleted {
            RemovalReason::FileDeleted
        } else {
            RemovalReason::TextGone
        };
        // removals first: keys alive but no longer present
        let gone: Vec<(String, u32)> = alive
            .keys()
            .filter(|k| !present.contains_key(*k))
            .cloned()
            .collect();
        for k in gone {
            let intro = alive.remove(&k).expect("key alive");
            done.push(TrackedInstance {
                key: CommentKey {
                    lineage_id: version.lineage_id.clone(),
                    normalized_text: k.0,
                    occurrence: k.1,
                },
                intro,
                removal: Some((version.event(), reason)),
            });
        }
        // introductions: present keys not yet alive
        for (k, ()) in present {
            alive.entry(k).or_insert_with(|| version.event());
        }
    }
    if let Some(last) = versions.last() {
        for ((text, occurrence), intro) in alive {
            done.push(TrackedInstance {
                key: CommentKey {
                    lineage_id: last.lineage_id.clone(),
                    normalized_text: text,
                    occurrence,
                },
                intro,
                removal: None,
            });
        }
    }
    done
}
