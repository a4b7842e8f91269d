//! Rename pairing between one commit's deleted and added files.
//!
//! Exact content matches pair first at similarity 1.0 (smallest paths
//! first, each path used at most once). The remainder pairs greedily by
//! token-multiset Dice similarity at or above the threshold.

use super::HistoryError;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct RenamePair {
    pub old_path: String,
    pub new_path: String,
    pub similarity: f64,
}

fn token_counts(content: &str) -> (BTreeMap<&str, u64>, u64) {
    let mut counts = BTreeMap::new();
    let mut total = 0u64;
    for token in content.split(|c: char| !(c.is_alphanumeric() || c == '_')) {
        if !token.is_empty() {
            *counts.entry(token).or_insert(0) += 1;
            total += 1;
        }
    }
    (counts, total)
}

/// Multiset Dice coefficient over word tokens: `2 |A & B| / (|A| + |B|)`.
/// Two empty files count as identical.
pub fn token_similarity(a: &str, b: &str) -> f64 {
    let (ca, na) = token_counts(a);
    let (cb, nb) = token_counts(b);
    if na + nb == 0 {
        return 1.0;
    }
    let mut inter = 0u64;
    for (tok, &count) in &ca {
        if let Some(&other) = cb.get(tok) {
            inter += count.min(other);
        }
    }
    2.0 * inter as f64 / (na + nb) as f64
}

/// Pair deleted paths with added paths. Inputs are (path, content) lists;
/// output pairs each path at most once.
pub fn detect_renames(
    deleted: &[(String, String)],
    added: &[(String, String)],
    threshold: f64,
) -> Result<Vec<RenamePair>, HistoryError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(HistoryError::BadThreshold(threshold));
    }
    let mut deleted: Vec<&(String, String)> = deleted.iter().collect();
    let mut added: Vec<&(String, String)> = added.iter().collect();
    deleted.sort_by(|a, b| a.0.cmp(&b.0));
    added.sort_by(|a, b| a.0.cmp(&b.0));

    let mut pairs = Vec::new();
    let mut used_deleted = vec![false; deleted.len()];
    let mut used_added = vec![false; added.len()];

    // pass 1: identical content
    for (ai, add) in added.iter().enumerate() {
        for (di, del) in deleted.iter().enumerate() {
            if used_deleted[di] {
                continue;
            }
            if del.1 == add.1 {
                pairs.push(RenamePair {
                    old_path: del.0.clone(),
                    new_path: add.0.clone(),
                    similarity: 1.0,
                });
                used_deleted[di] = true;
                used_added[ai] = true;
                break;
            }
        }
    }

    // pass 2: greedy by similarity, ties by (old, new) path order
    let mut candidates = Vec::new();
    for (di, del) in deleted.iter().enumerate() {
        if used_deleted[di] {
            continue;
        }
        for (ai, add) in added.iter().enumerate() {
            if used_added[ai] {
                continue;
            }
            let sim = token_similarity(&del.1, &add.1);
            if sim >= threshold {
                candidates.push((di, ai, sim));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .expect("finite similarity")
            .then_with(|| deleted[a.0].0.cmp(&deleted[b.0].0))
            .then_with(|| added[a.1].0.cmp(&added[b.1].0))
    });
    for (di, ai, sim) in candidates {
        if used_deleted[di] || used_added[ai] {
            continue;
        }
        used_deleted[di] = true;
        used_added[ai] = true;
        pairs.push(RenamePair {
            old_path: deleted[di].0.clone(),
            new_path: added[ai].0.clone(),
            similarity: sim,
        });
    }
    pairs.sort_by(|a, b| a.old_path.cmp(&b.old_path));
    Ok(pairs)
}
