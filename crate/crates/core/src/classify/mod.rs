//! Trainable SATD detection and debt typing.
//!
//! The detector follows the composite design: case-folded word features,
//! information-gain feature selection over the pooled corpus, one
//! multinomial naive-Bayes sub-classifier per project (Laplace alpha = 1),
//! and majority voting across sub-classifiers at prediction time. Binary
//! vote ties resolve SATD-positive; multiclass ties resolve to the
//! lexicographically first label.

mod bayes;
mod eval;

pub use bayes::{predict, train, ClassifierModel, Prediction, SubModel};
pub use eval::{cross_validate, evaluate, EvalReport};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// The debt taxonomy; exactly one label per comment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DebtType {
    Algorithm,
    Compatibility,
    Defect,
    Design,
    Documentation,
    Requirement,
    Test,
    NotSatd,
}

impl DebtType {
    pub const SATD_TYPES: [DebtType; 7] = [
        DebtType::Algorithm,
        DebtType::Compatibility,
        DebtType::Defect,
        DebtType::Design,
        DebtType::Documentation,
        DebtType::Requirement,
        DebtType::Test,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DebtType::Algorithm => "algorithm",
            DebtType::Compatibility => "compatibility",
            DebtType::Defect => "defect",
            DebtType::Design => "design",
            DebtType::Documentation => "documentation",
            DebtType::Requirement => "requirement",
            DebtType::Test => "test",
            DebtType::NotSatd => "not_satd",
        }
    }

    pub fn parse(s: &str) -> Option<DebtType> {
        match s.to_ascii_lowercase().as_str() {
            "algorithm" => Some(DebtType::Algorithm),
            "compatibility" => Some(DebtType::Compatibility),
            "defect" => Some(DebtType::Defect),
            "design" => Some(DebtType::Design),
            "documentation" => Some(DebtType::Documentation),
            "requirement" => Some(DebtType::Requirement),
            "test" => Some(DebtType::Test),
            "not_satd" | "notsatd" => Some(DebtType::NotSatd),
            _ => None,
        }
    }
}

/// Binary-mode labels as they appear in corpus files.
pub const BINARY_POSITIVE: &str = "SATD";
pub const BINARY_NEGATIVE: &str = "NOT_SATD";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusMode {
    Binary,
    Typed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub project: String,
    pub label: String,
    pub text: String,
}

/// Labeled training data grouped by project.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingCorpus {
    pub entries: Vec<CorpusEntry>,
    pub mode: CorpusMode,
}

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("unknown label `{0}` (expected SATD, NOT_SATD or a debt type name)")]
    UnknownLabel(String),
    #[error("corpus mixes binary and typed labels (`{0}` vs `{1}`)")]
    MixedModes(String, String),
    #[error("feature count must be at least 1")]
    BadFeatureCount,
    #[error("every project sub-corpus is single-class; nothing to train")]
    AllSubCorporaSingleClass,
    #[error("evaluation set is empty")]
    EmptyEvalSet,
    #[error("fold count must be in 2..=samples ({0} given, {1} samples)")]
    BadFoldCount(usize, usize),
    #[error("model file is version {0}, expected {1}")]
    ModelVersion(u32, u32),
}

impl TrainingCorpus {
    /// Validate labels and infer the corpus mode.
    pub fn new(entries: Vec<CorpusEntry>) -> Result<TrainingCorpus, ClassifyError> {
        if entries.is_empty() {
            return Err(ClassifyError::EmptyCorpus);
        }
        let mut saw_binary_positive = false;
        let mut saw_typed: Option<String> = None;
        for e in &entries {
            if e.label == BINARY_POSITIVE {
                saw_binary_positive = true;
            } else if e.label == BINARY_NEGATIVE {
                // legal in both modes
            } else if DebtType::parse(&e.label).is_some() {
                if saw_typed.is_none() {
                    saw_typed = Some(e.label.clone());
                }
            } else {
                return Err(ClassifyError::UnknownLabel(e.label.clone()));
            }
        }
        if saw_binary_positive {
            if let Some(t) = saw_typed {
                return Err(ClassifyError::MixedModes(BINARY_POSITIVE.to_string(), t));
            }
        }
        let mode = if saw_typed.is_some() {
            CorpusMode::Typed
        } else {
            CorpusMode::Binary
        };
        // canonicalize: typed mode folds NOT_SATD into not_satd
        let entries = entries
            .into_iter()
            .map(|mut e| {
                if mode == CorpusMode::Typed {
                    if e.label == BINARY_NEGATIVE {
                        e.label = DebtType::NotSatd.name().to_string();
                    } else if let Some(t) = DebtType::parse(&e.label) {
                        e.label = t.name().to_string();
                    }
                }
                e
            })
            .collect();
        Ok(TrainingCorpus { entries, mode })
    }

    pub fn projects(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.entries.iter().map(|e| e.project.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        names
    }

    /// Whether a canonical label counts as SATD-positive.
    pub fn is_positive(label: &str) -> bool {
        label == BINARY_POSITIVE || matches!(DebtType::parse(label), Some(t) if t != DebtType::NotSatd)
    }
}

/// Case-folded word tokens: runs of letters, digits and underscores, with
/// tokens shorter than two characters dropped. No stemming, no stopwords.
pub fn preprocess(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '_' {
            for lc in ch.to_lowercase() {
                current.push(lc);
            }
        } else if !current.is_empty() {
            if current.chars().count() >= 2 {
                tokens.push(std::mem::take(&mut current));
            } else {
                current.clear();
            }
        }
    }
    if current.chars().count() >= 2 {
        tokens.push(current);
    }
    tokens
}

fn entropy_bits(counts: &BTreeMap<&str, usize>, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let mut h = 0.0;
    for &c in counts.values() {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

/// Information gain of a feature over the corpus labels:
/// `IG = H(label) - [P(f) H(label|f) + P(!f) H(label|!f)]`, base-2 logs
/// with `0 log 0 = 0`.
pub fn information_gain(corpus: &TrainingCorpus, feature: &str) -> Result<f64, ClassifyError> {
    if corpus.entries.is_empty() {
        return Err(ClassifyError::EmptyCorpus);
    }
    let docs: Vec<(bool, &str)> = corpus
        .entries
        .iter()
        .map(|e| {
            (
                preprocess(&e.text).iter().any(|t| t == feature),
                e.label.as_str(),
            )
        })
        .collect();
    Ok(information_gain_over(&docs))
}

fn information_gain_over(docs: &[(bool, &str)]) -> f64 {
    let total = docs.len();
    let mut all: BTreeMap<&str, usize> = BTreeMap::new();
    let mut with: BTreeMap<&str, usize> = BTreeMap::new();
    let mut without: BTreeMap<&str, usize> = BTreeMap::new();
    let mut n_with = 0;
    for &(present, label) in docs {
        *all.entry(label).or_insert(0) += 1;
        if present {
            n_with += 1;
            *with.entry(label).or_insert(0) += 1;
        } else {
            *without.entry(label).or_insert(0) += 1;
        }
    }
    let n_without = total - n_with;
    let h = entropy_bits(&all, total);
    let h_with = entropy_bits(&with, n_with);
    let h_without = entropy_bits(&without, n_without);
    let p_with = n_with as f64 / total as f64;
    let ig = h - (p_with * h_with + (1.0 - p_with) * h_without);
    ig.max(0.0)
}

/// Top-k features by information gain; ties broken lexicographically.
pub fn select_features(
    corpus: &TrainingCorpus,
    k: usize,
) -> Result<Vec<(String, f64)>, ClassifyError> {
    if k == 0 {
        return Err(ClassifyError::BadFeatureCount);
    }
    if corpus.entries.is_empty() {
        return Err(ClassifyError::EmptyCorpus);
    }
    // presence sets per document, then one IG pass per distinct feature
    let doc_tokens: Vec<(Vec<String>, &str)> = corpus
        .entries
        .iter()
        .map(|e| {
            let mut t = preprocess(&e.text);
            t.sort_unstable();
            t.dedup();
            (t, e.label.as_str())
        })
        .collect();
    let mut features: Vec<&str> = doc_tokens
        .iter()
        .flat_map(|(ts, _)| ts.iter().map(|s| s.as_str()))
        .collect();
    features.sort_unstable();
    features.dedup();

    let mut scored = crate::par::map(&features, |&feature| {
        let docs: Vec<(bool, &str)> = doc_tokens
            .iter()
            .map(|(ts, label)| {
                (
                    ts.binary_search_by(|t| t.as_str().cmp(feature)).is_ok(),
                    *label,
                )
            })
            .collect();
        (feature.to_string(), information_gain_over(&docs))
    });

    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("finite IG")
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(k);
    Ok(scored)
}

/// Cochran's sample size with finite-population correction, rounded up:
/// `n0 = z^2 p(1-p) / e^2` at p = 0.5, then `n = n0 / (1 + (n0-1)/N)`.
pub fn sample_size(population: u64, confidence: f64, margin: f64) -> u64 {
    assert!(population >= 1, "population must be at least 1");
    assert!(confidence > 0.0 && confidence < 1.0, "confidence in (0,1)");
    assert!(margin > 0.0 && margin < 1.0, "margin in (0,1)");
    let z = crate::numeric::special::probit(1.0 - (1.0 - confidence) / 2.0);
    let n0 = z * z * 0.25 / (margin * margin);
    let n = n0 / (1.0 + (n0 - 1.0) / population as f64);
    (n.ceil() as u64).min(population)
}

#[cfg(test)]
mod tests;
