//! Precision/recall evaluation and seeded k-fold cross-validation.

use super::{
    predict, train, ClassifierModel, ClassifyError, CorpusEntry, TrainingCorpus,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Binary detection metrics (positive = any label other than the negative
/// class) plus the full predicted-vs-true confusion counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub true_positive: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub true_negative: u64,
    /// TP / (TP + FP); None when the denominator is zero.
    pub precision: Option<f64>,
    /// TP / (TP + FN); None when the denominator is zero.
    pub recall: Option<f64>,
    /// (predicted label, true label) -> count.
    pub confusion: BTreeMap<String, BTreeMap<String, u64>>,
    /// Per-project binary counts: (TP, FP, FN, TN).
    pub per_project: BTreeMap<String, (u64, u64, u64, u64)>,
    /// Texts appearing in both a training and an evaluation split
    /// (cross-validation only).
    pub overlap_warnings: u64,
}

impl EvalReport {
    fn from_counts(
        confusion: BTreeMap<String, BTreeMap<String, u64>>,
        per_project: BTreeMap<String, (u64, u64, u64, u64)>,
        overlap_warnings: u64,
    ) -> EvalReport {
        let (mut tp, mut fp, mut fneg, mut tn) = (0, 0, 0, 0);
        for &(a, b, c, d) in per_project.values() {
            tp += a;
            fp += b;
            fneg += c;
            tn += d;
        }
        EvalReport {
            true_positive: tp,
            false_positive: fp,
            false_negative: fneg,
            true_negative: tn,
            precision: (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64),
            recall: (tp + fneg > 0).then(|| tp as f64 / (tp + fneg) as f64),
            confusion,
            per_project,
            overlap_warnings,
        }
    }
}

/// Evaluate a model against labeled entries.
pub fn evaluate(
    model: &ClassifierModel,
    labeled: &[CorpusEntry],
) -> Result<EvalReport, ClassifyError> {
    if labeled.is_empty() {
        return Err(ClassifyError::EmptyEvalSet);
    }
    let mut confusion: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut per_project: BTreeMap<String, (u64, u64, u64, u64)> = BTreeMap::new();
    for entry in labeled {
        let predicted = predict(model, &entry.text).label;
        *confusion
            .entry(predicted.clone())
            .or_default()
            .entry(entry.label.clone())
            .or_insert(0) += 1;
        let truth_pos = TrainingCorpus::is_positive(&entry.label);
        let pred_pos = TrainingCorpus::is_positive(&predicted);
        let slot = per_project.entry(entry.project.clone()).or_insert((0, 0, 0, 0));
        match (pred_pos, truth_pos) {
            (true, true) => slot.0 += 1,
            (true, false) => slot.1 += 1,
            (false, true) => slot.2 += 1,
            (false, false) => slot.3 += 1,
        }
    }
    Ok(EvalReport::from_counts(confusion, per_project, 0))
}

/// Seeded, deterministic k-fold cross-validation. Each fold trains on the
/// remaining folds with the same feature count and evaluates held out;
/// counts aggregate across folds. Identical texts landing in both sides of
/// a fold are counted as overlap warnings.
pub fn cross_validate(
    corpus: &TrainingCorpus,
    folds: usize,
    feature_count: usize,
    seed: u64,
) -> Result<EvalReport, ClassifyError> {
    let n = corpus.entries.len();
    if folds < 2 || folds > n {
        return Err(ClassifyError::BadFoldCount(folds, n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut confusion: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut per_project: BTreeMap<String, (u64, u64, u64, u64)> = BTreeMap::new();
    let mut overlaps = 0;

    for fold in 0..folds {
        let held: Vec<usize> = order
            .iter()
            .copied()
            .enumerate()
            .filter(|(i, _)| i % folds == fold)
            .map(|(_, idx)| idx)
            .collect();
        let held_set: std::collections::BTreeSet<usize> = held.iter().copied().collect();
        let train_entries: Vec<CorpusEntry> = (0..n)
            .filter(|i| !held_set.contains(i))
            .map(|i| corpus.entries[i].clone())
            .collect();
        let train_texts: std::collections::BTreeSet<String> =
            train_entries.iter().map(|e| e.text.clone()).collect();

        let fold_corpus = TrainingCorpus::new(train_entries)?;
        let model = match train(&fold_corpus, feature_count) {
            Ok(m) => m,
            // a degenerate fold (single class everywhere) contributes nothing
            Err(ClassifyError::AllSubCorporaSingleClass) => continue,
            Err(e) => return Err(e),
        };

        for &idx in &held {
            let entry = &corpus.entries[idx];
            if train_texts.contains(&entry.text) {
                overlaps += 1;
            }
            let predicted = predict(&model, &entry.text).label;
            *confusion
                .entry(predicted.clone())
                .or_default()
                .entry(entry.label.clone())
                .or_insert(0) += 1;
            let truth_pos = TrainingCorpus::is_positive(&entry.label);
            let pred_pos = TrainingCorpus::is_positive(&predicted);
            let slot = per_project.entry(entry.project.clone()).or_insert((0, 0, 0, 0));
            match (pred_pos, truth_pos) {
                (true, true) => slot.0 += 1,
                (true, false) => slot.1 += 1,
                (false, true) => slot.2 += 1,
                (false, false) => slot.3 += 1,
            }
        }
    }
    Ok(EvalReport::from_counts(confusion, per_project, overlaps))
}
