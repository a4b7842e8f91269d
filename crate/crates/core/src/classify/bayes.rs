//! Per-project multinomial naive Bayes with majority voting.

use super::{
    preprocess, select_features, ClassifyError, CorpusMode, TrainingCorpus, BINARY_POSITIVE,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const MODEL_VERSION: u32 = 1;

/// One project's multinomial naive-Bayes parameters over the shared
/// vocabulary. Laplace alpha = 1 smoothing on both token counts and class
/// priors keeps every log finite and the tables serializable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubModel {
    pub project: String,
    /// log prior per class, aligned with `ClassifierModel::classes`.
    pub class_log_prior: Vec<f64>,
    /// class x vocabulary log likelihoods.
    pub token_log_likelihood: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub version: u32,
    pub mode: CorpusMode,
    /// Sorted class names (canonical label strings).
    pub classes: Vec<String>,
    /// Selected features with their information-gain scores, by rank.
    pub vocabulary: Vec<(String, f64)>,
    pub sub_models: Vec<SubModel>,
    /// Human-readable description of the voting rule.
    pub vote_rule: String,
    /// Projects skipped at training time because their sub-corpus had a
    /// single class.
    pub skipped_projects: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    /// Votes per class name.
    pub votes: BTreeMap<String, usize>,
}

impl ClassifierModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<ClassifierModel, ClassifyError> {
        let model: ClassifierModel =
            serde_json::from_str(s).map_err(|_| ClassifyError::ModelVersion(0, MODEL_VERSION))?;
        if model.version != MODEL_VERSION {
            return Err(ClassifyError::ModelVersion(model.version, MODEL_VERSION));
        }
        Ok(model)
    }

    fn vocab_index(&self) -> BTreeMap<&str, usize> {
        self.vocabulary
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.as_str(), i))
            .collect()
    }

    /// Normalized per-class posterior of one sub-model for a token bag.
    pub fn posterior(&self, sub: &SubModel, tokens: &[String]) -> Vec<f64> {
        let vocab = self.vocab_index();
        let mut log_post = sub.class_log_prior.clone();
        for tok in tokens {
            if let Some(&j) = vocab.get(tok.as_str()) {
                for (c, lp) in log_post.iter_mut().enumerate() {
                    *lp += sub.token_log_likelihood[c][j];
                }
            }
        }
        // log-sum-exp normalization
        let m = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = log_post.iter().map(|lp| (lp - m).exp()).sum();
        log_post.iter().map(|lp| (lp - m).exp() / z).collect()
    }
}

/// Train one sub-model per project over the shared IG-selected vocabulary.
/// Projects whose sub-corpus holds a single class are skipped (recorded on
/// the model); training fails only when nothing is left.
pub fn train(corpus: &TrainingCorpus, k: usize) -> Result<ClassifierModel, ClassifyError> {
    if corpus.entries.is_empty() {
        return Err(ClassifyError::EmptyCorpus);
    }
    let vocabulary = select_features(corpus, k)?;
    let vocab_pos: BTreeMap<&str, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.as_str(), i))
        .collect();

    let mut classes: Vec<String> = corpus.entries.iter().map(|e| e.label.clone()).collect();
    classes.sort_unstable();
    classes.dedup();
    let class_pos: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let n_classes = classes.len();
    let v = vocabulary.len();

    let mut sub_models = Vec::new();
    let mut skipped = Vec::new();
    for project in corpus.projects() {
        let entries: Vec<_> = corpus
            .entries
            .iter()
            .filter(|e| e.project == project)
            .collect();
        let mut present: Vec<&str> = entries.iter().map(|e| e.label.as_str()).collect();
        present.sort_unstable();
        present.dedup();
        if present.len() < 2 {
            skipped.push(project.to_string());
            continue;
        }

        let mut doc_counts = vec![0usize; n_classes];
        let mut token_counts = vec![vec![0u64; v]; n_classes];
        for e in &entries {
            let c = class_pos[e.label.as_str()];
            doc_counts[c] += 1;
            for tok in preprocess(&e.text) {
                if let Some(&j) = vocab_pos.get(tok.as_str()) {
                    token_counts[c][j] += 1;
                }
            }
        }

        let n_docs = entries.len();
        let class_log_prior: Vec<f64> = doc_counts
            .iter()
            .map(|&d| ((d + 1) as f64 / (n_docs + n_classes) as f64).ln())
            .collect();
        let token_log_likelihood: Vec<Vec<f64>> = token_counts
            .iter()
            .map(|counts| {
                let total: u64 = counts.iter().sum();
                counts
                    .iter()
                    .map(|&c| ((c + 1) as f64 / (total + v as u64) as f64).ln())
                    .collect()
            })
            .collect();

        sub_models.push(SubModel {
            project: project.to_string(),
            class_log_prior,
            token_log_likelihood,
        });
    }

    if sub_models.is_empty() {
        return Err(ClassifyError::AllSubCorporaSingleClass);
    }

    let vote_rule = match corpus.mode {
        CorpusMode::Binary => "majority; ties resolve SATD".to_string(),
        CorpusMode::Typed => "majority; ties resolve to lexicographically first label".to_string(),
    };

    Ok(ClassifierModel {
        version: MODEL_VERSION,
        mode: corpus.mode,
        classes,
        vocabulary,
        sub_models,
        vote_rule,
        skipped_projects: skipped,
    })
}

/// Majority vote across sub-models; each sub-model votes its posterior
/// argmax (ties inside one sub-model fall to the lexicographically first
/// class, which keeps prediction deterministic).
pub fn predict(model: &ClassifierModel, text: &str) -> Prediction {
    let tokens = preprocess(text);
    let mut votes: BTreeMap<String, usize> = BTreeMap::new();
    for sub in &model.sub_models {
        let post = model.posterior(sub, &tokens);
        let mut best = 0;
        for (c, &p) in post.iter().enumerate() {
            if p > post[best] {
                best = c;
            }
        }
        *votes.entry(model.classes[best].clone()).or_insert(0) += 1;
    }
    let top = votes.values().copied().max().unwrap_or(0);
    let tied: Vec<&String> = votes
        .iter()
        .filter(|(_, &v)| v == top)
        .map(|(c, _)| c)
        .collect();
    let label = if tied.len() == 1 {
        tied[0].clone()
    } else if model.mode == CorpusMode::Binary && tied.iter().any(|c| *c == BINARY_POSITIVE) {
        BINARY_POSITIVE.to_string()
    } else {
        // BTreeMap iteration is sorted, so the first tied class is the
        // lexicographically smallest
        tied[0].clone()
    };
    Prediction { label, votes }
}
