use super::*;
use proptest::prelude::*;

fn entry(project: &str, label: &str, text: &str) -> CorpusEntry {
    CorpusEntry {
        project: project.to_string(),
        label: label.to_string(),
        text: text.to_string(),
    }
}

/// Synthetic separable corpus: positives always contain "todo", negatives
/// never do. Two projects so voting is real.
fn separable_corpus(per_class: usize) -> TrainingCorpus {
    let mut entries = Vec::new();
    let fillers = ["alpha beta", "gamma delta", "epsilon zeta", "eta theta"];
    for i in 0..per_class {
        let project = if i % 2 == 0 { "proj_a" } else { "proj_b" };
        entries.push(entry(
            project,
            BINARY_POSITIVE,
            &format!("todo fix the {} path", fillers[i % fillers.len()]),
        ));
        entries.push(entry(
            project,
            BINARY_NEGATIVE,
            &format!("returns the {} value", fillers[(i + 1) % fillers.len()]),
        ));
    }
    TrainingCorpus::new(entries).unwrap()
}

// ------------------------------------------------------------- preprocess

#[test]
fn preprocess_folds_and_splits() {
    assert_eq!(preprocess("TODO: fix THIS"), vec!["todo", "fix", "this"]);
}

#[test]
fn preprocess_drops_short_tokens() {
    assert!(preprocess("a b").is_empty());
    assert_eq!(preprocess("a bc d"), vec!["bc"]);
}

// Tokenizer trace: "TODO(b/26910386)" -> runs TODO, b, 26910386;
// "b" is dropped by the length filter.
#[test]
fn preprocess_issue_reference() {
    assert_eq!(preprocess("TODO(b/26910386)"), vec!["todo", "26910386"]);
}

#[test]
fn preprocess_keeps_underscore_runs() {
    assert_eq!(preprocess("use foo_bar2 now"), vec!["use", "foo_bar2", "now"]);
}

// --------------------------------------------------------------------- IG

#[test]
fn ig_of_ubiquitous_feature_is_zero() {
    let corpus = TrainingCorpus::new(vec![
        entry("p", BINARY_POSITIVE, "todo everywhere"),
        entry("p", BINARY_NEGATIVE, "todo here too"),
    ])
    .unwrap();
    assert_eq!(information_gain(&corpus, "todo").unwrap(), 0.0);
}

#[test]
fn ig_of_perfect_predictor_on_balanced_corpus_is_one_bit() {
    let corpus = TrainingCorpus::new(vec![
        entry("p", BINARY_POSITIVE, "todo fix"),
        entry("p", BINARY_POSITIVE, "todo again"),
        entry("p", BINARY_NEGATIVE, "clean code"),
        entry("p", BINARY_NEGATIVE, "fine here"),
    ])
    .unwrap();
    assert_eq!(information_gain(&corpus, "todo").unwrap(), 1.0);
}

// Hand computation, 4 docs (2 SATD / 2 not), feature in one positive doc:
//   H(label) = 1
//   P(f) = 1/4, H(label|f) = 0
//   P(!f) = 3/4, H(label|!f) = H(1/3, 2/3) = 0.9182958340544896
//   IG = 1 - 0.75 * 0.9182958340544896 = 0.31127812445913283
#[test]
fn ig_matches_hand_entropy_arithmetic() {
    let corpus = TrainingCorpus::new(vec![
        entry("p", BINARY_POSITIVE, "todo marker present"),
        entry("p", BINARY_POSITIVE, "nothing special"),
        entry("p", BINARY_NEGATIVE, "regular words"),
        entry("p", BINARY_NEGATIVE, "more words"),
    ])
    .unwrap();
    let ig = information_gain(&corpus, "todo").unwrap();
    assert!((ig - 0.31127812445913283).abs() < 1e-15, "ig = {ig}");
}

#[test]
fn ig_is_never_negative_and_zero_iff_independent() {
    // independent feature: present in one doc of each class
    let corpus = TrainingCorpus::new(vec![
        entry("p", BINARY_POSITIVE, "xx yy"),
        entry("p", BINARY_POSITIVE, "zz"),
        entry("p", BINARY_NEGATIVE, "xx qq"),
        entry("p", BINARY_NEGATIVE, "rr"),
    ])
    .unwrap();
    let ig = information_gain(&corpus, "xx").unwrap();
    assert!(ig.abs() < 1e-15, "independent feature should give 0, got {ig}");
}

// --------------------------------------------------------------- features

#[test]
fn select_features_saturates_when_k_exceeds_vocabulary() {
    let corpus = TrainingCorpus::new(vec![
        entry("p", BINARY_POSITIVE, "todo fix"),
        entry("p", BINARY_NEGATIVE, "ok here"),
    ])
    .unwrap();
    let v = select_features(&corpus, 1000).unwrap();
    assert_eq!(v.len(), 4); // todo, fix, ok, here
}

#[test]
fn select_features_breaks_ties_lexicographically() {
    // "alpha" and "beta" both perfectly predict the label
    let corpus = TrainingCorpus::new(vec![
        entry("p", BINARY_POSITIVE, "alpha beta"),
        entry("p", BINARY_NEGATIVE, "gamma delta"),
    ])
    .unwrap();
    let v = select_features(&corpus, 1).unwrap();
    assert_eq!(v[0].0, "alpha");
}

#[test]
fn select_features_ranks_brute_force_top_feature_first() {
    // only "todo" predicts the label perfectly; every other token straddles
    // both classes
    let corpus = TrainingCorpus::new(vec![
        entry("p", BINARY_POSITIVE, "todo fix alpha"),
        entry("p", BINARY_POSITIVE, "todo path beta"),
        entry("p", BINARY_POSITIVE, "todo value gamma"),
        entry("p", BINARY_POSITIVE, "todo returns delta"),
        entry("p", BINARY_NEGATIVE, "fix beta gamma"),
        entry("p", BINARY_NEGATIVE, "path alpha delta"),
        entry("p", BINARY_NEGATIVE, "value alpha beta"),
        entry("p", BINARY_NEGATIVE, "returns gamma delta"),
    ])
    .unwrap();
    // brute force: compute IG for every distinct token independently
    let mut tokens: Vec<String> = corpus
        .entries
        .iter()
        .flat_map(|e| preprocess(&e.text))
        .collect();
    tokens.sort();
    tokens.dedup();
    let mut best = (String::new(), -1.0);
    for t in tokens {
        let ig = information_gain(&corpus, &t).unwrap();
        if ig > best.1 {
            best = (t, ig);
        }
    }
    assert_eq!(best.0, "todo");
    let v = select_features(&corpus, 3).unwrap();
    assert_eq!(v[0].0, "todo");
    assert!((v[0].1 - best.1).abs() < 1e-15);
    assert!(v[0].1 > v[1].1, "todo must be strictly best: {v:?}");
}

// ------------------------------------------------------------------ train

#[test]
fn single_project_corpus_degenerates_to_one_sub_model() {
    let corpus = TrainingCorpus::new(vec![
        entry("only", BINARY_POSITIVE, "todo fix"),
        entry("only", BINARY_NEGATIVE, "all good"),
    ])
    .unwrap();
    let model = train(&corpus, 10).unwrap();
    assert_eq!(model.sub_models.len(), 1);
    assert!(model.skipped_projects.is_empty());
}

#[test]
fn three_projects_share_vocabulary() {
    let mut entries = Vec::new();
    for p in ["p1", "p2", "p3"] {
        entries.push(entry(p, BINARY_POSITIVE, "todo broken thing"));
        entries.push(entry(p, BINARY_NEGATIVE, "solid good thing"));
    }
    let model = train(&TrainingCorpus::new(entries).unwrap(), 10).unwrap();
    assert_eq!(model.sub_models.len(), 3);
    let v = model.vocabulary.len();
    for sub in &model.sub_models {
        for row in &sub.token_log_likelihood {
            assert_eq!(row.len(), v);
        }
    }
}

#[test]
fn single_class_project_is_skipped_with_note() {
    let corpus = TrainingCorpus::new(vec![
        entry("good", BINARY_POSITIVE, "todo one"),
        entry("good", BINARY_NEGATIVE, "fine two"),
        entry("degenerate", BINARY_POSITIVE, "todo only positives"),
    ])
    .unwrap();
    let model = train(&corpus, 10).unwrap();
    assert_eq!(model.sub_models.len(), 1);
    assert_eq!(model.skipped_projects, vec!["degenerate".to_string()]);
}

#[test]
fn all_single_class_projects_is_an_error() {
    let corpus = TrainingCorpus::new(vec![
        entry("p1", BINARY_POSITIVE, "todo"),
        entry("p2", BINARY_POSITIVE, "todo again"),
    ])
    .unwrap();
    assert_eq!(
        train(&corpus, 5).unwrap_err(),
        ClassifyError::AllSubCorporaSingleClass
    );
}

#[test]
fn priors_sum_to_one_and_posteriors_normalize() {
    let model = train(&separable_corpus(6), 20).unwrap();
    for sub in &model.sub_models {
        let prior_sum: f64 = sub.class_log_prior.iter().map(|lp| lp.exp()).sum();
        assert!((prior_sum - 1.0).abs() < 1e-12, "prior sum {prior_sum}");
        let post = model.posterior(sub, &preprocess("todo fix the alpha beta path"));
        let s: f64 = post.iter().sum();
        assert!((s - 1.0).abs() < 1e-12, "posterior sum {s}");
    }
}

#[test]
fn training_is_deterministic_under_corpus_permutation() {
    let corpus = separable_corpus(10);
    let mut reversed_entries = corpus.entries.clone();
    reversed_entries.reverse();
    let permuted = TrainingCorpus::new(reversed_entries).unwrap();
    let a = train(&corpus, 16).unwrap();
    let b = train(&permuted, 16).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn model_json_roundtrip() {
    let model = train(&separable_corpus(4), 8).unwrap();
    let json = model.to_json();
    let back = ClassifierModel::from_json(&json).unwrap();
    assert_eq!(model, back);
    // version gate
    let bad = json.replace("\"version\": 1", "\"version\": 99");
    assert!(matches!(
        ClassifierModel::from_json(&bad),
        Err(ClassifyError::ModelVersion(99, 1))
    ));
}

// ---------------------------------------------------------------- predict

#[test]
fn unanimous_vote_wins() {
    let model = train(&separable_corpus(8), 20).unwrap();
    let p = predict(&model, "todo fix this broken path");
    assert_eq!(p.label, BINARY_POSITIVE);
    assert_eq!(p.votes[BINARY_POSITIVE], model.sub_models.len());
}

#[test]
fn majority_vote_wins() {
    // three projects; make one project's vocabulary slanted so it votes
    // differently, majority still rules
    let mut entries = Vec::new();
    for p in ["p1", "p2"] {
        entries.push(entry(p, BINARY_POSITIVE, "todo broken"));
        entries.push(entry(p, BINARY_NEGATIVE, "shiny clean"));
    }
    entries.push(entry("p3", BINARY_POSITIVE, "shiny todo"));
    entries.push(entry("p3", BINARY_NEGATIVE, "broken clean"));
    let model = train(&TrainingCorpus::new(entries).unwrap(), 20).unwrap();
    let p = predict(&model, "shiny clean");
    assert_eq!(p.label, BINARY_NEGATIVE);
}

#[test]
fn binary_tie_resolves_satd_positive() {
    // two sub-models trained on opposite associations force a 1-1 tie
    let entries = vec![
        entry("p1", BINARY_POSITIVE, "aa"),
        entry("p1", BINARY_NEGATIVE, "bb"),
        entry("p2", BINARY_POSITIVE, "bb"),
        entry("p2", BINARY_NEGATIVE, "aa"),
    ];
    let model = train(&TrainingCorpus::new(entries).unwrap(), 10).unwrap();
    let p = predict(&model, "aa");
    let va = p.votes.values().copied().collect::<Vec<_>>();
    assert_eq!(va, vec![1, 1], "expected a 1-1 tie, got {:?}", p.votes);
    assert_eq!(p.label, BINARY_POSITIVE);
}

#[test]
fn typed_tie_resolves_lexicographically() {
    let entries = vec![
        entry("p1", "design", "aa xx"),
        entry("p1", "test", "bb yy"),
        entry("p2", "design", "bb yy"),
        entry("p2", "test", "aa xx"),
    ];
    let model = train(&TrainingCorpus::new(entries).unwrap(), 10).unwrap();
    let p = predict(&model, "aa xx");
    let counts: Vec<usize> = p.votes.values().copied().collect();
    assert_eq!(counts, vec![1, 1], "expected tie, got {:?}", p.votes);
    assert_eq!(p.label, "design"); // design < test
}

#[test]
fn prediction_invariant_to_token_order_and_whitespace() {
    let model = train(&separable_corpus(6), 20).unwrap();
    let a = predict(&model, "todo fix the alpha beta path");
    let b = predict(&model, "path   beta alpha the fix\t\ttodo");
    assert_eq!(a.label, b.label);
    assert_eq!(a.votes, b.votes);
}

// --------------------------------------------------------------- evaluate

#[test]
fn perfect_model_scores_one() {
    let corpus = separable_corpus(8);
    let model = train(&corpus, 20).unwrap();
    let report = evaluate(&model, &corpus.entries).unwrap();
    assert_eq!(report.precision, Some(1.0));
    assert_eq!(report.recall, Some(1.0));
}

// Detection-quality arithmetic on published-scale counts:
//   TP = 17,576 with FP = 4,126 -> precision = 17576/21702 = 0.8098...
//   TP = 17,576 with FN = 3,180 -> recall    = 17576/20756 = 0.8468...
#[test]
fn precision_recall_arithmetic_matches_reference_counts() {
    let tp = 17_576u64;
    let fp = 4_126u64;
    let fneg = 3_180u64;
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fneg) as f64;
    assert!((precision - 0.810).abs() < 5e-4, "precision {precision}");
    assert!((recall - 0.847).abs() < 5e-4, "recall {recall}");
}

#[test]
fn cross_validation_separable_corpus_is_perfect_and_deterministic() {
    let corpus = separable_corpus(20);
    let a = cross_validate(&corpus, 5, 20, 42).unwrap();
    assert_eq!(a.precision, Some(1.0));
    assert_eq!(a.recall, Some(1.0));
    let b = cross_validate(&corpus, 5, 20, 42).unwrap();
    assert_eq!(a, b);
    // different seed still perfect on separable data
    let c = cross_validate(&corpus, 5, 20, 7).unwrap();
    assert_eq!(c.precision, Some(1.0));
}

#[test]
fn cross_validation_flags_duplicate_texts() {
    let mut entries = Vec::new();
    for _ in 0..10 {
        entries.push(entry("p", BINARY_POSITIVE, "todo exact duplicate"));
        entries.push(entry("p", BINARY_NEGATIVE, "clean exact duplicate too"));
    }
    let corpus = TrainingCorpus::new(entries).unwrap();
    let report = cross_validate(&corpus, 5, 10, 1).unwrap();
    assert!(report.overlap_warnings > 0);
}

#[test]
fn evaluate_rejects_empty_set() {
    let model = train(&separable_corpus(4), 8).unwrap();
    assert_eq!(evaluate(&model, &[]).unwrap_err(), ClassifyError::EmptyEvalSet);
}

// ------------------------------------------------------------ sample size

// Cochran at 95%/10%: n0 = z^2/4e^2 with z = 1.959964 gives 96.0365; the
// finite-population correction at N = 318,044 leaves 96.0075, which rounds
// up to 97.
#[test]
fn sample_size_large_population() {
    assert_eq!(sample_size(318_044, 0.95, 0.10), 97);
}

#[test]
fn sample_size_small_population_capped() {
    assert!(sample_size(10, 0.95, 0.10) <= 10);
}

#[test]
fn sample_size_grows_toward_population_as_margin_shrinks() {
    let n = 5_000;
    let mut last = 0;
    for margin in [0.2, 0.1, 0.05, 0.02, 0.01, 0.005] {
        let s = sample_size(n, 0.95, margin);
        assert!(s >= last, "margin {margin}: {s} < {last}");
        assert!(s <= n);
        last = s;
    }
    assert!(last > 4_000, "tiny margin should approach N, got {last}");
}

// ----------------------------------------------------------------- corpus

#[test]
fn corpus_rejects_unknown_and_mixed_labels() {
    assert!(matches!(
        TrainingCorpus::new(vec![entry("p", "bogus", "x")]),
        Err(ClassifyError::UnknownLabel(_))
    ));
    assert!(matches!(
        TrainingCorpus::new(vec![
            entry("p", BINARY_POSITIVE, "x"),
            entry("p", "design", "y"),
        ]),
        Err(ClassifyError::MixedModes(_, _))
    ));
}

#[test]
fn typed_corpus_accepts_not_satd_negatives() {
    let corpus = TrainingCorpus::new(vec![
        entry("p", "design", "todo refactor"),
        entry("p", BINARY_NEGATIVE, "all fine"),
    ])
    .unwrap();
    assert_eq!(corpus.mode, CorpusMode::Typed);
    assert_eq!(corpus.entries[1].label, "not_satd");
}

// ------------------------------------------------------------- properties

proptest! {
    #[test]
    fn ig_is_bounded_by_label_entropy(
        labels in proptest::collection::vec(any::<bool>(), 2..30),
        mask in proptest::collection::vec(any::<bool>(), 2..30),
    ) {
        let n = labels.len().min(mask.len());
        let entries: Vec<CorpusEntry> = (0..n)
            .map(|i| {
                let text = if mask[i] { "feat plus other" } else { "other words" };
                entry(
                    "p",
                    if labels[i] { BINARY_POSITIVE } else { BINARY_NEGATIVE },
                    text,
                )
            })
            .collect();
        let corpus = TrainingCorpus::new(entries).unwrap();
        let ig = information_gain(&corpus, "feat").unwrap();
        prop_assert!(ig >= 0.0);
        prop_assert!(ig <= 1.0 + 1e-12);
    }

    #[test]
    fn predict_never_panics_on_arbitrary_text(text in ".{0,120}") {
        let model = train(&separable_corpus(4), 10).unwrap();
        let p = predict(&model, &text);
        prop_assert!(!p.label.is_empty());
    }
}
