//! From per-version comment streams to debt instances with introduction,
//! removal or censoring, and remover attribution.
//!
//! Comment identity within a lineage is the exact normalized text plus an
//! occurrence index for duplicates (top to bottom). Any edit therefore
//! counts as removal of the old text and introduction of the new one.

mod track;

pub use track::{track_lineages, LineageVersion, TrackedInstance};

use crate::classify::DebtType;
use crate::history::{CommitRecord, IdentityTable};
use crate::survival::SurvivalSample;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Identity of one comment within a lineage.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CommentKey {
    pub lineage_id: String,
    pub normalized_text: String,
    /// 0-based among equal texts within one file version, top to bottom.
    pub occurrence: u32,
}

impl CommentKey {
    /// First 8 bytes of sha256(normalized_text), hex: the stable hash used
    /// in serialized rows and label-import keys.
    pub fn text_hash(&self) -> String {
        text_hash(&self.normalized_text)
    }
}

pub fn text_hash(normalized_text: &str) -> String {
    let digest = Sha256::digest(normalized_text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Commit coordinates of an introduction or removal event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRef {
    pub commit_id: String,
    pub ordinal: usize,
    pub timestamp: i64,
    pub author_name: String,
    pub author_email: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    TextGone,
    FileDeleted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemoverClass {
    SelfRemoved,
    MoreActive,
    FewerActive,
}

/// Debt label attached to an instance: a concrete type, the generic
/// positive flag from a binary classifier, or not debt at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DebtLabel {
    Typed(DebtType),
    SatdUntyped,
}

impl DebtLabel {
    pub fn name(self) -> &'static str {
        match self {
            DebtLabel::Typed(t) => t.name(),
            DebtLabel::SatdUntyped => "satd",
        }
    }

    pub fn parse(s: &str) -> Option<DebtLabel> {
        if s == "satd" {
            return Some(DebtLabel::SatdUntyped);
        }
        DebtType::parse(s).map(DebtLabel::Typed)
    }

    pub fn is_satd(self) -> bool {
        !matches!(self, DebtLabel::Typed(DebtType::NotSatd))
    }
}

/// Where an instance's label came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    Import,
    Model,
    Unlabeled,
}

/// A tracked comment instance after labeling and censor processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatdInstance {
    pub key: CommentKey,
    pub label: DebtLabel,
    pub label_source: LabelSource,
    pub intro: EventRef,
    pub removal: Option<(EventRef, RemovalReason)>,
    pub censored: bool,
    pub duration_days: f64,
    pub remover_class: Option<RemoverClass>,
}

/// Observation window: instances introduced within `window_days` before the
/// release are dropped; unremoved survivors censor at the release time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneWindow {
    pub release_commit: String,
    pub release_time: i64,
    pub window_days: f64,
}

impl PruneWindow {
    pub fn cutoff(&self) -> i64 {
        self.release_time - (self.window_days * 86_400.0) as i64
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LifecycleError {
    #[error("versions for lineage `{0}` are not in ordinal order")]
    UnorderedVersions(String),
    #[error("cannot classify the remover of a censored instance")]
    CensoredInstance,
    #[error("negative duration {0} leaked past censor processing")]
    NegativeDuration(f64),
    #[error("one-hot covariates need typed labels; `{0}` is untyped")]
    UntypedInstance(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CensorStats {
    /// Instances introduced inside the window, removed from the set.
    pub dropped_recent: usize,
    /// Removals after the release treated as censored at the release.
    pub censored_late_removals: usize,
    /// Negative durations clamped to zero (clock skew).
    pub clamped_negative: usize,
}

/// Apply the observation window: drop too-recent introductions, censor
/// unremoved survivors at the release, clamp clock-skew negatives to zero.
pub fn apply_censoring(
    instances: Vec<(TrackedInstance, DebtLabel, LabelSource)>,
    window: &PruneWindow,
) -> (Vec<SatdInstance>, CensorStats) {
    let mut stats = CensorStats::default();
    let cutoff = window.cutoff();
    let mut out = Vec::new();
    for (tracked, label, label_source) in instances {
        if tracked.intro.timestamp > cutoff {
            stats.dropped_recent += 1;
            continue;
        }
        let (removal, censored, end_time) = match tracked.removal {
            Some((ev, reason)) if ev.timestamp <= window.release_time => {
                let t = ev.timestamp;
                (Some((ev, reason)), false, t)
            }
            Some(_) => {
                stats.censored_late_removals += 1;
                (None, true, window.release_time)
            }
            None => (None, true, window.release_time),
        };
        let mut duration_days = (end_time - tracked.intro.timestamp) as f64 / 86_400.0;
        if duration_days < 0.0 {
            stats.clamped_negative += 1;
            duration_days = 0.0;
        }
        out.push(SatdInstance {
            key: tracked.key,
            label,
            label_source,
            intro: tracked.intro,
            removal,
            censored,
            duration_days,
            remover_class: None,
        });
    }
    (out, stats)
}

/// Who removed an instance: the introducing identity itself, or another
/// developer with strictly more (or else fewer) commits at removal time.
pub fn classify_remover(
    instance: &SatdInstance,
    identities: &IdentityTable,
    commits: &[CommitRecord],
) -> Result<RemoverClass, LifecycleError> {
    let Some((removal, _)) = &instance.removal else {
        return Err(LifecycleError::CensoredInstance);
    };
    let introducer = identities.resolve(&instance.intro.author_name, &instance.intro.author_email);
    let remover = identities.resolve(&removal.author_name, &removal.author_email);
    if introducer.canonical_email == remover.canonical_email {
        return Ok(RemoverClass::SelfRemoved);
    }
    let at = removal.timestamp;
    let remover_commits = identities.commit_count_at(&remover, at, commits);
    let introducer_commits = identities.commit_count_at(&introducer, at, commits);
    if remover_commits > introducer_commits {
        Ok(RemoverClass::MoreActive)
    } else {
        Ok(RemoverClass::FewerActive)
    }
}

/// Covariate layout for survival samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovariateScheme {
    /// No covariates (Kaplan-Meier input).
    None,
    /// Single indicator: 1 when the instance is SATD, 0 for the
    /// not-debt baseline.
    SatdIndicator,
    /// One-hot over the seven debt types; not-debt instances form the
    /// all-zero baseline.
    DebtTypeOneHot,
}

impl CovariateScheme {
    pub fn names(self) -> Vec<&'static str> {
        match self {
            CovariateScheme::None => vec![],
            CovariateScheme::SatdIndicator => vec!["satd"],
            CovariateScheme::DebtTypeOneHot => {
                DebtType::SATD_TYPES.iter().map(|t| t.name()).collect()
            }
        }
    }
}

/// Convert censor-processed instances to survival samples.
pub fn to_survival_samples(
    instances: &[SatdInstance],
    scheme: CovariateScheme,
) -> Result<Vec<SurvivalSample>, LifecycleError> {
    let mut out = Vec::with_capacity(instances.len());
    for inst in instances {
        if inst.duration_days < 0.0 {
            return Err(LifecycleError::NegativeDuration(inst.duration_days));
        }
        let covariates = match scheme {
            CovariateScheme::None => vec![],
            CovariateScheme::SatdIndicator => {
                vec![if inst.label.is_satd() { 1.0 } else { 0.0 }]
            }
            CovariateScheme::DebtTypeOneHot => match inst.label {
                DebtLabel::Typed(t) => DebtType::SATD_TYPES
                    .iter()
                    .map(|s| if *s == t { 1.0 } else { 0.0 })
                    .collect(),
                DebtLabel::SatdUntyped => {
                    return Err(LifecycleError::UntypedInstance(inst.key.text_hash()))
                }
            },
        };
        out.push(SurvivalSample {
            duration: inst.duration_days,
            event: !inst.censored,
            covariates,
        });
    }
    Ok(out)
}
