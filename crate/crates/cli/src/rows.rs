//! Serialized row schemas for the NDJSON streams shared between stages.

use satdmine::comments::{CommentStyle, Language};
use satdmine::history::ChangeKind;
use satdmine::lifecycle::{DebtLabel, LabelSource, RemovalReason, RemoverClass, SatdInstance};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRow {
    pub commit_id: String,
    pub ordinal: usize,
    pub timestamp: i64,
    pub author_name: String,
    pub author_email: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileVersionRow {
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentRow {
    pub lineage_id: String,
    pub path: String,
    pub commit_id: String,
    pub start_line: u32,
    pub end_line: u32,
    pub style: CommentStyle,
    pub normalized_text: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub enclosing_hint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub text_hash: String,
    pub label: String,
    pub votes: std::collections::BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub lineage_id: String,
    pub text_hash: String,
    pub occurrence_index: u32,
    pub debt_type: String,
    pub label_source: LabelSource,
    pub intro_commit: String,
    pub intro_time: i64,
    pub intro_author: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub removal_commit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub removal_time: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub removal_author: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub removal_reason: Option<RemovalReason>,
    pub censored: bool,
    pub duration_days: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub remover_class: Option<RemoverClass>,
}

impl InstanceRow {
    pub fn from_instance(inst: &SatdInstance) -> InstanceRow {
        InstanceRow {
            lineage_id: inst.key.lineage_id.clone(),
            text_hash: inst.key.text_hash(),
            occurrence_index: inst.key.occurrence,
            debt_type: inst.label.name().to_string(),
            label_source: inst.label_source,
            intro_commit: inst.intro.commit_id.clone(),
            intro_time: inst.intro.timestamp,
            intro_author: format!("{} <{}>", inst.intro.author_name, inst.intro.author_email),
            removal_commit: inst.removal.as_ref().map(|(ev, _)| ev.commit_id.clone()),
            removal_time: inst.removal.as_ref().map(|(ev, _)| ev.timestamp),
            removal_author: inst
                .removal
                .as_ref()
                .map(|(ev, _)| format!("{} <{}>", ev.author_name, ev.author_email)),
            removal_reason: inst.removal.as_ref().map(|(_, r)| *r),
            censored: inst.censored,
            duration_days: inst.duration_days,
            remover_class: inst.remover_class,
        }
    }

    pub fn label(&self) -> Option<DebtLabel> {
        DebtLabel::parse(&self.debt_type)
    }

    /// Composite key used by the label-import file:
    /// `lineage_id#text_hash#occurrence` (parse from the right, since
    /// lineage ids contain paths).
    pub fn comment_key(&self) -> String {
        format!(
            "{}#{}#{}",
            self.lineage_id, self.text_hash, self.occurrence_index
        )
    }
}

/// Parse a `lineage#hash#occurrence` key from the right.
pub fn parse_comment_key(key: &str) -> Option<(String, String, u32)> {
    let mut parts = key.rsplitn(3, '#');
    let occurrence = parts.next()?.parse::<u32>().ok()?;
    let hash = parts.next()?.to_string();
    let lineage = parts.next()?.to_string();
    Some((lineage, hash, occurrence))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub stage: String,
    pub kind: String,
    pub detail: String,
}
