//! Equal-commit-count development phases and the per-phase tables built
//! over debt instances: introduction/removal distributions, removal rates,
//! alive-frequency evolution and remover breakdowns.

use crate::history::CommitRecord;
use crate::lifecycle::{RemoverClass, SatdInstance};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhaseError {
    #[error("cannot split {commits} commits into {phases} phases")]
    TooFewCommits { commits: usize, phases: usize },
    #[error("phase count must be at least 1")]
    ZeroPhases,
}

/// One development phase: a contiguous ordinal range, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase {
    pub index: usize,
    pub start_ordinal: usize,
    pub end_ordinal: usize,
    pub start_time: i64,
    pub end_time: i64,
}

impl Phase {
    pub fn contains(&self, ordinal: usize) -> bool {
        (self.start_ordinal..self.end_ordinal).contains(&ordinal)
    }

    pub fn len(&self) -> usize {
        self.end_ordinal - self.start_ordinal
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Split the commit window into `n` phases of floor(N/n) commits each,
/// with the remainder attached to the final phase.
pub fn split_phases(commits: &[CommitRecord], n: usize) -> Result<Vec<Phase>, PhaseError> {
    if n == 0 {
        return Err(PhaseError::ZeroPhases);
    }
    let total = commits.len();
    if total < n {
        return Err(PhaseError::TooFewCommits {
            commits: total,
            phases: n,
        });
    }
    let base = total / n;
    let mut phases = Vec::with_capacity(n);
    let mut start = 0;
    for index in 0..n {
        let end = if index == n - 1 { total } else { start + base };
        phases.push(Phase {
            index,
            start_ordinal: start,
            end_ordinal: end,
            start_time: commits[start].timestamp,
            end_time: commits[end - 1].timestamp,
        });
        start = end;
    }
    Ok(phases)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    ByPhaseTotal,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub phase: usize,
    pub debt_type: String,
    /// None encodes "no instances of this type at all" (a blank cell),
    /// which is distinct from a zero.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    pub normalization: Normalization,
    /// Which quantity the table holds; recorded into output metadata.
    pub variant: String,
    /// Sorted label (debt type) column set.
    pub labels: Vec<String>,
    /// Phase-major, label-minor.
    pub cells: Vec<PhaseCell>,
    /// Phases with no contributing events (their rows are all zero).
    pub empty_phases: Vec<usize>,
}

impl PhaseTable {
    pub fn cell(&self, phase: usize, label: &str) -> Option<&PhaseCell> {
        self.cells
            .iter()
            .find(|c| c.phase == phase && c.debt_type == label)
    }

    /// For ByPhaseTotal tables: every nonempty phase's proportions must sum
    /// to one within `tol`. Returns the offending phase otherwise.
    pub fn check_row_sums(&self, tol: f64) -> Result<(), usize> {
        if self.normalization != Normalization::ByPhaseTotal {
            return Ok(());
        }
        let phase_count = self.cells.iter().map(|c| c.phase + 1).max().unwrap_or(0);
        for p in 0..phase_count {
            if self.empty_phases.contains(&p) {
                continue;
            }
            let sum: f64 = self
                .cells
                .iter()
                .filter(|c| c.phase == p)
                .filter_map(|c| c.value)
                .sum();
            if (sum - 1.0).abs() > tol {
                return Err(p);
            }
        }
        Ok(())
    }
}

fn sorted_labels(instances: &[SatdInstance]) -> Vec<String> {
    let mut labels: Vec<String> = instances.iter().map(|i| i.label.name().to_string()).collect();
    labels.sort();
    labels.dedup();
    labels
}

fn distribution_over<F>(
    instances: &[SatdInstance],
    phases: &[Phase],
    variant: &str,
    event_ordinal: F,
) -> PhaseTable
where
    F: Fn(&SatdInstance) -> Option<usize>,
{
    let labels = sorted_labels(instances);
    let mut cells = Vec::new();
    let mut empty_phases = Vec::new();
    for phase in phases {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut total = 0usize;
        for inst in instances {
            if let Some(ord) = event_ordinal(inst) {
                if phase.contains(ord) {
                    *counts.entry(inst.label.name()).or_insert(0) += 1;
                    total += 1;
                }
            }
        }
        if total == 0 {
            empty_phases.push(phase.index);
        }
        for label in &labels {
            let value = if total == 0 {
                Some(0.0)
            } else {
                Some(*counts.get(label.as_str()).unwrap_or(&0) as f64 / total as f64)
            };
            cells.push(PhaseCell {
                phase: phase.index,
                debt_type: label.clone(),
                value,
            });
        }
    }
    PhaseTable {
        normalization: Normalization::ByPhaseTotal,
        variant: variant.to_string(),
        labels,
        cells,
        empty_phases,
    }
}

/// Per-phase proportions of introduced instances by debt type.
pub fn intro_distribution(instances: &[SatdInstance], phases: &[Phase]) -> PhaseTable {
    distribution_over(instances, phases, "introduction_distribution", |i| {
        Some(i.intro.ordinal)
    })
}

/// Per-phase proportions of removed instances by debt type (observed
/// removals only).
pub fn removal_distribution(instances: &[SatdInstance], phases: &[Phase]) -> PhaseTable {
    distribution_over(instances, phases, "removal_distribution", |i| {
        i.removal.as_ref().map(|(ev, _)| ev.ordinal)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalRateVariant {
    /// Removed-by-phase-end over introduced-by-phase-end.
    Cumulative,
    /// Removed during the phase over introduced during the phase
    /// (can exceed one when old debt is paid down).
    Incremental,
}

/// Removal rate per (phase, type). A `None` cell means no instances of the
/// type in the denominator window, which is not the same as a zero rate.
pub fn removal_rate(
    instances: &[SatdInstance],
    phases: &[Phase],
    variant: RemovalRateVariant,
) -> PhaseTable {
    let labels = sorted_labels(instances);
    let mut cells = Vec::new();
    for phase in phases {
        for label in &labels {
            let of_label = instances.iter().filter(|i| i.label.name() == *label);
            let (introduced, removed) = match variant {
                RemovalRateVariant::Cumulative => {
                    let mut intro = 0usize;
                    let mut rem = 0usize;
                    for inst in of_label {
                        if inst.intro.ordinal < phase.end_ordinal {
                            intro += 1;
                        }
                        if let Some((ev, _)) = &inst.removal {
                            if ev.ordinal < phase.end_ordinal {
                                rem += 1;
                            }
                        }
                    }
                    (intro, rem)
                }
                RemovalRateVariant::Incremental => {
                    let mut intro = 0usize;
                    let mut rem = 0usize;
                    for inst in of_label {
                        if phase.contains(inst.intro.ordinal) {
                            intro += 1;
                        }
                        if let Some((ev, _)) = &inst.removal {
                            if phase.contains(ev.ordinal) {
                                rem += 1;
                            }
                        }
                    }
                    (intro, rem)
                }
            };
            let value = (introduced > 0).then(|| removed as f64 / introduced as f64);
            cells.push(PhaseCell {
                phase: phase.index,
                debt_type: label.clone(),
                value,
            });
        }
    }
    PhaseTable {
        normalization: Normalization::None,
        variant: match variant {
            RemovalRateVariant::Cumulative => "removal_rate_cumulative".to_string(),
            RemovalRateVariant::Incremental => "removal_rate_incremental".to_string(),
        },
        labels,
        cells,
        empty_phases: Vec::new(),
    }
}

/// End-of-window removal rates: removed over introduced per type, plus the
/// pooled project-level rate. Absent types yield `None` cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallRemoval {
    /// (label, rate, removed, introduced)
    pub per_label: Vec<(String, Option<f64>, usize, usize)>,
    pub project_removed: usize,
    pub project_introduced: usize,
    pub project_rate: Option<f64>,
}

pub fn overall_removal_rate(instances: &[SatdInstance]) -> OverallRemoval {
    let labels = sorted_labels(instances);
    let mut per_label = Vec::new();
    for label in &labels {
        let of: Vec<&SatdInstance> = instances
            .iter()
            .filter(|i| i.label.name() == *label)
            .collect();
        let introduced = of.len();
        let removed = of.iter().filter(|i| !i.censored).count();
        let rate = (introduced > 0).then(|| removed as f64 / introduced as f64);
        per_label.push((label.clone(), rate, removed, introduced));
    }
    let project_introduced = instances.len();
    let project_removed = instances.iter().filter(|i| !i.censored).count();
    OverallRemoval {
        per_label,
        project_removed,
        project_introduced,
        project_rate: (project_introduced > 0)
            .then(|| project_removed as f64 / project_introduced as f64),
    }
}

/// Count of instances alive at any point during each phase. Alive is the
/// half-open interval [intro, removal): an instance removed exactly at a
/// phase's first commit does not count as alive in that phase.
pub fn frequency_evolution(instances: &[SatdInstance], phases: &[Phase]) -> PhaseTable {
    let labels = sorted_labels(instances);
    let mut cells = Vec::new();
    for phase in phases {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for inst in instances {
            let intro = inst.intro.ordinal;
            let removal = inst.removal.as_ref().map(|(ev, _)| ev.ordinal);
            let alive = intro < phase.end_ordinal
                && removal.map(|r| r > phase.start_ordinal).unwrap_or(true);
            if alive {
                *counts.entry(inst.label.name()).or_insert(0) += 1;
            }
        }
        for label in &labels {
            cells.push(PhaseCell {
                phase: phase.index,
                debt_type: label.clone(),
                value: Some(*counts.get(label.as_str()).unwrap_or(&0) as f64),
            });
        }
    }
    PhaseTable {
        normalization: Normalization::None,
        variant: "frequency_evolution".to_string(),
        labels,
        cells,
        empty_phases: Vec::new(),
    }
}

/// Who removed the observed removals, per debt type: proportions of
/// self-removal and of other developers with more/fewer activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoverRow {
    pub debt_type: String,
    pub removed: usize,
    pub self_removed: f64,
    pub more_active: f64,
    pub fewer_active: f64,
}

pub fn remover_breakdown(instances: &[SatdInstance]) -> Vec<RemoverRow> {
    let mut labels = sorted_labels(instances);
    labels.push("project".to_string());
    let mut rows = Vec::new();
    for label in labels {
        let removed: Vec<&SatdInstance> = instances
            .iter()
            .filter(|i| {
                !i.censored
                    && i.remover_class.is_some()
                    && (label == "project" || i.label.name() == label)
            })
            .collect();
        let n = removed.len();
        if n == 0 {
            rows.push(RemoverRow {
                debt_type: label,
                removed: 0,
                self_removed: 0.0,
                more_active: 0.0,
                fewer_active: 0.0,
            });
            continue;
        }
        let count = |class: RemoverClass| {
            removed
                .iter()
                .filter(|i| i.remover_class == Some(class))
                .count() as f64
                / n as f64
        };
        rows.push(RemoverRow {
            debt_type: label,
            removed: n,
            self_removed: count(RemoverClass::SelfRemoved),
            more_active: count(RemoverClass::MoreActive),
            fewer_active: count(RemoverClass::FewerActive),
        });
    }
    rows
}
