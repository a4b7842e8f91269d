//! Phase splitting and per-phase table construction.

use satdmine::classify::DebtType;
use satdmine::history::CommitRecord;
use satdmine::lifecycle::{
    CommentKey, DebtLabel, EventRef, LabelSource, RemovalReason, RemoverClass, SatdInstance,
};
use satdmine::phases::*;

fn commits(n: usize) -> Vec<CommitRecord> {
    (0..n)
        .map(|i| CommitRecord {
            commit_id: format!("{i:040x}"),
            ordinal: i,
            timestamp: 1_000 + i as i64 * 100,
            author_name: "Ann".into(),
            author_email: "ann@x.com".into(),
        })
        .collect()
}

fn instance(
    label: DebtType,
    intro_ordinal: usize,
    removal_ordinal: Option<usize>,
    remover: Option<RemoverClass>,
) -> SatdInstance {
    SatdInstance {
        key: CommentKey {
            lineage_id: "L".into(),
            normalized_text: format!("t{intro_ordinal}-{removal_ordinal:?}"),
            occurrence: 0,
        },
        label: DebtLabel::Typed(label),
        label_source: LabelSource::Import,
        intro: EventRef {
            commit_id: format!("{intro_ordinal:040x}"),
            ordinal: intro_ordinal,
            timestamp: 1_000 + intro_ordinal as i64 * 100,
            author_name: "Ann".into(),
            author_email: "ann@x.com".into(),
        },
        removal: removal_ordinal.map(|o| {
            (
                EventRef {
                    commit_id: format!("{o:040x}"),
                    ordinal: o,
                    timestamp: 1_000 + o as i64 * 100,
                    author_name: "Bea".into(),
                    author_email: "bea@y.com".into(),
                },
                RemovalReason::TextGone,
            )
        }),
        censored: removal_ordinal.is_none(),
        duration_days: 1.0,
        remover_class: remover,
    }
}

// Worked split: 19,032 commits over 10 phases puts 1,903 in each of the
// first nine and the remainder in the last (1,905).
#[test]
fn split_phases_worked_example() {
    let phases = split_phases(&commits(19_032), 10).unwrap();
    assert_eq!(phases.len(), 10);
    for p in &phases[..9] {
        assert_eq!(p.len(), 1_903);
    }
    assert_eq!(phases[9].len(), 1_905);
    assert_eq!(phases.iter().map(Phase::len).sum::<usize>(), 19_032);
    for w in phases.windows(2) {
        assert_eq!(w[0].end_ordinal, w[1].start_ordinal);
    }
}

#[test]
fn split_phases_exact_division() {
    let phases = split_phases(&commits(10), 10).unwrap();
    assert!(phases.iter().all(|p| p.len() == 1));
}

#[test]
fn split_phases_too_few_commits() {
    assert_eq!(
        split_phases(&commits(9), 10),
        Err(PhaseError::TooFewCommits {
            commits: 9,
            phases: 10
        })
    );
}

#[test]
fn intro_distribution_direct_ratio() {
    let phases = split_phases(&commits(10), 2).unwrap();
    let instances = vec![
        instance(DebtType::Design, 0, None, None),
        instance(DebtType::Design, 1, None, None),
        instance(DebtType::Design, 2, None, None),
        instance(DebtType::Test, 3, None, None),
    ];
    let table = intro_distribution(&instances, &phases);
    assert_eq!(table.cell(0, "design").unwrap().value, Some(0.75));
    assert_eq!(table.cell(0, "test").unwrap().value, Some(0.25));
    table.check_row_sums(1e-9).unwrap();
}

#[test]
fn empty_phase_is_flagged_with_zero_row() {
    let phases = split_phases(&commits(10), 2).unwrap();
    let instances = vec![instance(DebtType::Design, 7, None, None)];
    let table = intro_distribution(&instances, &phases);
    assert_eq!(table.empty_phases, vec![0]);
    assert_eq!(table.cell(0, "design").unwrap().value, Some(0.0));
    assert_eq!(table.cell(1, "design").unwrap().value, Some(1.0));
}

#[test]
fn removal_distribution_over_removal_events() {
    let phases = split_phases(&commits(10), 2).unwrap();
    let instances = vec![
        instance(DebtType::Requirement, 0, Some(6), None),
        instance(DebtType::Requirement, 1, Some(7), None),
        instance(DebtType::Design, 0, Some(8), None),
        instance(DebtType::Design, 1, Some(9), None),
        instance(DebtType::Design, 2, None, None),
    ];
    let table = removal_distribution(&instances, &phases);
    assert_eq!(table.cell(1, "requirement").unwrap().value, Some(0.5));
    assert_eq!(table.cell(1, "design").unwrap().value, Some(0.5));
    assert_eq!(table.empty_phases, vec![0]);
    table.check_row_sums(1e-9).unwrap();
}

#[test]
fn cumulative_removal_rate() {
    let phases = split_phases(&commits(10), 2).unwrap();
    let instances = vec![
        instance(DebtType::Design, 0, Some(3), None),
        instance(DebtType::Design, 1, None, None),
        instance(DebtType::Design, 2, None, None),
        instance(DebtType::Design, 4, None, None),
    ];
    let table = removal_rate(&instances, &phases, RemovalRateVariant::Cumulative);
    assert_eq!(table.cell(0, "design").unwrap().value, Some(0.25));
    assert_eq!(table.cell(1, "design").unwrap().value, Some(0.25));
}

#[test]
fn incremental_removal_rate_counts_within_phase() {
    let phases = split_phases(&commits(10), 2).unwrap();
    let instances = vec![
        instance(DebtType::Design, 0, Some(7), None),
        instance(DebtType::Design, 6, None, None),
    ];
    let table = removal_rate(&instances, &phases, RemovalRateVariant::Incremental);
    // phase 1: one introduction (ordinal 6), one removal (ordinal 7)
    assert_eq!(table.cell(1, "design").unwrap().value, Some(1.0));
    assert_eq!(table.cell(0, "design").unwrap().value, Some(0.0));
}

#[test]
fn absent_type_gives_blank_cell_not_zero() {
    let phases = split_phases(&commits(10), 2).unwrap();
    let instances = vec![
        instance(DebtType::Design, 0, None, None),
        instance(DebtType::Compatibility, 6, None, None),
    ];
    let table = removal_rate(&instances, &phases, RemovalRateVariant::Cumulative);
    assert_eq!(table.cell(0, "compatibility").unwrap().value, None);
    assert_eq!(table.cell(0, "design").unwrap().value, Some(0.0));
}

#[test]
fn overall_rates_match_counts() {
    let instances = vec![
        instance(DebtType::Design, 0, Some(1), None),
        instance(DebtType::Design, 0, None, None),
        instance(DebtType::Test, 0, Some(2), None),
    ];
    let overall = overall_removal_rate(&instances);
    let design = overall
        .per_label
        .iter()
        .find(|(l, ..)| l == "design")
        .unwrap();
    assert_eq!(design.1, Some(0.5));
    assert_eq!((design.2, design.3), (1, 2));
    assert_eq!(overall.project_rate, Some(2.0 / 3.0));
}

#[test]
fn frequency_counts_alive_interval() {
    let phases = split_phases(&commits(12), 6).unwrap(); // 2 commits per phase
    let instances = vec![instance(DebtType::Design, 4, Some(10), None)];
    let table = frequency_evolution(&instances, &phases);
    let alive: Vec<usize> = (0..6)
        .map(|p| table.cell(p, "design").unwrap().value.unwrap() as usize)
        .collect();
    assert_eq!(alive, vec![0, 0, 1, 1, 1, 0]);
}

#[test]
fn removal_at_phase_start_is_not_alive_there() {
    let phases = split_phases(&commits(12), 6).unwrap();
    let instances = vec![instance(DebtType::Design, 0, Some(2), None)];
    let table = frequency_evolution(&instances, &phases);
    assert_eq!(table.cell(0, "design").unwrap().value, Some(1.0));
    assert_eq!(table.cell(1, "design").unwrap().value, Some(0.0));
}

#[test]
fn intro_and_removal_inside_one_phase_counts_once() {
    let phases = split_phases(&commits(12), 6).unwrap();
    let instances = vec![instance(DebtType::Design, 4, Some(5), None)];
    let table = frequency_evolution(&instances, &phases);
    let total: f64 = (0..6)
        .map(|p| table.cell(p, "design").unwrap().value.unwrap())
        .sum();
    assert_eq!(total, 1.0);
    assert_eq!(table.cell(2, "design").unwrap().value, Some(1.0));
}

#[test]
fn breakdown_all_self() {
    let instances = vec![
        instance(DebtType::Test, 0, Some(1), Some(RemoverClass::SelfRemoved)),
        instance(DebtType::Test, 0, Some(2), Some(RemoverClass::SelfRemoved)),
    ];
    let rows = remover_breakdown(&instances);
    let row = rows.iter().find(|r| r.debt_type == "test").unwrap();
    assert_eq!(row.self_removed, 1.0);
    assert_eq!(row.more_active, 0.0);
}

#[test]
fn breakdown_proportions_sum_to_one() {
    let instances = vec![
        instance(DebtType::Design, 0, Some(1), Some(RemoverClass::SelfRemoved)),
        instance(DebtType::Design, 0, Some(2), Some(RemoverClass::MoreActive)),
        instance(DebtType::Design, 0, Some(3), Some(RemoverClass::FewerActive)),
        instance(DebtType::Design, 0, Some(4), Some(RemoverClass::FewerActive)),
    ];
    let rows = remover_breakdown(&instances);
    let row = rows.iter().find(|r| r.debt_type == "design").unwrap();
    assert_eq!(row.self_removed, 0.25);
    assert_eq!(row.more_active, 0.25);
    assert_eq!(row.fewer_active, 0.5);
    assert!((row.self_removed + row.more_active + row.fewer_active - 1.0).abs() < 1e-9);
    let project = rows.iter().find(|r| r.debt_type == "project").unwrap();
    assert_eq!(project.removed, 4);
}

#[test]
fn intro_counts_sum_to_instance_totals() {
    let phases = split_phases(&commits(20), 4).unwrap();
    let mut instances = Vec::new();
    for i in 0..17 {
        let label = if i % 3 == 0 {
            DebtType::Design
        } else {
            DebtType::Requirement
        };
        instances.push(instance(label, i, None, None));
    }
    let table = intro_distribution(&instances, &phases);
    let mut reconstructed = 0.0;
    for phase in &phases {
        let phase_total = instances
            .iter()
            .filter(|i| phase.contains(i.intro.ordinal))
            .count() as f64;
        for label in &table.labels {
            reconstructed += table.cell(phase.index, label).unwrap().value.unwrap() * phase_total;
        }
    }
    assert!((reconstructed - instances.len() as f64).abs() < 1e-9);
}
