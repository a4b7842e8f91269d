//! History enumeration against scripted fixture repositories.

use satdmine::comments::Language;
use satdmine::fixture::{Change, FixtureRepo, Line};
use satdmine::history::{
    default_extension_map, ChangeKind, CommitRecord, HistoryError, RepoHistory, VersionEvent,
};
use tempfile::TempDir;

const ANN: (&str, &str) = ("Ann", "ann@example.com");
const BEA: (&str, &str) = ("Bea", "bea@example.com");

fn five_linear_commits(fx: &FixtureRepo) -> Line {
    let mut line = fx.new_line();
    for (i, t) in [(0, 1000), (1, 2000), (2, 3000), (3, 4000), (4, 5000)] {
        fx.commit(
            &mut line,
            &format!("c{i}"),
            ANN,
            t,
            &[Change::Put("main.py", &format!("x = {i}\n"))],
        )
        .unwrap();
    }
    fx.set_branch("master", &line).unwrap();
    line
}

fn collect_versions(history: &RepoHistory, commits: &[CommitRecord]) -> Vec<VersionEvent> {
    let mut out = Vec::new();
    history
        .file_versions(commits, &default_extension_map(), 0.6, |ev| out.push(ev))
        .unwrap();
    out
}

#[test]
fn linearize_assigns_consecutive_ordinals() {
    let dir = TempDir::new().unwrap();
    let fx = FixtureRepo::init(dir.path()).unwrap();
    five_linear_commits(&fx);

    let history = RepoHistory::open(dir.path()).unwrap();
    let commits = history.linearize("master").unwrap();
    assert_eq!(commits.len(), 5);
    for (i, c) in commits.iter().enumerate() {
        assert_eq!(c.ordinal, i);
        assert_eq!(c.author_email, "ann@example.com");
    }
    assert_eq!(commits[0].timestamp, 1000);
    assert_eq!(commits[4].timestamp, 5000);
}

#[test]
fn linearize_follows_first_parent_only() {
    let dir = TempDir::new().unwrap();
    let fx = FixtureRepo::init(dir.path()).unwrap();

    let mut main = fx.new_line();
    fx.commit(&mut main, "base", ANN, 1000, &[Change::Put("a.py", "x = 0\n")])
        .unwrap();
    // side branch with three commits
    let mut side = fx.fork(&main);
    for (i, t) in [(0, 1100), (1, 1200), (2, 1300)] {
        fx.commit(
            &mut side,
            &format!("side{i}"),
            BEA,
            t,
            &[Change::Put("side.py", &format!("s = {i}\n"))],
        )
        .unwrap();
    }
    fx.commit(&mut main, "main2", ANN, 1400, &[Change::Put("a.py", "x = 1\n")])
        .unwrap();
    fx.merge(&mut main, &side, "merge side", ANN, 1500).unwrap();
    fx.set_branch("master", &main).unwrap();

    let history = RepoHistory::open(dir.path()).unwrap();
    let commits = history.linearize("master").unwrap();
    // base, main2, merge: the three side commits are not on the chain
    assert_eq!(commits.len(), 3);
    assert_eq!(commits[2].timestamp, 1500);
    // diagnostics-style total includes the side commits
    assert_eq!(history.all_ancestors_count("master").unwrap(), 6);
}

#[test]
fn missing_branch_is_reported_by_name() {
    let dir = TempDir::new().unwrap();
    let fx = FixtureRepo::init(dir.path()).unwrap();
    five_linear_commits(&fx);
    let history = RepoHistory::open(dir.path()).unwrap();
    match history.linearize("") {
        Err(HistoryError::MissingBranch(b)) => assert_eq!(b, ""),
        other => panic!("expected missing branch, got {other:?}"),
    }
    match history.linearize("nope") {
        Err(HistoryError::MissingBranch(b)) => assert_eq!(b, "nope"),
        other => panic!("expected missing branch, got {other:?}"),
    }
}

#[test]
fn open_fails_on_non_repository() {
    let dir = TempDir::new().unwrap();
    assert!(matches!(
        RepoHistory::open(&dir.path().join("nothing")),
        Err(HistoryError::OpenRepo { .. })
    ));
}

#[test]
fn add_edit_delete_lifecycle_of_one_file() {
    let dir = TempDir::new().unwrap();
    let fx = FixtureRepo::init(dir.path()).unwrap();
    let mut line = fx.new_line();
    fx.commit(&mut line, "c0", ANN, 1000, &[Change::Put("f.py", "v0\n")])
        .unwrap();
    fx.commit(&mut line, "c1", ANN, 2000, &[Change::Put("other.txt", "no\n")])
        .unwrap();
    fx.commit(&mut line, "c2", ANN, 3000, &[Change::Put("f.py", "v1\n")])
        .unwrap();
    fx.commit(&mut line, "c3", ANN, 4000, &[Change::Put("other.txt", "no2\n")])
        .unwrap();
    fx.commit(&mut line, "c4", ANN, 5000, &[Change::Remove("f.py")])
        .unwrap();
    fx.set_branch("master", &line).unwrap();

    let history = RepoHistory::open(dir.path()).unwrap();
    let commits = history.linearize("master").unwrap();
    let events = collect_versions(&history, &commits);

    let kinds: Vec<(usize, ChangeKind)> = events
        .iter()
        .map(|e| (e.version.ordinal, e.version.change_kind))
        .collect();
    assert_eq!(
        kinds,
        vec![
            (0, ChangeKind::Added),
            (2, ChangeKind::Modified),
            (4, ChangeKind::Deleted)
        ]
    );
    // one lineage throughout
    let lineage: Vec<&str> = events.iter().map(|e| e.version.lineage_id.as_str()).collect();
    assert_eq!(lineage[0], lineage[1]);
    assert_eq!(lineage[1], lineage[2]);
    // deleted version has no content, others do
    assert_eq!(events[0].content.as_deref(), Some("v0\n"));
    assert_eq!(events[1].content.as_deref(), Some("v1\n"));
    assert!(events[2].content.is_none());
    // untouched-commit rule: nothing for ordinals 1 and 3
    assert!(events.iter().all(|e| e.version.ordinal != 1 && e.version.ordinal != 3));
}

#[test]
fn file_added_once_emits_single_version() {
    let dir = TempDir::new().unwrap();
    let fx = FixtureRepo::init(dir.path()).unwrap();
    let mut line = fx.new_line();
    fx.commit(&mut line, "c0", ANN, 1000, &[Change::Put("keep.java", "class K {}\n")])
        .unwrap();
    fx.commit(&mut line, "c1", ANN, 2000, &[Change::Put("other.py", "y\n")])
        .unwrap();
    fx.set_branch("master", &line).unwrap();

    let history = RepoHistory::open(dir.path()).unwrap();
    let commits = history.linearize("master").unwrap();
    let events = collect_versions(&history, &commits);
    let keep: Vec<_> = events.iter().filter(|e| e.version.path == "keep.java").collect();
    assert_eq!(keep.len(), 1);
    assert_eq!(keep[0].version.language, Language::Java);
}

#[test]
fn identical_content_rename_keeps_lineage() {
    let dir = TempDir::new().unwrap();
    let fx = FixtureRepo::init(dir.path()).unwrap();
    let mut line = fx.new_line();
    fx.commit(&mut line, "c0", ANN, 1000, &[Change::Put("a.py", "same = 1\n")])
        .unwrap();
    fx.commit(&mut line, "c1", BEA, 2000, &[Change::Move("a.py", "b.py")])
        .unwrap();
    fx.set_branch("master", &line).unwrap();

    let history = RepoHistory::open(dir.path()).unwrap();
    let commits = history.linearize("master").unwrap();
    let events = collect_versions(&history, &commits);

    assert_eq!(events.len(), 2);
    assert_eq!(events[1].version.change_kind, ChangeKind::Renamed);
    assert_eq!(events[1].version.path, "b.py");
    assert_eq!(events[0].version.lineage_id, events[1].version.lineage_id);
}

#[test]
fn heavy_edit_plus_move_becomes_delete_and_add() {
    let dir = TempDir::new().unwrap();
    let fx = FixtureRepo::init(dir.path()).unwrap();
    let mut line = fx.new_line();
    fx.commit(
        &mut line,
        "c0",
        ANN,
        1000,
        &[Change::Put("old.cc", "alpha beta gamma delta epsilon zeta eta theta\n")],
    )
    .unwrap();
    fx.commit(
        &mut line,
        "c1",
        ANN,
        2000,
        &[
            Change::Remove("old.cc"),
            Change::Put("new.cc", "alpha beta gamma delta iota kappa lambda mu nu xi\n"),
        ],
    )
    .unwrap();
    fx.set_branch("master", &line).unwrap();

    let history = RepoHistory::open(dir.path()).unwrap();
    let commits = history.linearize("master").unwrap();
    let events = collect_versions(&history, &commits);

    let at1: Vec<_> = events.iter().filter(|e| e.version.ordinal == 1).collect();
    assert_eq!(at1.len(), 2);
    assert_eq!(at1[0].version.change_kind, ChangeKind::Added); // new.cc
    assert_eq!(at1[0].version.path, "new.cc");
    assert_eq!(at1[1].version.change_kind, ChangeKind::Deleted); // old.cc
    assert_ne!(at1[0].version.lineage_id, at1[1].version.lineage_id);
}

#[test]
fn replaying_versions_matches_direct_checkout() {
    let dir = TempDir::new().unwrap();
    let fx = FixtureRepo::init(dir.path()).unwrap();
    let mut line = fx.new_line();
    let contents = ["a = 1\n", "a = 2\nb = 3\n", "b = 3\n"];
    for (i, c) in contents.iter().enumerate() {
        fx.commit(
            &mut line,
            &format!("c{i}"),
            ANN,
            1000 * (i as i64 + 1),
            &[Change::Put("f.py", c)],
        )
        .unwrap();
    }
    fx.set_branch("master", &line).unwrap();

    let history = RepoHistory::open(dir.path()).unwrap();
    let commits = history.linearize("master").unwrap();
    let events = collect_versions(&history, &commits);
    for (i, want) in contents.iter().enumerate() {
        let ev = events.iter().find(|e| e.version.ordinal == i).unwrap();
        assert_eq!(ev.content.as_deref(), Some(*want));
    }
}

#[test]
fn events_are_ordered_and_lineages_well_formed() {
    let dir = TempDir::new().unwrap();
    let fx = FixtureRepo::init(dir.path()).unwrap();
    let mut line = fx.new_line();
    fx.commit(
        &mut line,
        "c0",
        ANN,
        1000,
        &[Change::Put("z.py", "z\n"), Change::Put("a.py", "a\n")],
    )
    .unwrap();
    fx.commit(
        &mut line,
        "c1",
        BEA,
        2000,
        &[Change::Put("a.py", "a2\n"), Change::Remove("z.py"), Change::Put("m.cc", "int m;\n")],
    )
    .unwrap();
    fx.set_branch("master", &line).unwrap();

    let history = RepoHistory::open(dir.path()).unwrap();
    let commits = history.linearize("master").unwrap();
    let events = collect_versions(&history, &commits);

    // (ordinal, path) sorted
    let keys: Vec<(usize, String)> = events
        .iter()
        .map(|e| (e.version.ordinal, e.version.path.clone()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);

    // every lineage: exactly one Added, at most one Deleted, Added first
    use std::collections::BTreeMap;
    let mut per: BTreeMap<&str, Vec<&VersionEvent>> = BTreeMap::new();
    for e in &events {
        per.entry(&e.version.lineage_id).or_default().push(e);
    }
    for (lineage, evs) in per {
        let added: Vec<_> = evs
            .iter()
            .filter(|e| e.version.change_kind == ChangeKind::Added)
            .collect();
        let deleted: Vec<_> = evs
            .iter()
            .filter(|e| e.version.change_kind == ChangeKind::Deleted)
            .collect();
        assert_eq!(added.len(), 1, "lineage {lineage}");
        assert!(deleted.len() <= 1);
        if let Some(d) = deleted.first() {
            assert!(added[0].version.ordinal < d.version.ordinal);
        }
    }
}
