//! End-to-end tests of the `stagematch` binary over the shipped fixtures.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use stagematch::cli::{parse_document, write_document, Document};
use stagematch::Variant;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stagematch"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn fixtures() -> Vec<PathBuf> {
    let mut all: Vec<PathBuf> = fs::read_dir(fixture(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    all.sort();
    all
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn staged(path: &Path) -> bool {
    !matches!(
        parse_document(&fs::read_to_string(path).unwrap()).unwrap(),
        Document::Single(_)
    )
}

#[test]
fn solve_with_oracle_confirms_optimality() {
    let o = run(&["solve", fixture("arrive_small.txt").to_str().unwrap(), "--oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("optimal: confirmed"), "{text}");
    assert!(text.contains("divorces: 0"), "{text}");
}

#[test]
fn every_two_stage_fixture_is_confirmed_optimal() {
    for f in fixtures().into_iter().filter(|f| staged(f)) {
        let o = run(&["solve", f.to_str().unwrap(), "--oracle", "--json"]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", f.display(), stderr(&o));
        let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
        if j["divorces_per_transition"].as_array().unwrap().len() == 1 {
            assert_eq!(j["oracle"]["confirmed"], true, "{}", f.display());
        }
    }
}

/// Recomputes every divorce figure of a report from the matchings it embeds.
fn check_self_consistent(name: &str, j: &Value) {
    let stages = j["stages"].as_array().unwrap();
    let per: Vec<u64> = j["divorces_per_transition"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    assert_eq!(per.len() + 1, stages.len(), "{name}");
    let recomputed: Vec<u64> = if j["kind"] == "college" {
        let assign = |s: &Value| -> BTreeMap<String, u64> {
            s["assignment"]
                .as_object()
                .unwrap()
                .iter()
                .map(|(k, v)| (k.clone(), v.as_u64().unwrap()))
                .collect()
        };
        stages
            .windows(2)
            .map(|w| {
                let (a, b) = (assign(&w[0]), assign(&w[1]));
                a.iter().filter(|(s, c)| b.get(*s) != Some(c)).count() as u64
            })
            .collect()
    } else {
        let pairs = |s: &Value| -> BTreeSet<(u64, u64)> {
            s["matching"]
                .as_array()
                .unwrap()
                .iter()
                .map(|p| (p[0].as_u64().unwrap(), p[1].as_u64().unwrap()))
                .collect()
        };
        stages
            .windows(2)
            .map(|w| pairs(&w[0]).difference(&pairs(&w[1])).count() as u64)
            .collect()
    };
    assert_eq!(per, recomputed, "{name}");
    assert_eq!(j["total_divorces"].as_u64().unwrap(), per.iter().sum::<u64>(), "{name}");
}

#[test]
fn reports_are_self_consistent() {
    for f in fixtures().into_iter().filter(|f| staged(f)) {
        let o = run(&["solve", f.to_str().unwrap(), "--json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        check_self_consistent(&f.display().to_string(), &serde_json::from_str(&stdout(&o)).unwrap());
    }
}

#[test]
fn out_writes_table_and_json_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let o = run(&[
        "solve",
        fixture("leave_small.txt").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = fs::read_to_string(&out).unwrap();
    let j: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(table.contains(&format!("divorces: {}", j["total_divorces"])), "{table}");
    check_self_consistent("leave_small sidecar", &j);
}

#[test]
fn out_dir_env_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("STAGEMATCH_OUT_DIR", dir.path())
        .args(["generate", "--kind", "cyclic-block", "--k", "3", "--out", "block.txt"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("block.txt").exists());
}

#[test]
fn check_coherence_passes_on_the_corpus() {
    let files: Vec<String> = fixtures()
        .into_iter()
        .filter(|f| {
            matches!(parse_document(&fs::read_to_string(f).unwrap()).unwrap(),
                Document::Staged(p) if p.variant() == Variant::WomenArrive)
        })
        .map(|f| f.to_str().unwrap().to_string())
        .collect();
    let mut args = vec!["check", "--property", "coherence"];
    args.extend(files.iter().map(String::as_str));
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), files.len());
}

#[test]
fn check_other_properties() {
    for prop in ["stability", "dominance", "structure"] {
        let o = run(&[
            "check",
            "--property",
            prop,
            "--jobs",
            "2",
            fixture("arrive_random.txt").to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{prop}: {}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn adversary_greedy_transcript() {
    let o = run(&["adversary", "--n", "4", "--alg", "greedy"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("branch: case-2"), "{text}");
    assert!(text.contains("alg_cost: 3"), "{text}");
    assert!(text.contains("opt_cost: 1"), "{text}");
}

#[test]
fn adversary_json_and_unknown_policy() {
    let o = run(&["adversary", "--n", "5", "--alg", "men-optimal", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(j["opt_cost"].is_u64());
    let o = run(&["adversary", "--n", "4", "--alg", "clairvoyant"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generation_is_deterministic() {
    let gen = |seed: &str| {
        stdout(&run(&[
            "generate", "--kind", "random", "--men", "5", "--women", "5", "--seed", seed,
        ]))
    };
    assert_eq!(gen("17"), gen("17"));
    assert_ne!(gen("17"), gen("18"));
    let block = |seed: &str| {
        stdout(&run(&[
            "generate",
            "--kind",
            "cyclic-block",
            "--k",
            "3",
            "--seed",
            seed,
        ]))
    };
    assert_eq!(block("1"), block("99"));
    assert_eq!(block("1"), fs::read_to_string(fixture("cyclic_block_k3.txt")).unwrap());
}

#[test]
fn adversary_stage_one_has_a_single_stable_matching() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("adv.txt");
    let o = run(&[
        "generate",
        "--kind",
        "adversary3-stage12",
        "--n",
        "4",
        "--out",
        f.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["enumerate", f.to_str().unwrap(), "--stage", "1"]);
    assert!(stdout(&o).contains("stage 1: 1 stable matchings"), "{}", stdout(&o));
    let o = run(&[
        "enumerate",
        f.to_str().unwrap(),
        "--stage",
        "2",
        "--backend",
        "exhaustive",
    ]);
    assert!(stdout(&o).contains("stage 2: 2 stable matchings"), "{}", stdout(&o));
}

#[test]
fn adversary_fixture_has_the_expected_rosters() {
    let doc = parse_document(&fs::read_to_string(fixture("adversary_n4.txt")).unwrap()).unwrap();
    let Document::Staged(p) = doc else {
        panic!("expected a staged problem")
    };
    let women: Vec<usize> = p.stages().iter().map(|s| s.women().len()).collect();
    assert_eq!(women, vec![1, 3, 4]);
    assert!(p.stages().iter().all(|s| s.men().len() == 4));
}

#[test]
fn write_parse_round_trip_is_canonical() {
    for f in fixtures() {
        let text = fs::read_to_string(&f).unwrap();
        let doc = parse_document(&text).unwrap();
        let canonical = write_document(&doc);
        assert_eq!(parse_document(&canonical).unwrap(), doc, "{}", f.display());
        assert_eq!(
            write_document(&parse_document(&canonical).unwrap()),
            canonical,
            "{}",
            f.display()
        );
        // Stripping comments and blank lines from a generated file leaves the canonical form
        // up to layout, so reading it back changes nothing.
        let stripped: String = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(
            write_document(&parse_document(&stripped).unwrap()),
            canonical,
            "{}",
            f.display()
        );
    }
}

#[test]
fn truncated_list_names_the_person() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    fs::write(
        &f,
        "stagematch-problem v1\nvariant single\nstage 1\nu1: w1 w2\nu2: w2\nw1: u1 u2\nw2: u2 u1\n",
    )
    .unwrap();
    let o = run(&["enumerate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("u2"), "{err}");
    assert!(err.contains("5:"), "{err}");
}

#[test]
fn preference_drift_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("drift.txt");
    let text = fs::read_to_string(fixture("arrive_small.txt"))
        .unwrap()
        .replace("w1: u2 u1\nw2", "w1: u1 u2\nw2");
    fs::write(&f, text).unwrap();
    let o = run(&["solve", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("w1"), "{}", stderr(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "/nonexistent/file.txt"]).status.code(), Some(1));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    // A single instance is not a staged problem.
    assert_eq!(
        run(&["solve", fixture("latin3.txt").to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn property_outside_its_domain_is_an_error() {
    let o = run(&[
        "check",
        "--property",
        "dominance",
        fixture("college_small.txt").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stderr(&o).contains("women-arrive"), "{}", stderr(&o));
}

#[test]
fn mwsm_and_enumerate_on_the_latin_square() {
    let o = run(&[
        "mwsm",
        fixture("latin3.txt").to_str().unwrap(),
        "--weights",
        fixture("latin3.weights").to_str().unwrap(),
        "--oracle",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("weight: 6"), "{}", stdout(&o));
    let o = run(&["enumerate", fixture("latin3.txt").to_str().unwrap(), "--cap", "2"]);
    assert_ne!(o.status.code(), Some(0));
    let o = run(&["enumerate", fixture("latin3.txt").to_str().unwrap(), "--json"]);
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["count"], 3, "{j}");
    assert_eq!(j["matchings"].as_array().map(Vec::len), Some(3), "{j}");
}
