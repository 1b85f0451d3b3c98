use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use sha2::{Digest, Sha256};

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(rel)
        .display()
        .to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn opb(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_opb"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn opb_json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let run = opb(&full);
    (run.code, serde_json::from_str(&run.stdout).expect("JSON envelope"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn validate_accepts_bundled_files() {
    for rel in [
        "n2/standard.opb",
        "n3-maximal/irreducible.opb",
        "n4-classes/class-01a.opb",
    ] {
        let run = opb(&["validate", &data(rel)]);
        assert_eq!(run.code, 0, "{rel}: {}", run.stderr);
        assert!(run.stdout.starts_with("valid"));
    }
}

#[test]
fn validate_reports_check_failures_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let wrong_header = write(dir.path(), "h.opb", "@n 2\n@nu 3\na b\na b'\na' b\na' b'\n");
    let run = opb(&["validate", wrong_header.to_str().unwrap()]);
    assert_eq!(run.code, 1);
    assert!(run.stdout.contains("header mismatch"));

    let not_orthogonal = write(dir.path(), "o.opb", "@n 2\na b\na b\na' c\na' c'\n");
    let run = opb(&["validate", not_orthogonal.to_str().unwrap()]);
    assert_eq!(run.code, 1);
    assert!(run.stdout.starts_with("invalid"));
}

#[test]
fn parse_and_usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "g.opb", "@n 2\nA b\n");
    assert_eq!(opb(&["canon", garbage.to_str().unwrap()]).code, 2);
    assert_eq!(opb(&["canon", "/no/such/file.opb"]).code, 2);
    assert_eq!(opb(&["frobnicate"]).code, 2);
    assert_eq!(opb(&["enumerate"]).code, 2);
    assert_eq!(opb(&["enumerate", "--n", "9"]).code, 2);
}

#[test]
fn equivalence_answers_exit_zero() {
    let run = opb(&[
        "equiv",
        &data("n3-maximal/reducible-a.opb"),
        &data("n3-maximal/reducible-b.opb"),
    ]);
    assert_eq!((run.code, run.stdout.trim()), (0, "inequivalent"));
    let run = opb(&["equiv", &data("examples/equiv-a.opb"), &data("examples/equiv-x.opb")]);
    assert_eq!((run.code, run.stdout.trim()), (0, "equivalent"));
}

#[test]
fn canon_prints_the_frozen_key() {
    let run = opb(&["canon", &data("n2/standard.opb")]);
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout.lines().next(), Some("020000000101000101"));
}

#[test]
fn expand_unfolds_shorthand() {
    let run = opb(&["expand", &data("n3-maximal/irreducible.opb")]);
    assert_eq!(run.code, 0);
    let body: Vec<&str> = run.stdout.lines().filter(|l| !l.starts_with('@')).collect();
    assert_eq!(body.len(), 8);
    let compact = opb(&["expand", "--compact", &data("n3-maximal/irreducible.opb")]);
    let body: Vec<&str> = compact.stdout.lines().filter(|l| !l.starts_with('@')).collect();
    assert_eq!(body.len(), 5);
}

#[test]
fn order_neighbours_of_two_qubit_matrices() {
    let run = opb(&["maximal", &data("n2/maximal.opb")]);
    assert_eq!(run.stdout.trim(), "maximal");
    let run = opb(&["maximal", &data("n2/standard.opb")]);
    assert_eq!((run.code, run.stdout.trim()), (0, "not maximal"));

    let (_, down) = opb_json(&["children", &data("n2/maximal.opb")]);
    assert_eq!(down["result"]["raw"], 2);
    assert_eq!(down["result"]["classes"][0]["key"], "020000000101000101");
    let (_, up) = opb_json(&["parents", &data("n2/standard.opb")]);
    assert_eq!(up["result"]["classes"].as_array().unwrap().len(), 1);
    assert_eq!(up["result"]["classes"][0]["nu"], 3);
}

#[test]
fn enumerate_writes_a_store() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("store");
    let (code, v) = opb_json(&["enumerate", "--n", "3", "--jobs", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "enumerate");
    assert_eq!(v["result"]["stored"], 17);
    let files = std::fs::read_dir(&out).unwrap().count();
    assert_eq!(files, 18, "17 classes and a manifest");
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["nu_histogram"]["5"], 6);
    let leftovers = std::fs::read_dir(&out)
        .unwrap()
        .filter(|e| {
            let name = e.as_ref().unwrap().file_name();
            let name = name.to_string_lossy().into_owned();
            !(name.ends_with(".opb") || name == "manifest.json")
        })
        .count();
    assert_eq!(leftovers, 0, "no temporary files remain");
}

#[test]
fn exhausted_budget_reports_no_count() {
    let run = opb(&["enumerate", "--n", "3", "--max-nodes", "3"]);
    assert_eq!(run.code, 1);
    assert!(run.stdout.contains("INCOMPLETE"));
    let (code, v) = opb_json(&["enumerate", "--n", "3", "--max-nodes", "3"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["complete"], false);
    assert!(v["result"].get("stored").is_none());
    assert!(v["result"].get("classes").is_none());
}

#[test]
fn hasse_dot_labels_nodes() {
    let run = opb(&["hasse", "--n", "3", "--dot"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.starts_with("digraph"));
    assert_eq!(run.stdout.matches("ν=").count(), 17);
    assert_eq!(run.stdout.matches("->").count(), 31);
    assert!(run.stdout.contains("3,1 | 3,1 | 3,1"));
}

#[test]
fn orbits_of_a_reducible_three_qubit_class() {
    let (code, v) = opb_json(&["orbits", &data("n3-maximal/reducible-a.opb")]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["size"], 2);
    assert_eq!(opb(&["orbits", &data("n2/standard.opb")]).code, 1);
}

#[test]
fn instantiate_verify_associate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let source = data("n3-maximal/irreducible.opb");
    let basis = dir.path().join("basis.json");
    let run = opb(&["instantiate", &source, "--seed", "7", "--out", basis.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let run = opb(&["verify-gram", basis.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stdout);

    let run = opb(&["associate", basis.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    let back = write(dir.path(), "back.opb", &run.stdout);
    let run = opb(&["equiv", &source, back.to_str().unwrap()]);
    assert_eq!(run.stdout.trim(), "equivalent");

    let mut value: Value = serde_json::from_str(&std::fs::read_to_string(&basis).unwrap()).unwrap();
    value["vectors"][0][0][0][0] = Value::from(0.9);
    let broken = write(dir.path(), "broken.json", &value.to_string());
    assert_eq!(opb(&["verify-gram", broken.to_str().unwrap()]).code, 1);
}

#[test]
fn json_envelope_hashes_inputs() {
    let path = data("n2/maximal.opb");
    let digest = hex::encode(Sha256::digest(std::fs::read(&path).unwrap()));
    let (code, v) = opb_json(&["maximal", &path]);
    assert_eq!(code, 0);
    assert_eq!(v["tool"], "opb");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["inputs"][0]["sha256"], digest);
    assert_eq!(v["ok"], true);
    let (code, v) = opb_json(&["maximal", "/no/such/file"]);
    assert_eq!(code, 2);
    assert_eq!(v["ok"], false);
    assert!(v["error"].as_str().unwrap().contains("/no/such/file"));
}

#[test]
fn switch_unitary_by_rows_and_columns() {
    let file = data("n3-maximal/reducible-a.opb");
    let (_, sites) = opb_json(&["switch-unitary", &file, "--site", "1", "--perm", "2,1"]);
    let rows: Vec<String> = sites["result"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.to_string())
        .collect();
    let cols: Vec<String> = sites["result"]["cols"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.to_string())
        .collect();
    let site = format!("{}:{}", rows.join(","), cols.join(","));
    let (code, v) = opb_json(&["switch-unitary", &file, "--site", &site, "--perm", "2,1", "--seed", "5"]);
    assert_eq!(code, 0, "{v}");
    assert!(v["result"]["unitarity_defect"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["result"]["matched"], true);
    assert_eq!(
        opb(&["switch-unitary", &file, "--site", "9,9:1,2", "--perm", "2,1"]).code,
        2
    );
    assert_eq!(
        opb(&["switch-unitary", &file, "--site", &site, "--perm", "1,1"]).code,
        2
    );
}

#[test]
fn in_process_execution_matches_the_binary() {
    let path = data("n2/standard.opb");
    let run = opb_cli::execute(["opb", "canon", path.as_str()], &mut |_| {});
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout, opb(&["canon", &path]).stdout);
}

#[test]
fn verify_paper_quick_reports_every_criterion() {
    let run = opb(&["verify-paper", "--quick"]);
    let verdicts: Vec<&str> = run.stdout.lines().filter(|l| l.starts_with("criterion")).collect();
    assert_eq!(verdicts.len(), 9);
    // the four-qubit enumeration is skipped, so the run cannot pass
    assert_eq!(run.code, 1);
    for id in [1, 2, 4, 5, 6, 7, 8, 9] {
        assert!(verdicts[id - 1].contains("PASS"), "{}", run.stdout);
    }
}
