//! Runs every acceptance criterion and prints one verdict line per criterion.
//! Enumeration criteria go through the command line; the rest call the
//! library checks directly. Exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use opb::checks::{self, Context, Outcome};
use opb::io::parse;
use opb::pattern::PatternMatrix;
use serde_json::Value;

fn cli(args: &[&str]) -> (u8, Value) {
    let argv = std::iter::once("opb").chain(["--json"]).chain(args.iter().copied());
    let run = opb_cli::execute(argv, &mut |_| {});
    let value = serde_json::from_str(&run.stdout).unwrap_or(Value::Null);
    (run.code, value)
}

fn outcome(id: usize, title: &'static str, start: Instant, failures: Vec<String>, notes: Vec<String>) -> Outcome {
    Outcome {
        id,
        title,
        passed: failures.is_empty(),
        notes: failures
            .into_iter()
            .map(|f| format!("failed: {f}"))
            .chain(notes)
            .collect(),
        elapsed: start.elapsed(),
    }
}

fn maximal_files(dir: &Path) -> Vec<(String, PatternMatrix)> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).expect("output directory") {
        let path = entry.expect("directory entry").path();
        if path.extension().is_some_and(|e| e == "opb") {
            let text = std::fs::read_to_string(&path).expect("readable class file");
            if text.starts_with("# maximal") {
                out.push((path.display().to_string(), parse(&text).expect("class file parses")));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn class_counts() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (code, two) = cli(&["enumerate", "--n", "2"]);
    let r2 = &two["result"];
    let maximal2 = r2["classes"]
        .as_array()
        .map_or(0, |c| c.iter().filter(|x| x["maximal"] == true).count());
    if code != 0 || r2["complete"] != true || r2["stored"] != 2 || maximal2 != 1 {
        failures.push(format!(
            "n=2: exit {code}, {} classes, {maximal2} maximal",
            r2["stored"]
        ));
    }

    let dir = tempfile::tempdir().expect("temporary directory");
    let out = dir.path().to_str().expect("utf-8 path");
    let (code, three) = cli(&["enumerate", "--n", "3", "--out", out]);
    let r3 = &three["result"];
    let histogram: Vec<(usize, usize)> = r3["nu_histogram"]
        .as_object()
        .map(|h| {
            h.iter()
                .map(|(k, v)| (k.parse().unwrap_or(0), v.as_u64().unwrap_or(0) as usize))
                .collect()
        })
        .unwrap_or_default();
    let mut histogram = histogram;
    histogram.sort();
    if code != 0 || r3["complete"] != true || r3["stored"] != 17 {
        failures.push(format!("n=3: exit {code}, {} classes", r3["stored"]));
    }
    if histogram != checks::N3_LEVELS {
        failures.push(format!("n=3 levels by ν {histogram:?}"));
    }
    let maximal = maximal_files(dir.path());
    let mut orbits: BTreeSet<Vec<String>> = BTreeSet::new();
    for (path, _) in &maximal {
        let (code, orbit) = cli(&["orbits", path]);
        let keys: Vec<String> = orbit["result"]["classes"]
            .as_array()
            .map(|c| c.iter().map(|x| x["key"].as_str().unwrap_or("").to_string()).collect())
            .unwrap_or_default();
        if code != 0 {
            failures.push(format!("orbits failed on {path}"));
        }
        orbits.insert(keys);
    }
    if maximal.len() != 3 || orbits.len() != 2 {
        failures.push(format!(
            "n=3: {} maximal classes in {} switching orbits",
            maximal.len(),
            orbits.len()
        ));
    }
    if start.elapsed() >= Duration::from_secs(10) {
        failures.push(format!("took {:.1} s, limit 10 s", start.elapsed().as_secs_f64()));
    }
    let notes = vec![format!(
        "n=2: {} classes; n=3: {} classes, {} maximal, {} switching orbits",
        r2["stored"],
        r3["stored"],
        maximal.len(),
        orbits.len()
    )];
    outcome(1, "class counts for two and three qubits", start, failures, notes)
}

fn maximal_enumeration() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().expect("temporary directory");
    let out = dir.path().to_str().expect("utf-8 path");
    let seconds = checks::N4_BUDGET.as_secs().to_string();
    let (code, report) = cli(&[
        "enumerate",
        "--n",
        "4",
        "--maximal-only",
        "--max-seconds",
        &seconds,
        "--out",
        out,
    ]);
    let complete = report["result"]["complete"] == true;
    let mut failures = Vec::new();
    if code != 0 {
        failures.push(format!("enumerate exited with {code}"));
    }
    let classes: Vec<PatternMatrix> = if complete {
        maximal_files(dir.path()).into_iter().map(|(_, m)| m).collect()
    } else {
        Vec::new()
    };
    let (ok, notes) = checks::judge_maximal_classes(complete, &classes);
    if !ok {
        failures.push(format!(
            "expected exactly {} maximal classes, all listed",
            checks::N4_MAXIMAL_LISTED
        ));
    }
    outcome(3, "independent four-qubit maximal enumeration", start, failures, notes)
}

fn main() -> ExitCode {
    let ctx = Context::new(None, false);
    let report = |o: &Outcome| {
        println!("{}", o.summary());
        for note in &o.notes {
            println!("    {note}");
        }
    };
    let steps: Vec<Box<dyn Fn() -> Outcome + '_>> = vec![
        Box::new(class_counts),
        Box::new(|| checks::switching_groups(&ctx)),
        Box::new(maximal_enumeration),
        Box::new(|| checks::multiplicity_properties(&ctx)),
        Box::new(|| checks::hasse_three_qubits(&ctx)),
        Box::new(|| checks::canonical_soundness(&ctx)),
        Box::new(|| checks::numeric_soundness(&ctx)),
        Box::new(|| checks::switching_unitaries(&ctx)),
        Box::new(|| checks::constructions(&ctx)),
    ];
    let mut failed = Vec::new();
    for step in &steps {
        let o = step();
        report(&o);
        if !o.passed {
            failed.push(o.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 9 criteria fail: {failed:?}", failed.len());
        ExitCode::FAILURE
    }
}
