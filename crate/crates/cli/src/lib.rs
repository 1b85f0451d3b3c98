//! The `opb` command line as a library, so that it can be driven in-process.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use opb::canonical::{are_equivalent, canonical_form, canonical_key, CanonicalKey};
use opb::checks::{self, Context};
use opb::io::dot::hasse_dot;
use opb::io::store::{manifest, write_atomic, write_store};
use opb::io::{serialize, OpbFile, ParseError, Style};
use opb::lattice::{
    enumerate_classes_with, hasse, identifications, is_maximal, splits, switching_orbit, switching_sites, Budget,
    EnumerateOptions, SwitchSite,
};
use opb::numeric::{
    associate_matrix, check_switch_unitary, gram_defect, instantiate, verify_frame_structure, NumericOPB,
};
use opb::pattern::{PatternMatrix, Signature};

/// Command line of the `opb` binary.
#[derive(Parser)]
#[command(
    name = "opb",
    version,
    about = "Pattern matrices of multiqubit orthogonal product bases"
)]
pub struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check that a file expands to a member of O(n) and matches its header.
    Validate { file: PathBuf },
    /// Expand shorthand and print every row.
    Expand {
        file: PathBuf,
        /// Re-introduce `*` and `0`/`1` shorthand.
        #[arg(long)]
        compact: bool,
    },
    /// Print the canonical key and canonical representative.
    Canon { file: PathBuf },
    /// Decide whether two files hold equivalent matrices.
    Equiv { a: PathBuf, b: PathBuf },
    /// Decide whether a matrix is maximal.
    Maximal { file: PathBuf },
    /// Distinct classes obtained by one identification.
    Children { file: PathBuf },
    /// Distinct classes obtained by one split.
    Parents { file: PathBuf },
    /// Enumerate the classes of O(n) upward from the standard matrix.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        maximal_only: bool,
        /// Worker threads; 1 forces the sequential path.
        #[arg(long)]
        jobs: Option<usize>,
        /// Directory receiving one file per class and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stop after visiting this many classes.
        #[arg(long)]
        max_nodes: Option<usize>,
        /// Stop after this many seconds.
        #[arg(long)]
        max_seconds: Option<f64>,
    },
    /// Switching class of a maximal matrix.
    Orbits { file: PathBuf },
    /// Cover relations among all classes of O(n).
    Hasse {
        #[arg(long)]
        n: usize,
        /// Emit Graphviz instead of an edge list.
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a generic qubit basis with the given pattern.
    Instantiate {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check orthonormality and frame structure of a basis file (JSON).
    VerifyGram {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Read the pattern matrix off a qubit basis file (JSON).
    Associate {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Build and check the controlled unitary realising a switch.
    SwitchUnitary {
        file: PathBuf,
        /// 1-based site: `ROWS:COLS` (e.g. `5,6,7,8:2,3`) or an index into
        /// the list of sites.
        #[arg(long)]
        site: String,
        /// 1-based block column order, e.g. `2,1`.
        #[arg(long)]
        perm: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every reproduction check.
    VerifyPaper {
        /// Skip the four-qubit enumerations.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

enum Failure {
    /// Bad arguments or unreadable input: exit 2.
    Usage(String),
    /// A check did not hold: exit 1.
    Check(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

/// What a command produced; `ok == false` exits with 1.
struct Report {
    ok: bool,
    text: String,
    result: Value,
}

impl Report {
    fn ok(text: String, result: Value) -> Report {
        Report { ok: true, text, result }
    }
}

/// Reads input files and remembers their digests for the JSON envelope.
#[derive(Default)]
struct Inputs {
    seen: Vec<Value>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        self.seen.push(json!({
            "path": path.display().to_string(),
            "sha256": hex::encode(Sha256::digest(&bytes)),
        }));
        String::from_utf8(bytes).map_err(|_| Failure::Usage(format!("{}: not UTF-8", path.display())))
    }

    fn matrix(&mut self, path: &Path) -> Result<PatternMatrix, Failure> {
        let text = self.read(path)?;
        Ok(OpbFile::parse(&text)?.to_matrix()?)
    }

    fn basis(&mut self, path: &Path) -> Result<NumericOPB, Failure> {
        let text = self.read(path)?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        NumericOPB::from_json(&value).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn key_of(m: &PatternMatrix) -> CanonicalKey {
    canonical_key(m).expect("parsed matrices are valid")
}

fn class_json(key: &CanonicalKey, sig: &Signature) -> Value {
    json!({ "key": key.to_hex(), "nu": sig.nu, "partitions": sig.partitions })
}

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    write_atomic(path, text.as_bytes()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_list(text: &str, what: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(Failure::Usage(format!(
                "{what}: expected 1-based comma-separated indices, got `{text}`"
            ))),
        })
        .collect()
}

fn parse_site(m: &PatternMatrix, text: &str) -> Result<SwitchSite, Failure> {
    let sites = switching_sites(m).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some((rows, cols)) = text.split_once(':') {
        let rows = parse_list(rows, "site rows")?;
        let cols = parse_list(cols, "site columns")?;
        return sites
            .into_iter()
            .find(|s| s.rows == rows && s.cols == cols)
            .ok_or_else(|| Failure::Usage(format!("`{text}` is not a switching site")));
    }
    let index = parse_list(text, "site")?;
    match index.as_slice() {
        [i] if *i < sites.len() => Ok(sites[*i].clone()),
        _ => Err(Failure::Usage(format!(
            "site index `{text}` out of range 1..={}",
            sites.len()
        ))),
    }
}

fn neighbours(m: &PatternMatrix, up: bool) -> Report {
    let raw: Vec<PatternMatrix> = if up {
        splits(m).expect("valid").into_iter().map(|(p, _)| p).collect()
    } else {
        identifications(m).expect("valid").into_iter().map(|(c, _)| c).collect()
    };
    let distinct: BTreeMap<CanonicalKey, Signature> =
        raw.iter().map(|x| (key_of(x), x.signature().expect("valid"))).collect();
    let mut text = format!("{} raw, {} distinct classes\n", raw.len(), distinct.len());
    for (k, sig) in &distinct {
        text.push_str(&format!("{}  {}\n", k.to_hex(), sig));
    }
    let classes: Vec<Value> = distinct.iter().map(|(k, s)| class_json(k, s)).collect();
    Report::ok(text, json!({ "raw": raw.len(), "classes": classes }))
}

fn run(command: &Command, inputs: &mut Inputs, progress: &mut (dyn FnMut(String) + Send)) -> Result<Report, Failure> {
    match command {
        Command::Validate { file } => {
            let text = inputs.read(file)?;
            let doc = OpbFile::parse(&text)?;
            let m = doc.expand()?;
            let report = m.validate();
            if !report.is_ok() {
                return Ok(Report {
                    ok: false,
                    text: format!("invalid: {report}\n"),
                    result: json!({ "valid": false, "violations": report.to_string() }),
                });
            }
            let sig = m.signature().expect("valid");
            let mut problems = Vec::new();
            if !doc.fragment {
                if let Some(expected) = doc.expected_signature() {
                    if expected.partitions != sig.partitions {
                        problems.push(format!("partitions are {sig}, header says {expected}"));
                    }
                }
                if let Some(nu) = doc.nu.filter(|&nu| nu != sig.nu) {
                    problems.push(format!("ν is {}, header says {nu}", sig.nu));
                }
            }
            let ok = problems.is_empty();
            let mut text = format!("valid: {} rows, signature {sig}\n", m.num_rows());
            for p in &problems {
                text.push_str(&format!("header mismatch: {p}\n"));
            }
            Ok(Report {
                ok,
                text,
                result: json!({ "valid": true, "nu": sig.nu, "partitions": sig.partitions, "header_mismatches": problems }),
            })
        }
        Command::Expand { file, compact } => {
            let m = inputs.matrix(file)?;
            let style = if *compact { Style::Compact } else { Style::Full };
            let text = serialize(&m, style, None);
            Ok(Report::ok(text.clone(), json!({ "opb": text })))
        }
        Command::Canon { file } => {
            let m = inputs.matrix(file)?;
            let (key, form) = canonical_form(&m).expect("valid");
            let body = serialize(&form, Style::Full, None);
            Ok(Report::ok(
                format!("{}\n{body}", key.to_hex()),
                json!({ "key": key.to_hex(), "opb": body }),
            ))
        }
        Command::Equiv { a, b } => {
            let ma = inputs.matrix(a)?;
            let mb = inputs.matrix(b)?;
            let same = are_equivalent(&ma, &mb).map_err(|e| Failure::Usage(e.to_string()))?;
            let word = if same { "equivalent" } else { "inequivalent" };
            Ok(Report::ok(format!("{word}\n"), json!({ "equivalent": same })))
        }
        Command::Maximal { file } => {
            let m = inputs.matrix(file)?;
            let maximal = is_maximal(&m).expect("valid");
            let word = if maximal { "maximal" } else { "not maximal" };
            Ok(Report::ok(format!("{word}\n"), json!({ "maximal": maximal })))
        }
        Command::Children { file } => Ok(neighbours(&inputs.matrix(file)?, false)),
        Command::Parents { file } => Ok(neighbours(&inputs.matrix(file)?, true)),
        Command::Enumerate {
            n,
            maximal_only,
            jobs,
            out,
            max_nodes,
            max_seconds,
        } => {
            if !(1..=4).contains(n) {
                return Err(Failure::Usage(format!("--n must be between 1 and 4, got {n}")));
            }
            let max_time = match max_seconds {
                Some(s) if s.is_finite() && *s >= 0.0 => Some(Duration::from_secs_f64(*s)),
                Some(s) => return Err(Failure::Usage(format!("--max-seconds must be nonnegative, got {s}"))),
                None => None,
            };
            let options = EnumerateOptions {
                maximal_only: *maximal_only,
                budget: Budget {
                    max_nodes: *max_nodes,
                    max_time,
                },
                jobs: *jobs,
            };
            let start = Instant::now();
            let store = enumerate_classes_with(*n, &options, |level| {
                progress(format!(
                    "ν={:>2}: {:>6} classes, {:>3} maximal  [{:.1} s]",
                    level.nu,
                    level.classes,
                    level.maximal,
                    level.elapsed.as_secs_f64()
                ))
            })
            .map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(dir) = out {
                write_store(&store, dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
            }
            let elapsed = start.elapsed().as_secs_f64();
            let text = if store.complete {
                let what = if store.maximal_only {
                    "maximal classes"
                } else {
                    "classes"
                };
                let mut text = format!("n={n}: {} {what}", store.len());
                if !store.maximal_only {
                    text.push_str(&format!(", {} maximal", store.maximal().count()));
                }
                text.push_str(&format!(" ({elapsed:.1} s)\n"));
                for (nu, count) in store.nu_histogram() {
                    text.push_str(&format!("  ν={nu}: {count}\n"));
                }
                text
            } else {
                format!(
                    "n={n}: INCOMPLETE, budget exhausted after {} classes; no count reported ({elapsed:.1} s)\n",
                    store.classes_seen
                )
            };
            let mut result = manifest(&store);
            if !store.complete {
                // a partial store must not be mistaken for a count
                let map = result.as_object_mut().expect("manifest is an object");
                map.remove("stored");
                map.remove("classes");
                map.remove("nu_histogram");
            }
            Ok(Report {
                ok: store.complete,
                text,
                result,
            })
        }
        Command::Orbits { file } => {
            let m = inputs.matrix(file)?;
            let orbit = switching_orbit(&m).map_err(|e| Failure::Check(e.to_string()))?;
            let own = key_of(&m);
            let mut text = format!("switching class of {} classes\n", orbit.len());
            let mut classes = Vec::new();
            for k in &orbit {
                let sig = k.to_matrix().signature().expect("valid");
                let mark = if *k == own { "  (input)" } else { "" };
                text.push_str(&format!("{}  {}{mark}\n", k.to_hex(), sig));
                classes.push(class_json(k, &sig));
            }
            Ok(Report::ok(text, json!({ "size": orbit.len(), "classes": classes })))
        }
        Command::Hasse { n, dot, out } => {
            if !(1..=3).contains(n) {
                return Err(Failure::Usage(format!("--n must be between 1 and 3, got {n}")));
            }
            let store = opb::lattice::enumerate_classes(*n, &EnumerateOptions::default())
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let diagram = hasse(&store).map_err(|e| Failure::Check(e.to_string()))?;
            let edges = checks::hasse_edge_lines(&diagram);
            let body = if *dot {
                hasse_dot(&store, &diagram)
            } else {
                let mut s = format!(
                    "# {} classes, {} cover edges: lower key, upper key\n",
                    diagram.nodes.len(),
                    edges.len()
                );
                for e in &edges {
                    s.push_str(e);
                    s.push('\n');
                }
                s
            };
            if let Some(path) = out {
                write_output(path, &body)?;
            }
            let nodes: Vec<Value> = diagram
                .nodes
                .iter()
                .map(|k| class_json(k, &store.records[k].signature))
                .collect();
            let result = json!({ "nodes": nodes, "edges": diagram.edges, "dot": dot.then(|| body.clone()) });
            let text = if out.is_some() { String::new() } else { body };
            Ok(Report::ok(text, result))
        }
        Command::Instantiate { file, seed, out } => {
            let m = inputs.matrix(file)?;
            let (mut basis, _) = instantiate(&m, *seed).map_err(|e| Failure::Check(e.to_string()))?;
            basis.metadata.source_key = Some(key_of(&m).to_hex());
            let value = basis.to_json();
            let text = format!("{}\n", serde_json::to_string_pretty(&value).expect("serializes"));
            match out {
                Some(path) => {
                    write_output(path, &text)?;
                    Ok(Report::ok(
                        String::new(),
                        json!({ "written": path.display().to_string() }),
                    ))
                }
                None => Ok(Report::ok(text, value)),
            }
        }
        Command::VerifyGram { file, tol } => {
            let b = inputs.basis(file)?;
            let defect = gram_defect(&b);
            let mut problems = Vec::new();
            if defect > *tol {
                problems.push(format!("Gram defect {defect:e} exceeds {tol:e}"));
            }
            for slot in (0..b.parties()).filter(|&s| b.dims()[s] == 2) {
                match verify_frame_structure(&b, slot) {
                    Ok(r) => problems.extend(r.failures(*tol).into_iter().map(|f| format!("party {}: {f}", slot + 1))),
                    Err(e) => problems.push(format!("party {}: {e}", slot + 1)),
                }
            }
            let mut text = format!("{} vectors, Gram defect {defect:.3e}\n", b.len());
            for p in &problems {
                text.push_str(&format!("failed: {p}\n"));
            }
            if problems.is_empty() {
                text.push_str("ok\n");
            }
            Ok(Report {
                ok: problems.is_empty(),
                text,
                result: json!({ "gram_defect": defect, "problems": problems }),
            })
        }
        Command::Associate { file, tol } => {
            let b = inputs.basis(file)?;
            let m = associate_matrix(&b, *tol).map_err(|e| Failure::Check(e.to_string()))?;
            let text = serialize(&m, Style::Full, None);
            Ok(Report::ok(
                text.clone(),
                json!({ "key": key_of(&m).to_hex(), "opb": text }),
            ))
        }
        Command::SwitchUnitary { file, site, perm, seed } => {
            let m = inputs.matrix(file)?;
            let site = parse_site(&m, site)?;
            let perm = parse_list(perm, "perm")?;
            let (_, asg) = instantiate(&m, *seed).map_err(|e| Failure::Check(e.to_string()))?;
            let check = check_switch_unitary(&m, &site, &perm, &asg).map_err(|e| Failure::Usage(e.to_string()))?;
            let ok = check.unitarity_defect <= 1e-10 && check.matched;
            let text = format!(
                "unitarity defect {:.3e}, smallest overlap {:.12}, basis mapped: {}\n",
                check.unitarity_defect, check.min_overlap, check.matched
            );
            Ok(Report {
                ok,
                text,
                result: json!({
                    "rows": site.rows.iter().map(|r| r + 1).collect::<Vec<_>>(),
                    "cols": site.cols.iter().map(|c| c + 1).collect::<Vec<_>>(),
                    "unitarity_defect": check.unitarity_defect,
                    "min_overlap": check.min_overlap,
                    "matched": check.matched,
                }),
            })
        }
        Command::VerifyPaper { quick, jobs } => {
            let ctx = Context::new(*jobs, *quick);
            let outcomes = checks::run_all(&ctx, |o| progress(o.summary()));
            let mut text = String::new();
            for o in &outcomes {
                text.push_str(&o.summary());
                text.push('\n');
                for note in &o.notes {
                    text.push_str(&format!("    {note}\n"));
                }
            }
            let results: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "criterion": o.id,
                        "title": o.title,
                        "passed": o.passed,
                        "notes": o.notes,
                        "seconds": o.elapsed.as_secs_f64(),
                    })
                })
                .collect();
            Ok(Report {
                ok: outcomes.iter().all(|o| o.passed),
                text,
                result: json!({ "criteria": results }),
            })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Expand { .. } => "expand",
        Command::Canon { .. } => "canon",
        Command::Equiv { .. } => "equiv",
        Command::Maximal { .. } => "maximal",
        Command::Children { .. } => "children",
        Command::Parents { .. } => "parents",
        Command::Enumerate { .. } => "enumerate",
        Command::Orbits { .. } => "orbits",
        Command::Hasse { .. } => "hasse",
        Command::Instantiate { .. } => "instantiate",
        Command::VerifyGram { .. } => "verify-gram",
        Command::Associate { .. } => "associate",
        Command::SwitchUnitary { .. } => "switch-unitary",
        Command::VerifyPaper { .. } => "verify-paper",
    }
}

/// Result of one invocation: exit code plus the text for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (program name first). Progress lines of
/// long commands go to `progress`; they are suppressed under `--json`.
pub fn execute<I, T>(args: I, progress: &mut (dyn FnMut(String) + Send)) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = u8::try_from(e.exit_code()).unwrap_or(2);
            return if e.use_stderr() {
                Execution {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Execution {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut inputs = Inputs::default();
    let mut silent = |_: String| {};
    let sink: &mut (dyn FnMut(String) + Send) = if cli.json { &mut silent } else { progress };
    let outcome = run(&cli.command, &mut inputs, sink);
    let (code, text, result, error) = match outcome {
        Ok(r) => (u8::from(!r.ok), r.text, r.result, None),
        Err(Failure::Check(msg)) => (1, String::new(), Value::Null, Some(msg)),
        Err(Failure::Usage(msg)) => (2, String::new(), Value::Null, Some(msg)),
    };
    if cli.json {
        let envelope = json!({
            "tool": "opb",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command_name(&cli.command),
            "inputs": inputs.seen,
            "ok": code == 0,
            "result": result,
            "error": error,
        });
        let stdout = format!("{}\n", serde_json::to_string_pretty(&envelope).expect("serializes"));
        Execution {
            code,
            stdout,
            stderr: String::new(),
        }
    } else {
        let stderr = error.map(|msg| format!("error: {msg}\n")).unwrap_or_default();
        Execution {
            code,
            stdout: text,
            stderr,
        }
    }
}
