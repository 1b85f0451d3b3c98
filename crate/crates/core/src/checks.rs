//! End-to-end reproduction checks, shared by `opb verify-paper` and the
//! acceptance test target. Each check returns an [`Outcome`] with a verdict
//! and short notes; none of them panics on a failed expectation.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::{are_equivalent, brute_force_equivalent, canonical_key, random_equivalent, CanonicalKey};
use crate::io::dataset;
use crate::lattice::{
    enumerate_classes, hasse, is_maximal, map_items, switching_orbit, switching_sites, Budget, ClassStore,
    EnumerateOptions, HasseDiagram,
};
use crate::numeric::{
    associate_matrix, check_switch_unitary, gram_defect, instantiate, is_reducible_numeric, prepend_qubit, tensor_opb,
    verify_frame_structure,
};
use crate::pattern::PatternMatrix;

/// Sizes of the 15 four-qubit switching groups, in listing order.
pub const GROUP_SIZES: [usize; 15] = [6, 2, 4, 1, 4, 3, 2, 2, 2, 2, 1, 1, 1, 1, 1];
/// ν of each four-qubit switching group, in listing order.
pub const GROUP_NU: [usize; 15] = [15, 14, 14, 13, 13, 13, 12, 12, 12, 12, 12, 11, 11, 11, 10];
/// Number of three-qubit classes per ν.
pub const N3_LEVELS: [(usize, usize); 5] = [(3, 1), (4, 3), (5, 6), (6, 5), (7, 2)];
pub const N4_MAXIMAL_LISTED: usize = 33;
/// Wall-clock budget for the four-qubit maximal enumeration.
pub const N4_BUDGET: Duration = Duration::from_secs(4 * 3600);

const GOLDEN_HASSE_N3: &str = include_str!("../data/golden/hasse-n3.edges");
const SEEDS: u64 = 10;
const GRAM_TOLERANCE: f64 = 1e-9;
const ASSOCIATE_TOLERANCE: f64 = 1e-6;
const UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl Outcome {
    /// One line: `criterion N  PASS  title  (elapsed)`.
    pub fn summary(&self) -> String {
        format!(
            "criterion {}  {}  {}  ({:.1} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Accumulates expectations for one outcome.
struct Tally {
    id: usize,
    title: &'static str,
    start: Instant,
    passed: bool,
    notes: Vec<String>,
}

impl Tally {
    fn new(id: usize, title: &'static str) -> Tally {
        Tally {
            id,
            title,
            start: Instant::now(),
            passed: true,
            notes: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, note: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.notes.push(format!("failed: {}", note.into()));
        }
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn within(&mut self, limit: Duration) {
        let spent = self.start.elapsed();
        self.expect(
            spent < limit,
            format!("took {:.1} s, limit {} s", spent.as_secs_f64(), limit.as_secs()),
        );
    }

    fn finish(self) -> Outcome {
        Outcome {
            id: self.id,
            title: self.title,
            passed: self.passed,
            notes: self.notes,
            elapsed: self.start.elapsed(),
        }
    }
}

/// Lazily enumerated complete class stores, shared between checks.
pub struct Context {
    pub jobs: Option<usize>,
    /// Skip the four-qubit enumerations; checks then use bundled four-qubit
    /// matrices only, and the independent enumeration is reported as failed.
    pub quick: bool,
    stores: [OnceLock<ClassStore>; 5],
}

impl Context {
    pub fn new(jobs: Option<usize>, quick: bool) -> Context {
        Context {
            jobs,
            quick,
            stores: Default::default(),
        }
    }

    /// Complete store of every class of O(n), n ≤ 4.
    pub fn store(&self, n: usize) -> &ClassStore {
        self.stores[n].get_or_init(|| {
            let options = EnumerateOptions {
                jobs: self.jobs,
                ..EnumerateOptions::default()
            };
            enumerate_classes(n, &options).expect("qubit count in range")
        })
    }

    fn stores_up_to_four(&self) -> Vec<&ClassStore> {
        let top = if self.quick { 3 } else { 4 };
        (2..=top).map(|n| self.store(n)).collect()
    }

    /// Four-qubit matrices: every stored class (unless quick) plus all
    /// bundled four-qubit files.
    fn four_qubit_matrices(&self) -> Vec<PatternMatrix> {
        let mut out: Vec<PatternMatrix> = dataset::matrices("n4-classes");
        out.extend(dataset::matrices("n4-switching"));
        if !self.quick {
            out.extend(self.store(4).records.values().map(|r| r.representative()));
        }
        out
    }
}

fn key(m: &PatternMatrix) -> CanonicalKey {
    canonical_key(m).expect("checked matrices are valid")
}

/// Runs every criterion in order, reporting each as it finishes.
pub fn run_all(ctx: &Context, mut on_outcome: impl FnMut(&Outcome)) -> Vec<Outcome> {
    let checks: [fn(&Context) -> Outcome; 9] = [
        class_counts,
        switching_groups,
        maximal_enumeration,
        multiplicity_properties,
        hasse_three_qubits,
        canonical_soundness,
        numeric_soundness,
        switching_unitaries,
        constructions,
    ];
    checks
        .iter()
        .map(|check| {
            let outcome = check(ctx);
            on_outcome(&outcome);
            outcome
        })
        .collect()
}

/// Number of distinct switching orbits among the maximal classes of a store.
fn orbit_count(store: &ClassStore) -> usize {
    let orbits: BTreeSet<BTreeSet<CanonicalKey>> = store
        .maximal()
        .map(|r| switching_orbit(&r.representative()).expect("maximal class"))
        .collect();
    orbits.len()
}

pub fn class_counts(ctx: &Context) -> Outcome {
    let mut t = Tally::new(1, "class counts for two and three qubits");
    let two = ctx.store(2);
    t.expect(
        two.complete && two.len() == 2,
        format!("n=2 gives {} classes", two.len()),
    );
    t.expect(
        two.maximal().count() == 1,
        format!("n=2 gives {} maximal", two.maximal().count()),
    );
    let three = ctx.store(3);
    let levels: Vec<(usize, usize)> = three.nu_histogram().into_iter().collect();
    t.expect(
        three.complete && three.len() == 17,
        format!("n=3 gives {} classes", three.len()),
    );
    t.expect(levels == N3_LEVELS, format!("n=3 levels by ν {levels:?}"));
    let maximal = three.maximal().count();
    t.expect(maximal == 3, format!("n=3 gives {maximal} maximal"));
    let orbits = orbit_count(three);
    t.expect(
        orbits == 2,
        format!("n=3 maximal classes fall into {orbits} switching orbits"),
    );
    t.note(format!(
        "n=2: 2 classes, 1 maximal; n=3: {} classes, {maximal} maximal, {orbits} orbits",
        three.len()
    ));
    t.within(Duration::from_secs(10));
    t.finish()
}

pub fn switching_groups(_ctx: &Context) -> Outcome {
    let mut t = Tally::new(2, "four-qubit maximal classes and switching groups");
    let entries = dataset::collection("n4-classes");
    t.expect(
        entries.len() == N4_MAXIMAL_LISTED,
        format!("{} listed files", entries.len()),
    );
    let matrices: Vec<PatternMatrix> = dataset::matrices("n4-classes");
    for (e, m) in entries.iter().zip(&matrices) {
        t.expect(m.is_valid(), format!("{} is not valid", e.file));
        t.expect(is_maximal(m).unwrap_or(false), format!("{} is not maximal", e.file));
    }
    let keys: Vec<CanonicalKey> = matrices.iter().map(key).collect();
    let distinct: BTreeSet<&CanonicalKey> = keys.iter().collect();
    t.expect(
        distinct.len() == keys.len(),
        format!("only {} distinct classes", distinct.len()),
    );

    let orbits: Vec<BTreeSet<CanonicalKey>> = map_items(&matrices, None, |m| switching_orbit(m).expect("maximal"));
    // files i and j share a group exactly when j lies in the orbit of i
    let mut found: Vec<Vec<usize>> = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        match found.iter_mut().find(|g| orbits[g[0]].contains(k)) {
            Some(g) => g.push(i),
            None => found.push(vec![i]),
        }
    }
    for (i, orbit) in orbits.iter().enumerate() {
        let closed = (0..matrices.len()).all(|j| orbit.contains(&keys[j]) == (orbits[j] == *orbit));
        t.expect(closed, format!("orbit of {} is inconsistent", entries[i].file));
    }
    let mut tagged: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        tagged.entry(e.group().unwrap_or(0)).or_default().push(i);
    }
    let tagged_groups: BTreeSet<Vec<usize>> = tagged.values().cloned().collect();
    let found_groups: BTreeSet<Vec<usize>> = found.iter().cloned().collect();
    t.expect(found.len() == 15, format!("{} switching groups", found.len()));
    t.expect(
        found_groups == tagged_groups,
        "switching groups differ from the listed grouping",
    );
    let sizes: Vec<usize> = tagged.values().map(Vec::len).collect();
    t.expect(sizes == GROUP_SIZES, format!("group sizes {sizes:?}"));

    let reps = dataset::collection("n4-switching");
    t.expect(reps.len() == 15, format!("{} switching representatives", reps.len()));
    for (g, rep) in reps.iter().enumerate() {
        let m = rep.matrix().expect("bundled file");
        let members = tagged.get(&(g + 1)).cloned().unwrap_or_default();
        let rep_key = key(&m);
        t.expect(
            members.iter().any(|&i| keys[i] == rep_key),
            format!("representative {} is not in its group", rep.file),
        );
        let expected = GROUP_NU[g];
        t.expect(
            m.nu() == expected,
            format!("{} has ν={}, expected {expected}", rep.file, m.nu()),
        );
        for &i in &members {
            t.expect(
                matrices[i].nu() == expected,
                format!("{} has ν={}", entries[i].file, matrices[i].nu()),
            );
        }
        if let Some(&first) = members.first() {
            let orbit = orbits[first].len();
            if orbit != members.len() {
                t.note(format!(
                    "group {}: full switching orbit has {orbit} classes, {} of them listed",
                    g + 1,
                    members.len()
                ));
            }
        }
    }
    t.within(Duration::from_secs(120));
    t.finish()
}

/// Compares a set of maximal four-qubit classes with the listed files.
/// Returns the verdict and notes describing unmatched classes.
pub fn judge_maximal_classes(complete: bool, classes: &[PatternMatrix]) -> (bool, Vec<String>) {
    let mut notes = Vec::new();
    if !complete {
        notes.push("enumeration incomplete: budget exhausted, no count reported".to_string());
        return (false, notes);
    }
    let listed: BTreeMap<CanonicalKey, &'static str> = dataset::collection("n4-classes")
        .iter()
        .map(|e| (key(&e.matrix().expect("bundled file")), e.file))
        .collect();
    let found: BTreeMap<CanonicalKey, &PatternMatrix> = classes.iter().map(|m| (key(m), m)).collect();
    let extra: Vec<String> = found
        .iter()
        .filter(|(k, _)| !listed.contains_key(*k))
        .map(|(_, m)| m.signature().expect("valid").to_string())
        .collect();
    let missing: Vec<&str> = listed
        .iter()
        .filter(|(k, _)| !found.contains_key(*k))
        .map(|(_, f)| *f)
        .collect();
    notes.push(format!(
        "{} maximal classes found, {} equivalent to listed files",
        found.len(),
        found.len() - extra.len()
    ));
    for sig in &extra {
        notes.push(format!("unlisted maximal class {sig}"));
    }
    if !missing.is_empty() {
        notes.push(format!("listed files not found: {}", missing.join(", ")));
    }
    let ok = found.len() == N4_MAXIMAL_LISTED && extra.is_empty() && missing.is_empty();
    (ok, notes)
}

pub fn maximal_enumeration(ctx: &Context) -> Outcome {
    let mut t = Tally::new(3, "independent four-qubit maximal enumeration");
    if ctx.quick {
        t.expect(false, "skipped in quick mode");
        return t.finish();
    }
    let options = EnumerateOptions {
        maximal_only: true,
        budget: Budget {
            max_nodes: None,
            max_time: Some(N4_BUDGET),
        },
        jobs: ctx.jobs,
    };
    let store = enumerate_classes(4, &options).expect("qubit count in range");
    let classes: Vec<PatternMatrix> = store.records.values().map(|r| r.representative()).collect();
    let (ok, notes) = judge_maximal_classes(store.complete, &classes);
    t.expect(
        ok,
        format!("expected exactly {N4_MAXIMAL_LISTED} maximal classes, all listed"),
    );
    for n in notes {
        t.note(n);
    }
    t.finish()
}

/// Rows whose summed entry multiplicities fall below `2^n - 1`.
fn row_bound_violations(m: &PatternMatrix) -> usize {
    let bound = (1 << m.n()) - 1;
    (0..m.num_rows())
        .filter(|&r| (0..m.n()).map(|c| m.entry_multiplicity(r, c)).sum::<usize>() < bound)
        .count()
}

fn largest_multiplicity(m: &PatternMatrix) -> usize {
    (0..m.n()).map(|c| m.column_partition(c)[0]).max().unwrap_or(0)
}

pub fn multiplicity_properties(ctx: &Context) -> Outcome {
    let mut t = Tally::new(4, "multiplicity properties");
    let four = ctx.four_qubit_matrices();
    let low: Vec<usize> = four.iter().map(largest_multiplicity).filter(|&mu| mu < 6).collect();
    t.expect(
        low.is_empty(),
        format!("{} four-qubit matrices with largest multiplicity below 6", low.len()),
    );
    t.note(format!(
        "largest multiplicity ≥ 6 on {} four-qubit matrices",
        four.len()
    ));

    let mut all: Vec<PatternMatrix> = four;
    for store in ctx.stores_up_to_four().into_iter().filter(|s| s.n < 4) {
        all.extend(store.records.values().map(|r| r.representative()));
    }
    for e in dataset::all() {
        let doc = e.document().expect("bundled file");
        if !doc.fragment && doc.n >= 2 {
            all.push(doc.to_matrix().expect("bundled file"));
        }
    }
    let bad: usize = all.iter().map(row_bound_violations).sum();
    t.expect(bad == 0, format!("{bad} rows below the multiplicity bound"));
    t.note(format!("row multiplicity bound holds on {} matrices", all.len()));

    let irreducible: Vec<PatternMatrix> = ctx
        .store(3)
        .records
        .values()
        .filter(|r| !r.reducible)
        .map(|r| r.representative())
        .collect();
    for m in &irreducible {
        let ok = (0..3).all(|c| m.column_partition(c).iter().all(|&p| p == 1 || p == 3));
        t.expect(
            ok,
            format!(
                "irreducible class {} has a multiplicity outside {{1,3}}",
                m.signature().unwrap()
            ),
        );
    }
    t.note(format!(
        "{} irreducible three-qubit classes have multiplicities in {{1,3}}",
        irreducible.len()
    ));
    t.finish()
}

/// Edge list of a diagram as `lower-key upper-key` lines, sorted.
pub fn hasse_edge_lines(d: &HasseDiagram) -> Vec<String> {
    let mut lines: Vec<String> = d
        .edges
        .iter()
        .map(|&(lo, hi)| format!("{} {}", d.nodes[lo].to_hex(), d.nodes[hi].to_hex()))
        .collect();
    lines.sort();
    lines
}

/// Frozen edge list of the three-qubit diagram.
pub fn golden_hasse_n3() -> Vec<String> {
    let mut lines: Vec<String> = GOLDEN_HASSE_N3
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect();
    lines.sort();
    lines
}

pub fn hasse_three_qubits(ctx: &Context) -> Outcome {
    let mut t = Tally::new(5, "three-qubit Hasse diagram");
    let store = ctx.store(3);
    let d = match hasse(store) {
        Ok(d) => d,
        Err(e) => {
            t.expect(false, e.to_string());
            return t.finish();
        }
    };
    t.expect(d.nodes.len() == 17, format!("{} nodes", d.nodes.len()));
    let minima = d.minima();
    let standard = key(&PatternMatrix::standard(3).expect("n in range"));
    t.expect(
        minima.len() == 1 && d.nodes[minima[0]] == standard,
        format!(
            "{} minima, standard class among them: {}",
            minima.len(),
            minima.iter().any(|&i| d.nodes[i] == standard)
        ),
    );
    let mut levels: BTreeMap<usize, usize> = BTreeMap::new();
    for k in &d.nodes {
        *levels.entry(store.records[k].signature.nu).or_insert(0) += 1;
    }
    let levels: Vec<(usize, usize)> = levels.into_iter().collect();
    t.expect(levels == N3_LEVELS, format!("levels {levels:?}"));
    let edges = hasse_edge_lines(&d);
    let golden = golden_hasse_n3();
    t.expect(
        edges == golden,
        format!("{} edges differ from the {} frozen edges", edges.len(), golden.len()),
    );
    t.note(format!("{} nodes, {} cover edges", d.nodes.len(), edges.len()));
    t.finish()
}

/// Applies `steps` random group elements in sequence.
fn random_chain(m: &PatternMatrix, steps: usize, rng: &mut ChaCha8Rng) -> PatternMatrix {
    (0..steps).fold(m.clone(), |acc, _| random_equivalent(&acc, rng))
}

pub fn canonical_soundness(ctx: &Context) -> Outcome {
    let mut t = Tally::new(6, "canonical form soundness");
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b65_7973);
    let mut compared = [0usize; 2];
    for (slot, (n, pairs)) in [(2usize, 1000usize), (3, 600)].into_iter().enumerate() {
        let reps: Vec<PatternMatrix> = ctx.store(n).records.values().map(|r| r.representative()).collect();
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                let truth = brute_force_equivalent(&reps[i], &reps[j]);
                let fast = are_equivalent(&reps[i], &reps[j]);
                t.expect(
                    truth.ok() == fast.ok(),
                    format!("n={n} stored pair ({i},{j}) disagrees"),
                );
            }
        }
        for _ in 0..pairs {
            let i = rng.random_range(0..reps.len());
            let j = if rng.random_bool(0.5) {
                i
            } else {
                rng.random_range(0..reps.len())
            };
            let a = random_chain(&reps[i], 2, &mut rng);
            let b = random_chain(&reps[j], 2, &mut rng);
            let truth = brute_force_equivalent(&a, &b).expect("small enough for the oracle");
            let fast = are_equivalent(&a, &b).expect("valid");
            t.expect(
                truth == fast && truth == (i == j),
                format!("n={n} random pair of classes {i},{j} disagrees"),
            );
            compared[slot] += 1;
        }
    }
    t.note(format!(
        "{} random n=2 pairs and {} random n=3 pairs agree with the oracle",
        compared[0], compared[1]
    ));

    let mut classes: Vec<PatternMatrix> = Vec::new();
    for store in ctx.stores_up_to_four() {
        if store.n < 4 {
            classes.extend(store.records.values().map(|r| r.representative()));
        } else {
            classes.extend(store.maximal().map(|r| r.representative()));
        }
    }
    classes.extend(dataset::matrices("n4-classes"));
    let seeds: Vec<(usize, u64)> = (0..classes.len()).map(|i| (i, rng.random())).collect();
    let broken = map_items(&seeds, ctx.jobs, |&(i, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reference = key(&classes[i]);
        (0..100).any(|k| key(&random_chain(&classes[i], 1 + k % 4, &mut rng)) != reference)
    })
    .into_iter()
    .filter(|&b| b)
    .count();
    t.expect(broken == 0, format!("{broken} classes change key under random chains"));
    t.note(format!(
        "keys invariant under 100 random chains for {} classes",
        classes.len()
    ));
    t.finish()
}

/// Per-matrix numeric problems over all seeds; empty when everything holds.
fn numeric_problems(m: &PatternMatrix) -> Vec<String> {
    let mut out = Vec::new();
    for seed in 0..SEEDS {
        let (b, _) = match instantiate(m, seed) {
            Ok(x) => x,
            Err(e) => {
                out.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let defect = gram_defect(&b);
        if defect > GRAM_TOLERANCE {
            out.push(format!("seed {seed}: Gram defect {defect:e}"));
        }
        match associate_matrix(&b, ASSOCIATE_TOLERANCE) {
            Ok(back) if are_equivalent(&back, m).unwrap_or(false) => {}
            Ok(_) => out.push(format!("seed {seed}: associated matrix is inequivalent")),
            Err(e) => out.push(format!("seed {seed}: {e}")),
        }
        if m.is_reducible().is_some() != is_reducible_numeric(&b).is_some() {
            out.push(format!("seed {seed}: reducibility disagrees"));
        }
        for slot in 0..m.n() {
            match verify_frame_structure(&b, slot) {
                Ok(report) => out.extend(
                    report
                        .failures(GRAM_TOLERANCE)
                        .into_iter()
                        .map(|f| format!("seed {seed}: {f}")),
                ),
                Err(e) => out.push(format!("seed {seed}, party {}: {e}", slot + 1)),
            }
        }
    }
    out
}

pub fn numeric_soundness(ctx: &Context) -> Outcome {
    let mut t = Tally::new(7, "numeric instantiation soundness");
    let mut classes: Vec<PatternMatrix> = Vec::new();
    for store in ctx.stores_up_to_four() {
        classes.extend(store.records.values().map(|r| r.representative()));
    }
    classes.extend(dataset::matrices("n4-classes"));
    let problems = map_items(&classes, ctx.jobs, numeric_problems);
    let mut failing = 0;
    for (m, p) in classes.iter().zip(&problems) {
        if !p.is_empty() {
            failing += 1;
            if failing <= 5 {
                t.note(format!("{}: {}", m.signature().unwrap(), p[0]));
            }
        }
    }
    t.expect(failing == 0, format!("{failing} classes fail a numeric check"));
    t.note(format!("{} classes × {SEEDS} seeds instantiated", classes.len()));
    t.finish()
}

pub fn switching_unitaries(ctx: &Context) -> Outcome {
    let mut t = Tally::new(8, "switching unitaries");
    let reps = dataset::matrices("n4-switching");
    let results = map_items(&reps, ctx.jobs, |m| {
        let (_, asg) = instantiate(m, 0).expect("generic instantiation");
        let mut checked = 0usize;
        let mut worst_defect: f64 = 0.0;
        let mut worst_overlap: f64 = 1.0;
        let mut failures = Vec::new();
        for site in switching_sites(m).expect("valid") {
            for perm in crate::canonical::permutations(site.cols.len()) {
                match check_switch_unitary(m, &site, &perm, &asg) {
                    Ok(c) => {
                        checked += 1;
                        worst_defect = worst_defect.max(c.unitarity_defect);
                        worst_overlap = worst_overlap.min(c.min_overlap);
                        if c.unitarity_defect > UNITARITY_TOLERANCE || !c.matched {
                            failures.push(format!("site cols {:?} perm {perm:?}", site.cols));
                        }
                    }
                    Err(e) => failures.push(e.to_string()),
                }
            }
        }
        (checked, worst_defect, worst_overlap, failures)
    });
    let mut total = 0;
    let mut defect: f64 = 0.0;
    let mut overlap: f64 = 1.0;
    for (g, (checked, d, o, failures)) in results.into_iter().enumerate() {
        total += checked;
        defect = defect.max(d);
        overlap = overlap.min(o);
        t.expect(
            failures.is_empty(),
            format!("representative {}: {}", g + 1, failures.join("; ")),
        );
    }
    t.note(format!(
        "{total} site/permutation pairs; worst unitarity defect {defect:.1e}, smallest overlap 1-{:.1e}",
        1.0 - overlap
    ));
    t.finish()
}

pub fn constructions(_ctx: &Context) -> Outcome {
    let mut t = Tally::new(9, "tensor and prepend constructions");
    let first = dataset::matrix("n4-switching", "switching-01");
    let last = dataset::matrix("n4-switching", "switching-15");
    let (a, _) = instantiate(&first, 0).expect("generic instantiation");
    let (b, _) = instantiate(&last, 0).expect("generic instantiation");
    match prepend_qubit(&a, &b) {
        Ok(c) => {
            let defect = gram_defect(&c);
            t.expect(
                c.len() == 32 && c.parties() == 5,
                format!("{} vectors on {} parties", c.len(), c.parties()),
            );
            t.expect(defect <= GRAM_TOLERANCE, format!("Gram defect {defect:e}"));
            t.expect(
                is_reducible_numeric(&c).is_some_and(|r| r.slot == 0),
                "prepended basis is not reducible through the new qubit",
            );
            t.note(format!("prepend: 32 vectors, Gram defect {defect:.1e}"));
        }
        Err(e) => t.expect(false, e.to_string()),
    }

    let irreducible = dataset::matrix("n3-maximal", "irreducible");
    let reducible = dataset::matrix("n3-maximal", "reducible-a");
    let (x, _) = instantiate(&irreducible, 1).expect("generic instantiation");
    let (y, _) = instantiate(&irreducible, 2).expect("generic instantiation");
    let (z, _) = instantiate(&reducible, 3).expect("generic instantiation");
    t.expect(
        is_reducible_numeric(&x).is_none() && is_reducible_numeric(&y).is_none(),
        "factors are reducible",
    );
    t.expect(is_reducible_numeric(&z).is_some(), "reducible factor is not reducible");
    match tensor_opb(&x, &y) {
        Ok(p) => {
            t.expect(
                gram_defect(&p) <= GRAM_TOLERANCE,
                format!("Gram defect {:e}", gram_defect(&p)),
            );
            t.expect(
                is_reducible_numeric(&p).is_none(),
                "tensor of irreducible bases is reducible",
            );
        }
        Err(e) => t.expect(false, e.to_string()),
    }
    match tensor_opb(&x, &z) {
        Ok(p) => t.expect(
            is_reducible_numeric(&p).is_some(),
            "tensor with a reducible factor is irreducible",
        ),
        Err(e) => t.expect(false, e.to_string()),
    }
    t.finish()
}
