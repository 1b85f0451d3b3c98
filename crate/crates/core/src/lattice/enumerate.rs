use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::order::{identifications_unchecked, splits_unchecked};
use super::{map_items, LatticeError};
use crate::canonical::{canonical_key_unchecked, CanonicalKey};
use crate::pattern::{PatternError, PatternMatrix, Signature, MAX_QUBITS};

/// Limits on an enumeration run. Hitting either marks the store incomplete.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: Option<usize>,
    pub max_time: Option<Duration>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub maximal_only: bool,
    pub budget: Budget,
    /// Worker count; `Some(1)` forces the sequential path, `None` uses the
    /// global pool.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    pub key: CanonicalKey,
    pub signature: Signature,
    pub maximal: bool,
    pub reducible: bool,
}

impl ClassRecord {
    pub fn representative(&self) -> PatternMatrix {
        self.key.to_matrix()
    }
}

/// Classes found by [`enumerate_classes`], ordered by canonical key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassStore {
    pub n: usize,
    pub maximal_only: bool,
    pub budget: Budget,
    /// False when the budget stopped the search early.
    pub complete: bool,
    /// Classes visited, maximal or not.
    pub classes_seen: usize,
    pub maximal_seen: usize,
    pub records: BTreeMap<CanonicalKey, ClassRecord>,
}

impl ClassStore {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn maximal(&self) -> impl Iterator<Item = &ClassRecord> {
        self.records.values().filter(|r| r.maximal)
    }

    /// Number of stored classes per ν, ascending.
    pub fn nu_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for r in self.records.values() {
            *h.entry(r.signature.nu).or_insert(0) += 1;
        }
        h
    }
}

const CHUNK: usize = 2048;

/// Every equivalence class of O(n), found by closing the standard class
/// under splits. Splits raise ν by one, so the search runs level by level
/// and only two levels of keys are held at once.
pub fn enumerate_classes(n: usize, options: &EnumerateOptions) -> Result<ClassStore, LatticeError> {
    enumerate_classes_with(n, options, |_| {})
}

/// Progress of one finished level of [`enumerate_classes_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelStats {
    pub nu: usize,
    pub classes: usize,
    pub maximal: usize,
    pub elapsed: Duration,
}

/// [`enumerate_classes`] reporting each completed level to `on_level`.
pub fn enumerate_classes_with(
    n: usize,
    options: &EnumerateOptions,
    on_level: impl FnMut(LevelStats) + Send,
) -> Result<ClassStore, LatticeError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(PatternError::QubitCount(n).into());
    }
    #[cfg(feature = "parallel")]
    if let Some(jobs) = options.jobs.filter(|&j| j > 1) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        return pool.install(|| run(n, options, on_level));
    }
    run(n, options, on_level)
}

fn run(n: usize, options: &EnumerateOptions, mut on_level: impl FnMut(LevelStats)) -> Result<ClassStore, LatticeError> {
    let start = Instant::now();
    let budget = options.budget;
    let mut store = ClassStore {
        n,
        maximal_only: options.maximal_only,
        budget,
        complete: true,
        classes_seen: 0,
        maximal_seen: 0,
        records: BTreeMap::new(),
    };
    let standard = PatternMatrix::standard(n)?;
    let mut level = vec![canonical_key_unchecked(&standard)];
    let mut nu = n;
    'levels: while !level.is_empty() {
        let mut next: HashSet<CanonicalKey> = HashSet::new();
        let maximal_before = store.maximal_seen;
        for chunk in level.chunks(CHUNK) {
            let over_time = budget.max_time.is_some_and(|t| start.elapsed() > t);
            let over_nodes = budget
                .max_nodes
                .is_some_and(|max| store.classes_seen + chunk.len() > max);
            if over_time || over_nodes {
                store.complete = false;
                break 'levels;
            }
            let expanded = map_items(chunk, options.jobs, |key| {
                let rep = key.to_matrix();
                let parents: Vec<CanonicalKey> = splits_unchecked(&rep)
                    .iter()
                    .map(|(p, _)| canonical_key_unchecked(p))
                    .collect();
                (rep, parents)
            });
            for (key, (rep, parents)) in chunk.iter().zip(expanded) {
                let maximal = parents.is_empty();
                store.classes_seen += 1;
                store.maximal_seen += maximal as usize;
                if maximal || !options.maximal_only {
                    store.records.insert(
                        key.clone(),
                        ClassRecord {
                            key: key.clone(),
                            signature: rep.signature_unchecked(),
                            maximal,
                            reducible: rep.is_reducible().is_some(),
                        },
                    );
                }
                next.extend(parents);
            }
        }
        on_level(LevelStats {
            nu,
            classes: level.len(),
            maximal: store.maximal_seen - maximal_before,
            elapsed: start.elapsed(),
        });
        nu += 1;
        level = next.into_iter().collect();
        level.sort_unstable();
    }
    Ok(store)
}

/// Cover relations among the classes of a complete store; `edges` holds
/// (lower, upper) index pairs into `nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseDiagram {
    pub nodes: Vec<CanonicalKey>,
    pub edges: Vec<(usize, usize)>,
}

impl HasseDiagram {
    /// Nodes with nothing below them.
    pub fn minima(&self) -> Vec<usize> {
        let mut has_lower = vec![false; self.nodes.len()];
        for &(_, hi) in &self.edges {
            has_lower[hi] = true;
        }
        (0..self.nodes.len()).filter(|&i| !has_lower[i]).collect()
    }
}

/// Reachability under identification, transitively reduced.
pub fn hasse(store: &ClassStore) -> Result<HasseDiagram, LatticeError> {
    if !store.complete || store.maximal_only {
        return Err(LatticeError::IncompleteStore);
    }
    let nodes: Vec<CanonicalKey> = store.records.keys().cloned().collect();
    let index: BTreeMap<&CanonicalKey, usize> = nodes.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let below: Vec<BTreeSet<usize>> = map_items(&nodes, None, |key| {
        identifications_unchecked(&key.to_matrix())
            .iter()
            .map(|(child, _)| canonical_key_unchecked(child))
            .collect::<BTreeSet<_>>()
    })
    .into_iter()
    .map(|children| {
        children
            .iter()
            .map(|k| *index.get(k).expect("complete store holds every child"))
            .collect()
    })
    .collect();
    Ok(HasseDiagram {
        edges: transitive_reduction(&below),
        nodes,
    })
}

/// Keeps an edge lo -> hi only when hi reaches lo by no longer path.
/// `below[hi]` lists the direct lower neighbours of `hi`; the relation must
/// be acyclic.
pub(crate) fn transitive_reduction(below: &[BTreeSet<usize>]) -> Vec<(usize, usize)> {
    let count = below.len();
    let mut reach: Vec<Option<BTreeSet<usize>>> = vec![None; count];
    fn closure(v: usize, below: &[BTreeSet<usize>], reach: &mut Vec<Option<BTreeSet<usize>>>) -> BTreeSet<usize> {
        if let Some(r) = &reach[v] {
            return r.clone();
        }
        let mut r = BTreeSet::new();
        for &w in &below[v] {
            r.insert(w);
            r.extend(closure(w, below, reach));
        }
        reach[v] = Some(r.clone());
        r
    }
    let mut edges = Vec::new();
    for hi in 0..count {
        for &lo in &below[hi] {
            let implied = below[hi]
                .iter()
                .any(|&mid| mid != lo && closure(mid, below, &mut reach).contains(&lo));
            if !implied {
                edges.push((lo, hi));
            }
        }
    }
    edges.sort_unstable();
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_drops_shortcuts() {
        // 2 > 1 > 0 and 2 > 0 directly
        let below = vec![BTreeSet::new(), BTreeSet::from([0]), BTreeSet::from([0, 1])];
        assert_eq!(transitive_reduction(&below), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn small_counts() {
        let two = enumerate_classes(2, &EnumerateOptions::default()).unwrap();
        assert_eq!((two.len(), two.maximal().count()), (2, 1));
        let one = enumerate_classes(1, &EnumerateOptions::default()).unwrap();
        assert_eq!((one.len(), one.maximal().count()), (1, 1));
    }

    #[test]
    fn budget_marks_incomplete() {
        let options = EnumerateOptions {
            budget: Budget {
                max_nodes: Some(3),
                max_time: None,
            },
            ..Default::default()
        };
        let store = enumerate_classes(3, &options).unwrap();
        assert!(!store.complete);
        assert!(store.classes_seen <= 3);
        assert_eq!(hasse(&store), Err(LatticeError::IncompleteStore));
    }
}
