//! Canonical forms under row permutations, column permutations and renamings.
//!
//! The key of a matrix is the lexicographically smallest row-major byte string
//! obtainable by the equivalence group, where each entry is written as
//! `label << 1 | polarity` and rows appear in sorted order. For a fixed
//! column order and row order the smallest labelling is forced: classes get
//! labels in order of first appearance and that first appearance is written
//! with polarity `0`. So the search only runs over column orders and row
//! orders, and it proceeds row by row, keeping at each depth only the partial
//! states whose emitted prefix is globally minimal.
//!
//! Ties between candidate rows related by an involutive renaming of the
//! classes not yet labelled are explored once; such a renaming is an
//! automorphism fixing everything emitted so far, so both branches emit the
//! same bytes.

use std::fmt;

use crate::pattern::{Entry, PatternError, PatternMatrix};

/// Identity of an equivalence class: `n` plus the minimal serialization.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    n: u8,
    bytes: Vec<u8>,
}

impl CanonicalKey {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Row-major entry codes of the canonical representative.
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Stable textual identity: the qubit count byte followed by the codes.
    pub fn to_hex(&self) -> String {
        let mut raw = Vec::with_capacity(self.bytes.len() + 1);
        raw.push(self.n);
        raw.extend_from_slice(&self.bytes);
        hex::encode(raw)
    }

    pub fn from_hex(text: &str) -> Option<CanonicalKey> {
        let raw = hex::decode(text.trim()).ok()?;
        let (&n, bytes) = raw.split_first()?;
        let n_usize = n as usize;
        if n_usize == 0 || n_usize > crate::pattern::MAX_QUBITS || bytes.len() != n_usize << n_usize {
            return None;
        }
        Some(CanonicalKey {
            n,
            bytes: bytes.to_vec(),
        })
    }

    /// The canonical representative encoded by this key.
    pub fn to_matrix(&self) -> PatternMatrix {
        let n = self.n();
        let rows = self
            .bytes
            .chunks_exact(n)
            .map(|r| r.iter().map(|&c| Entry::from_code(c)).collect())
            .collect();
        PatternMatrix::new(n, rows).expect("key encodes a well-formed grid")
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

const UNASSIGNED: u8 = 0xFF;
/// Classes over all columns never exceed `n · 2^(n-1)`.
const MAX_LABELS: usize = crate::pattern::MAX_QUBITS << (crate::pattern::MAX_QUBITS - 1);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    perm: u16,
    placed: u64,
    next: [u8; 6],
    /// `label << 1 | flip` per (column, class), indexed through `offsets`.
    labels: [u8; MAX_LABELS],
}

struct Search<'a> {
    m: &'a PatternMatrix,
    n: usize,
    rows: usize,
    offsets: Vec<usize>,
    perms: Vec<Vec<usize>>,
    /// original rows packed in column order, sorted
    packed_sorted: Vec<u64>,
}

fn pack(codes: impl Iterator<Item = u8>) -> u64 {
    codes.fold(0u64, |acc, c| (acc << 8) | c as u64)
}

/// All permutations of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut current, &mut out);
    out.sort();
    out
}

impl<'a> Search<'a> {
    fn new(m: &'a PatternMatrix) -> Search<'a> {
        let n = m.n();
        let mut offsets = Vec::with_capacity(n);
        let mut total = 0;
        for c in 0..n {
            offsets.push(total);
            total += m.class_count(c);
        }
        let mut packed_sorted: Vec<u64> = m.rows().map(|r| pack(r.iter().map(|e| e.code()))).collect();
        packed_sorted.sort_unstable();
        Search {
            m,
            n,
            rows: m.num_rows(),
            offsets,
            perms: permutations(n),
            packed_sorted,
        }
    }

    fn initial_states(&self) -> Vec<State> {
        (0..self.perms.len())
            .map(|p| State {
                perm: p as u16,
                placed: 0,
                labels: [UNASSIGNED; MAX_LABELS],
                next: [0; 6],
            })
            .collect()
    }

    fn encode(&self, s: &State, row: usize) -> u64 {
        let perm = &self.perms[s.perm as usize];
        let r = self.m.row(row);
        let mut acc = 0u64;
        for &c in perm {
            let e = r[c];
            let lab = s.labels[self.offsets[c] + e.class()];
            let v = if lab == UNASSIGNED {
                s.next[c] << 1
            } else {
                lab ^ (e.code() & 1)
            };
            acc = (acc << 8) | v as u64;
        }
        acc
    }

    fn place(&self, s: &State, row: usize) -> State {
        let mut child = s.clone();
        child.placed |= 1 << row;
        let r = self.m.row(row);
        for (c, &e) in r.iter().enumerate() {
            let slot = self.offsets[c] + e.class();
            if child.labels[slot] == UNASSIGNED {
                child.labels[slot] = (child.next[c] << 1) | (e.code() & 1);
                child.next[c] += 1;
            }
        }
        child
    }

    /// Whether the involution exchanging the entries in which rows `a` and
    /// `b` differ is an automorphism of the matrix. The induced row map is
    /// injective and rows are distinct, so it suffices that every image row
    /// is a row of the matrix.
    fn is_twin(&self, s: &State, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.m.row(a), self.m.row(b));
        // per column: (class_x, class_y, flip) swapping x <-> y, or none
        let mut swaps: [Option<(usize, usize, bool)>; 6] = [None; 6];
        for c in 0..self.n {
            let (ea, eb) = (ra[c], rb[c]);
            if ea == eb {
                continue;
            }
            debug_assert_eq!(s.labels[self.offsets[c] + ea.class()], UNASSIGNED);
            debug_assert_eq!(s.labels[self.offsets[c] + eb.class()], UNASSIGNED);
            swaps[c] = Some((ea.class(), eb.class(), ea.is_perp() != eb.is_perp()));
        }
        self.m.rows().all(|r| {
            let mut moved = false;
            let image = pack(r.iter().enumerate().map(|(c, &e)| match swaps[c] {
                Some((x, y, f)) if e.class() == x || e.class() == y => {
                    moved = true;
                    let target = if e.class() == x { y } else { x };
                    Entry::new(target, e.is_perp() ^ f).code()
                }
                _ => e.code(),
            }));
            !moved || self.packed_sorted.binary_search(&image).is_ok()
        })
    }

    fn run(&self) -> Vec<u8> {
        let mut states = self.initial_states();
        let mut out = Vec::with_capacity(self.rows * self.n);
        for _ in 0..self.rows {
            let mut best = u64::MAX;
            let mut children: Vec<State> = Vec::new();
            for s in &states {
                let mut local_best = u64::MAX;
                let mut candidates: Vec<usize> = Vec::new();
                for r in 0..self.rows {
                    if s.placed >> r & 1 == 1 {
                        continue;
                    }
                    let code = self.encode(s, r);
                    if code < local_best {
                        local_best = code;
                        candidates.clear();
                    }
                    if code == local_best {
                        candidates.push(r);
                    }
                }
                if local_best > best {
                    continue;
                }
                if local_best < best {
                    best = local_best;
                    children.clear();
                }
                let mut kept: Vec<usize> = Vec::with_capacity(candidates.len());
                for &r in &candidates {
                    if kept.iter().any(|&k| self.is_twin(s, k, r)) {
                        continue;
                    }
                    kept.push(r);
                    children.push(self.place(s, r));
                }
            }
            for shift in (0..self.n).rev() {
                out.push((best >> (8 * shift)) as u8);
            }
            children.sort_unstable();
            children.dedup();
            states = children;
        }
        out
    }
}

/// Key without validity checks; callers guarantee `m` is a member of O(n).
pub(crate) fn canonical_key_unchecked(m: &PatternMatrix) -> CanonicalKey {
    let bytes = Search::new(m).run();
    CanonicalKey { n: m.n() as u8, bytes }
}

/// Canonical key of a valid matrix.
pub fn canonical_key(m: &PatternMatrix) -> Result<CanonicalKey, PatternError> {
    m.require_valid()?;
    Ok(canonical_key_unchecked(m))
}

/// Keys of many matrices; runs on the rayon pool unless `jobs == Some(1)`
/// or the `parallel` feature is off.
pub fn canonical_keys(ms: &[PatternMatrix], jobs: Option<usize>) -> Result<Vec<CanonicalKey>, PatternError> {
    crate::lattice::map_items(ms, jobs, canonical_key).into_iter().collect()
}

/// Canonical key together with the canonical representative.
pub fn canonical_form(m: &PatternMatrix) -> Result<(CanonicalKey, PatternMatrix), PatternError> {
    let key = canonical_key(m)?;
    let rep = key.to_matrix();
    Ok((key, rep))
}

/// Equivalence test; a signature mismatch answers `false` without a search.
pub fn are_equivalent(a: &PatternMatrix, b: &PatternMatrix) -> Result<bool, PatternError> {
    if a.n() != b.n() {
        return Err(PatternError::QubitMismatch(a.n(), b.n()));
    }
    if a.signature()? != b.signature()? {
        return Ok(false);
    }
    Ok(canonical_key_unchecked(a) == canonical_key_unchecked(b))
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute-force search refused: n = {0} exceeds 3")]
    Budget(usize),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Exhaustive equivalence test over the whole group, for `n <= 3`.
///
/// Column orders and per-column renamings (bijections with polarity flips)
/// are enumerated outright; row orders are handled by comparing sorted row
/// multisets after each column is fixed.
pub fn brute_force_equivalent(a: &PatternMatrix, b: &PatternMatrix) -> Result<bool, OracleError> {
    if a.n() != b.n() {
        return Err(PatternError::QubitMismatch(a.n(), b.n()).into());
    }
    let n = a.n();
    if n > 3 || a.num_rows() > 8 || b.num_rows() > 8 {
        return Err(OracleError::Budget(n));
    }
    a.require_valid()?;
    b.require_valid()?;
    for order in permutations(n) {
        // column t of b corresponds to column order[t] of a
        if (0..n).all(|t| a.class_count(order[t]) == b.class_count(t))
            && extend_renaming(a, b, &order, 0, &mut Vec::new())
        {
            return Ok(true);
        }
    }
    Ok(false)
}

fn projected(rows: impl Iterator<Item = Vec<u8>>) -> Vec<Vec<u8>> {
    let mut v: Vec<Vec<u8>> = rows.collect();
    v.sort_unstable();
    v
}

fn extend_renaming(
    a: &PatternMatrix,
    b: &PatternMatrix,
    order: &[usize],
    t: usize,
    maps: &mut Vec<Vec<(usize, bool)>>,
) -> bool {
    let n = a.n();
    if t == n {
        return true;
    }
    let k = a.class_count(order[t]);
    for targets in permutations(k) {
        for flips in 0..1u32 << k {
            let map: Vec<(usize, bool)> = (0..k).map(|i| (targets[i], flips >> i & 1 == 1)).collect();
            maps.push(map);
            let lhs = projected(a.rows().map(|r| {
                (0..=t)
                    .map(|s| {
                        let e = r[order[s]];
                        let (cls, flip) = maps[s][e.class()];
                        Entry::new(cls, e.is_perp() ^ flip).code()
                    })
                    .collect()
            }));
            let rhs = projected(b.rows().map(|r| (0..=t).map(|s| r[s].code()).collect()));
            if lhs == rhs && extend_renaming(a, b, order, t + 1, maps) {
                maps.pop();
                return true;
            }
            maps.pop();
        }
    }
    false
}

/// A random element of the equivalence group applied to `m`.
///
/// Used by property tests and the acceptance suite.
pub fn random_equivalent<R: rand::Rng + ?Sized>(m: &PatternMatrix, rng: &mut R) -> PatternMatrix {
    use rand::seq::SliceRandom;
    let n = m.n();
    let mut cols: Vec<usize> = (0..n).collect();
    cols.shuffle(rng);
    let mut rows: Vec<usize> = (0..m.num_rows()).collect();
    rows.shuffle(rng);
    let maps: Vec<Vec<(usize, bool)>> = (0..n)
        .map(|c| {
            let mut targets: Vec<usize> = (0..m.class_count(c)).collect();
            targets.shuffle(rng);
            targets.into_iter().map(|t| (t, rng.random::<bool>())).collect()
        })
        .collect();
    m.rename(&maps).permute_rows(&rows).permute_columns(&cols)
}
