//! Bundled `.opb` files: every matrix displayed in the classification of two,
//! three and four qubits, plus a handful of worked examples.
//!
//! Collections:
//! - `n2`: the two classes of two-qubit matrices.
//! - `n3-maximal`: the three maximal three-qubit classes.
//! - `n3-classes`: all seventeen three-qubit classes, in the listing order.
//! - `n4-switching`: one representative per four-qubit switching class (15).
//! - `n4-classes`: the 33 maximal four-qubit classes, tagged with `@group`.
//! - `examples`: small matrices used by tests and documentation.

use super::text::{OpbFile, ParseError};
use crate::pattern::PatternMatrix;

#[derive(Debug, Clone, Copy)]
pub struct DatasetEntry {
    pub collection: &'static str,
    pub file: &'static str,
    pub text: &'static str,
}

impl DatasetEntry {
    pub fn document(&self) -> Result<OpbFile, ParseError> {
        OpbFile::parse(self.text)
    }

    /// Parsed, expanded and validated matrix. Bundled files are checked by the
    /// test suite, so this only fails on a corrupted build.
    pub fn matrix(&self) -> Result<PatternMatrix, ParseError> {
        self.document()?.to_matrix()
    }

    pub fn name(&self) -> String {
        self.document()
            .ok()
            .and_then(|d| d.name)
            .unwrap_or_else(|| format!("{}/{}", self.collection, self.file))
    }

    pub fn group(&self) -> Option<usize> {
        self.document().ok().and_then(|d| d.group)
    }
}

macro_rules! bundle {
    ($($coll:literal => [$($file:literal),* $(,)?]),* $(,)?) => {
        &[$($(DatasetEntry {
            collection: $coll,
            file: $file,
            text: include_str!(concat!("../../data/", $coll, "/", $file, ".opb")),
        },)*)*]
    };
}

static ENTRIES: &[DatasetEntry] = bundle! {
    "n2" => ["standard", "maximal"],
    "n3-maximal" => ["irreducible", "reducible-a", "reducible-b"],
    "n3-classes" => [
        "class-01", "class-02", "class-03", "class-04", "class-05", "class-06",
        "class-07", "class-08", "class-09", "class-10", "class-11", "class-12",
        "class-13", "class-14", "class-15", "class-16", "class-17",
    ],
    "n4-switching" => [
        "switching-01", "switching-02", "switching-03", "switching-04", "switching-05",
        "switching-06", "switching-07", "switching-08", "switching-09", "switching-10",
        "switching-11", "switching-12", "switching-13", "switching-14", "switching-15",
    ],
    "n4-classes" => [
        "class-01a", "class-01b", "class-01c", "class-01d", "class-01e", "class-01f",
        "class-02a", "class-02b",
        "class-03a", "class-03b", "class-03c", "class-03d",
        "class-04a",
        "class-05a", "class-05b", "class-05c", "class-05d",
        "class-06a", "class-06b", "class-06c",
        "class-07a", "class-07b",
        "class-08a", "class-08b",
        "class-09a", "class-09b",
        "class-10a", "class-10b",
        "class-11a", "class-12a", "class-13a", "class-14a", "class-15a",
    ],
    "examples" => [
        "equiv-a", "equiv-x", "block-x", "block-y",
        "irreducible-normalized", "irreducible-shorthand", "two-star-rows",
    ],
};

pub fn all() -> &'static [DatasetEntry] {
    ENTRIES
}

pub fn collection_names() -> Vec<&'static str> {
    let mut names: Vec<&'static str> = Vec::new();
    for e in ENTRIES {
        if !names.contains(&e.collection) {
            names.push(e.collection);
        }
    }
    names
}

/// Entries of one collection in bundle order; empty for unknown names.
pub fn collection(name: &str) -> Vec<DatasetEntry> {
    ENTRIES.iter().filter(|e| e.collection == name).copied().collect()
}

/// Looks up `collection/file`.
pub fn get(collection: &str, file: &str) -> Option<DatasetEntry> {
    ENTRIES
        .iter()
        .find(|e| e.collection == collection && e.file == file)
        .copied()
}

/// Matrices of a collection; panics if a bundled file is broken.
pub fn matrices(name: &str) -> Vec<PatternMatrix> {
    collection(name)
        .iter()
        .map(|e| {
            e.matrix()
                .unwrap_or_else(|err| panic!("bundled file {}/{} is broken: {err}", e.collection, e.file))
        })
        .collect()
}

/// Convenience accessor for a single bundled matrix; panics when missing.
pub fn matrix(collection: &str, file: &str) -> PatternMatrix {
    let entry = get(collection, file).unwrap_or_else(|| panic!("no bundled file {collection}/{file}"));
    entry
        .matrix()
        .unwrap_or_else(|err| panic!("bundled file {collection}/{file} is broken: {err}"))
}
