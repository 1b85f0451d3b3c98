//! Symbolic pattern matrices.
//!
//! A pattern matrix over `n` qubits has `2^n` rows and `n` columns. Every
//! entry names a vector variable of its column, or the perpendicular of one.
//! Variables are column-scoped: class `0` of column 1 and class `0` of column 2
//! are unrelated. Rows must be pairwise orthogonal, which for two rows means
//! some column holds a variable in one row and its perpendicular in the other.

use std::fmt;

use thiserror::Error;

/// Largest qubit count accepted anywhere in the crate (`2^6 = 64` rows).
pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("qubit count {0} outside 1..={MAX_QUBITS}")]
    QubitCount(usize),
    #[error("row {row} has {found} entries, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("too many rows: {0} (at most 64)")]
    TooManyRows(usize),
    #[error("column {column} uses more than 127 variable classes")]
    TooManyClasses { column: usize },
    #[error("class {class} does not occur in column {column}")]
    UnknownClass { column: usize, class: usize },
    #[error("row index {0} out of range")]
    RowIndex(usize),
    #[error("a row cannot be compared with itself (row {0})")]
    SameRow(usize),
    #[error("column index {0} out of range")]
    ColumnIndex(usize),
    #[error("matrix is not a member of O(n): {0}")]
    Invalid(ValidationReport),
    #[error("qubit counts differ: {0} vs {1}")]
    QubitMismatch(usize, usize),
}

/// One cell of a pattern matrix: a column-scoped class id and a polarity.
///
/// Packed as `class << 1 | perp` so that entries compare and hash as bytes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entry(u8);

impl Entry {
    pub fn new(class: usize, perp: bool) -> Entry {
        debug_assert!(class < 128);
        Entry(((class as u8) << 1) | perp as u8)
    }

    pub fn from_code(code: u8) -> Entry {
        Entry(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn class(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_perp(self) -> bool {
        self.0 & 1 == 1
    }

    /// The same class with the opposite polarity.
    pub fn flipped(self) -> Entry {
        Entry(self.0 ^ 1)
    }

    /// `true` when the two entries are a variable and its perpendicular.
    pub fn is_orthogonal_to(self, other: Entry) -> bool {
        self.0 ^ other.0 == 1
    }
}

impl fmt::Debug for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.class(), if self.is_perp() { "'" } else { "" })
    }
}

/// A grid of entries together with per-column display names.
///
/// The grid is immutable; every transformation returns a new matrix. Class ids
/// are renumbered at construction so that within each column they are dense
/// and appear in first-occurrence order reading the rows top to bottom.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PatternMatrix {
    n: usize,
    rows: usize,
    entries: Vec<Entry>,
    names: Vec<Vec<String>>,
}

/// Default display name of a class: the column letter followed by the id.
pub fn default_class_name(column: usize, class: usize) -> String {
    format!("{}{}", (b'a' + column as u8) as char, class)
}

impl PatternMatrix {
    /// Builds a matrix from rows of entries, generating default class names.
    pub fn new(n: usize, rows: Vec<Vec<Entry>>) -> Result<PatternMatrix, PatternError> {
        Self::build(n, rows, None)
    }

    /// Builds a matrix with explicit per-column name tables indexed by the
    /// class ids used in `rows`.
    pub fn with_names(n: usize, rows: Vec<Vec<Entry>>, names: Vec<Vec<String>>) -> Result<PatternMatrix, PatternError> {
        Self::build(n, rows, Some(names))
    }

    fn build(n: usize, rows: Vec<Vec<Entry>>, names: Option<Vec<Vec<String>>>) -> Result<PatternMatrix, PatternError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(PatternError::QubitCount(n));
        }
        if rows.len() > 64 {
            return Err(PatternError::TooManyRows(rows.len()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(PatternError::RowLength {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let count = rows.len();
        let mut entries = vec![Entry(0); count * n];
        let mut new_names = vec![Vec::new(); n];
        for col in 0..n {
            let mut remap: Vec<Option<usize>> = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let e = row[col];
                let class = e.class();
                if class >= remap.len() {
                    remap.resize(class + 1, None);
                }
                let id = match remap[class] {
                    Some(id) => id,
                    None => {
                        let id = new_names[col].len();
                        if id >= 127 {
                            return Err(PatternError::TooManyClasses { column: col });
                        }
                        let name = names
                            .as_ref()
                            .and_then(|t| t.get(col))
                            .and_then(|t| t.get(class))
                            .cloned()
                            .unwrap_or_else(|| default_class_name(col, id));
                        new_names[col].push(name);
                        remap[class] = Some(id);
                        id
                    }
                };
                entries[i * n + col] = Entry::new(id, e.is_perp());
            }
        }
        Ok(PatternMatrix {
            n,
            rows: count,
            entries,
            names: new_names,
        })
    }

    /// The standard matrix: row `i` spells the binary digits of `i` (least
    /// significant digit in the first column) as polarities of one class per
    /// column.
    pub fn standard(n: usize) -> Result<PatternMatrix, PatternError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(PatternError::QubitCount(n));
        }
        let rows = (0..1usize << n)
            .map(|i| (0..n).map(|j| Entry::new(0, (i >> j) & 1 == 1)).collect())
            .collect();
        let names = (0..n).map(|j| vec![format!("s{}", j + 1)]).collect();
        Self::with_names(n, rows, names)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn entry(&self, row: usize, col: usize) -> Entry {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[Entry] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[Entry]> + '_ {
        self.entries.chunks_exact(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<Entry>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn class_count(&self, col: usize) -> usize {
        self.names[col].len()
    }

    pub fn class_name(&self, col: usize, class: usize) -> &str {
        &self.names[col][class]
    }

    pub fn names(&self) -> &[Vec<String>] {
        &self.names
    }

    /// Total number of independent variable classes over all columns.
    pub fn nu(&self) -> usize {
        self.names.iter().map(Vec::len).sum()
    }

    /// Replaces all display names by the default column-letter scheme.
    pub fn with_default_names(&self) -> PatternMatrix {
        let names = (0..self.n)
            .map(|c| (0..self.class_count(c)).map(|k| default_class_name(c, k)).collect())
            .collect();
        PatternMatrix { names, ..self.clone() }
    }

    /// Occurrence counts `(μ(a), μ(a⊥))` of a class in a column.
    pub fn multiplicity(&self, col: usize, class: usize) -> Result<(usize, usize), PatternError> {
        if col >= self.n {
            return Err(PatternError::ColumnIndex(col));
        }
        if class >= self.class_count(col) {
            return Err(PatternError::UnknownClass { column: col, class });
        }
        Ok(self.multiplicity_unchecked(col, class))
    }

    pub(crate) fn multiplicity_unchecked(&self, col: usize, class: usize) -> (usize, usize) {
        let mut counts = (0, 0);
        for r in 0..self.rows {
            let e = self.entry(r, col);
            if e.class() == class {
                if e.is_perp() {
                    counts.1 += 1;
                } else {
                    counts.0 += 1;
                }
            }
        }
        counts
    }

    /// Multiplicity of the class occupying a given cell.
    pub fn entry_multiplicity(&self, row: usize, col: usize) -> usize {
        let e = self.entry(row, col);
        (0..self.rows).filter(|&r| self.entry(r, col) == e).count()
    }

    /// Bitmask of the columns in which rows `i` and `j` hold a variable and
    /// its perpendicular.
    pub fn witness_mask(&self, i: usize, j: usize) -> u32 {
        let (a, b) = (self.row(i), self.row(j));
        let mut mask = 0;
        for k in 0..self.n {
            if a[k].is_orthogonal_to(b[k]) {
                mask |= 1 << k;
            }
        }
        mask
    }

    /// Columns in which rows `i` and `j` are orthogonal.
    pub fn orthogonality_witnesses(&self, i: usize, j: usize) -> Result<Vec<usize>, PatternError> {
        for r in [i, j] {
            if r >= self.rows {
                return Err(PatternError::RowIndex(r));
            }
        }
        if i == j {
            return Err(PatternError::SameRow(i));
        }
        let mask = self.witness_mask(i, j);
        Ok((0..self.n).filter(|k| mask >> k & 1 == 1).collect())
    }

    /// Checks every axiom and reports all violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let expected = 1usize << self.n;
        if self.rows != expected {
            violations.push(Violation::RowCount {
                expected,
                found: self.rows,
            });
        }
        for i in 0..self.rows {
            for j in i + 1..self.rows {
                if self.witness_mask(i, j) == 0 {
                    violations.push(Violation::NotOrthogonal { rows: (i, j) });
                }
            }
        }
        for col in 0..self.n {
            for class in 0..self.class_count(col) {
                let (plain, perp) = self.multiplicity_unchecked(col, class);
                if plain != perp {
                    violations.push(Violation::Unbalanced {
                        column: col,
                        class: self.names[col][class].clone(),
                        plain,
                        perp,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub(crate) fn require_valid(&self) -> Result<(), PatternError> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(PatternError::Invalid(report))
        }
    }

    /// Column multiplicity partitions and the independent-class count.
    pub fn signature(&self) -> Result<Signature, PatternError> {
        self.require_valid()?;
        Ok(self.signature_unchecked())
    }

    pub(crate) fn signature_unchecked(&self) -> Signature {
        let mut partitions: Vec<Vec<usize>> = (0..self.n).map(|c| self.column_partition(c)).collect();
        partitions.sort_by(|a, b| b.cmp(a));
        let nu = partitions.iter().map(Vec::len).sum();
        Signature { partitions, nu }
    }

    /// Multiplicities of the classes of one column, largest first.
    pub fn column_partition(&self, col: usize) -> Vec<usize> {
        let mut parts: Vec<usize> = (0..self.class_count(col))
            .map(|k| self.multiplicity_unchecked(col, k).0)
            .collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }

    /// A column with a single class, if any.
    pub fn is_reducible(&self) -> Option<usize> {
        (0..self.n).find(|&c| self.class_count(c) == 1)
    }

    /// Applies a column permutation: column `t` of the result is column
    /// `order[t]` of `self`.
    pub fn permute_columns(&self, order: &[usize]) -> PatternMatrix {
        let rows = self.rows().map(|r| order.iter().map(|&c| r[c]).collect()).collect();
        let names = order.iter().map(|&c| self.names[c].clone()).collect();
        Self::with_names(self.n, rows, names).expect("column permutation keeps shape")
    }

    /// Applies a row permutation: row `t` of the result is row `order[t]`.
    pub fn permute_rows(&self, order: &[usize]) -> PatternMatrix {
        let rows = order.iter().map(|&r| self.row(r).to_vec()).collect();
        Self::with_names(self.n, rows, self.names.clone()).expect("row permutation keeps shape")
    }

    /// Renames classes: in column `c`, class `k` becomes `maps[c][k].0`, with
    /// polarity flipped when `maps[c][k].1` is set.
    pub fn rename(&self, maps: &[Vec<(usize, bool)>]) -> PatternMatrix {
        let rows = self
            .rows()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(c, e)| {
                        let (k, flip) = maps[c][e.class()];
                        Entry::new(k, e.is_perp() ^ flip)
                    })
                    .collect()
            })
            .collect();
        Self::new(self.n, rows).expect("renaming keeps shape")
    }

    /// Rows sorted as packed byte strings; two matrices with the same class
    /// ids are equal up to row order iff these agree.
    pub fn sorted_rows(&self) -> Vec<Vec<u8>> {
        let mut rows: Vec<Vec<u8>> = self.rows().map(|r| r.iter().map(|e| e.code()).collect()).collect();
        rows.sort_unstable();
        rows
    }
}

impl fmt::Debug for PatternMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PatternMatrix(n={}) [", self.n)?;
        for r in self.rows() {
            let cells: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(c, e)| format!("{}{}", self.names[c][e.class()], if e.is_perp() { "'" } else { "" }))
                .collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

/// A single failed axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RowCount {
        expected: usize,
        found: usize,
    },
    NotOrthogonal {
        rows: (usize, usize),
    },
    Unbalanced {
        column: usize,
        class: String,
        plain: usize,
        perp: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowCount { expected, found } => {
                write!(f, "row count: expected {expected} rows, found {found}")
            }
            Violation::NotOrthogonal { rows: (i, j) } => write!(
                f,
                "orthogonality: rows {} and {} share no variable/perpendicular column",
                i + 1,
                j + 1
            ),
            Violation::Unbalanced {
                column,
                class,
                plain,
                perp,
            } => write!(
                f,
                "balance: class {class} in column {} occurs {plain} times but its perpendicular {perp} times",
                column + 1
            ),
        }
    }
}

/// Outcome of [`PatternMatrix::validate`]; empty means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Per-column multiplicity partitions (each of `2^(n-1)`), sorted
/// decreasingly, plus the total class count `nu`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub partitions: Vec<Vec<usize>>,
    pub nu: usize,
}

impl Signature {
    /// Sorts column partitions into the canonical decreasing order.
    pub fn from_partitions(mut partitions: Vec<Vec<usize>>) -> Signature {
        for p in &mut partitions {
            p.sort_unstable_by(|a, b| b.cmp(a));
        }
        partitions.sort_by(|a, b| b.cmp(a));
        let nu = partitions.iter().map(Vec::len).sum();
        Signature { partitions, nu }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.partitions.iter().map(|p| format_partition(p)).collect();
        write!(f, "{} ; nu={}", parts.join(" | "), self.nu)
    }
}

/// Formats a partition with exponents for repeated parts, e.g. `3^2,1^2`.
pub fn format_partition(p: &[usize]) -> String {
    let mut out = Vec::new();
    let mut i = 0;
    while i < p.len() {
        let mut j = i;
        while j < p.len() && p[j] == p[i] {
            j += 1;
        }
        if j - i == 1 {
            out.push(p[i].to_string());
        } else {
            out.push(format!("{}^{}", p[i], j - i));
        }
        i = j;
    }
    out.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(class: usize, perp: bool) -> Entry {
        Entry::new(class, perp)
    }

    // columns: a|b,c as in the maximal two-qubit matrix
    fn maximal_n2() -> PatternMatrix {
        PatternMatrix::new(
            2,
            vec![
                vec![e(0, false), e(0, false)],
                vec![e(0, false), e(0, true)],
                vec![e(0, true), e(1, false)],
                vec![e(0, true), e(1, true)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn flip_is_involutive() {
        for code in 0..=255u8 {
            let x = Entry::from_code(code);
            assert_eq!(x.flipped().flipped(), x);
            assert!(x.is_orthogonal_to(x.flipped()));
        }
    }

    #[test]
    fn standard_matrix_shape() {
        let s1 = PatternMatrix::standard(1).unwrap();
        assert_eq!(s1.to_rows(), vec![vec![e(0, false)], vec![e(0, true)]]);
        for n in 1..=MAX_QUBITS {
            let s = PatternMatrix::standard(n).unwrap();
            assert!(s.validate().is_ok());
            let sig = s.signature().unwrap();
            assert_eq!(sig.nu, n);
            assert!(sig.partitions.iter().all(|p| p == &vec![1 << (n - 1)]));
            assert_eq!(s.is_reducible(), Some(0));
        }
        assert!(PatternMatrix::standard(0).is_err());
        assert!(PatternMatrix::standard(7).is_err());
    }

    #[test]
    fn standard_row_digits() {
        let s = PatternMatrix::standard(3).unwrap();
        // row 6 (0-based) = binary 110: s1, s2', s3'
        assert_eq!(s.row(6), &[e(0, false), e(0, true), e(0, true)]);
        assert_eq!(s.multiplicity(1, 0).unwrap(), (4, 4));
    }

    #[test]
    fn witnesses() {
        let s = PatternMatrix::standard(2).unwrap();
        assert_eq!(s.orthogonality_witnesses(0, 3).unwrap(), vec![0, 1]);
        let m = maximal_n2();
        assert_eq!(m.orthogonality_witnesses(0, 1).unwrap(), vec![1]);
        assert_eq!(m.orthogonality_witnesses(0, 2).unwrap(), vec![0]);
        assert_eq!(m.orthogonality_witnesses(1, 1), Err(PatternError::SameRow(1)));
        assert!(m.orthogonality_witnesses(0, 9).is_err());
    }

    #[test]
    fn maximal_two_qubit_counts() {
        let m = maximal_n2();
        assert!(m.validate().is_ok());
        assert_eq!(m.multiplicity(0, 0).unwrap(), (2, 2));
        assert_eq!(m.multiplicity(1, 1).unwrap(), (1, 1));
        assert_eq!(
            m.multiplicity(1, 5),
            Err(PatternError::UnknownClass { column: 1, class: 5 })
        );
        let sig = m.signature().unwrap();
        assert_eq!(sig.partitions, vec![vec![2], vec![1, 1]]);
        assert_eq!(sig.nu, 3);
    }

    #[test]
    fn duplicated_row_is_reported() {
        let mut rows = maximal_n2().to_rows();
        rows[1] = rows[0].clone();
        let m = PatternMatrix::new(2, rows).unwrap();
        let report = m.validate();
        assert!(report.violations.contains(&Violation::NotOrthogonal { rows: (0, 1) }));
        // all violations are reported, including the balance failure in column 2
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Unbalanced { column: 1, .. })));
        assert!(m.signature().is_err());
    }

    #[test]
    fn row_count_violation() {
        let m = PatternMatrix::new(2, vec![vec![e(0, false), e(0, false)]]).unwrap();
        assert!(m
            .validate()
            .violations
            .contains(&Violation::RowCount { expected: 4, found: 1 }));
    }

    #[test]
    fn construction_renumbers_classes() {
        let m = PatternMatrix::new(1, vec![vec![e(5, true)], vec![e(5, false)]]).unwrap();
        assert_eq!(m.entry(0, 0), e(0, true));
        assert_eq!(m.class_count(0), 1);
        assert!(m.validate().is_ok());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            PatternMatrix::new(2, vec![vec![e(0, false)]]),
            Err(PatternError::RowLength { .. })
        ));
    }

    #[test]
    fn partition_formatting() {
        assert_eq!(format_partition(&[3, 3, 1, 1]), "3^2,1^2");
        assert_eq!(format_partition(&[8]), "8");
        assert_eq!(format_partition(&[4, 3, 1]), "4,3,1");
    }
}
