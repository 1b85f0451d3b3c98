//! The `.opb` text format.
//!
//! ```text
//! # comment
//! @n 3
//! @name irreducible
//! @partitions 3,1 | 3,1 | 3,1
//! @nu 6
//! 0 0 0
//! * 1 0
//! 0 * 1
//! 1 0 *
//! 1 1 1
//! ```
//!
//! Body tokens are `0`, `1`, `*` or an identifier `[a-z][a-z0-9]*` with an
//! optional trailing `'` for the perpendicular. An identifier belongs to one
//! column. `0` and `1` denote one normalized class of their column and its
//! perpendicular. A `*` stands for a fresh class whose perpendicular sits in a
//! copy of the same row. Stars expand first (rows top to bottom, stars left to
//! right), then every normalized column gets its own fresh class.
//!
//! Header keys: `@n` (required), `@name`, `@group`, `@partitions`, `@nu`, and
//! `@fragment` (allows a row count other than `2^n`).

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::pattern::{default_class_name, format_partition, Entry, PatternMatrix, Signature, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `@n` header")]
    MissingN,
    #[error("line {line}: identifier `{name}` already used in column {first} (found in column {second})")]
    CrossColumn {
        line: usize,
        name: String,
        first: usize,
        second: usize,
    },
    #[error("expansion produced {found} rows, expected {expected}")]
    RowCount { expected: usize, found: usize },
    #[error("matrix fails validation: {0}")]
    Invalid(ValidationReport),
    #[error("{0}")]
    Pattern(#[from] crate::pattern::PatternError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Zero,
    One,
    Star,
    Var { name: String, perp: bool },
}

/// A parsed but not yet expanded `.opb` document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpbFile {
    pub n: usize,
    pub name: Option<String>,
    pub group: Option<usize>,
    pub partitions: Option<Vec<Vec<usize>>>,
    pub nu: Option<usize>,
    pub fragment: bool,
    pub rows: Vec<Vec<Token>>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

fn parse_token(tok: &str, line: usize) -> Result<Token, ParseError> {
    match tok {
        "0" => return Ok(Token::Zero),
        "1" => return Ok(Token::One),
        "*" => return Ok(Token::Star),
        _ => {}
    }
    let (name, perp) = match tok.strip_suffix('\'') {
        Some(base) => (base, true),
        None => (tok, false),
    };
    if is_identifier(name) {
        Ok(Token::Var {
            name: name.to_string(),
            perp,
        })
    } else {
        Err(ParseError::Syntax {
            line,
            message: format!("unrecognised token `{tok}`"),
        })
    }
}

/// Parses `8 | 4^2 | 2,1^6` into column partitions.
pub fn parse_partitions(text: &str) -> Option<Vec<Vec<usize>>> {
    text.split('|')
        .map(|col| {
            let mut parts = Vec::new();
            for piece in col.split(',') {
                let piece = piece.trim();
                let (value, times): (usize, usize) = match piece.split_once('^') {
                    Some((v, t)) => (v.trim().parse().ok()?, t.trim().parse().ok()?),
                    None => (piece.parse().ok()?, 1),
                };
                parts.extend(std::iter::repeat_n(value, times));
            }
            Some(parts)
        })
        .collect()
}

impl OpbFile {
    pub fn parse(text: &str) -> Result<OpbFile, ParseError> {
        let mut file = OpbFile {
            n: 0,
            name: None,
            group: None,
            partitions: None,
            nu: None,
            fragment: false,
            rows: Vec::new(),
        };
        let mut have_n = false;
        let mut owner: HashMap<String, usize> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(header) = content.strip_prefix('@') {
                let (key, value) = header.split_once(char::is_whitespace).unwrap_or((header, ""));
                let value = value.trim();
                let bad = |what: &str| ParseError::Syntax {
                    line,
                    message: format!("bad `@{key}` value: {what}"),
                };
                match key {
                    "n" => {
                        if !file.rows.is_empty() {
                            return Err(ParseError::Syntax {
                                line,
                                message: "`@n` must precede the rows".into(),
                            });
                        }
                        file.n = value.parse().map_err(|_| bad(value))?;
                        if file.n == 0 || file.n > crate::pattern::MAX_QUBITS {
                            return Err(bad(value));
                        }
                        have_n = true;
                    }
                    "name" => file.name = Some(value.to_string()),
                    "group" => file.group = Some(value.parse().map_err(|_| bad(value))?),
                    "partitions" => file.partitions = Some(parse_partitions(value).ok_or_else(|| bad(value))?),
                    "nu" => file.nu = Some(value.parse().map_err(|_| bad(value))?),
                    "fragment" => file.fragment = true,
                    _ => {
                        return Err(ParseError::Syntax {
                            line,
                            message: format!("unknown header `@{key}`"),
                        })
                    }
                }
                continue;
            }
            if !have_n {
                return Err(ParseError::MissingN);
            }
            let tokens = content
                .split_whitespace()
                .map(|t| parse_token(t, line))
                .collect::<Result<Vec<_>, _>>()?;
            if tokens.len() != file.n {
                return Err(ParseError::Syntax {
                    line,
                    message: format!("expected {} entries, found {}", file.n, tokens.len()),
                });
            }
            for (col, tok) in tokens.iter().enumerate() {
                if let Token::Var { name, .. } = tok {
                    match owner.get(name) {
                        Some(&first) if first != col => {
                            return Err(ParseError::CrossColumn {
                                line,
                                name: name.clone(),
                                first: first + 1,
                                second: col + 1,
                            })
                        }
                        Some(_) => {}
                        None => {
                            owner.insert(name.clone(), col);
                        }
                    }
                }
            }
            file.rows.push(tokens);
        }
        if !have_n {
            return Err(ParseError::MissingN);
        }
        Ok(file)
    }

    /// The signature declared in the header, if both parts are present.
    pub fn expected_signature(&self) -> Option<Signature> {
        let sig = Signature::from_partitions(self.partitions.clone()?);
        match self.nu {
            Some(nu) if nu != sig.nu => Some(Signature { nu, ..sig }),
            _ => Some(sig),
        }
    }

    /// Expands stars and normalized columns without checking the row count
    /// or the axioms.
    pub fn expand(&self) -> Result<PatternMatrix, ParseError> {
        #[derive(Clone, Copy)]
        enum Cell {
            Named(usize, bool),
            Fresh(usize, bool),
            Norm(bool),
        }
        let n = self.n;
        // per-column identifier tables
        let mut named: Vec<Vec<String>> = vec![Vec::new(); n];
        let mut rows: Vec<Vec<Cell>> = Vec::new();
        let mut fresh_count = vec![0usize; n];
        let mut used: HashSet<String> = HashSet::new();
        for row in &self.rows {
            for tok in row {
                if let Token::Var { name, .. } = tok {
                    used.insert(name.clone());
                }
            }
        }
        for tokens in &self.rows {
            let mut cells: Vec<Option<Cell>> = Vec::with_capacity(n);
            for (col, tok) in tokens.iter().enumerate() {
                cells.push(match tok {
                    Token::Zero => Some(Cell::Norm(false)),
                    Token::One => Some(Cell::Norm(true)),
                    Token::Star => None,
                    Token::Var { name, perp } => {
                        let id = match named[col].iter().position(|x| x == name) {
                            Some(id) => id,
                            None => {
                                named[col].push(name.clone());
                                named[col].len() - 1
                            }
                        };
                        Some(Cell::Named(id, *perp))
                    }
                });
            }
            // expand stars left to right, depth first
            let mut pending = vec![cells];
            let mut done = Vec::new();
            while let Some(cells) = pending.pop() {
                match cells.iter().position(Option::is_none) {
                    None => done.push(cells.into_iter().map(Option::unwrap).collect::<Vec<Cell>>()),
                    Some(col) => {
                        let id = fresh_count[col];
                        fresh_count[col] += 1;
                        let mut plain = cells.clone();
                        plain[col] = Some(Cell::Fresh(id, false));
                        let mut perp = cells;
                        perp[col] = Some(Cell::Fresh(id, true));
                        // popped in reverse, so push perp first
                        pending.push(perp);
                        pending.push(plain);
                    }
                }
            }
            rows.extend(done);
        }
        let mut fresh_name = |col: usize| -> String {
            let mut i = 0;
            loop {
                let candidate = default_class_name(col, i);
                if used.insert(candidate.clone()) {
                    return candidate;
                }
                i += 1;
            }
        };
        // class id layout per column: named, then fresh (star) classes, then the normalized class
        let mut names: Vec<Vec<String>> = Vec::with_capacity(n);
        for col in 0..n {
            let mut table = named[col].clone();
            for _ in 0..fresh_count[col] {
                table.push(fresh_name(col));
            }
            if rows.iter().any(|r| matches!(r[col], Cell::Norm(_))) {
                table.push(fresh_name(col));
            }
            names.push(table);
        }
        let entries = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(col, cell)| match *cell {
                        Cell::Named(id, p) => Entry::new(id, p),
                        Cell::Fresh(id, p) => Entry::new(named[col].len() + id, p),
                        Cell::Norm(p) => Entry::new(named[col].len() + fresh_count[col], p),
                    })
                    .collect()
            })
            .collect();
        Ok(PatternMatrix::with_names(n, entries, names)?)
    }

    /// Expands and checks the row count and the axioms (fragments skip both).
    pub fn to_matrix(&self) -> Result<PatternMatrix, ParseError> {
        let m = self.expand()?;
        if self.fragment {
            return Ok(m);
        }
        let expected = 1usize << self.n;
        if m.num_rows() != expected {
            return Err(ParseError::RowCount {
                expected,
                found: m.num_rows(),
            });
        }
        let report = m.validate();
        if !report.is_ok() {
            return Err(ParseError::Invalid(report));
        }
        Ok(m)
    }
}

/// Parses, expands and validates a full `.opb` document.
pub fn parse(text: &str) -> Result<PatternMatrix, ParseError> {
    OpbFile::parse(text)?.to_matrix()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// One line per row, every class named.
    Full,
    /// Stars for paired multiplicity-one classes and `0`/`1` for the largest
    /// class of each column.
    Compact,
}

fn display_names(m: &PatternMatrix) -> Vec<Vec<String>> {
    let mut seen = HashSet::new();
    let ok = m
        .names()
        .iter()
        .flatten()
        .all(|name| is_identifier(name) && seen.insert(name.clone()));
    if ok {
        m.names().to_vec()
    } else {
        m.with_default_names().names().to_vec()
    }
}

/// Renders a matrix as an `.opb` document.
pub fn serialize(m: &PatternMatrix, style: Style, name: Option<&str>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@n {}", m.n());
    if let Some(name) = name {
        let _ = writeln!(out, "@name {name}");
    }
    if m.is_valid() {
        let parts: Vec<String> = (0..m.n()).map(|c| format_partition(&m.column_partition(c))).collect();
        let _ = writeln!(out, "@partitions {}", parts.join(" | "));
        let _ = writeln!(out, "@nu {}", m.nu());
    }
    let names = display_names(m);
    let cell = |col: usize, e: Entry| format!("{}{}", names[col][e.class()], if e.is_perp() { "'" } else { "" });
    match style {
        Style::Full => {
            for r in m.rows() {
                let cells: Vec<String> = r.iter().enumerate().map(|(c, &e)| cell(c, e)).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
        }
        Style::Compact => {
            let rows = m.num_rows();
            let mut starred: Vec<Option<usize>> = vec![None; rows];
            let mut deleted = vec![false; rows];
            for col in 0..m.n() {
                for class in 0..m.class_count(col) {
                    if m.multiplicity_unchecked(col, class) != (1, 1) {
                        continue;
                    }
                    let plain = (0..rows)
                        .find(|&r| m.entry(r, col) == Entry::new(class, false))
                        .unwrap();
                    let perp = (0..rows).find(|&r| m.entry(r, col) == Entry::new(class, true)).unwrap();
                    let busy = |r: usize| starred[r].is_some() || deleted[r];
                    if busy(plain) || busy(perp) {
                        continue;
                    }
                    let compatible = (0..m.n()).all(|k| k == col || m.entry(plain, k) == m.entry(perp, k));
                    if compatible {
                        starred[plain] = Some(col);
                        deleted[perp] = true;
                    }
                }
            }
            // normalized class per column: the largest class still printed by name
            let mut normalized: Vec<Option<usize>> = vec![None; m.n()];
            for (col, slot) in normalized.iter_mut().enumerate() {
                let mut counts = vec![0usize; m.class_count(col)];
                for r in (0..rows).filter(|&r| !deleted[r] && starred[r] != Some(col)) {
                    counts[m.entry(r, col).class()] += 1;
                }
                let best = (0..counts.len()).max_by_key(|&k| (counts[k], std::cmp::Reverse(k)));
                if let Some(k) = best {
                    if m.multiplicity_unchecked(col, k).0 > 1 {
                        *slot = Some(k);
                    }
                }
            }
            for r in (0..rows).filter(|&r| !deleted[r]) {
                let cells: Vec<String> = (0..m.n())
                    .map(|c| {
                        let e = m.entry(r, c);
                        if starred[r] == Some(c) {
                            "*".to_string()
                        } else if normalized[c] == Some(e.class()) {
                            if e.is_perp() { "1" } else { "0" }.to_string()
                        } else {
                            cell(c, e)
                        }
                    })
                    .collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens() {
        assert_eq!(
            parse_token("b'", 1).unwrap(),
            Token::Var {
                name: "b".into(),
                perp: true
            }
        );
        assert_eq!(
            parse_token("x12", 1).unwrap(),
            Token::Var {
                name: "x12".into(),
                perp: false
            }
        );
        assert!(parse_token("B", 1).is_err());
        assert!(parse_token("1'", 1).is_err());
        assert!(parse_token("a''", 1).is_err());
    }

    #[test]
    fn partitions_with_exponents() {
        assert_eq!(
            parse_partitions("8 | 4^2 | 2,1^2"),
            Some(vec![vec![8], vec![4, 4], vec![2, 1, 1]])
        );
        assert_eq!(parse_partitions("3,x"), None);
    }

    #[test]
    fn cross_column_identifier_rejected() {
        let err = OpbFile::parse("@n 2\na a\na' a'\n").unwrap_err();
        assert!(matches!(err, ParseError::CrossColumn { .. }));
    }

    #[test]
    fn missing_header() {
        assert_eq!(OpbFile::parse("0 0\n").unwrap_err(), ParseError::MissingN);
        assert_eq!(OpbFile::parse("# nothing\n").unwrap_err(), ParseError::MissingN);
    }

    #[test]
    fn wrong_row_width() {
        assert!(matches!(
            OpbFile::parse("@n 2\n0 0 0\n").unwrap_err(),
            ParseError::Syntax { line: 2, .. }
        ));
    }

    #[test]
    fn row_count_mismatch() {
        let err = parse("@n 2\n0 *\n").unwrap_err();
        assert_eq!(err, ParseError::RowCount { expected: 4, found: 2 });
    }

    #[test]
    fn orthogonality_failure_is_reported() {
        let err = parse("@n 2\na b\na b\na' c\na' c'\n").unwrap_err();
        assert!(matches!(err, ParseError::Invalid(_)));
    }

    #[test]
    fn double_star_row_expands_depth_first() {
        let m = OpbFile::parse("@n 2\n@fragment\n* *\n").unwrap().expand().unwrap();
        assert_eq!(m.num_rows(), 4);
        // first column: one fresh class; second column: two fresh classes
        assert_eq!(m.class_count(0), 1);
        assert_eq!(m.class_count(1), 2);
        assert!(m.validate().violations.is_empty());
    }

    #[test]
    fn generated_names_avoid_user_identifiers() {
        let m = parse("@n 2\na0 *\na0' *\n").unwrap();
        let all: Vec<&String> = m.names().iter().flatten().collect();
        let unique: HashSet<&String> = all.iter().copied().collect();
        assert_eq!(all.len(), unique.len());
    }

    #[test]
    fn compact_standard_is_all_digits() {
        let s = PatternMatrix::standard(2).unwrap();
        let text = serialize(&s, Style::Compact, None);
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('@')).collect();
        assert_eq!(body, vec!["0 0", "1 0", "0 1", "1 1"]);
    }
}
