use crate::pattern::{default_class_name, Entry, PatternError, PatternMatrix};

/// Merge of class `merged` into class `kept` within `column`; with `perp` set
/// the merged class is identified with the perpendicular of `kept`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Identification {
    pub column: usize,
    pub kept: usize,
    pub merged: usize,
    pub perp: bool,
}

/// Rows of `class` in `column` that move to a fresh class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub column: usize,
    pub class: usize,
    pub moved_rows: Vec<usize>,
}

/// Every single identification of two classes of one column.
pub fn identifications(m: &PatternMatrix) -> Result<Vec<(PatternMatrix, Identification)>, PatternError> {
    m.require_valid()?;
    Ok(identifications_unchecked(m))
}

pub(crate) fn identifications_unchecked(m: &PatternMatrix) -> Vec<(PatternMatrix, Identification)> {
    let mut out = Vec::new();
    for column in 0..m.n() {
        let k = m.class_count(column);
        for kept in 0..k {
            for merged in kept + 1..k {
                for perp in [false, true] {
                    let rows = m
                        .rows()
                        .map(|r| {
                            let mut r = r.to_vec();
                            if r[column].class() == merged {
                                r[column] = Entry::new(kept, r[column].is_perp() ^ perp);
                            }
                            r
                        })
                        .collect();
                    let child =
                        PatternMatrix::with_names(m.n(), rows, m.names().to_vec()).expect("identification keeps shape");
                    out.push((
                        child,
                        Identification {
                            column,
                            kept,
                            merged,
                            perp,
                        },
                    ));
                }
            }
        }
    }
    out
}

/// Connected components of the witness-dependency graph of a class: rows
/// holding the class, linked when the column is their only orthogonality
/// witness. Components are listed by smallest row.
pub fn split_components(m: &PatternMatrix, column: usize, class: usize) -> Vec<Vec<usize>> {
    let rows: Vec<usize> = (0..m.num_rows())
        .filter(|&r| m.entry(r, column).class() == class)
        .collect();
    let mut parent: Vec<usize> = (0..rows.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let sole = 1u32 << column;
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            if m.witness_mask(rows[a], rows[b]) == sole {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; rows.len()];
    for (i, &row) in rows.iter().enumerate() {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(c) => comps[c].push(row),
            None => {
                root_of[r] = Some(comps.len());
                comps.push(vec![row]);
            }
        }
    }
    comps
}

fn fresh_name(m: &PatternMatrix, column: usize) -> String {
    let used = &m.names()[column];
    (m.class_count(column)..)
        .map(|k| default_class_name(column, k))
        .find(|name| !used.contains(name))
        .expect("unbounded name supply")
}

/// Every matrix from which `m` arises by one identification, one per
/// bipartition of the components of each witness-dependency graph.
pub fn splits(m: &PatternMatrix) -> Result<Vec<(PatternMatrix, Split)>, PatternError> {
    m.require_valid()?;
    Ok(splits_unchecked(m))
}

pub(crate) fn splits_unchecked(m: &PatternMatrix) -> Vec<(PatternMatrix, Split)> {
    let mut out = Vec::new();
    for column in 0..m.n() {
        let fresh = m.class_count(column);
        let mut names = m.names().to_vec();
        names[column].push(fresh_name(m, column));
        for class in 0..fresh {
            let comps = split_components(m, column, class);
            let c = comps.len();
            if c < 2 {
                continue;
            }
            // the last component always stays, so each bipartition appears once
            for mask in 1u64..1 << (c - 1) {
                let moved_rows: Vec<usize> = {
                    let mut v: Vec<usize> = (0..c - 1)
                        .filter(|i| mask >> i & 1 == 1)
                        .flat_map(|i| comps[i].iter().copied())
                        .collect();
                    v.sort_unstable();
                    v
                };
                let mut rows = m.to_rows();
                for &r in &moved_rows {
                    rows[r][column] = Entry::new(fresh, rows[r][column].is_perp());
                }
                let parent = PatternMatrix::with_names(m.n(), rows, names.clone()).expect("split keeps shape");
                debug_assert!(parent.is_valid());
                out.push((
                    parent,
                    Split {
                        column,
                        class,
                        moved_rows,
                    },
                ));
            }
        }
    }
    out
}

/// True when no split exists, i.e. every witness-dependency graph is connected.
pub fn is_maximal(m: &PatternMatrix) -> Result<bool, PatternError> {
    m.require_valid()?;
    Ok(is_maximal_unchecked(m))
}

pub(crate) fn is_maximal_unchecked(m: &PatternMatrix) -> bool {
    (0..m.n()).all(|c| (0..m.class_count(c)).all(|k| split_components(m, c, k).len() == 1))
}
