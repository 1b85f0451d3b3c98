use std::collections::{BTreeSet, HashMap, VecDeque};

use super::order::is_maximal_unchecked;
use super::LatticeError;
use crate::canonical::{canonical_key_unchecked, permutations, CanonicalKey};
use crate::pattern::{default_class_name, Entry, PatternError, PatternMatrix};

/// Rows `rows` that agree outside the columns `cols` and whose restriction
/// to `cols` is a member of O(|cols|).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchSite {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub block: PatternMatrix,
}

impl SwitchSite {
    /// Whether no class of the block occurs in the host outside the block.
    pub fn is_isolated(&self, m: &PatternMatrix) -> bool {
        self.cols.iter().all(|&c| {
            let inside: BTreeSet<usize> = self.rows.iter().map(|&r| m.entry(r, c).class()).collect();
            (0..m.num_rows())
                .filter(|r| !self.rows.contains(r))
                .all(|r| !inside.contains(&m.entry(r, c).class()))
        })
    }
}

/// Where each class of a switched matrix came from: `origin[c][k]` is the
/// (column, class) of the host whose entries now form class `k` of column `c`,
/// polarities unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchTrace {
    pub origin: Vec<Vec<(usize, usize)>>,
}

/// All switching sites. On maximal matrices every block is isolated, which is
/// asserted; on other matrices sites are reported as found.
pub fn switching_sites(m: &PatternMatrix) -> Result<Vec<SwitchSite>, PatternError> {
    m.require_valid()?;
    let n = m.n();
    let maximal = is_maximal_unchecked(m);
    let mut sites = Vec::new();
    for mask in 1u32..1 << n {
        let k = mask.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|c| mask >> c & 1 == 1).collect();
        let mut groups: HashMap<Vec<Entry>, Vec<usize>> = HashMap::new();
        for r in 0..m.num_rows() {
            let outside: Vec<Entry> = (0..n).filter(|c| mask >> c & 1 == 0).map(|c| m.entry(r, c)).collect();
            groups.entry(outside).or_default().push(r);
        }
        let mut found: Vec<Vec<usize>> = groups.into_values().filter(|g| g.len() == 1 << k).collect();
        found.sort();
        for rows in found {
            let block_rows = rows
                .iter()
                .map(|&r| cols.iter().map(|&c| m.entry(r, c)).collect())
                .collect();
            let block = PatternMatrix::new(k, block_rows).expect("block shape");
            debug_assert!(block.is_valid());
            let site = SwitchSite {
                rows,
                cols: cols.clone(),
                block,
            };
            assert!(
                !maximal || site.is_isolated(m),
                "block of a maximal matrix shares a class"
            );
            sites.push(site);
        }
    }
    Ok(sites)
}

fn check_site(m: &PatternMatrix, site: &SwitchSite, perm: &[usize]) -> Result<(), LatticeError> {
    let n = m.n();
    let k = site.cols.len();
    if k < 2 || site.cols.windows(2).any(|w| w[0] >= w[1]) || site.cols.iter().any(|&c| c >= n) {
        return Err(LatticeError::InvalidSite(
            "columns must be 2 or more distinct ascending indices".into(),
        ));
    }
    if site.rows.len() != 1 << k
        || site.rows.windows(2).any(|w| w[0] >= w[1])
        || site.rows.iter().any(|&r| r >= m.num_rows())
    {
        return Err(LatticeError::InvalidSite(format!(
            "rows must be {} distinct ascending indices",
            1 << k
        )));
    }
    for c in (0..n).filter(|c| !site.cols.contains(c)) {
        let first = m.entry(site.rows[0], c);
        if site.rows.iter().any(|&r| m.entry(r, c) != first) {
            return Err(LatticeError::InvalidSite(format!("rows differ in column {}", c + 1)));
        }
    }
    let mut seen = vec![false; k];
    if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
        return Err(LatticeError::InvalidPermutation {
            perm: perm.to_vec(),
            len: k,
        });
    }
    Ok(())
}

/// Permutes the columns of a site's block: block column `t` of the result is
/// block column `perm[t]` of `m`. Moved entries become fresh classes of their
/// new column, which on maximal matrices is exactly moving the variables.
pub fn apply_switch(m: &PatternMatrix, site: &SwitchSite, perm: &[usize]) -> Result<PatternMatrix, LatticeError> {
    apply_switch_traced(m, site, perm).map(|(r, _)| r)
}

/// [`apply_switch`] together with the provenance of every class.
pub fn apply_switch_traced(
    m: &PatternMatrix,
    site: &SwitchSite,
    perm: &[usize],
) -> Result<(PatternMatrix, SwitchTrace), LatticeError> {
    m.require_valid()?;
    check_site(m, site, perm)?;
    let n = m.n();
    let identity = perm.iter().enumerate().all(|(t, &p)| t == p);
    let mut rows = m.to_rows();
    let mut names = m.names().to_vec();
    // per target column: block source class -> fresh id
    let mut fresh: Vec<HashMap<usize, usize>> = vec![HashMap::new(); n];
    if !identity {
        for &r in &site.rows {
            for (t, &target) in site.cols.iter().enumerate() {
                let source = site.cols[perm[t]];
                let e = m.entry(r, source);
                let next = names[target].len();
                let id = *fresh[target].entry(e.class()).or_insert_with(|| {
                    let used = &names[target];
                    let name = (next..)
                        .map(|k| default_class_name(target, k))
                        .find(|s| !used.contains(s))
                        .expect("unbounded name supply");
                    names[target].push(name);
                    next
                });
                rows[r][target] = Entry::new(id, e.is_perp());
            }
        }
    }
    let result = PatternMatrix::with_names(n, rows, names).expect("switch keeps shape");
    let mut origin: Vec<Vec<Option<(usize, usize)>>> = (0..n).map(|c| vec![None; result.class_count(c)]).collect();
    for r in 0..m.num_rows() {
        for c in 0..n {
            let source = match site.cols.iter().position(|&x| x == c) {
                Some(t) if !identity && site.rows.contains(&r) => site.cols[perm[t]],
                _ => c,
            };
            origin[c][result.entry(r, c).class()] = Some((source, m.entry(r, source).class()));
        }
    }
    if !result.is_valid() {
        return Err(LatticeError::InvalidSite(
            "switched matrix is not a member of O(n)".into(),
        ));
    }
    let origin = origin
        .into_iter()
        .map(|col| col.into_iter().map(|o| o.expect("every class occurs")).collect())
        .collect();
    Ok((result, SwitchTrace { origin }))
}

/// Canonical keys of the switching class of a maximal matrix.
pub fn switching_orbit(m: &PatternMatrix) -> Result<BTreeSet<CanonicalKey>, LatticeError> {
    m.require_valid()?;
    if !is_maximal_unchecked(m) {
        return Err(LatticeError::NotMaximal);
    }
    let mut seen = BTreeSet::new();
    seen.insert(canonical_key_unchecked(m));
    let mut queue = VecDeque::from([m.clone()]);
    while let Some(current) = queue.pop_front() {
        for site in switching_sites(&current)? {
            for perm in permutations(site.cols.len()).into_iter().skip(1) {
                let next = apply_switch(&current, &site, &perm)?;
                if seen.insert(canonical_key_unchecked(&next)) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(seen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::are_equivalent;
    use crate::io::dataset;

    #[test]
    fn reducible_three_qubit_pair() {
        let a = dataset::matrix("n3-maximal", "reducible-a");
        let b = dataset::matrix("n3-maximal", "reducible-b");
        let sites = switching_sites(&a).unwrap();
        let site = sites
            .iter()
            .find(|s| s.cols == [1, 2] && s.rows == [4, 5, 6, 7])
            .expect("lower right block");
        let switched = apply_switch(&a, site, &[1, 0]).unwrap();
        assert!(are_equivalent(&switched, &b).unwrap());
        assert_eq!(apply_switch(&a, site, &[0, 1]).unwrap(), a);
        assert_eq!(switching_orbit(&a).unwrap().len(), 2);
        assert_eq!(switching_orbit(&b).unwrap(), switching_orbit(&a).unwrap());
    }

    #[test]
    fn block_example() {
        let x = dataset::matrix("examples", "block-x");
        let y = dataset::matrix("examples", "block-y");
        let site = switching_sites(&x).unwrap().into_iter().next().unwrap();
        assert_eq!(site.rows, vec![0, 1, 2, 3]);
        let switched = apply_switch(&x, &site, &[1, 0]).unwrap();
        assert_eq!(switched.sorted_rows(), y.sorted_rows());
    }

    #[test]
    fn trace_points_back() {
        let a = dataset::matrix("n3-maximal", "reducible-a");
        let site = switching_sites(&a)
            .unwrap()
            .into_iter()
            .find(|s| s.cols == [1, 2])
            .unwrap();
        let (switched, trace) = apply_switch_traced(&a, &site, &[1, 0]).unwrap();
        for r in 0..8 {
            for c in 0..3 {
                let e = switched.entry(r, c);
                let (sc, sk) = trace.origin[c][e.class()];
                let source_col = if site.rows.contains(&r) && site.cols.contains(&c) {
                    3 - c
                } else {
                    c
                };
                assert_eq!(sc, source_col);
                assert_eq!(a.entry(r, sc).class(), sk);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let a = dataset::matrix("n3-maximal", "reducible-a");
        let site = switching_sites(&a)
            .unwrap()
            .into_iter()
            .find(|s| s.rows == [4, 5, 6, 7])
            .unwrap();
        assert!(matches!(
            apply_switch(&a, &site, &[0, 0]),
            Err(LatticeError::InvalidPermutation { .. })
        ));
        let mut broken = site.clone();
        broken.rows = vec![0, 1, 2, 4];
        assert!(matches!(
            apply_switch(&a, &broken, &[1, 0]),
            Err(LatticeError::InvalidSite(_))
        ));
        let s = PatternMatrix::standard(3).unwrap();
        assert_eq!(switching_orbit(&s), Err(LatticeError::NotMaximal));
    }
}
