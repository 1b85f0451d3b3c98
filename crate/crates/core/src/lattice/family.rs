use super::LatticeError;
use crate::pattern::PatternMatrix;

/// Whether `a` lies in the family of `m` with the column order fixed: some
/// row bijection and per-column class map (with polarity flips) carries `m`
/// onto `a`. Any such map is a chain of identifications. With `strict` the
/// class maps must be bijective, so `a` equals `m` up to row order and
/// renaming.
pub fn family_membership(a: &PatternMatrix, m: &PatternMatrix, strict: bool) -> Result<bool, LatticeError> {
    if a.n() != m.n() {
        return Err(crate::pattern::PatternError::QubitMismatch(a.n(), m.n()).into());
    }
    a.require_valid()?;
    m.require_valid()?;
    let n = m.n();
    if (0..n).any(|c| a.class_count(c) > m.class_count(c) || (strict && a.class_count(c) != m.class_count(c))) {
        return Ok(false);
    }
    let mut search = Search {
        a,
        m,
        strict,
        forward: (0..n).map(|c| vec![None; m.class_count(c)]).collect(),
        backward: (0..n).map(|c| vec![None; a.class_count(c)]).collect(),
        used: vec![false; a.num_rows()],
    };
    Ok(search.extend(0))
}

struct Search<'a> {
    a: &'a PatternMatrix,
    m: &'a PatternMatrix,
    strict: bool,
    /// m class -> (a class, flip)
    forward: Vec<Vec<Option<(usize, bool)>>>,
    /// a class -> m class, used for injectivity in strict mode
    backward: Vec<Vec<Option<usize>>>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn extend(&mut self, i: usize) -> bool {
        if i == self.m.num_rows() {
            return true;
        }
        for j in 0..self.a.num_rows() {
            if self.used[j] {
                continue;
            }
            let mut assigned = Vec::new();
            if self.bind(i, j, &mut assigned) {
                self.used[j] = true;
                if self.extend(i + 1) {
                    return true;
                }
                self.used[j] = false;
            }
            for (c, x, y) in assigned {
                self.forward[c][x] = None;
                if let Some(y) = y {
                    self.backward[c][y] = None;
                }
            }
        }
        false
    }

    /// Tries to map row `i` of m onto row `j` of a, recording new bindings.
    fn bind(&mut self, i: usize, j: usize, assigned: &mut Vec<(usize, usize, Option<usize>)>) -> bool {
        for c in 0..self.m.n() {
            let (em, ea) = (self.m.entry(i, c), self.a.entry(j, c));
            let flip = em.is_perp() != ea.is_perp();
            match self.forward[c][em.class()] {
                Some((y, f)) => {
                    if y != ea.class() || f != flip {
                        return false;
                    }
                }
                None => {
                    let taken = self.backward[c][ea.class()].is_some();
                    if self.strict && taken {
                        return false;
                    }
                    self.forward[c][em.class()] = Some((ea.class(), flip));
                    let claimed = (!taken).then(|| {
                        self.backward[c][ea.class()] = Some(em.class());
                        ea.class()
                    });
                    assigned.push((c, em.class(), claimed));
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::dataset;

    #[test]
    fn two_qubit_families() {
        let s = dataset::matrix("n2", "standard");
        let n = dataset::matrix("n2", "maximal");
        for strict in [false, true] {
            assert!(family_membership(&s, &s, strict).unwrap());
            assert!(family_membership(&n, &n, strict).unwrap());
        }
        assert!(family_membership(&s, &n, false).unwrap());
        assert!(!family_membership(&s, &n, true).unwrap());
        assert!(!family_membership(&n, &s, false).unwrap());
    }

    #[test]
    fn column_order_is_fixed() {
        let n = dataset::matrix("n2", "maximal");
        let swapped = n.permute_columns(&[1, 0]);
        assert!(!family_membership(&swapped, &n, false).unwrap());
    }
}
