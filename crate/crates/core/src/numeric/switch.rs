use super::{inner, Assignment, NumericError, C64};
use crate::lattice::{apply_switch_traced, SwitchSite};
use crate::pattern::PatternMatrix;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> DenseMatrix {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        DenseMatrix { dim, data }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let dim = self.dim * other.dim;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        data[(i * other.dim + k) * dim + j * other.dim + l] = a * other.get(k, l);
                    }
                }
            }
        }
        DenseMatrix { dim, data }
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        let d = self.dim;
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * other.get(k, j);
                }
            }
        }
        DenseMatrix { dim: d, data }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let d = self.dim;
        let data = (0..d * d).map(|x| self.get(x % d, x / d).conj()).collect();
        DenseMatrix { dim: d, data }
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = DenseMatrix::identity(self.dim);
        p.data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A_ij − B_ij|`.
    pub fn distance(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn outer(v: [C64; 2]) -> DenseMatrix {
    DenseMatrix {
        dim: 2,
        data: vec![
            v[0] * v[0].conj(),
            v[0] * v[1].conj(),
            v[1] * v[0].conj(),
            v[1] * v[1].conj(),
        ],
    }
}

/// `U = Π·S + (I − Π)`: `Π` projects the parties outside the block onto the
/// lines shared by the site's rows, and `S` permutes the block's qubits so
/// that qubit `cols[t]` receives the state of qubit `cols[perm[t]]`.
pub fn build_switch_unitary(
    m: &PatternMatrix,
    site: &SwitchSite,
    perm: &[usize],
    asg: &Assignment,
) -> Result<DenseMatrix, NumericError> {
    // validates the site and permutation
    apply_switch_traced(m, site, perm)?;
    let n = m.n();
    let dim = 1usize << n;
    let anchor = site.rows[0];
    let projector = (0..n).fold(DenseMatrix::identity(1), |acc, c| {
        let factor = if site.cols.contains(&c) {
            DenseMatrix::identity(2)
        } else {
            outer(asg.vector(c, m.entry(anchor, c)))
        };
        acc.kron(&factor)
    });
    let bit = |x: usize, party: usize| x >> (n - 1 - party) & 1;
    let mut swap = DenseMatrix {
        dim,
        data: vec![C64::new(0.0, 0.0); dim * dim],
    };
    for x in 0..dim {
        let mut y = x;
        for (t, &c) in site.cols.iter().enumerate() {
            let shift = n - 1 - c;
            y = (y & !(1 << shift)) | bit(x, site.cols[perm[t]]) << shift;
        }
        swap.data[y * dim + x] = C64::new(1.0, 0.0);
    }
    let ps = projector.mul(&swap);
    let data = (0..dim * dim)
        .map(|i| {
            let id = if i % (dim + 1) == 0 { 1.0 } else { 0.0 };
            ps.data[i] + C64::new(id, 0.0) - projector.data[i]
        })
        .collect();
    Ok(DenseMatrix { dim, data })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchCheck {
    pub unitarity_defect: f64,
    /// Smallest `|⟨β|Uα⟩|` over the matched pairs.
    pub min_overlap: f64,
    /// Whether `U` maps the basis of `m` onto the basis of the switched
    /// matrix (moved classes keep their vectors), vector by vector.
    pub matched: bool,
}

/// Builds the unitary and checks it against the switched instantiation.
pub fn check_switch_unitary(
    m: &PatternMatrix,
    site: &SwitchSite,
    perm: &[usize],
    asg: &Assignment,
) -> Result<SwitchCheck, NumericError> {
    let u = build_switch_unitary(m, site, perm, asg)?;
    let (switched, trace) = apply_switch_traced(m, site, perm)?;
    let moved = Assignment {
        vectors: trace
            .origin
            .iter()
            .map(|col| col.iter().map(|&(c, k)| asg.vectors[c][k]).collect())
            .collect(),
    };
    let before = asg.apply(m)?;
    let after = moved.apply(&switched)?;
    let targets: Vec<Vec<C64>> = (0..after.len()).map(|t| after.state(t)).collect();
    let mut used = vec![false; targets.len()];
    let mut min_overlap: f64 = 1.0;
    let mut matched = true;
    for s in 0..before.len() {
        let image = u.apply(&before.state(s));
        let best = (0..targets.len())
            .filter(|&t| !used[t])
            .map(|t| (t, inner(&targets[t], &image).norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((t, o)) => {
                used[t] = true;
                min_overlap = min_overlap.min(o);
                matched &= o >= 1.0 - 1e-8;
            }
            None => matched = false,
        }
    }
    Ok(SwitchCheck {
        unitarity_defect: u.unitarity_defect(),
        min_overlap,
        matched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::dataset;
    use crate::lattice::switching_sites;
    use crate::numeric::instantiate;

    #[test]
    fn controlled_swap_on_three_qubits() {
        let a = dataset::matrix("n3-maximal", "reducible-a");
        let site = switching_sites(&a)
            .unwrap()
            .into_iter()
            .find(|s| s.cols == [1, 2] && s.rows == [4, 5, 6, 7])
            .unwrap();
        let (_, asg) = instantiate(&a, 0).unwrap();
        let u = build_switch_unitary(&a, &site, &[1, 0], &asg).unwrap();
        // |a⟩⟨a| ⊗ I4 + |a⊥⟩⟨a⊥| ⊗ SWAP
        let va = asg.vector(0, a.entry(0, 0));
        let vp = asg.vector(0, a.entry(4, 0));
        let mut swap = DenseMatrix::identity(4);
        swap.data = vec![C64::new(0.0, 0.0); 16];
        for (x, y) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap.data[y * 4 + x] = C64::new(1.0, 0.0);
        }
        let expected_plain = outer(va).kron(&DenseMatrix::identity(4));
        let expected_perp = outer(vp).kron(&swap);
        let expected = DenseMatrix {
            dim: 8,
            data: expected_plain
                .data
                .iter()
                .zip(&expected_perp.data)
                .map(|(x, y)| x + y)
                .collect(),
        };
        assert!(u.distance(&expected) < 1e-12);
        let check = check_switch_unitary(&a, &site, &[1, 0], &asg).unwrap();
        assert!(check.matched && check.unitarity_defect < 1e-10);
        let id = build_switch_unitary(&a, &site, &[0, 1], &asg).unwrap();
        assert!(id.distance(&DenseMatrix::identity(8)) < 1e-12);
    }
}
