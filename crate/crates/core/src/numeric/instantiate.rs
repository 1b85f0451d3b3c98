use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{inner, NumericError, NumericOPB, C64};
use crate::pattern::{Entry, PatternMatrix};

/// For distinct classes `u`, `v` of one column, both `|⟨u|v⟩|` and
/// `|⟨u|v⊥⟩|` must lie inside `[GENERIC_MARGIN, 1 − GENERIC_MARGIN]`. This
/// keeps instantiations strictly inside the generic band used when reading
/// matrices back with the default tolerance `1e-6`.
pub const GENERIC_MARGIN: f64 = 2e-3;

const MAX_DRAWS: usize = 1000;

/// One qubit unit vector per class of each column; perpendiculars are
/// derived with [`perpendicular`].
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub vectors: Vec<Vec<[C64; 2]>>,
}

/// The fixed representative `(−β̄, ᾱ)` of the line orthogonal to `(α, β)`.
pub fn perpendicular(v: [C64; 2]) -> [C64; 2] {
    [-v[1].conj(), v[0].conj()]
}

/// Uniform point of the Bloch sphere: `(cos θ/2, e^{iφ} sin θ/2)` with
/// `cos θ` and `φ` drawn uniformly.
fn bloch<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = std::f64::consts::TAU * rng.random::<f64>();
    let half = z.clamp(-1.0, 1.0).acos() / 2.0;
    [C64::new(half.cos(), 0.0), C64::from_polar(half.sin(), phi)]
}

impl Assignment {
    /// Local vector of an entry.
    pub fn vector(&self, column: usize, e: Entry) -> [C64; 2] {
        let v = self.vectors[column][e.class()];
        if e.is_perp() {
            perpendicular(v)
        } else {
            v
        }
    }

    /// Whether classes sharing a column have generic relative position.
    pub fn is_generic(&self) -> bool {
        self.vectors.iter().all(|col| {
            col.iter().enumerate().all(|(i, u)| {
                col[i + 1..].iter().all(|v| {
                    [inner(u, v), inner(u, &perpendicular(*v))]
                        .iter()
                        .all(|o| (GENERIC_MARGIN..=1.0 - GENERIC_MARGIN).contains(&o.norm()))
                })
            })
        })
    }

    /// The basis obtained by substituting this assignment into `m`.
    pub fn apply(&self, m: &PatternMatrix) -> Result<NumericOPB, NumericError> {
        if self.vectors.len() != m.n() || (0..m.n()).any(|c| self.vectors[c].len() != m.class_count(c)) {
            return Err(NumericError::Shape(
                "assignment does not match the matrix classes".into(),
            ));
        }
        let vectors = m
            .rows()
            .map(|r| r.iter().enumerate().map(|(c, &e)| self.vector(c, e).to_vec()).collect())
            .collect();
        NumericOPB::new(vec![2; m.n()], vectors, 1e-9)
    }
}

/// A generic member of the family of `m`, reproducible from `seed`. The
/// generator is ChaCha8 seeded with `seed`; rejected draws advance the same
/// stream.
pub fn instantiate(m: &PatternMatrix, seed: u64) -> Result<(NumericOPB, Assignment), NumericError> {
    m.require_valid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let asg = Assignment {
            vectors: (0..m.n())
                .map(|c| (0..m.class_count(c)).map(|_| bloch(&mut rng)).collect())
                .collect(),
        };
        if asg.is_generic() {
            let mut b = asg.apply(m)?;
            b.metadata.seed = Some(seed);
            return Ok((b, asg));
        }
    }
    Err(NumericError::GenericityUnreachable(MAX_DRAWS))
}

/// Reads the pattern matrix off a qubit basis. Per party, vectors with
/// overlap at least `1 − tol` share a class, overlap at most `tol` makes
/// them perpendicular, and overlaps in `[√tol, 1 − √tol]` are generic;
/// anything between the bands is reported as ambiguous.
pub fn associate_matrix(b: &NumericOPB, tol: f64) -> Result<PatternMatrix, NumericError> {
    if !b.all_qubits() {
        return Err(NumericError::NotQubits);
    }
    let wide = tol.sqrt();
    let n = b.parties();
    let mut rows = vec![Vec::with_capacity(n); b.len()];
    for c in 0..n {
        // (first row holding the class, class id)
        let mut reps: Vec<usize> = Vec::new();
        for (s, row) in rows.iter_mut().enumerate() {
            let mut found = None;
            for (k, &r) in reps.iter().enumerate() {
                let o = inner(b.local(r, c), b.local(s, c)).norm();
                let e = if o >= 1.0 - tol {
                    Entry::new(k, false)
                } else if o <= tol {
                    Entry::new(k, true)
                } else if (wide..=1.0 - wide).contains(&o) {
                    continue;
                } else {
                    return Err(NumericError::Ambiguous {
                        column: c,
                        rows: (r, s),
                        overlap: o,
                    });
                };
                found = Some(e);
                break;
            }
            let e = found.unwrap_or_else(|| {
                reps.push(s);
                Entry::new(reps.len() - 1, false)
            });
            row.push(e);
        }
    }
    let m = PatternMatrix::new(n, rows)?;
    let report = m.validate();
    if !report.is_ok() {
        return Err(NumericError::Associated(report));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::are_equivalent;
    use crate::io::dataset;
    use crate::numeric::{computational_basis, gram_defect};

    #[test]
    fn nearly_orthogonal_classes_are_not_generic() {
        // |⟨u|v⟩| = 0.02 is safely away from 0, but |⟨u|v⊥⟩| ≈ 0.9998 is
        // not away from 1
        let u = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let v = [C64::new(0.02, 0.0), C64::new((1.0f64 - 0.0004).sqrt(), 0.0)];
        let tilted = Assignment {
            vectors: vec![vec![u, v]],
        };
        assert!(!tilted.is_generic());
        let w = [C64::new(0.6, 0.0), C64::new(0.8, 0.0)];
        assert!(Assignment {
            vectors: vec![vec![u, w]]
        }
        .is_generic());
    }

    #[test]
    fn perpendicular_is_orthogonal_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let v = bloch(&mut rng);
            let p = perpendicular(v);
            assert!(inner(&v, &p).norm() < 1e-15);
            assert!((inner(&p, &p).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let m = dataset::matrix("n3-maximal", "irreducible");
        assert_eq!(instantiate(&m, 5).unwrap(), instantiate(&m, 5).unwrap());
        assert_ne!(instantiate(&m, 5).unwrap().1, instantiate(&m, 6).unwrap().1);
    }

    #[test]
    fn standard_two_qubit_gram_identity() {
        let s = PatternMatrix::standard(2).unwrap();
        for seed in 0..5 {
            let (b, _) = instantiate(&s, seed).unwrap();
            assert_eq!(b.len(), 4);
            assert!(gram_defect(&b) < 1e-12);
        }
    }

    #[test]
    fn associate_recovers_matrix() {
        let c = computational_basis(&[2, 2]);
        let s = PatternMatrix::standard(2).unwrap();
        assert!(are_equivalent(&associate_matrix(&c, 1e-6).unwrap(), &s).unwrap());
        for m in dataset::matrices("n3-classes") {
            let (b, _) = instantiate(&m, 0).unwrap();
            assert!(are_equivalent(&associate_matrix(&b, 1e-6).unwrap(), &m).unwrap());
        }
    }

    #[test]
    fn ambiguity_is_reported() {
        let v = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let tilted = [C64::new((1e-2f64).cos(), 0.0), C64::new((1e-2f64).sin(), 0.0)];
        let b = NumericOPB::from_raw(vec![2], vec![vec![v.to_vec()], vec![tilted.to_vec()]], 1.0).unwrap();
        assert!(matches!(
            associate_matrix(&b, 1e-6),
            Err(NumericError::Ambiguous { .. })
        ));
    }
}
