use serde::{Deserialize, Serialize};

use super::{inner, kron, NumericError, C64, ORTHOGONAL};

/// Provenance carried alongside a basis.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_key: Option<String>,
}

/// `D = Π dims` product vectors, each given by its `n` local factors.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericOPB {
    dims: Vec<usize>,
    vectors: Vec<Vec<Vec<C64>>>,
    tolerance: f64,
    pub metadata: Metadata,
}

impl NumericOPB {
    /// Checks shape, unit norms and orthonormality within `tolerance`.
    pub fn new(dims: Vec<usize>, vectors: Vec<Vec<Vec<C64>>>, tolerance: f64) -> Result<NumericOPB, NumericError> {
        let b = Self::from_raw(dims, vectors, tolerance)?;
        for (s, v) in b.vectors.iter().enumerate() {
            for (i, local) in v.iter().enumerate() {
                let norm = inner(local, local).re.sqrt();
                if (norm - 1.0).abs() > tolerance {
                    return Err(NumericError::NotUnit {
                        vector: s,
                        party: i,
                        norm,
                    });
                }
            }
        }
        let defect = gram_defect(&b);
        if defect > tolerance {
            return Err(NumericError::NotOrthonormal(defect));
        }
        Ok(b)
    }

    /// Checks shape only; for bases that are inspected rather than trusted.
    pub fn from_raw(dims: Vec<usize>, vectors: Vec<Vec<Vec<C64>>>, tolerance: f64) -> Result<NumericOPB, NumericError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(NumericError::Shape("every party needs dimension at least 1".into()));
        }
        if tolerance.is_nan() || tolerance < 0.0 {
            return Err(NumericError::Shape("tolerance must be nonnegative".into()));
        }
        let total: usize = dims.iter().product();
        if vectors.len() != total {
            return Err(NumericError::Shape(format!(
                "{} vectors for total dimension {total}",
                vectors.len()
            )));
        }
        for (s, v) in vectors.iter().enumerate() {
            if v.len() != dims.len() || v.iter().zip(&dims).any(|(x, &d)| x.len() != d) {
                return Err(NumericError::Shape(format!(
                    "vector {} does not match dims {dims:?}",
                    s + 1
                )));
            }
        }
        Ok(NumericOPB {
            dims,
            vectors,
            tolerance,
            metadata: Metadata::default(),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn local(&self, s: usize, party: usize) -> &[C64] {
        &self.vectors[s][party]
    }

    pub fn vectors(&self) -> &[Vec<Vec<C64>>] {
        &self.vectors
    }

    pub fn all_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// Full state vector of basis element `s`.
    pub fn state(&self, s: usize) -> Vec<C64> {
        self.vectors[s]
            .iter()
            .fold(vec![C64::new(1.0, 0.0)], |acc, local| kron(&acc, local))
    }

    /// Product inner product `⟨α_s|α_t⟩`.
    pub fn overlap(&self, s: usize, t: usize) -> C64 {
        self.vectors[s]
            .iter()
            .zip(&self.vectors[t])
            .map(|(u, v)| inner(u, v))
            .product()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(Wire::from(self)).expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<NumericOPB, NumericError> {
        let wire: Wire = serde_json::from_value(value.clone()).map_err(|e| NumericError::Shape(e.to_string()))?;
        let vectors = wire
            .vectors
            .into_iter()
            .map(|v| {
                v.into_iter()
                    .map(|l| l.into_iter().map(|[re, im]| C64::new(re, im)).collect())
                    .collect()
            })
            .collect();
        let mut b = NumericOPB::from_raw(wire.dims, vectors, wire.tolerance)?;
        b.metadata = wire.metadata;
        Ok(b)
    }
}

/// JSON layout: amplitudes as `[re, im]` pairs. Floats are written in their
/// shortest round-trip form, so parsing recovers every bit.
#[derive(Serialize, Deserialize)]
struct Wire {
    dims: Vec<usize>,
    tolerance: f64,
    #[serde(default)]
    metadata: Metadata,
    vectors: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&NumericOPB> for Wire {
    fn from(b: &NumericOPB) -> Wire {
        Wire {
            dims: b.dims.clone(),
            tolerance: b.tolerance,
            metadata: b.metadata.clone(),
            vectors: b
                .vectors
                .iter()
                .map(|v| v.iter().map(|l| l.iter().map(|z| [z.re, z.im]).collect()).collect())
                .collect(),
        }
    }
}

/// `max |⟨α_s|α_t⟩ − δ_st|` over all pairs.
pub fn gram_defect(b: &NumericOPB) -> f64 {
    let mut worst: f64 = 0.0;
    for s in 0..b.len() {
        for t in s..b.len() {
            let g = b.overlap(s, t);
            let target = if s == t { 1.0 } else { 0.0 };
            worst = worst.max((g - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// A party whose local vectors split the basis into two mutually orthogonal
/// nonempty parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub slot: usize,
    pub part_j: Vec<usize>,
    pub part_k: Vec<usize>,
}

/// First party, if any, whose non-orthogonality graph is disconnected.
pub fn is_reducible_numeric(b: &NumericOPB) -> Option<Reduction> {
    let count = b.len();
    for slot in 0..b.parties() {
        let mut reached = vec![false; count];
        let mut stack = vec![0];
        reached[0] = true;
        while let Some(s) = stack.pop() {
            for (t, seen) in reached.iter_mut().enumerate() {
                if !*seen && inner(b.local(s, slot), b.local(t, slot)).norm() > ORTHOGONAL {
                    *seen = true;
                    stack.push(t);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            let (part_j, part_k) = (0..count).partition(|&s| reached[s]);
            return Some(Reduction { slot, part_j, part_k });
        }
    }
    None
}

/// Party-wise tensor product `{α_s ⊗ β_t}` of two bases with equally many
/// parties.
pub fn tensor_opb(a: &NumericOPB, b: &NumericOPB) -> Result<NumericOPB, NumericError> {
    if a.parties() != b.parties() {
        return Err(NumericError::PartyMismatch(a.parties(), b.parties()));
    }
    let dims = a.dims.iter().zip(&b.dims).map(|(x, y)| x * y).collect();
    let mut vectors = Vec::with_capacity(a.len() * b.len());
    for u in &a.vectors {
        for v in &b.vectors {
            vectors.push(u.iter().zip(v).map(|(x, y)| kron(x, y)).collect());
        }
    }
    NumericOPB::new(dims, vectors, a.tolerance + b.tolerance)
}

/// `{|0⟩ ⊗ α_s} ∪ {|1⟩ ⊗ β_t}`: a basis with one more qubit in front,
/// reducible through that qubit.
pub fn prepend_qubit(a: &NumericOPB, b: &NumericOPB) -> Result<NumericOPB, NumericError> {
    if a.dims != b.dims {
        return Err(NumericError::DimMismatch(a.dims.clone(), b.dims.clone()));
    }
    let zero = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let one = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    let mut dims = vec![2];
    dims.extend_from_slice(&a.dims);
    let vectors = a
        .vectors
        .iter()
        .map(|v| (&zero, v))
        .chain(b.vectors.iter().map(|v| (&one, v)))
        .map(|(head, v)| std::iter::once(head.clone()).chain(v.iter().cloned()).collect())
        .collect();
    NumericOPB::new(dims, vectors, a.tolerance.max(b.tolerance))
}

/// Computational basis of the given party dimensions.
pub fn computational_basis(dims: &[usize]) -> NumericOPB {
    let total: usize = dims.iter().product();
    let vectors = (0..total)
        .map(|mut index| {
            let mut locals: Vec<Vec<C64>> = dims
                .iter()
                .rev()
                .map(|&d| {
                    let mut v = vec![C64::new(0.0, 0.0); d];
                    v[index % d] = C64::new(1.0, 0.0);
                    index /= d;
                    v
                })
                .collect();
            locals.reverse();
            locals
        })
        .collect();
    NumericOPB::new(dims.to_vec(), vectors, 0.0).expect("computational basis is orthonormal")
}
