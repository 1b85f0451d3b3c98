//! Concrete orthogonal product bases: instantiation of pattern matrices,
//! Gram checks, associated matrices, frame structure, reducibility,
//! constructions and the controlled unitaries realizing switching.
//!
//! Complex amplitudes are `Complex64`. Multi-party vectors use the usual
//! Kronecker ordering with party 1 as the most significant factor.

mod basis;
mod frames;
mod instantiate;
mod switch;

pub use basis::{
    computational_basis, gram_defect, is_reducible_numeric, prepend_qubit, tensor_opb, Metadata, NumericOPB, Reduction,
};
pub use frames::{verify_frame_structure, Frame, FrameReport};
pub use instantiate::{associate_matrix, instantiate, perpendicular, Assignment, GENERIC_MARGIN};
pub use switch::{build_switch_unitary, check_switch_unitary, DenseMatrix, SwitchCheck};

use num_complex::Complex64;

use crate::lattice::LatticeError;
use crate::pattern::{PatternError, ValidationReport};

pub type C64 = Complex64;

/// Overlap below which two local vectors count as orthogonal when reading
/// reducibility off a basis.
pub const ORTHOGONAL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("malformed basis: {0}")]
    Shape(String),
    #[error("vector {vector}, party {party} has norm {norm}")]
    NotUnit { vector: usize, party: usize, norm: f64 },
    #[error("basis vectors are not orthonormal: Gram defect {0:e}")]
    NotOrthonormal(f64),
    #[error("operation needs qubit parties only")]
    NotQubits,
    #[error("party {} is not a qubit", .0 + 1)]
    NotQubitSlot(usize),
    #[error("party {} of vectors {} and {}: overlap {overlap:e} is neither collinear, orthogonal nor generic", .column + 1, .rows.0 + 1, .rows.1 + 1)]
    Ambiguous {
        column: usize,
        rows: (usize, usize),
        overlap: f64,
    },
    #[error("no generic assignment found after {0} draws")]
    GenericityUnreachable(usize),
    #[error("party counts differ: {0} vs {1}")]
    PartyMismatch(usize, usize),
    #[error("party dimensions differ: {0:?} vs {1:?}")]
    DimMismatch(Vec<usize>, Vec<usize>),
    #[error("associated matrix is not a member of O(n): {0}")]
    Associated(ValidationReport),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub(crate) fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn kron(u: &[C64], v: &[C64]) -> Vec<C64> {
    u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect()
}
