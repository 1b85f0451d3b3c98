pub mod canonical;
pub mod checks;
pub mod io;
pub mod lattice;
pub mod numeric;
pub mod pattern;

pub use canonical::{
    are_equivalent, brute_force_equivalent, canonical_form, canonical_key, canonical_keys, CanonicalKey,
};
pub use lattice::{enumerate_classes, hasse, is_maximal, ClassStore, EnumerateOptions, LatticeError, SwitchSite};
pub use pattern::{Entry, PatternError, PatternMatrix, Signature, ValidationReport, Violation};
