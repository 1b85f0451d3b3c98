//! The identification order on O(n), maximality, switching, families and
//! exhaustive enumeration of equivalence classes.

mod enumerate;
mod family;
mod order;
mod switching;

pub use enumerate::{
    enumerate_classes, enumerate_classes_with, hasse, Budget, ClassRecord, ClassStore, EnumerateOptions, HasseDiagram,
    LevelStats,
};
pub use family::family_membership;
pub use order::{identifications, is_maximal, split_components, splits, Identification, Split};
pub use switching::{apply_switch, apply_switch_traced, switching_orbit, switching_sites, SwitchSite, SwitchTrace};

use crate::pattern::PatternError;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("matrix is not maximal")]
    NotMaximal,
    #[error("invalid switching site: {0}")]
    InvalidSite(String),
    #[error("not a permutation of {len} block columns: {perm:?}")]
    InvalidPermutation { perm: Vec<usize>, len: usize },
    #[error("class store is incomplete or holds maximal classes only")]
    IncompleteStore,
}

/// Runs `f` over `items`, in parallel when the `parallel` feature is on and
/// more than one worker is requested.
pub(crate) fn map_items<T, U, F>(items: &[T], jobs: Option<usize>, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if jobs != Some(1) {
            return items.par_iter().map(f).collect();
        }
    }
    let _ = jobs;
    items.iter().map(f).collect()
}
