//! Impurity functions for binary classification trees, the class-weighting
//! transform, prevalence-level split selection, purity orderings between
//! impurity functions, and a small greedy tree grower.

pub mod error;
pub mod impurity;
mod jet;
pub mod purity;
pub mod split;
pub mod tree;
pub mod weighting;

pub use error::{Error, Result};
pub use impurity::{
    are_equivalent, interior_grid, is_preimpurity, is_proper, maximizer, standard_form, AffineNormalization,
    ImpurityFn, CATALOG, DEFAULT_GRID, DELTA,
};
pub use purity::{
    empirical_purity_check, find_witness, maximizer_order_check, ratio_monotone, realize_splits, PurityVerdict,
    RealizedDataset, Relation, Witness,
};
pub use split::{optimal_split, split_impurity, NodeSummary, SplitPoint, TieBreak, EPS_TIE};
pub use tree::{grow, grow_weighted, Axis, GrowConfig, Tree, WeightedDataset};
pub use weighting::{apply_tw, g_profile, phi, respects_class_weighting, WeightFactor};
