//! Maximum variance embeddings: the linear-time planar solver for trees,
//! the Gram-matrix relaxation and its rounding to `k` dimensions.

pub mod lift;
pub mod moments;
pub mod rounding;
pub mod tree2;

pub use lift::{lift_solve, GramLift, LiftResult};
pub use moments::{branch_moments, Branch, BranchMoments};
pub use rounding::{gaussian_round, gaussian_trials, pca_round, tau_k, RoundingReport, TrialSummary};
pub use tree2::{tree_mve2_cases, tree_mve2_embed, tree_mve2_value, BarycenterCase};
