//! Solvers for the spread constant: the largest variance of a valuation
//! whose values differ by at most 1 across every edge.

pub mod abs;
pub mod knapsack;
pub mod star;
pub mod tree;

pub use abs::{abs_oracle, abs_oracle_profile, abs_singleton_best, is_fully_stretched, AbsProfile};
pub use knapsack::{knapsack_min_abs, knapsack_min_abs_auto, SignChoice};
pub use star::{star_spread_exact, star_spread_value};
pub use tree::tree_spread_fptas;
