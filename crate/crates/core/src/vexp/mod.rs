//! Vertex expansion with the symmetric boundary `N(S) ∪ N(V \ S)`.

pub mod brute;
pub mod star;
pub mod tree_dp;

pub use brute::{vexp_bruteforce, DEFAULT_MAX_N};
pub use star::vexp_star_weighted;
pub use tree_dp::vexp_tree_uniform;
