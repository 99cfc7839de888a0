//! Solvers for lambda-infinity, the max-neighbor Poincaré constant
//! `min_x E_v max_{u ~ v} (x_u - x_v)^2 / Var(x)`.

pub mod fptas;
pub mod oracle;
pub mod star;

pub use fptas::{star_fptas, star_fptas_with, FptasOptions, StarBalanceTable};
pub use oracle::{oracle_small, oracle_with, LambdaInterval, OracleOptions};
pub use star::{
    almost_binary_violation, balanced_split, cheeger_sandwich, star_exact, star_is_tight, star_lambda_cmp,
    star_lower_bound,
};
