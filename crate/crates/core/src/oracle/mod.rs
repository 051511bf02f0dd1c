//! Brute-force check of the duality: realize a line as matrices over a large
//! prime field, solve for the commutant of the base point, and read off the
//! rank matrix of a generic element.

pub mod commutant;
pub mod linalg;
pub mod realization;
pub mod verify;

pub use commutant::{
    commutant_of_f, dual_commutant_space, nilpotency_check, oracle_dual_rank_matrix,
    oracle_dual_rank_matrix_transposed, structured_commutant, structured_dim, CommutantSpace, Mode,
};
pub use linalg::{Field, Mat, DEFAULT_PRIME};
pub use realization::{build_realization, InvariantReport, Realization};
pub use verify::{verify_dual, LineReport, OracleConfig, VerifyReport};
