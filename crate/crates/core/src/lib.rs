//! Pyasetskii involution on multi-segment L-parameters: exact combinatorial
//! algorithms, rank matrices, and a linear-algebra oracle that checks them.

pub mod catalog;
pub mod duality;
pub mod enumerate;
pub mod error;
pub mod halfint;
pub mod model;
pub mod oracle;
pub mod rankmat;

#[cfg(test)]
mod testutil;

pub use error::{CoreError, Result};
pub use halfint::HalfInt;
pub use model::{
    GroupKind, GroupType, InfinitesimalParameter, LParameter, LineKey, MultiSegment, Parity, RhoClass,
    Segment, SelfDuality, Violation,
};
pub use rankmat::{closure_leq, rank_matrices, rank_matrix, RankMatrix};
