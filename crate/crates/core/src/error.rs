use thiserror::Error;

use crate::model::{Segment, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("malformed half-integer {0:?} (expected \"k\" or \"k/2\" with k odd)")]
    ParseHalfInt(String),

    #[error("invalid segment [{b}, {e}]: end minus begin must be a nonnegative integer")]
    InvalidSegment { b: String, e: String },

    #[error("multi-segment spans more than one line")]
    MixedLine,

    #[error("empty multi-segment where a nonempty one is required")]
    Empty,

    #[error("rank matrix anchors differ: ({0}) vs ({1})")]
    AnchorMismatch(String, String),

    #[error("infinitesimal parameters differ")]
    InfinitesimalMismatch,

    #[error("group types differ: {0} vs {1}")]
    GroupMismatch(String, String),

    #[error("operation requires a classical group, got {0}")]
    NotClassical(String),

    #[error("line is not self-dual")]
    NotSelfDualLine,

    #[error("not a valid bad-parity multi-segment: {0} has odd multiplicity or the multiset is not self-dual")]
    InvalidBadParity(Segment),

    #[error("multiplicity underflow removing {0}")]
    MultiplicityUnderflow(Segment),

    #[error("multi-segment is not of the form m1 + dual(m1) over a non-self-dual class")]
    NotPaired,

    #[error("parameter fails validation: {}", fmt_violations(.0))]
    Validation(Vec<Violation>),

    #[error("support of {size} exponents on one line exceeds the cap of {cap}")]
    SupportTooLarge { size: usize, cap: usize },

    #[error("infinitesimal parameter is not self-dual")]
    InfinitesimalNotSelfDual,

    #[error("map is not an involution on the poset nodes")]
    NotInvolution,

    #[error("invariant violated: {0}")]
    Invariant(String),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, CoreError>;
