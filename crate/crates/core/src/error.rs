use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("torsion order {0} is invalid (must be at least 2)")]
    InvalidTorsionOrder(u64),
    #[error("group element does not belong to the expected group")]
    SpecMismatch,
    #[error("expected {expected} components, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("integer overflow in group arithmetic")]
    Overflow,
    #[error("partition is invalid: {0}")]
    InvalidPartition(&'static str),
    #[error("forced-zero index {index} outside 0..={max}")]
    ForcedIndexOutOfRange { index: usize, max: usize },
    #[error("a cyclic system cannot carry forced zeros")]
    CyclicWithForcedZero,
    #[error("jump data does not fit the base space: {0}")]
    JumpShape(&'static str),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(&'static str),
}
