use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] corona_core::Error),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("operator entries outside the window do not match the declared tail (first at ({row}, {col}))")]
    TailViolation { row: usize, col: usize },
    #[error("not a projection: symmetry defect {symmetry:.3e}, idempotency defect {idempotency:.3e}")]
    NotProjection { symmetry: f64, idempotency: f64 },
    #[error("{0}: difference is not supported inside the window")]
    NotWindowSupported(String),
    #[error("trace of the difference {0} is not within 1e-6 of an integer")]
    NonIntegerTrace(f64),
    #[error("truncation too small: index {small} at N, {large} at N+8")]
    TruncationTooSmall { small: i64, large: i64 },
    #[error("trace gives {trace} but kernel/cokernel count gives {index}")]
    MethodDisagreement { trace: i64, index: i64 },
    #[error("operator does not map the domain range into the codomain range (defect {0:.3e})")]
    LeavesCodomain(f64),
    #[error("samples too coarse: projection gap {0:.4} exceeds 0.5")]
    SamplesTooCoarse(f64),
    #[error("index obstruction: no exact partial isometry ({0})")]
    IndexObstruction(String),
    #[error("numerical construction failed: {0}")]
    Numerical(String),
    #[error("subprojection rank {requested} too large: at most {available} available")]
    RankTooLarge { requested: i64, available: usize },
    #[error("negative rank {0}: realize on the opposite side")]
    NegativeRank(i64),
    #[error("invalid lifting: {0}")]
    InvalidLifting(String),
    #[error("grids do not align: {0}")]
    GridMismatch(String),
    #[error("index is not constant across subinterval {subinterval}: {first} then {other}")]
    NonConstantIndex { subinterval: usize, first: i64, other: i64 },
    #[error("at x = {point}: {source}")]
    AtPoint { point: f64, source: Box<Error> },
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
}
