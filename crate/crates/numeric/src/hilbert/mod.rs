//! Truncated operators on `ℓ²`, Fredholm indices and the elementary
//! unitary / partial-isometry constructions.

mod construct;
mod index;
pub mod linalg;
mod operator;

pub use construct::{index_zero_partial_isometry, polar_partial_isometry, transport_unitary};
pub(crate) use construct::{completion_block, transport_block};
pub use index::{codimension_by_trace, essential_codimension, fredholm_index, is_window_supported};
pub use linalg::numerical_rank;
pub use operator::{ProjectionMatrix, TailMap, TailPattern, TruncatedOperator};

/// Symmetry and idempotency tolerance for projections supplied as input.
pub const TOL_INPUT: f64 = 1e-10;
/// Residual tolerance for constructed unitaries, projections and isometries.
pub const TOL_CONSTRUCTED: f64 = 1e-8;
/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-8;
/// Extra dimensions used to confirm that an index has stabilized.
pub const STABILIZATION_STEP: usize = 8;
/// Largest admissible operator-norm gap between neighbouring samples.
pub const MAX_GAP: f64 = 0.5;
