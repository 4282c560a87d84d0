//! Desk-scale realization of the `B = K` case on truncated `ℓ²`.
//!
//! Operators live on `ℝᴺ` split into a dense *window* `0..W` and a tail
//! `W..N` on which they match a declared pattern exactly. A difference of two
//! projections is "compact" when it vanishes exactly outside the window; its
//! essential codimension is then an integer computed two independent ways
//! (trace and kernel/cokernel count).
//!
//! * [`hilbert`]: ranks, Fredholm indices, essential codimension, transport
//!   unitaries and partial isometries.
//! * [`lifting`]: sampled local liftings, jump extraction, smoothing, and the
//!   deformation pipeline that realizes MvN witnesses.
//! * [`catalog`]: projection families with known jump data.

pub mod catalog;
mod error;
pub mod hilbert;
pub mod lifting;

pub use error::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;
