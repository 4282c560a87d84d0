//! Exact classification of homogeneous projections in the corona algebra of
//! `C(X) ⊗ B` over the one-dimensional spaces `[0,1]`, `[0,∞)`, `ℝ` and the
//! circle.
//!
//! Everything here is symbolic: `K₀(B)` is modelled as a finitely generated
//! abelian group ([`kgroup`]), the base space only contributes its partition
//! and which subintervals run off to infinity ([`space`]), and the three
//! equivalence relations (Murray–von Neumann, unitary, homotopy) reduce to
//! telescoping systems over the jump classes of a local lifting
//! ([`classify`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod classify;
mod error;
pub mod kgroup;
pub mod space;

pub use classify::{
    decide, decide_homotopy, decide_mvn, decide_unitary, verify_certificate,
    AlgebraCapabilities, CircleMode, EquivalenceCertificate, JumpData, Relation, Verdict,
};
pub use error::Error;
pub use kgroup::{solve_telescoping, GroupElement, GroupSpec, Refutation, Telescoping};
pub use space::{BaseSpace, Bound, SpaceKind, SubintervalInfo};

pub type Result<T, E = Error> = core::result::Result<T, E>;
