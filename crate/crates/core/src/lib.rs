//! Rank functions on finitely presented triangulated categories.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: exact rational matrices, subspaces and a small
//!   non-negative solver.
//! * [`category`]: presentations of Hom-finite Krull-Schmidt triangulated
//!   categories, morphism calculus and validation.
//! * [`mesh`]: mesh categories of `ZA_n` and their orbit categories, in
//!   particular cluster categories of type A.
//! * [`functor`]: dimension vectors of finitely presented functors, simple
//!   functors and Σ-orbits.
//! * [`rank`]: rank functions, decomposition into irreducibles, kernel
//!   ideals and the prime / idempotent / localising tests.
//! * [`qrank`]: rank functions valued in ordered modules with a twisted
//!   Σ-action.

pub mod category;
pub mod functor;
pub mod linalg;
pub mod mesh;
pub mod qrank;
pub mod rank;

pub use category::{
    CategoryError, CategoryPresentation, MorphismMatrix, ObjectExpr, ObjectId, PresentationData,
    TrianglePresentation,
};
pub use linalg::{Matrix, Scalar, Subspace};
pub use rank::RankFunction;
