//! chowcalc: an exact symbolic intersection-theory engine.
//!
//! The engine builds Chow rings of compositionally constructed spaces
//! (projective bundles, blowups, total spaces, formal bases with free Chern
//! generators) and verifies, over the integers and with no tolerances, the
//! computational identities behind Chow-group decompositions: the projective
//! bundle projectors, blowup presentations and the key formula, correspondence
//! convolution for standard and virtual flips, and the rank bookkeeping of
//! decomposition models.

pub mod correspondences;
pub mod linalg;
pub mod polyring;
pub mod report;
pub mod sheaves;
pub mod spaces;
pub mod suites;

pub use polyring::{Coeff, GradedPolynomial, Monomial, PolyError, VariableTable};
pub use report::CheckOutcome;
pub use sheaves::{binomial, cotangent_twist_chern, SheafClass, SheafError};
pub use spaces::{
    integrate, proj_project, pullback, pushforward, ChowClass, EmbeddingDatum, Space, SpaceError,
    StructuralMap,
};
