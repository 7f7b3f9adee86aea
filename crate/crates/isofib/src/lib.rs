//! Abelian covers of curves, diagonal quotients `(F×D)/G` of products of
//! curves, and the search for surfaces whose canonical map is composed with
//! an isotrivial pencil.

pub mod atlas;
pub mod classifier;
pub mod cli;
pub mod cover;
pub mod error;
pub mod group;
pub mod linear;
pub mod parallel;
pub mod reference;
pub mod sandwich;

pub use classifier::{classify, ClassifyRequest, Comparison, DiscrepancyReport, FamilyRow};
pub use cover::{BranchEntry, CoverConstraints, CoverData, CoverSpec, Dedup, EigenProfile};
pub use error::{Error, Result};
pub use group::{Automorphism, CharacterIndex, FiniteAbelianGroup, GroupElement};
pub use linear::LinearForm;
pub use sandwich::{InvariantReport, SandwichSpec, SandwichSurface, SingularityRecord};
