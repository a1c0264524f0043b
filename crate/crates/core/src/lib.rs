//! Finite complete lattices, the union-preserving maps between their
//! powersets, and the functorial, state-transition and contextual
//! enrichments of categories of lattices, checked by exhaustive enumeration.

pub mod cli;
pub mod lattice;
pub mod library;
pub mod morphisms;
pub mod quantaloid;
pub mod subcategory;
pub mod text;
pub mod verify;

pub use lattice::{ElemSet, FiniteLattice, LatticeError, LatticeProfile};
pub use morphisms::{
    JoinMap, LatticeMorphism, LatticeRef, MonotoneZeroMap, MorphismClass, MorphismError, PartialFunction, PowerMap,
    DEFAULT_GUARD,
};
pub use quantaloid::{QuantaloidError, Tier, TierReport};
pub use subcategory::{ConcreteCategory, GeneratedSubcategory, IsotoneZero, SubcategoryKind, SubcategorySpec};
pub use verify::{CheckRecord, CheckStatus, VerificationReport, VerifyConfig};
