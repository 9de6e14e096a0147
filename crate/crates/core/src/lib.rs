//! Computation in free products of concretely represented Hausdorff
//! topological groups.
//!
//! * [`topogroups`]: finite, Euclidean-rational and p-adic-rational groups
//!   with exact open-set descriptors.
//! * [`freeprod`]: words, normal forms, uniform subterms and the
//!   cancellation lemmas as checkable predicates.
//! * [`x0topology`]: the wedge space of the groups and its open sets.
//! * [`separator`]: explicit neighborhood systems showing that a word with
//!   nontrivial value stays away from the identity, packaged as
//!   independently checkable certificates.

pub mod error;
pub mod format;
pub mod freeprod;
pub mod gen;
pub mod rational;
pub mod separator;
pub mod suites;
pub mod topogroups;
pub mod x0topology;

pub use error::{Error, Result};
pub use freeprod::{FreeProduct, Letter, ReducedWord, UniformSubterm, Word};
pub use rational::{Rational, Valuation};
pub use separator::{CheckMode, SeparationCertificate, Separator, VerificationReport};
pub use topogroups::{GroupElement, GroupId, GroupKind, Groups, Neighborhood, Shape, Value};
pub use x0topology::{IdentityScales, XNeighborhood, XPoint};
