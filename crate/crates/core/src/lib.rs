//! Two-dimensional posets with symbolic-cardinality classes.
//!
//! A [`SkeletonPoset`] stores the finitely many explicit nodes of a poset of
//! dimension at most two together with classes of anonymous height-one
//! nodes. On top of that representation the crate decides the K-poset
//! axioms, computes the `ℋ`, `Λ`, `d` and `e` invariants, and implements
//! splitting, refinement, extension, simplification and gluing, each with a
//! checkable certificate.

pub mod analysis;
pub mod card;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod iso;
pub mod map;
pub mod oracle;
pub mod poset;
pub mod transform;

pub use analysis::{
    check_k, check_proper, classify_single_max, d_local, d_value, e_count, is_simple, lambda_set, script_h,
    Classification, KReport, KViolation,
};
pub use card::CardTag;
pub use error::{AnalysisError, DocumentError, MapError, ParseCardError, PosetError, TransformError};
pub use iso::{is_isomorphic, iso_check, NotIsomorphic};
pub use map::{ClassFlow, PosetMap};
pub use poset::{ClassKey, ClassRecord, NodeId, SkeletonPoset, VNode};
pub use transform::{
    check_d_preservation, check_expansion, expand, glue, glue_as, refine, simplify, split_at, split_unrefined,
    verify_splitting, SimplifyingChain, SplittingCertificate,
};
