//! Finite-category engine for idempotent monads and comonads.
//!
//! Every category here is finite and presented by a total composition
//! table, so all the universal properties involved (reflections,
//! coreflections, adjoint equivalences, naturality) are checked by
//! exhaustive enumeration rather than assumed.
//!
//! The modules build on each other bottom-up:
//!
//! * [`fincat`]: categories, hom-sets, isomorphisms, opposites, full subcategories
//! * [`functor`]: functors, contravariant functors, natural transformations, whiskering
//! * [`monad`]: idempotent (co)monads with their (co)reflective fixed subcategories
//! * [`maxnormal`]: the equivalence between the two fixed subcategories of a
//!   compatible monad/comonad pair
//! * [`transport`]: moving a (co)monad across a contravariant equivalence
//! * [`fibered`]: total categories over a base with bounded poset fibers, the
//!   (co)monads picking fiber tops and bottoms, and a seeded generator

pub mod error;
pub mod fibered;
pub mod fincat;
pub mod functor;
pub mod maxnormal;
pub mod monad;
pub mod report;
pub mod transport;

mod sweep;

pub use error::{CatError, Result};
pub use fincat::{Category, CategoryBuilder, Mor, MorId, Obj, ObjId};
pub use functor::{ContravariantFunctor, Functor, NatTrans};
pub use report::{ValidationReport, Violation};
