//! Cyclic orbit codes in Grassmannians over towers of finite fields.

pub mod error;
pub mod field;
pub mod numth;
pub mod subspace;
mod echelon;
pub mod orbit;
pub mod distance;
pub mod nesting;
pub mod constructions;
pub mod bounds;
pub mod artifact;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Elem, FieldCtx};
pub use subspace::Subspace;
pub use orbit::{AlphaHit, CyclicCode, OrbitRep, Provenance, SizeMode, SweepStrategy};
pub use distance::{code_min_distance, DistanceReport, Witness};
pub use nesting::{odot_chain, odot_codes, odot_mapped, DuplicatePolicy, LinMap, MappedCode, MappedOrbit};
