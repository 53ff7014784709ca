//! Orbit-finite permutation models over infinite atom sorts.
//!
//! Group elements are never enumerated. Predicates are finite unions of orbit
//! types relative to a finite support, and predicate quantifiers are searched
//! over bounded supports with the incompleteness made explicit.

pub mod atom;
pub mod eval;
pub mod group;
pub mod predicate;
pub mod refute;
pub mod sample;
pub mod search;
pub mod types;

pub use atom::{Rational, Sort, SymAtom};
pub use eval::{evaluate, fresh_extensions, SymbolicAssignment, SymbolicSemantics, SymbolicStructure};
pub use group::{symbolic_act, GroupElement};
pub use predicate::{truncation, OrbitPredicate};
pub use refute::{
    comparability_formula, linear_order_formula, swap_refute, SwapCase, SwapInstance, SwapTrace, Template,
};
pub use search::{bounded_witness_search, Verdict};
pub use types::{orbits_over, type_of, Slot, TupleType};
