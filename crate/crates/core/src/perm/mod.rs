//! Finite permutations, permutation groups and their action on predicates.

mod domain;
mod group;
mod permutation;
mod predicate;

pub use domain::{Atom, Domain};
pub use group::{automorphisms, PermGroup, AUTOMORPHISM_DEGREE_CAP, DEFAULT_GROUP_CAP, SUBGROUP_ENUMERATION_CAP};
pub use permutation::Permutation;
pub use predicate::PredicateRel;
