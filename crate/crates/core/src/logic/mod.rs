//! The second-order language: syntax, Henkin evaluation and comprehension audits.

pub mod audit;
pub mod eval;
pub mod finite;
pub mod syntax;

pub use audit::{comprehension_audit, AuditReport, Counterexample};
pub use eval::{Assignment, Completeness, Env, Semantics, TruthValue};
pub use finite::{
    act_on_assignment, defined_predicate, evaluate, evaluate_with, EvalOptions, FiniteAssignment, FiniteSemantics,
};
pub use syntax::{parse_formula, BinOp, Binder, Formula, PredVar, Quantifier, Var};
