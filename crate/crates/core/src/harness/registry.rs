//! The fixed registry of invariants a report may cite.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Anchor {
    BridgeCommutation,
    Comprehension,
    DefinableEquivariance,
    FilterAxioms,
    FiniteTriviality,
    FirstOrderAgreement,
    FormulaStabilizer,
    FreeVariables,
    IdealAxioms,
    LinearOrderWitness,
    NoComparability,
    NoLinearOrder,
    ParameterTransport,
    PredicateClosure,
    PruningSoundness,
    SupportConjugation,
    SupportMinimality,
    SymbolicClosure,
    TruthInvariance,
}

impl Anchor {
    /// In key order, which is also report order.
    pub const ALL: [Anchor; 19] = [
        Anchor::BridgeCommutation,
        Anchor::Comprehension,
        Anchor::DefinableEquivariance,
        Anchor::FilterAxioms,
        Anchor::FiniteTriviality,
        Anchor::FirstOrderAgreement,
        Anchor::FormulaStabilizer,
        Anchor::FreeVariables,
        Anchor::IdealAxioms,
        Anchor::LinearOrderWitness,
        Anchor::NoComparability,
        Anchor::NoLinearOrder,
        Anchor::ParameterTransport,
        Anchor::PredicateClosure,
        Anchor::PruningSoundness,
        Anchor::SupportConjugation,
        Anchor::SupportMinimality,
        Anchor::SymbolicClosure,
        Anchor::TruthInvariance,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Anchor::BridgeCommutation => "bridge-commutation",
            Anchor::Comprehension => "comprehension",
            Anchor::DefinableEquivariance => "definable-equivariance",
            Anchor::FilterAxioms => "filter-axioms",
            Anchor::FiniteTriviality => "finite-triviality",
            Anchor::FirstOrderAgreement => "first-order-agreement",
            Anchor::FormulaStabilizer => "formula-stabilizer",
            Anchor::FreeVariables => "free-variables",
            Anchor::IdealAxioms => "ideal-axioms",
            Anchor::LinearOrderWitness => "linear-order-witness",
            Anchor::NoComparability => "no-comparability",
            Anchor::NoLinearOrder => "no-linear-order",
            Anchor::ParameterTransport => "parameter-transport",
            Anchor::PredicateClosure => "predicate-closure",
            Anchor::PruningSoundness => "pruning-soundness",
            Anchor::SupportConjugation => "support-conjugation",
            Anchor::SupportMinimality => "support-minimality",
            Anchor::SymbolicClosure => "symbolic-closure",
            Anchor::TruthInvariance => "truth-invariance",
        }
    }

    /// The claim being checked, in words.
    pub fn statement(self) -> &'static str {
        match self {
            Anchor::BridgeCommutation => {
                "materializing an orbit predicate on a sample commutes with the group action"
            }
            Anchor::Comprehension => "every predicate definable with parameters lies in the matching J_n",
            Anchor::DefinableEquivariance => {
                "the predicate defined under f^pi is the image under pi of the one defined under f, and stays definable"
            }
            Anchor::FilterAxioms => "the family satisfies the normal filter axioms",
            Anchor::FiniteTriviality => "a faithful family on a finite domain yields every predicate",
            Anchor::FirstOrderAgreement => {
                "first-order truth over the atoms agrees with truth on a saturated finite sample"
            }
            Anchor::FormulaStabilizer => {
                "the intersection of the parameter stabilizers fixes the defined predicate"
            }
            Anchor::FreeVariables => "truth depends only on the values of the free variables",
            Anchor::IdealAxioms => "the family satisfies the normal ideal axioms",
            Anchor::LinearOrderWitness => "some member of J_2 linearly orders the atoms",
            Anchor::NoComparability => {
                "no member of J_2 compares every two unary members by an injection"
            }
            Anchor::NoLinearOrder => "no member of J_2 linearly orders the atoms",
            Anchor::ParameterTransport => {
                "moving the defined variables and a prefix of the predicate parameters by a common stabilizer element preserves truth"
            }
            Anchor::PredicateClosure => "each J_n is closed under the action of every group element",
            Anchor::PruningSoundness => "quantifying over orbit representatives gives the same truth values",
            Anchor::SupportConjugation => "the least support of an image is the image of the least support",
            Anchor::SupportMinimality => "the reported support supports the predicate and no atom of it can be dropped",
            Anchor::SymbolicClosure => "the image of an orbit predicate is an orbit predicate over the image support",
            Anchor::TruthInvariance => "truth is invariant under moving the whole assignment by a group element",
        }
    }

    pub fn from_key(key: &str) -> Option<Anchor> {
        Anchor::ALL.into_iter().find(|a| a.key() == key)
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}
