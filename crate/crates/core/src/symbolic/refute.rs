//! Swap-argument refutations of linear orders and comparability.
//!
//! A candidate relation supported by `P` is invariant under every `π` fixing
//! `P`. If such a `π` swaps two atoms `a, b` outside `P`, the tuples the
//! argument needs lie in one orbit type, so the candidate cannot tell them
//! apart. Each trace instantiates the argument for supports of size 0 to 3
//! and records everything needed to re-check it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::syntax::{parse_formula, Formula};
use crate::symbolic::atom::{Sort, SymAtom};
use crate::symbolic::eval::SymbolicStructure;
use crate::symbolic::group::GroupElement;
use crate::symbolic::search::Verdict;
use crate::symbolic::types::{type_of, TupleType};

/// Largest candidate support instantiated in a trace.
pub const TRACE_SUPPORT_SIZES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    /// Some member of `J_2` is a linear order of all atoms.
    LinearOrder,
    /// Of any two members of `J_1`, one injects into the other by a member of `J_2`.
    ComparabilityInjection,
}

impl Template {
    pub fn name(self) -> &'static str {
        match self {
            Template::LinearOrder => "linear-order",
            Template::ComparabilityInjection => "comparability-injection",
        }
    }

    pub fn formula(self) -> Formula {
        match self {
            Template::LinearOrder => linear_order_formula(),
            Template::ComparabilityInjection => comparability_formula(),
        }
    }
}

/// `∃A` reflexive, antisymmetric, transitive and total.
pub fn linear_order_formula() -> Formula {
    parse_formula(
        "ex A1#2. (all x1. A1#2(x1,x1)) \
         & (all x1. all x2. A1#2(x1,x2) & A1#2(x2,x1) -> x1 = x2) \
         & (all x1. all x2. all x3. A1#2(x1,x2) & A1#2(x2,x3) -> A1#2(x1,x3)) \
         & (all x1. all x2. A1#2(x1,x2) | A1#2(x2,x1))",
    )
    .expect("fixed formula parses")
}

/// `R` is the graph of an injection of `X` into `Y`.
fn injection(x: &str, y: &str) -> String {
    format!(
        "(all x1. {x}(x1) -> ex x2. {y}(x2) & A3#2(x1,x2)) \
         & (all x1. all x2. all x3. {x}(x1) & A3#2(x1,x2) & A3#2(x1,x3) -> x2 = x3) \
         & (all x1. all x2. all x3. {x}(x1) & {x}(x2) & {y}(x3) & A3#2(x1,x3) & A3#2(x2,x3) -> x1 = x2)"
    )
}

/// `∀X ∀Y ∃R` (R injects X into Y, or Y into X).
pub fn comparability_formula() -> Formula {
    parse_formula(&format!(
        "all A1#1. all A2#1. ex A3#2. ({}) | ({})",
        injection("A1#1", "A2#1"),
        injection("A2#1", "A1#1")
    ))
    .expect("fixed formula parses")
}

/// Invariance of the candidate under `π` equates membership of two tuples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwapCase {
    pub label: String,
    pub left: Vec<SymAtom>,
    pub right: Vec<SymAtom>,
    /// Shared orbit type of both tuples over the candidate's support.
    pub orbit_type: TupleType,
    pub descriptor: String,
    pub contradiction: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwapInstance {
    /// Support of the arbitrary candidate.
    pub support: Vec<SymAtom>,
    pub a: SymAtom,
    pub b: SymAtom,
    pub pi: GroupElement,
    pub cases: Vec<SwapCase>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwapTrace {
    pub template: Template,
    pub sort: Sort,
    pub structure: String,
    /// The argument in prose, uniform in the support.
    pub argument: Vec<String>,
    pub instances: Vec<SwapInstance>,
}

/// The first `k` atoms of `sort`, alternating halves for the two-sorted sort.
fn support_of_size(sort: Sort, k: usize) -> Vec<SymAtom> {
    (0..k as u32)
        .map(|i| match sort {
            Sort::Equality => SymAtom::Eq(i),
            Sort::Paired => SymAtom::Pair(i, 0),
            Sort::TwoSorted => SymAtom::Half((i % 2) as u8, i / 2),
            Sort::Ordered => SymAtom::rat(i as i64, 1),
        })
        .collect()
}

/// Two atoms outside `support`, in half `half` for the two-sorted sort.
fn fresh_pair(sort: Sort, support: &[SymAtom], half: u8) -> (SymAtom, SymAtom) {
    let base = support
        .iter()
        .filter_map(|a| match *a {
            SymAtom::Eq(i) | SymAtom::Pair(i, _) => Some(i),
            SymAtom::Half(h, i) if h == half => Some(i),
            _ => None,
        })
        .max()
        .map_or(0, |m| m + 1);
    match sort {
        Sort::Equality => (SymAtom::Eq(base), SymAtom::Eq(base + 1)),
        Sort::Paired => (SymAtom::Pair(base, 0), SymAtom::Pair(base + 1, 0)),
        Sort::TwoSorted => (SymAtom::Half(half, base), SymAtom::Half(half, base + 1)),
        Sort::Ordered => unreachable!("no swaps for the ordered sort"),
    }
}

fn make_case(
    sort: Sort,
    support: &[SymAtom],
    label: &str,
    left: Vec<SymAtom>,
    right: Vec<SymAtom>,
    contradiction: &str,
) -> SwapCase {
    let frame = sort.frame(support);
    let orbit_type = type_of(sort, &frame, &left);
    debug_assert_eq!(orbit_type, type_of(sort, &frame, &right));
    SwapCase {
        label: label.into(),
        descriptor: orbit_type.describe(sort, frame.len()),
        left,
        right,
        orbit_type,
        contradiction: contradiction.into(),
    }
}

/// Refutes the template in `s` by the swap argument.
pub fn swap_refute(s: &SymbolicStructure, template: Template) -> Result<Verdict> {
    let sort = s.sort();
    if template == Template::ComparabilityInjection && sort != Sort::TwoSorted {
        return Err(Error::TemplateMismatch(format!(
            "comparability needs two infinite halves; {} atoms have one",
            sort
        )));
    }
    if sort == Sort::Ordered {
        return Ok(Verdict::NoSwapWitness {
            reason: "an order automorphism fixing a finite set never swaps two atoms".into(),
        });
    }
    let mut instances = Vec::new();
    let argument: Vec<String> = match template {
        Template::LinearOrder => vec![
            "let R be a linear order in J_2 with finite support P".into(),
            "pick distinct a, b outside P and π fixing P with π(a) = b, π(b) = a".into(),
            "R^π = R, and (a,b), (b,a) share one orbit type over P, so R(a,b) iff R(b,a)".into(),
            "totality gives R(a,b) or R(b,a), hence both, and antisymmetry gives a = b".into(),
        ],
        Template::ComparabilityInjection => vec![
            "take X = {0}×ℕ and Y = {1}×ℕ, both in J_1 with empty support".into(),
            "let R in J_2 with finite support P inject X into Y (or Y into X)".into(),
            "pick distinct a, b in the domain half outside P and π = (a b), which fixes P and the other half".into(),
            "totality gives c in the other half with R(a,c); (a,c) and (b,c) share one orbit type over P".into(),
            "so R(b,c), and injectivity gives a = b".into(),
        ],
    };
    for k in 0..TRACE_SUPPORT_SIZES {
        let support = support_of_size(sort, k);
        match template {
            Template::LinearOrder => {
                let (a, b) = fresh_pair(sort, &support, 0);
                let pi = GroupElement::transposition(sort, a, b)?;
                let cases = vec![make_case(
                    sort,
                    &support,
                    "totality",
                    vec![a, b],
                    vec![b, a],
                    "R(a,b) and R(b,a) with a != b violates antisymmetry",
                )];
                instances.push(SwapInstance { support, a, b, pi, cases });
            }
            Template::ComparabilityInjection => {
                for (domain_half, other) in [(0u8, 1u8), (1, 0)] {
                    let (a, b) = fresh_pair(sort, &support, domain_half);
                    let pi = GroupElement::transposition(sort, a, b)?;
                    let named_c = support.iter().copied().find(|c| matches!(c, SymAtom::Half(h, _) if *h == other));
                    let fresh_c = fresh_pair(sort, &support, other).0;
                    let mut cases = Vec::new();
                    let direction = format!("injection of half {domain_half} into half {other}");
                    if let Some(c) = named_c {
                        cases.push(make_case(
                            sort,
                            &support,
                            &format!("{direction}, image named in P"),
                            vec![a, c],
                            vec![b, c],
                            "R(a,c) and R(b,c) with a != b violates injectivity",
                        ));
                    }
                    cases.push(make_case(
                        sort,
                        &support,
                        &format!("{direction}, image outside P"),
                        vec![a, fresh_c],
                        vec![b, fresh_c],
                        "R(a,c) and R(b,c) with a != b violates injectivity",
                    ));
                    instances.push(SwapInstance { support: support.clone(), a, b, pi, cases });
                }
            }
        }
    }
    let trace = SwapTrace { template, sort, structure: s.name().to_string(), argument, instances };
    trace.replay().map_err(|e| Error::Config(format!("swap trace failed its own replay: {e}")))?;
    Ok(Verdict::RefutedWithArgument { trace })
}

impl SwapTrace {
    /// Re-checks every step mechanically; the error names the first failure.
    pub fn replay(&self) -> std::result::Result<(), String> {
        let sort = self.sort;
        if self.instances.is_empty() {
            return Err("trace has no instances".into());
        }
        for inst in &self.instances {
            let at = |msg: String| {
                format!("support {:?}: {msg}", inst.support.iter().map(|a| a.to_string()).collect::<Vec<_>>())
            };
            let pi = GroupElement::new(sort, &inst.pi.pairs()).map_err(|e| at(e.to_string()))?;
            let frame = sort.frame(&inst.support);
            if inst.a == inst.b {
                return Err(at("a and b coincide".into()));
            }
            if frame.contains(&inst.a) || frame.contains(&inst.b) {
                return Err(at("a or b lies in the support".into()));
            }
            if let Some(x) = frame.iter().find(|x| !pi.fixes(**x)) {
                return Err(at(format!("{pi} moves support atom {x}")));
            }
            if pi.apply(inst.a) != inst.b || pi.apply(inst.b) != inst.a {
                return Err(at(format!("{pi} does not swap {} and {}", inst.a, inst.b)));
            }
            if inst.cases.is_empty() {
                return Err(at("no cases".into()));
            }
            for case in &inst.cases {
                let expected_shape = match self.template {
                    Template::LinearOrder => case.left == [inst.a, inst.b] && case.right == [inst.b, inst.a],
                    Template::ComparabilityInjection => {
                        let c = case.left.get(1).copied();
                        let halves = match (inst.a, inst.b, c) {
                            (SymAtom::Half(ha, _), SymAtom::Half(hb, _), Some(SymAtom::Half(hc, _))) => {
                                ha == hb && ha != hc
                            }
                            _ => false,
                        };
                        halves && case.left.len() == 2 && case.left[0] == inst.a && case.right == [inst.b, case.left[1]]
                    }
                };
                if !expected_shape {
                    return Err(at(format!("case `{}` does not match the template", case.label)));
                }
                if pi.apply_tuple(&case.left) != case.right {
                    return Err(at(format!("case `{}`: π does not carry the left tuple to the right one", case.label)));
                }
                let lt = type_of(sort, &frame, &case.left);
                let rt = type_of(sort, &frame, &case.right);
                if lt != rt || lt != case.orbit_type {
                    return Err(at(format!("case `{}`: tuples lie in different orbit types", case.label)));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refutations_for_the_catalog() {
        let basic = SymbolicStructure::new(Sort::Equality, "basic");
        let two = SymbolicStructure::new(Sort::TwoSorted, "two-sorted");
        for (s, t) in
            [(&basic, Template::LinearOrder), (&two, Template::LinearOrder), (&two, Template::ComparabilityInjection)]
        {
            let v = swap_refute(s, t).unwrap();
            let Verdict::RefutedWithArgument { trace } = v else { panic!("{v:?}") };
            assert_eq!(trace.replay(), Ok(()));
        }
        let ma = SymbolicStructure::new(Sort::Ordered, "mostowski-asser");
        assert!(matches!(swap_refute(&ma, Template::LinearOrder).unwrap(), Verdict::NoSwapWitness { .. }));
        assert!(matches!(swap_refute(&basic, Template::ComparabilityInjection), Err(Error::TemplateMismatch(_))));
    }

    #[test]
    fn tampered_traces_fail_replay() {
        let two = SymbolicStructure::new(Sort::TwoSorted, "two-sorted");
        let Verdict::RefutedWithArgument { trace } = swap_refute(&two, Template::ComparabilityInjection).unwrap()
        else {
            unreachable!()
        };
        let mut bad = trace.clone();
        bad.instances[1].pi = GroupElement::identity(Sort::TwoSorted);
        assert!(bad.replay().is_err());
        let mut bad = trace.clone();
        let c = &mut bad.instances[2].cases[0];
        c.right[1] = SymAtom::Half(0, 99);
        assert!(bad.replay().is_err());
        let mut bad = trace;
        let a = bad.instances[3].a;
        bad.instances[3].support.push(a);
        assert!(bad.replay().is_err());
    }

    #[test]
    fn comparability_formula_shape() {
        let f = comparability_formula();
        assert!(f.free_individuals().is_empty() && f.free_predicates().is_empty());
        assert_eq!(f.max_quantified_arity(), Some(2));
    }
}
