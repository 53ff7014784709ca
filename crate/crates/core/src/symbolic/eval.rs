//! Symbolic permutation models and Henkin evaluation over them.

use std::borrow::Cow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::eval::{check_assigned, eval_in, Assignment, Env, Semantics, TruthValue};
use crate::logic::syntax::Formula;
use crate::symbolic::atom::{Sort, SymAtom};
use crate::symbolic::predicate::OrbitPredicate;
use crate::symbolic::types::{gap_point, orbits_in_frame, representative, TupleType, SYMBOLIC_ARITY_CAP};

pub type SymbolicAssignment = Assignment<SymAtom, OrbitPredicate>;

/// Default bound on candidates per predicate quantifier.
pub const DEFAULT_CANDIDATE_BUDGET: u64 = 1 << 20;

/// `Σ(I, 𝔊, 𝓘₀)` for an infinite sort: `J_n` is every finitely supported
/// `n`-ary predicate, answered intensionally.
#[derive(Clone, Debug, Serialize)]
pub struct SymbolicStructure {
    sort: Sort,
    name: String,
    arity_cap: usize,
    /// New atoms allowed in candidate supports for predicate quantifiers.
    fresh: usize,
    budget: u64,
}

impl SymbolicStructure {
    pub fn new(sort: Sort, name: impl Into<String>) -> Self {
        SymbolicStructure {
            sort,
            name: name.into(),
            arity_cap: SYMBOLIC_ARITY_CAP,
            fresh: 1,
            budget: DEFAULT_CANDIDATE_BUDGET,
        }
    }

    pub fn with_fresh(mut self, fresh: usize) -> Self {
        self.fresh = fresh;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity_cap(&self) -> usize {
        self.arity_cap
    }

    pub fn fresh(&self) -> usize {
        self.fresh
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// The sort's automorphism group, in words.
    pub fn group_descriptor(&self) -> &'static str {
        match self.sort {
            Sort::Equality => "all permutations of the atoms",
            Sort::Ordered => "order automorphisms of the rationals",
            Sort::Paired => "permutations of the pairs, with flips inside pairs",
            Sort::TwoSorted => "permutations preserving each half",
        }
    }

    /// Every orbit predicate is finitely supported, hence a member.
    pub fn is_member(&self, p: &OrbitPredicate) -> Result<bool> {
        if p.arity() > self.arity_cap {
            return Err(Error::ArityOutOfRange { arity: p.arity(), cap: self.arity_cap });
        }
        Ok(p.sort() == self.sort)
    }

    pub(crate) fn validate(&self, f: &SymbolicAssignment) -> Result<()> {
        for (v, a) in &f.individuals {
            if !self.sort.accepts(a) {
                return Err(Error::NotAMember(v.to_string()));
            }
        }
        for (p, alpha) in &f.predicates {
            if alpha.arity() != p.arity as usize {
                return Err(Error::ArityClash { index: p.index, arity: p.arity, found: alpha.arity() });
            }
            if !self.is_member(alpha)? {
                return Err(Error::NotAMember(p.to_string()));
            }
        }
        Ok(())
    }
}

/// Named atoms of everything bound in `env`, as a frame.
pub(crate) fn env_frame(sort: Sort, env: &Env<SymAtom, OrbitPredicate>) -> Vec<SymAtom> {
    let mut atoms: Vec<SymAtom> = env.ind_values().copied().collect();
    for p in env.pred_values() {
        atoms.extend_from_slice(p.frame());
    }
    sort.frame(&atoms)
}

/// One extension of `frame` by `k` new atoms per orbit of the frame's
/// stabilizer on such extensions.
pub fn fresh_extensions(sort: Sort, frame: &[SymAtom], k: usize) -> Vec<Vec<SymAtom>> {
    let next = |pred: &dyn Fn(&SymAtom) -> Option<u32>| frame.iter().filter_map(pred).max().map_or(0, |m| m + 1);
    match sort {
        Sort::Equality => {
            let base = next(&|a| if let SymAtom::Eq(i) = a { Some(*i) } else { None });
            let extra: Vec<SymAtom> = (0..k as u32).map(|i| SymAtom::Eq(base + i)).collect();
            vec![sort.frame(frame.iter().chain(&extra))]
        }
        Sort::Paired => {
            let base = next(&|a| if let SymAtom::Pair(n, _) = a { Some(*n) } else { None });
            let extra: Vec<SymAtom> = (0..k as u32).map(|i| SymAtom::Pair(base + i, 0)).collect();
            vec![sort.frame(frame.iter().chain(&extra))]
        }
        Sort::TwoSorted => (0..=k)
            .map(|in_first| {
                let extra: Vec<SymAtom> = (0..2u8)
                    .flat_map(|h| {
                        let base = next(&|a| match a {
                            SymAtom::Half(g, n) if *g == h => Some(*n),
                            _ => None,
                        });
                        let count = if h == 0 { in_first } else { k - in_first };
                        (0..count as u32).map(move |i| SymAtom::Half(h, base + i))
                    })
                    .collect();
                sort.frame(frame.iter().chain(&extra))
            })
            .collect(),
        Sort::Ordered => {
            let gaps = frame.len() + 1;
            compositions(k, gaps)
                .into_iter()
                .map(|counts| {
                    let extra: Vec<SymAtom> = counts
                        .iter()
                        .enumerate()
                        .flat_map(|(g, &c)| (0..c).map(move |r| SymAtom::Rat(gap_point(frame, g, r, c))))
                        .collect();
                    sort.frame(frame.iter().chain(&extra))
                })
                .collect()
        }
    }
}

/// Ways to write `k` as an ordered sum of `parts` naturals, lexicographically.
fn compositions(k: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![k]];
    }
    (0..=k)
        .rev()
        .flat_map(|first| {
            compositions(k - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// The predicate over `frame` made of the types selected by the bits of `mask`.
pub(crate) fn subset_candidate(
    sort: Sort,
    arity: usize,
    frame: &[SymAtom],
    types: &[TupleType],
    mask: u64,
) -> OrbitPredicate {
    let chosen = types.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect();
    OrbitPredicate::raw(sort, arity, frame.to_vec(), chosen)
}

pub struct SymbolicSemantics<'a> {
    structure: &'a SymbolicStructure,
    fresh: usize,
}

impl<'a> SymbolicSemantics<'a> {
    pub fn new(structure: &'a SymbolicStructure) -> Self {
        SymbolicSemantics { structure, fresh: structure.fresh }
    }
}

impl Semantics for SymbolicSemantics<'_> {
    type Ind = SymAtom;
    type Pred = OrbitPredicate;

    /// One atom per orbit of the stabilizer of everything bound; exact
    /// because the structure is closed under that stabilizer.
    fn ind_candidates(&self, env: &Env<SymAtom, OrbitPredicate>) -> Result<Vec<SymAtom>> {
        let sort = self.structure.sort;
        let frame = env_frame(sort, env);
        Ok(orbits_in_frame(sort, &frame, 1).iter().map(|ty| representative(sort, &frame, ty, &[])[0]).collect())
    }

    /// Predicates supported by the bound atoms plus `fresh` new ones; never exhaustive.
    fn pred_candidates(
        &self,
        arity: usize,
        env: &Env<SymAtom, OrbitPredicate>,
    ) -> Result<(Cow<'_, [OrbitPredicate]>, bool)> {
        let sort = self.structure.sort;
        if arity > self.structure.arity_cap {
            return Err(Error::ArityOutOfRange { arity, cap: self.structure.arity_cap });
        }
        let frame = env_frame(sort, env);
        let mut out = Vec::new();
        for ext in fresh_extensions(sort, &frame, self.fresh) {
            let types = orbits_in_frame(sort, &ext, arity);
            let count = 1u64.checked_shl(types.len() as u32).filter(|&c| c <= self.structure.budget);
            let Some(count) = count.filter(|c| out.len() as u64 + c <= self.structure.budget) else {
                return Err(Error::Budget(format!(
                    "{} orbit types over {} atoms exceed the candidate budget",
                    types.len(),
                    ext.len()
                )));
            };
            out.extend((0..count).map(|m| subset_candidate(sort, arity, &ext, &types, m)));
        }
        Ok((Cow::Owned(out), false))
    }

    fn holds(&self, alpha: &OrbitPredicate, args: &[SymAtom]) -> bool {
        alpha.contains(args)
    }
}

/// `Σ_f(H)` in a symbolic model. First-order formulas are exact; predicate
/// quantifiers search bounded supports and are tagged accordingly.
pub fn evaluate(s: &SymbolicStructure, f: &SymbolicAssignment, h: &Formula) -> Result<TruthValue> {
    s.validate(f)?;
    check_assigned(f, h, &[])?;
    eval_in(&SymbolicSemantics::new(s), &mut Env::from_assignment(f), h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::syntax::{parse_formula, PredVar};

    #[test]
    fn first_order_evaluation_is_exact() {
        let s = SymbolicStructure::new(Sort::Equality, "basic");
        let h = parse_formula("all x1. ex x2. ~x1 = x2 & ~x2 = x3").unwrap();
        let f = SymbolicAssignment::new().with_ind(3, SymAtom::Eq(4));
        let t = evaluate(&s, &f, &h).unwrap();
        assert!(t.value && t.is_exact());

        let q = SymbolicStructure::new(Sort::Ordered, "mostowski-asser");
        let dense = parse_formula(
            "all x1. all x2. A1#2(x1,x2) & ~x1 = x2 -> ex x3. A1#2(x1,x3) & A1#2(x3,x2) & ~x3 = x1 & ~x3 = x2",
        )
        .unwrap();
        let le = OrbitPredicate::define(Sort::Ordered, &[], 2, |t| t[0] <= t[1]).unwrap();
        let f = SymbolicAssignment::new().with_pred(PredVar::new(1, 2), le);
        let t = evaluate(&q, &f, &dense).unwrap();
        assert!(t.value && t.is_exact());
    }

    #[test]
    fn predicate_quantifiers_are_bounded() {
        let s = SymbolicStructure::new(Sort::Equality, "basic");
        let h = parse_formula("ex A1#1. A1#1(x1) & ~A1#1(x2)").unwrap();
        let f = SymbolicAssignment::new().with_ind(1, SymAtom::Eq(0)).with_ind(2, SymAtom::Eq(1));
        let t = evaluate(&s, &f, &h).unwrap();
        assert!(t.value && t.is_exact());
        let never = parse_formula("ex A1#1. A1#1(x1) & ~A1#1(x1)").unwrap();
        let t = evaluate(&s, &f, &never).unwrap();
        assert!(!t.value && !t.is_exact());
    }

    #[test]
    fn ordered_extensions_cover_gap_placements() {
        let frame = vec![SymAtom::rat(0, 1)];
        let exts = fresh_extensions(Sort::Ordered, &frame, 2);
        assert_eq!(exts.len(), 3);
        assert!(exts.iter().all(|e| e.len() == 3 && e.contains(&frame[0])));
        assert_eq!(fresh_extensions(Sort::TwoSorted, &[], 2).len(), 3);
        assert_eq!(fresh_extensions(Sort::Paired, &[], 1)[0].len(), 2);
    }
}
