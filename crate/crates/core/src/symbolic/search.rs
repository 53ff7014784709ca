//! Bounded-support witness search for predicate existentials.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::logic::eval::{check_assigned, eval_in, Env};
use crate::logic::syntax::{Binder, Formula, Quantifier};
use crate::symbolic::atom::SymAtom;
use crate::symbolic::eval::{
    fresh_extensions, subset_candidate, SymbolicAssignment, SymbolicSemantics, SymbolicStructure,
};
use crate::symbolic::predicate::OrbitPredicate;
use crate::symbolic::refute::SwapTrace;
use crate::symbolic::types::orbits_in_frame;

/// Most new atoms a bounded search may add to the parameters' support.
pub const MAX_FRESH_ATOMS: usize = 3;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    /// Exact: the witness satisfies the body.
    HoldsWithWitness { witness: OrbitPredicate, support: Vec<SymAtom>, candidates_tried: u64 },
    /// Exact: every candidate is refuted by the replayable trace.
    RefutedWithArgument { trace: SwapTrace },
    /// No witness among the bounded candidates; says nothing beyond the bound.
    InconclusiveBounded { candidates: u64, fresh_atoms: usize },
    /// The swap argument has nothing to swap in this sort.
    NoSwapWitness { reason: String },
}

impl Verdict {
    pub fn status(&self) -> &'static str {
        match self {
            Verdict::HoldsWithWitness { .. } => "holds-with-witness",
            Verdict::RefutedWithArgument { .. } => "refuted-with-argument",
            Verdict::InconclusiveBounded { .. } => "inconclusive-bounded",
            Verdict::NoSwapWitness { .. } => "no-swap-witness",
        }
    }
}

/// Searches `∃A H′` over predicates supported by the assignment's atoms plus
/// `fresh_atoms` new ones, in binary counting order over orbit types.
pub fn bounded_witness_search(
    s: &SymbolicStructure,
    h: &Formula,
    f: &SymbolicAssignment,
    fresh_atoms: usize,
    exec: Exec,
) -> Result<Verdict> {
    let Formula::Quant(Quantifier::Ex, Binder::Pred(var), body) = h else {
        return Err(Error::Config("bounded search needs a formula of the form `ex A. ...`".into()));
    };
    if fresh_atoms > MAX_FRESH_ATOMS {
        return Err(Error::CapExceeded(format!("at most {MAX_FRESH_ATOMS} fresh atoms")));
    }
    let arity = var.arity as usize;
    if arity == 0 || arity > s.arity_cap() {
        return Err(Error::ArityOutOfRange { arity, cap: s.arity_cap() });
    }
    s.validate(f)?;
    check_assigned(f, h, &[])?;
    let sort = s.sort();
    let env = Env::from_assignment(f);
    let frame = crate::symbolic::eval::env_frame(sort, &env);
    let plans: Vec<(Vec<SymAtom>, Vec<_>)> = fresh_extensions(sort, &frame, fresh_atoms)
        .into_iter()
        .map(|ext| {
            let types = orbits_in_frame(sort, &ext, arity);
            (ext, types)
        })
        .collect();
    let mut total: u64 = 0;
    for (ext, types) in &plans {
        total = 1u64
            .checked_shl(types.len() as u32)
            .and_then(|c| total.checked_add(c))
            .filter(|&t| t <= s.budget())
            .ok_or_else(|| {
                Error::Budget(format!(
                    "{} orbit types over {} atoms exceed the candidate budget",
                    types.len(),
                    ext.len()
                ))
            })?;
    }

    let sem = SymbolicSemantics::new(s);
    let satisfies = |cand: &OrbitPredicate| -> Result<bool> {
        let mut env = Env::from_assignment(&f.clone().with_pred(*var, cand.clone()));
        let t = eval_in(&sem, &mut env, body)?;
        Ok(t.value && t.is_exact())
    };
    let mut tried: u64 = 0;
    for (ext, types) in &plans {
        let count = 1u64 << types.len();
        let hit = exec.find_first_index(count, |mask| {
            let cand = subset_candidate(sort, arity, ext, types, mask);
            match satisfies(&cand) {
                Ok(true) => Some(Ok((mask, cand))),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            }
        });
        match hit {
            Some(Ok((mask, cand))) => {
                let witness = cand.canonical();
                // Soundness: the reported witness is re-checked in canonical form.
                if !satisfies(&witness)? {
                    return Err(Error::Config(format!("witness {witness} failed its re-check")));
                }
                let support = witness.minimal_support();
                return Ok(Verdict::HoldsWithWitness { witness, support, candidates_tried: tried + mask + 1 });
            }
            Some(Err(e)) => return Err(e),
            None => tried += count,
        }
    }
    Ok(Verdict::InconclusiveBounded { candidates: total, fresh_atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::atom::Sort;
    use crate::symbolic::refute::linear_order_formula;

    #[test]
    fn ordered_atoms_carry_a_linear_order() {
        let s = SymbolicStructure::new(Sort::Ordered, "mostowski-asser");
        let v = bounded_witness_search(&s, &linear_order_formula(), &SymbolicAssignment::new(), 0, Exec::Sequential)
            .unwrap();
        let Verdict::HoldsWithWitness { witness, support, .. } = v else { panic!("{v:?}") };
        assert!(support.is_empty());
        let le = OrbitPredicate::define(Sort::Ordered, &[], 2, |t| t[0] <= t[1]).unwrap();
        assert_eq!(witness, le);
    }

    #[test]
    fn equality_atoms_have_no_bounded_linear_order() {
        let s = SymbolicStructure::new(Sort::Equality, "basic");
        for exec in [Exec::Sequential, Exec::Parallel] {
            let v = bounded_witness_search(&s, &linear_order_formula(), &SymbolicAssignment::new(), 2, exec).unwrap();
            assert!(matches!(v, Verdict::InconclusiveBounded { fresh_atoms: 2, .. }), "{v:?}");
        }
    }

    #[test]
    fn separating_set_is_found() {
        let s = SymbolicStructure::new(Sort::Equality, "basic");
        let h = crate::logic::syntax::parse_formula("ex A1#1. A1#1(x1) & ~A1#1(x2)").unwrap();
        let f = SymbolicAssignment::new().with_ind(1, SymAtom::Eq(0)).with_ind(2, SymAtom::Eq(1));
        let v = bounded_witness_search(&s, &h, &f, 0, Exec::Parallel).unwrap();
        let Verdict::HoldsWithWitness { witness, .. } = v else { panic!("{v:?}") };
        let x_is_y1 = OrbitPredicate::define(Sort::Equality, &[SymAtom::Eq(0)], 1, |t| t[0] == SymAtom::Eq(0)).unwrap();
        assert_eq!(witness, x_is_y1);
        assert!(bounded_witness_search(&s, &h, &f, 4, Exec::Sequential).is_err());
    }
}
