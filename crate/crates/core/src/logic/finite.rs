//! Evaluation over finite structures.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::logic::eval::{check_assigned, eval_in, Assignment, Env, Semantics, TruthValue};
use crate::logic::syntax::{Formula, Var};
use crate::perm::{Atom, Permutation, PredicateRel};
use crate::structure::FiniteStructure;

pub type FiniteAssignment = Assignment<Atom, PredicateRel>;

#[derive(Clone, Copy, Debug, Default)]
pub struct EvalOptions {
    /// Quantify over one representative per orbit of the stabilizer of the
    /// current bindings. Only sound for group-closed structures, so it is
    /// ignored for hand-built ones.
    pub prune: bool,
}

pub struct FiniteSemantics<'a> {
    structure: &'a FiniteStructure,
    prune: bool,
}

impl<'a> FiniteSemantics<'a> {
    pub fn new(structure: &'a FiniteStructure, opts: EvalOptions) -> Self {
        FiniteSemantics { structure, prune: opts.prune && structure.is_built() }
    }

    fn env_stabilizer(&self, env: &Env<Atom, PredicateRel>) -> Vec<&'a Permutation> {
        let inds: Vec<Atom> = env.ind_values().copied().collect();
        let preds: Vec<&PredicateRel> = env.pred_values().collect();
        self.structure
            .group()
            .elements()
            .iter()
            .filter(|g| inds.iter().all(|&x| g.fixes(x)) && preds.iter().all(|p| p.is_fixed_by(g)))
            .collect()
    }
}

impl Semantics for FiniteSemantics<'_> {
    type Ind = Atom;
    type Pred = PredicateRel;

    fn ind_candidates(&self, env: &Env<Atom, PredicateRel>) -> Result<Vec<Atom>> {
        let all = self.structure.individuals();
        if !self.prune {
            return Ok(all.collect());
        }
        let stab = self.env_stabilizer(env);
        Ok(all.filter(|&x| stab.iter().all(|g| g.apply(x) >= x)).collect())
    }

    fn pred_candidates(&self, arity: usize, env: &Env<Atom, PredicateRel>) -> Result<(Cow<'_, [PredicateRel]>, bool)> {
        let members = self.structure.members(arity)?;
        if !self.prune {
            return Ok((Cow::Borrowed(members), true));
        }
        let stab = self.env_stabilizer(env);
        if stab.len() == 1 {
            return Ok((Cow::Borrowed(members), true));
        }
        let reps = members.iter().filter(|a| stab.iter().all(|g| a.act(g) >= **a)).cloned().collect();
        Ok((Cow::Owned(reps), true))
    }

    fn holds(&self, alpha: &PredicateRel, args: &[Atom]) -> bool {
        alpha.contains(args)
    }
}

fn validate(s: &FiniteStructure, f: &FiniteAssignment) -> Result<()> {
    let n = s.domain().len();
    for (v, &x) in &f.individuals {
        if x as usize >= n {
            return Err(Error::NotAMember(v.to_string()));
        }
    }
    for (p, alpha) in &f.predicates {
        if alpha.arity() != p.arity as usize {
            return Err(Error::ArityClash { index: p.index, arity: p.arity, found: alpha.arity() });
        }
        if !s.is_member(alpha)? {
            return Err(Error::NotAMember(p.to_string()));
        }
    }
    Ok(())
}

/// `Σ_f(H)`.
pub fn evaluate(s: &FiniteStructure, f: &FiniteAssignment, h: &Formula) -> Result<TruthValue> {
    evaluate_with(s, f, h, EvalOptions::default())
}

pub fn evaluate_with(s: &FiniteStructure, f: &FiniteAssignment, h: &Formula, opts: EvalOptions) -> Result<TruthValue> {
    validate(s, f)?;
    check_assigned(f, h, &[])?;
    if let Some(a) = h.max_quantified_arity() {
        s.level(a as usize)?;
    }
    let sem = FiniteSemantics::new(s, opts);
    eval_in(&sem, &mut Env::from_assignment(f), h)
}

/// `α_{Σ,H,xs,f} = {ξ | Σ_{f⟨xs/ξ⟩}(H)}`.
pub fn defined_predicate(s: &FiniteStructure, h: &Formula, xs: &[Var], f: &FiniteAssignment) -> Result<PredicateRel> {
    defined_predicate_with(s, h, xs, f, EvalOptions::default(), Exec::Sequential)
}

pub fn defined_predicate_with(
    s: &FiniteStructure,
    h: &Formula,
    xs: &[Var],
    f: &FiniteAssignment,
    opts: EvalOptions,
    exec: Exec,
) -> Result<PredicateRel> {
    if xs.is_empty() {
        return Err(Error::ArityOutOfRange { arity: 0, cap: usize::MAX });
    }
    let mut sorted = xs.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != xs.len() {
        return Err(Error::DuplicateVariables);
    }
    validate(s, f)?;
    check_assigned(f, h, xs)?;
    let size = s.domain().len();
    let mut alpha = PredicateRel::empty(size, xs.len());
    let sem = FiniteSemantics::new(s, opts);
    let rows: Vec<Result<bool>> = exec.map_range(alpha.cells(), |c| {
        let xi = alpha.decode(c);
        let mut env = Env::from_assignment(&f.updated(xs, &xi));
        eval_in(&sem, &mut env, h).map(|t| t.value)
    });
    for (c, r) in rows.into_iter().enumerate() {
        if r? {
            alpha.set_cell(c);
        }
    }
    Ok(alpha)
}

/// `f^π`: individuals mapped by π, predicates by `α ↦ α^π`.
pub fn act_on_assignment(s: &FiniteStructure, pi: &Permutation, f: &FiniteAssignment) -> Result<FiniteAssignment> {
    if pi.degree() != s.domain().len() {
        return Err(Error::DomainMismatch { expected: s.domain().len(), found: pi.degree() });
    }
    let mut out = FiniteAssignment::new();
    for (v, &x) in &f.individuals {
        out.individuals.insert(*v, pi.apply(x));
    }
    for (p, alpha) in &f.predicates {
        let image = alpha.act(pi);
        if !s.is_member(&image)? {
            return Err(Error::ClosureViolation(format!(
                "{} moves {} = {} outside J_{}",
                pi.to_cycle_string(s.domain()),
                p,
                alpha.format(s.domain()),
                p.arity
            )));
        }
        out.predicates.insert(*p, image);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Family, NormalIdeal};
    use crate::logic::syntax::{parse_formula, PredVar};
    use crate::perm::{Domain, PermGroup};
    use crate::structure::build_model;

    fn standard(n: usize) -> FiniteStructure {
        build_model(&Domain::range(n), &PermGroup::trivial(n), &Family::Ideal(NormalIdeal::finite_supports()), 2)
            .unwrap()
    }

    fn pair_model() -> FiniteStructure {
        let g = PermGroup::from_cycle_strings(&Domain::range(4), &["(0 1)", "(2 3)"]).unwrap();
        build_model(&Domain::range(4), &g, &Family::Ideal(NormalIdeal::empty_only()), 2).unwrap()
    }

    fn unary(n: usize, xs: &[Atom]) -> PredicateRel {
        PredicateRel::from_tuples(n, 1, xs.iter().map(|&x| [x])).unwrap()
    }

    #[test]
    fn separation_examples() {
        let h = parse_formula("ex A1#1. A1#1(x1) & ~A1#1(x2)").unwrap();
        let f = FiniteAssignment::new().with_ind(1, 0).with_ind(2, 1);
        assert!(evaluate(&standard(2), &f, &h).unwrap().value);
        let t = evaluate(&pair_model(), &f, &h).unwrap();
        assert!(!t.value && t.is_exact());
        let refl = parse_formula("x1 = x1").unwrap();
        assert!(evaluate(&pair_model(), &f, &refl).unwrap().value);
    }

    #[test]
    fn unassigned_and_non_members_are_errors() {
        let h = parse_formula("x1 = x2").unwrap();
        let f = FiniteAssignment::new().with_ind(1, 0);
        assert_eq!(evaluate(&standard(2), &f, &h), Err(Error::Unassigned("x2".into())));
        let g = parse_formula("A1#1(x1)").unwrap();
        let f = FiniteAssignment::new().with_ind(1, 0).with_pred(PredVar::new(1, 1), unary(4, &[0]));
        assert_eq!(evaluate(&pair_model(), &f, &g), Err(Error::NotAMember("A1#1".into())));
    }

    #[test]
    fn defined_predicate_examples() {
        let s = standard(3);
        let diag =
            defined_predicate(&s, &parse_formula("x1 = x2").unwrap(), &[Var(1), Var(2)], &FiniteAssignment::new())
                .unwrap();
        assert_eq!(diag.tuples(), vec![vec![0, 0], vec![1, 1], vec![2, 2]]);
        let alpha = unary(3, &[0, 2]);
        let f = FiniteAssignment::new().with_pred(PredVar::new(1, 1), alpha.clone());
        let same = defined_predicate(&s, &parse_formula("A1#1(x1)").unwrap(), &[Var(1)], &f).unwrap();
        assert_eq!(same, alpha);
        let comp = defined_predicate(&s, &parse_formula("~A1#1(x1)").unwrap(), &[Var(1)], &f).unwrap();
        assert_eq!(comp, alpha.complement());
        assert_eq!(
            defined_predicate(&s, &parse_formula("x1 = x1").unwrap(), &[Var(1), Var(1)], &f),
            Err(Error::DuplicateVariables)
        );
    }

    #[test]
    fn assignment_action_examples() {
        let s = standard(3);
        let pi = Permutation::from_cycles(3, &[vec![0, 1]]).unwrap();
        let f = FiniteAssignment::new().with_ind(1, 0).with_pred(PredVar::new(1, 1), unary(3, &[0]));
        let g = act_on_assignment(&s, &pi, &f).unwrap();
        assert_eq!(g.individuals[&Var(1)], 1);
        assert_eq!(g.predicates[&PredVar::new(1, 1)], unary(3, &[1]));
        assert_eq!(act_on_assignment(&s, &Permutation::identity(3), &f).unwrap(), f);
    }

    #[test]
    fn hand_built_structures_report_closure_violations() {
        let s =
            FiniteStructure::hand_built(Domain::range(2), PermGroup::symmetric(2).unwrap(), vec![vec![unary(2, &[0])]])
                .unwrap();
        let f = FiniteAssignment::new().with_pred(PredVar::new(1, 1), unary(2, &[0]));
        let pi = Permutation::from_cycles(2, &[vec![0, 1]]).unwrap();
        assert!(matches!(act_on_assignment(&s, &pi, &f), Err(Error::ClosureViolation(_))));
    }

    #[test]
    fn pruning_matches_full_enumeration() {
        let s = pair_model();
        let f = FiniteAssignment::new().with_ind(1, 0).with_ind(2, 2);
        for text in [
            "ex A1#1. A1#1(x1) & ~A1#1(x2)",
            "all x3. ex A1#2. A1#2(x1,x3) & ~A1#2(x3,x2)",
            "ex x3. ~x3 = x1 & all A1#1. A1#1(x3) -> A1#1(x1)",
        ] {
            let h = parse_formula(text).unwrap();
            let plain = evaluate(&s, &f, &h).unwrap();
            let pruned = evaluate_with(&s, &f, &h, EvalOptions { prune: true }).unwrap();
            assert_eq!(plain, pruned, "{text}");
        }
    }
}
