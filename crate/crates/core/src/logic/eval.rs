//! Backend-independent Henkin evaluation.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::syntax::{BinOp, Binder, Formula, PredVar, Quantifier, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    Exact,
    /// Some predicate quantifier ranged over a bounded candidate set.
    BoundedSearch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruthValue {
    pub value: bool,
    pub completeness: Completeness,
}

impl TruthValue {
    pub fn exact(value: bool) -> Self {
        TruthValue { value, completeness: Completeness::Exact }
    }

    pub fn is_exact(&self) -> bool {
        self.completeness == Completeness::Exact
    }

    fn with(value: bool, exact: bool) -> Self {
        let completeness = if exact { Completeness::Exact } else { Completeness::BoundedSearch };
        TruthValue { value, completeness }
    }
}

/// Values for individual and predicate variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment<I, P> {
    pub individuals: BTreeMap<Var, I>,
    pub predicates: BTreeMap<PredVar, P>,
}

impl<I, P> Default for Assignment<I, P> {
    fn default() -> Self {
        Assignment { individuals: BTreeMap::new(), predicates: BTreeMap::new() }
    }
}

impl<I: Clone, P: Clone> Assignment<I, P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_ind(mut self, v: u32, x: I) -> Self {
        self.individuals.insert(Var(v), x);
        self
    }

    pub fn with_pred(mut self, p: PredVar, alpha: P) -> Self {
        self.predicates.insert(p, alpha);
        self
    }

    /// `f⟨xs/ξ⟩`.
    pub fn updated(&self, xs: &[Var], values: &[I]) -> Self {
        let mut out = self.clone();
        for (v, x) in xs.iter().zip(values) {
            out.individuals.insert(*v, x.clone());
        }
        out
    }

    /// Agrees with `other` on the given variables.
    pub fn agrees_on(&self, other: &Self, inds: &[Var], preds: &[PredVar]) -> bool
    where
        I: PartialEq,
        P: PartialEq,
    {
        inds.iter().all(|v| self.individuals.get(v) == other.individuals.get(v))
            && preds.iter().all(|p| self.predicates.get(p) == other.predicates.get(p))
    }
}

/// Variable bindings during evaluation; later bindings shadow earlier ones.
#[derive(Clone, Debug)]
pub struct Env<I, P> {
    inds: Vec<(Var, I)>,
    preds: Vec<(PredVar, P)>,
}

impl<I: Clone, P: Clone> Env<I, P> {
    pub fn from_assignment(f: &Assignment<I, P>) -> Self {
        Env {
            inds: f.individuals.iter().map(|(v, x)| (*v, x.clone())).collect(),
            preds: f.predicates.iter().map(|(p, a)| (*p, a.clone())).collect(),
        }
    }

    pub fn ind(&self, v: Var) -> Option<&I> {
        self.inds.iter().rev().find(|(w, _)| *w == v).map(|(_, x)| x)
    }

    pub fn pred(&self, p: PredVar) -> Option<&P> {
        self.preds.iter().rev().find(|(q, _)| *q == p).map(|(_, a)| a)
    }

    /// Every bound individual value, shadowed ones included.
    pub fn ind_values(&self) -> impl Iterator<Item = &I> {
        self.inds.iter().map(|(_, x)| x)
    }

    pub fn pred_values(&self) -> impl Iterator<Item = &P> {
        self.preds.iter().map(|(_, a)| a)
    }
}

/// What the evaluator needs from a backend.
pub trait Semantics {
    type Ind: Clone + PartialEq + fmt::Debug;
    type Pred: Clone + fmt::Debug;

    /// Values an individual quantifier must try in this environment.
    fn ind_candidates(&self, env: &Env<Self::Ind, Self::Pred>) -> Result<Vec<Self::Ind>>;

    /// Values a predicate quantifier must try, and whether they are exhaustive.
    fn pred_candidates(&self, arity: usize, env: &Env<Self::Ind, Self::Pred>) -> Result<(Cow<'_, [Self::Pred]>, bool)>;

    fn holds(&self, alpha: &Self::Pred, args: &[Self::Ind]) -> bool;
}

/// Checks that every free variable of `h` has a value in `f`.
pub fn check_assigned<I, P>(f: &Assignment<I, P>, h: &Formula, except: &[Var]) -> Result<()> {
    for v in h.free_individuals() {
        if !except.contains(&v) && !f.individuals.contains_key(&v) {
            return Err(Error::Unassigned(v.to_string()));
        }
    }
    for p in h.free_predicates() {
        if !f.predicates.contains_key(&p) {
            return Err(Error::Unassigned(p.to_string()));
        }
    }
    Ok(())
}

pub fn eval_in<S: Semantics>(sem: &S, env: &mut Env<S::Ind, S::Pred>, h: &Formula) -> Result<TruthValue> {
    match h {
        Formula::Eq(a, b) => {
            let x = env.ind(*a).ok_or_else(|| Error::Unassigned(a.to_string()))?;
            let y = env.ind(*b).ok_or_else(|| Error::Unassigned(b.to_string()))?;
            Ok(TruthValue::exact(x == y))
        }
        Formula::Atom(p, args) => {
            let alpha = env.pred(*p).ok_or_else(|| Error::Unassigned(p.to_string()))?;
            let xs = args
                .iter()
                .map(|v| env.ind(*v).cloned().ok_or_else(|| Error::Unassigned(v.to_string())))
                .collect::<Result<Vec<_>>>()?;
            Ok(TruthValue::exact(sem.holds(alpha, &xs)))
        }
        Formula::Not(a) => {
            let t = eval_in(sem, env, a)?;
            Ok(TruthValue { value: !t.value, ..t })
        }
        Formula::Bin(op, a, b) => {
            // Implication is a disjunction with a negated left side.
            let (neg_left, dominant) = match op {
                BinOp::And => (false, false),
                BinOp::Or => (false, true),
                BinOp::Implies => (true, true),
                BinOp::Iff => {
                    let x = eval_in(sem, env, a)?;
                    let y = eval_in(sem, env, b)?;
                    return Ok(TruthValue::with(x.value == y.value, x.is_exact() && y.is_exact()));
                }
            };
            let mut x = eval_in(sem, env, a)?;
            if neg_left {
                x.value = !x.value;
            }
            if x.value == dominant && x.is_exact() {
                return Ok(x);
            }
            let y = eval_in(sem, env, b)?;
            if y.value == dominant && y.is_exact() {
                return Ok(y);
            }
            let value = if dominant { x.value || y.value } else { x.value && y.value };
            Ok(TruthValue::with(value, x.is_exact() && y.is_exact()))
        }
        Formula::Quant(q, binder, body) => {
            let dominant = *q == Quantifier::Ex;
            let mut found = false;
            let mut exact = true;
            match binder {
                Binder::Ind(v) => {
                    for x in sem.ind_candidates(env)? {
                        env.inds.push((*v, x));
                        let t = eval_in(sem, env, body);
                        env.inds.pop();
                        let t = t?;
                        if t.value == dominant {
                            if t.is_exact() {
                                return Ok(t);
                            }
                            found = true;
                        }
                        exact &= t.is_exact();
                    }
                }
                Binder::Pred(p) => {
                    let (cands, complete) = sem.pred_candidates(p.arity as usize, env)?;
                    exact &= complete;
                    for alpha in cands.iter() {
                        env.preds.push((*p, alpha.clone()));
                        let t = eval_in(sem, env, body);
                        env.preds.pop();
                        let t = t?;
                        if t.value == dominant {
                            if t.is_exact() {
                                return Ok(t);
                            }
                            found = true;
                        }
                        exact &= t.is_exact();
                    }
                }
            }
            let value = if found { dominant } else { !dominant };
            Ok(TruthValue::with(value, exact))
        }
    }
}
