//! Invariant checks over finite permutation models.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::family::{check_normal_filter_axioms, check_normal_ideal_axioms, Family, FilterKind, NormalIdeal};
use crate::harness::gen::{random_assignment, random_element, random_formula, FormulaSpec, FREE_PREDICATES};
use crate::harness::registry::Anchor;
use crate::harness::report::{CheckRecord, CheckStatus};
use crate::logic::audit::comprehension_audit_with;
use crate::logic::{
    act_on_assignment, defined_predicate, evaluate, evaluate_with, EvalOptions, FiniteAssignment, Formula, PredVar, Var,
};
use crate::perm::{Domain, PermGroup, Permutation, PredicateRel};
use crate::structure::{family_admits, level_enumerable, FiniteStructure};
use crate::Exec;

/// Per-job state: the job's random stream, its time budget and executor.
pub struct Ctx {
    pub rng: ChaCha8Rng,
    pub deadline: Deadline,
    pub exec: Exec,
}

#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    start: std::time::Instant,
    limit: Option<std::time::Duration>,
}

impl Deadline {
    pub fn new(budget_ms: Option<u64>) -> Self {
        Deadline { start: std::time::Instant::now(), limit: budget_ms.map(std::time::Duration::from_millis) }
    }

    pub fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.start.elapsed() > l)
    }
}

/// Sampling knobs shared by the finite checks.
#[derive(Clone, Copy, Debug)]
pub struct FiniteKnobs {
    pub depth: usize,
    /// Bound on the product of quantifier ranges along a branch of a formula.
    pub cost: u64,
}

pub fn assignment_json(domain: &Domain, f: &FiniteAssignment) -> Value {
    let mut m = serde_json::Map::new();
    for (v, &x) in &f.individuals {
        m.insert(v.to_string(), json!(domain.label(x)));
    }
    for (p, alpha) in &f.predicates {
        m.insert(p.to_string(), json!(alpha.format(domain)));
    }
    Value::Object(m)
}

/// Records a check error: budget-like errors are not failures.
pub fn settle(mut rec: CheckRecord, outcome: Result<()>) -> CheckRecord {
    if let Err(e) = outcome {
        rec.status = match e {
            Error::Budget(_) | Error::CapExceeded(_) | Error::GroupTooLarge { .. } => CheckStatus::BudgetExhausted,
            _ => CheckStatus::Error,
        };
        rec.note = Some(e.to_string());
    }
    rec
}

/// Runs `step` up to `n` times, stopping at the first failure witness or
/// when the deadline passes.
pub fn sample_loop(
    rec: &mut CheckRecord,
    n: u64,
    deadline: &Deadline,
    mut step: impl FnMut() -> Result<Option<Value>>,
) -> Result<()> {
    while rec.samples < n {
        if deadline.expired() {
            rec.status = CheckStatus::BudgetExhausted;
            rec.note = Some(format!("time budget reached after {} of {n} samples", rec.samples));
            return Ok(());
        }
        let outcome = step()?;
        rec.samples += 1;
        if let Some(w) = outcome {
            rec.status = CheckStatus::Fail;
            rec.witness = Some(w);
            return Ok(());
        }
    }
    Ok(())
}

fn record(anchor: Anchor, s: &FiniteStructure, model: &str) -> CheckRecord {
    CheckRecord::new(anchor, model, s.generalized())
}

fn pred_vars(s: &FiniteStructure) -> Vec<PredVar> {
    FREE_PREDICATES.iter().copied().filter(|p| (p.arity as usize) <= s.arity_cap()).collect()
}

fn defined_vars<R: Rng>(rng: &mut R, s: &FiniteStructure) -> Vec<Var> {
    let n = if s.arity_cap() >= 2 && rng.gen_bool(0.5) { 2 } else { 1 };
    (1..=n).map(Var).collect()
}

pub fn predicate_closure(s: &FiniteStructure, model: &str, exec: Exec) -> CheckRecord {
    let mut rec = record(Anchor::PredicateClosure, s, model);
    let report = s.check_group_closure_with(exec);
    rec.samples = s.levels().iter().filter_map(|l| l.members()).map(|m| m.len() as u64).sum();
    if !report.skipped_levels.is_empty() {
        rec.note = Some(format!("levels {:?} are not materialized", report.skipped_levels));
    }
    if let Some((pi, alpha)) = report.witness {
        rec = rec.fail(json!({
            "pi": pi.to_cycle_string(s.domain()),
            "arity": alpha.arity(),
            "predicate": alpha.format(s.domain()),
        }));
    }
    rec
}

/// `J_n = pred_n(I)` for every enumerable level `n ≤ 2` of a faithful model.
pub fn finite_triviality(s: &FiniteStructure, model: &str) -> CheckRecord {
    let mut rec = record(Anchor::FiniteTriviality, s, model);
    let n = s.domain().len();
    let mut verdicts = Vec::new();
    for level in s.levels().iter().filter(|l| l.arity() <= 2) {
        let Some(members) = level.members() else { continue };
        let arity = level.arity();
        let cells = n.pow(arity as u32);
        rec.samples += 1;
        if members.len() as u64 == 1u64 << cells {
            verdicts.push(format!("J_{arity} = pred_{arity}(I)"));
            continue;
        }
        let missing = (0..1u64 << cells)
            .map(|m| PredicateRel::from_mask(n, arity, m))
            .find(|p| members.binary_search(p).is_err())
            .expect("a proper subset misses some predicate");
        verdicts.push(format!("J_{arity} has {} of {} predicates", members.len(), 1u64 << cells));
        if rec.status == CheckStatus::Pass {
            rec = rec.fail(json!({ "arity": arity, "missing": missing.format(s.domain()) }));
        }
    }
    rec.verdict = Some(verdicts.join(", "));
    rec
}

/// Audits the model's family; induced filters also audit their ideal.
pub fn family_axioms(s: &FiniteStructure, model: &str) -> Vec<CheckRecord> {
    let Some(family) = s.family() else { return Vec::new() };
    let group = s.group();
    let audit_ideal = |ideal: &NormalIdeal| {
        let rec = CheckRecord::new(Anchor::IdealAxioms, model, ideal.generalized);
        match check_normal_ideal_axioms(group, ideal) {
            Ok(r) => axiom_record(rec, r, s.domain()),
            Err(e) => settle(rec, Err(e)),
        }
    };
    match family {
        Family::Ideal(i) => vec![audit_ideal(i)],
        Family::Filter(f) => {
            let rec = CheckRecord::new(Anchor::FilterAxioms, model, f.generalized);
            let mut out = vec![match check_normal_filter_axioms(group, f) {
                Ok(r) => axiom_record(rec, r, s.domain()),
                Err(e) => settle(rec, Err(e)),
            }];
            if let FilterKind::Induced(i) = &f.kind {
                out.push(audit_ideal(i));
            }
            out
        }
    }
}

fn axiom_record(mut rec: CheckRecord, r: crate::family::AxiomReport, domain: &Domain) -> CheckRecord {
    rec.samples = r.verdicts.len() as u64;
    let waived: Vec<String> =
        r.verdicts.iter().filter(|v| v.status == crate::family::Status::Waived).map(|v| v.axiom.to_string()).collect();
    if !waived.is_empty() {
        rec.note = Some(format!("axiom {} waived for a generalized family", waived.join(",")));
    }
    if !r.acceptable() {
        rec = rec.fail(r.to_json(domain));
    }
    rec
}

/// Assignments agreeing on the free variables give equal truth values.
pub fn free_variables(ctx: &mut Ctx, s: &FiniteStructure, model: &str, n: u64, knobs: FiniteKnobs) -> CheckRecord {
    let mut rec = record(Anchor::FreeVariables, s, model);
    let spec = FormulaSpec::for_structure(s, knobs.depth, knobs.cost);
    let preds = pred_vars(s);
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let h = random_formula(rng, &spec);
        let f = random_assignment(rng, s, 3, &preds);
        let mut g = random_assignment(rng, s, 5, &preds);
        for v in h.free_individuals() {
            g.individuals.insert(v, f.individuals[&v]);
        }
        for p in h.free_predicates() {
            g.predicates.insert(p, f.predicates[&p].clone());
        }
        let (a, b) = (evaluate(s, &f, &h)?, evaluate(s, &g, &h)?);
        Ok((a != b).then(|| {
            json!({
                "formula": h.to_string(),
                "f": assignment_json(s.domain(), &f),
                "f_prime": assignment_json(s.domain(), &g),
            })
        }))
    });
    settle(rec, outcome)
}

/// `Σ_{f^π}(H) = Σ_f(H)` for `π ∈ G`.
pub fn truth_invariance(ctx: &mut Ctx, s: &FiniteStructure, model: &str, n: u64, knobs: FiniteKnobs) -> CheckRecord {
    let mut rec = record(Anchor::TruthInvariance, s, model);
    let spec = FormulaSpec::for_structure(s, knobs.depth, knobs.cost);
    let preds = pred_vars(s);
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let h = random_formula(rng, &spec);
        let f = random_assignment(rng, s, 3, &preds);
        let pi = random_element(rng, s.group());
        let fp = act_on_assignment(s, &pi, &f)?;
        let (a, b) = (evaluate(s, &f, &h)?, evaluate(s, &fp, &h)?);
        Ok((a != b).then(|| {
            json!({
                "formula": h.to_string(),
                "f": assignment_json(s.domain(), &f),
                "pi": pi.to_cycle_string(s.domain()),
            })
        }))
    });
    settle(rec, outcome)
}

/// `α_{H,x,f^π} = (α_{H,x,f})^π`, and the image stays in `J_n`.
pub fn definable_equivariance(
    ctx: &mut Ctx,
    s: &FiniteStructure,
    model: &str,
    n: u64,
    knobs: FiniteKnobs,
) -> CheckRecord {
    let mut rec = record(Anchor::DefinableEquivariance, s, model);
    let spec = FormulaSpec::for_structure(s, knobs.depth, knobs.cost);
    let preds = pred_vars(s);
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let h = random_formula(rng, &spec);
        let xs = defined_vars(rng, s);
        let f = random_assignment(rng, s, 3, &preds);
        let pi = random_element(rng, s.group());
        let alpha = defined_predicate(s, &h, &xs, &f)?;
        let moved = defined_predicate(s, &h, &xs, &act_on_assignment(s, &pi, &f)?)?;
        let image = alpha.act(&pi);
        let definable_image = !s.is_member(&alpha)? || s.is_member(&image)?;
        Ok((moved != image || !definable_image).then(|| {
            json!({
                "formula": h.to_string(),
                "defined": xs.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "f": assignment_json(s.domain(), &f),
                "pi": pi.to_cycle_string(s.domain()),
                "defined_under_f_pi": moved.format(s.domain()),
                "image_of_defined": image.format(s.domain()),
            })
        }))
    });
    settle(rec, outcome)
}

/// Quantifying over orbit representatives agrees with full enumeration.
pub fn pruning_soundness(ctx: &mut Ctx, s: &FiniteStructure, model: &str, n: u64, knobs: FiniteKnobs) -> CheckRecord {
    let mut rec = record(Anchor::PruningSoundness, s, model);
    let spec = FormulaSpec::for_structure(s, knobs.depth, knobs.cost);
    let preds = pred_vars(s);
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let h = random_formula(rng, &spec);
        let f = random_assignment(rng, s, 3, &preds);
        let full = evaluate_with(s, &f, &h, EvalOptions { prune: false })?;
        let pruned = evaluate_with(s, &f, &h, EvalOptions { prune: true })?;
        Ok((full != pruned).then(|| json!({ "formula": h.to_string(), "f": assignment_json(s.domain(), &f) })))
    });
    settle(rec, outcome)
}

/// One sampled instance of the stabilizer proposition: the defined predicate,
/// the parameters in order, and the chain `G_1 ⊆ ... ⊆ G_{r+1}`.
struct StabilizerSetup {
    h: Formula,
    xs: Vec<Var>,
    f: FiniteAssignment,
    params: Vec<PredVar>,
    /// `chain[l-1] = G_l = H_l ∩ ... ∩ H_{r+1}` for `l = 1..=r+1`.
    chain: Vec<PermGroup>,
    /// How each `H_k` was chosen.
    choices: Vec<&'static str>,
}

fn the_ideal(family: Option<&Family>) -> Option<&NormalIdeal> {
    match family? {
        Family::Ideal(i) => Some(i),
        Family::Filter(f) => match &f.kind {
            FilterKind::Induced(i) => Some(i),
            _ => None,
        },
    }
}

fn stabilizer_setup<R: Rng>(rng: &mut R, s: &FiniteStructure, spec: &FormulaSpec) -> Result<StabilizerSetup> {
    let group = s.group();
    let h = random_formula(rng, spec);
    let xs = defined_vars(rng, s);
    let f = random_assignment(rng, s, 3, &pred_vars(s));
    let extra: Vec<_> =
        h.free_individuals().into_iter().filter(|v| !xs.contains(v)).map(|v| f.individuals[&v]).collect();
    let params: Vec<PredVar> = h.free_predicates().into_iter().collect();
    let mut subgroups = Vec::with_capacity(params.len() + 1);
    let mut choices = Vec::with_capacity(params.len());
    for p in &params {
        let alpha = &f.predicates[p];
        let sym = group.sym_subgroup(alpha)?;
        // Either the whole symmetry group or the stabilizer of a support inside it.
        let witness = match the_ideal(s.family()) {
            Some(ideal) if rng.gen_bool(0.5) => ideal.support_witness(group, &sym)?,
            _ => None,
        };
        match witness {
            Some(support) => {
                subgroups.push(support.stabilizer(group)?);
                choices.push("support-stabilizer");
            }
            None => {
                subgroups.push(sym);
                choices.push("symmetry-group");
            }
        }
    }
    subgroups.push(group.pointwise_stabilizer(&extra)?);
    let mut chain = subgroups.clone();
    for l in (0..chain.len() - 1).rev() {
        chain[l] = subgroups[l].intersection(&chain[l + 1]);
    }
    Ok(StabilizerSetup { h, xs, f, params, chain, choices })
}

fn setup_json(s: &FiniteStructure, st: &StabilizerSetup) -> Value {
    json!({
        "formula": st.h.to_string(),
        "defined": st.xs.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "f": assignment_json(s.domain(), &st.f),
        "parameters": st.params.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "subgroup_choices": st.choices,
        "g1": st.chain[0].describe(s.domain()),
    })
}

/// `sym_G(α_{H,x,f}) ⊇ G_1`, by element inclusion, and `G_1` lies in the family.
pub fn formula_stabilizer(ctx: &mut Ctx, s: &FiniteStructure, model: &str, n: u64, knobs: FiniteKnobs) -> CheckRecord {
    let mut rec = record(Anchor::FormulaStabilizer, s, model);
    let spec = FormulaSpec::for_structure(s, knobs.depth, knobs.cost);
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let st = stabilizer_setup(rng, s, &spec)?;
        let alpha = defined_predicate(s, &st.h, &st.xs, &st.f)?;
        let g1 = &st.chain[0];
        if let Some(pi) = g1.elements().iter().find(|g| !alpha.is_fixed_by(g)) {
            let mut w = setup_json(s, &st);
            w["pi"] = json!(pi.to_cycle_string(s.domain()));
            w["defined_predicate"] = json!(alpha.format(s.domain()));
            return Ok(Some(w));
        }
        if let Some(family) = s.family() {
            if !family_admits(s.group(), family, g1)? {
                let mut w = setup_json(s, &st);
                w["problem"] = json!("G_1 is not in the family");
                return Ok(Some(w));
            }
        }
        Ok(None)
    });
    settle(rec, outcome)
}

/// Moving the defined variables and `A_1..A_m` by `π ∈ G_{m+1}` preserves
/// truth, for every `m ≤ r` and every such `π`. Samples count instances with
/// at least one predicate parameter.
pub fn parameter_transport(ctx: &mut Ctx, s: &FiniteStructure, model: &str, n: u64, knobs: FiniteKnobs) -> CheckRecord {
    let mut rec = record(Anchor::ParameterTransport, s, model);
    let spec = FormulaSpec::for_structure(s, knobs.depth, knobs.cost);
    if spec.free_preds.is_empty() {
        return rec.with_note("no predicate parameters at this arity cap");
    }
    let Ctx { rng, deadline, .. } = ctx;
    let mut moves = 0u64;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let st = loop {
            let st = stabilizer_setup(rng, s, &spec)?;
            if !st.params.is_empty() {
                break st;
            }
        };
        let base = evaluate(s, &st.f, &st.h)?;
        for m in 1..=st.params.len() {
            for pi in st.chain[m].elements() {
                let moved = transported(&st, m, pi);
                moves += 1;
                if evaluate(s, &moved, &st.h)? != base {
                    let mut w = setup_json(s, &st);
                    w["m"] = json!(m);
                    w["pi"] = json!(pi.to_cycle_string(s.domain()));
                    return Ok(Some(w));
                }
            }
        }
        Ok(None)
    });
    rec.note = rec.note.or(Some(format!("{moves} group elements tried")));
    settle(rec, outcome)
}

fn transported(st: &StabilizerSetup, m: usize, pi: &Permutation) -> FiniteAssignment {
    let mut g = st.f.clone();
    for v in &st.xs {
        let x = st.f.individuals[v];
        g.individuals.insert(*v, pi.apply(x));
    }
    for p in &st.params[..m] {
        g.predicates.insert(*p, st.f.predicates[p].act(pi));
    }
    g
}

/// The comprehension audit at the given depth, for arities 1 and 2 when enumerable.
pub fn comprehension(s: &FiniteStructure, model: &str, depth: usize, exec: Exec) -> CheckRecord {
    let mut rec = record(Anchor::Comprehension, s, model);
    let mut outcome = Ok(());
    for arity in 1..=s.arity_cap().min(2) {
        if !level_enumerable(s.domain().len(), arity, false) {
            continue;
        }
        match comprehension_audit_with(s, depth, arity, crate::logic::audit::DEFAULT_TABLE_BUDGET, exec) {
            Ok(r) => {
                rec.samples += (r.formulas * r.parameter_choices) as u64;
                if r.trivial {
                    rec.note = Some("full structure: every predicate is a member".into());
                }
                if let Some(c) = r.counterexample {
                    rec = rec.fail(json!({
                        "formula": c.formula.to_string(),
                        "defined": c.defined.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "f": assignment_json(s.domain(), &c.assignment),
                        "predicate": c.predicate.format(s.domain()),
                        "arity": arity,
                    }));
                    break;
                }
            }
            Err(e) => {
                outcome = Err(e);
                break;
            }
        }
    }
    settle(rec, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ModelConfig;
    use rand::SeedableRng;

    fn ctx(seed: u64) -> Ctx {
        Ctx { rng: ChaCha8Rng::seed_from_u64(seed), deadline: Deadline::new(None), exec: Exec::Sequential }
    }

    const KNOBS: FiniteKnobs = FiniteKnobs { depth: 3, cost: 1024 };

    #[test]
    fn sampled_checks_pass_on_a_faithful_model() {
        let m = crate::structure::make_catalog_model(
            crate::structure::ModelId::FraenkelZermelo { k: Some(2), pair_permuting: true },
            2,
        )
        .unwrap();
        let s = m.as_finite().unwrap();
        let mut c = ctx(3);
        for rec in [
            free_variables(&mut c, s, "fz", 30, KNOBS),
            truth_invariance(&mut c, s, "fz", 30, KNOBS),
            definable_equivariance(&mut c, s, "fz", 30, KNOBS),
            formula_stabilizer(&mut c, s, "fz", 30, KNOBS),
            parameter_transport(&mut c, s, "fz", 30, KNOBS),
            pruning_soundness(&mut c, s, "fz", 30, KNOBS),
        ] {
            assert_eq!(rec.status, CheckStatus::Pass, "{rec:?}");
            assert_eq!(rec.samples, 30);
        }
    }

    #[test]
    fn stabilizer_membership_needs_the_singletons() {
        // Under the ideal {∅} the stabilizer of a free individual is not admitted.
        let m = ModelConfig::pair_model().instantiate().unwrap();
        let s = m.as_finite().unwrap();
        let mut c = ctx(3);
        for rec in [
            truth_invariance(&mut c, s, "pair", 30, KNOBS),
            definable_equivariance(&mut c, s, "pair", 30, KNOBS),
            parameter_transport(&mut c, s, "pair", 30, KNOBS),
        ] {
            assert_eq!(rec.status, CheckStatus::Pass, "{rec:?}");
        }
        let rec = formula_stabilizer(&mut c, s, "pair", 30, KNOBS);
        assert_eq!(rec.status, CheckStatus::Fail);
        assert!(!rec.is_faithful_failure());
    }

    #[test]
    fn pair_model_comprehension_finds_a_singleton() {
        let m = ModelConfig::pair_model().instantiate().unwrap();
        let s = m.as_finite().unwrap();
        let rec = comprehension(s, "pair", 2, Exec::Sequential);
        assert_eq!(rec.status, CheckStatus::Fail);
        assert!(rec.generalized && !rec.is_faithful_failure());
        let w = rec.witness.unwrap();
        let p = PredicateRel::parse(s.domain(), 1, w["predicate"].as_str().unwrap()).unwrap();
        assert_eq!(p.len(), 1);
        assert!(!s.is_member(&p).unwrap());
    }

    #[test]
    fn planted_structure_fails_closure_with_witness() {
        let m = ModelConfig::planted_non_closed().instantiate().unwrap();
        let s = m.as_finite().unwrap();
        let rec = predicate_closure(s, "planted", Exec::Sequential);
        assert_eq!(rec.status, CheckStatus::Fail);
        let w = rec.witness.unwrap();
        assert_eq!(w["pi"], "(0 1)");
        assert_eq!(w["predicate"], "{0}");
    }

    #[test]
    fn triviality_and_axioms_on_a_catalog_model() {
        let m = ModelConfig::from_json(r#"{"catalog":"fraenkel-zermelo","k":2}"#).unwrap().instantiate().unwrap();
        let s = m.as_finite().unwrap();
        let rec = finite_triviality(s, "fz");
        assert_eq!(rec.status, CheckStatus::Pass, "{rec:?}");
        assert_eq!(rec.verdict.as_deref(), Some("J_1 = pred_1(I), J_2 = pred_2(I)"));
        let audits = family_axioms(s, "fz");
        assert!(audits.iter().all(|r| r.status == CheckStatus::Pass));
        let pair = ModelConfig::pair_model().instantiate().unwrap();
        let rec = finite_triviality(pair.as_finite().unwrap(), "pair");
        assert_eq!(rec.status, CheckStatus::Fail);
    }
}
