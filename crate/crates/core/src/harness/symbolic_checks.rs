//! Invariant checks over the orbit-finite models, with finite oracles.

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::Result;
use crate::harness::finite_checks::{sample_loop, settle, Ctx};
use crate::harness::gen::{random_formula, FormulaSpec};
use crate::harness::registry::Anchor;
use crate::harness::report::{CheckRecord, CheckStatus};
use crate::logic::{FiniteAssignment, PredVar};
use crate::perm::{Atom, Domain, Permutation};
use crate::structure::FiniteStructure;
use crate::symbolic::sample::{random_element_on, random_monotone, random_predicate, random_support};
use crate::symbolic::types::gap_point;
use crate::symbolic::{
    bounded_witness_search, evaluate, linear_order_formula, orbits_over, swap_refute, symbolic_act, truncation,
    GroupElement, OrbitPredicate, Sort, SymAtom, SymbolicAssignment, SymbolicStructure, Template, Verdict,
};
use crate::Exec;

/// Largest sample materialized by the bridge checks.
pub const MAX_TRUNCATION: usize = 6;

fn record(anchor: Anchor, s: &SymbolicStructure) -> CheckRecord {
    CheckRecord::new(anchor, s.name(), false)
}

fn atoms_json(atoms: &[SymAtom]) -> Value {
    json!(atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>())
}

fn predicate_json(p: &OrbitPredicate) -> Value {
    serde_json::to_value(p).expect("predicates serialize")
}

/// All tuples of the given arity over `atoms`.
fn tuples(atoms: &[SymAtom], arity: usize) -> Vec<Vec<SymAtom>> {
    itertools::Itertools::multi_cartesian_product((0..arity).map(|_| atoms.iter().copied())).collect()
}

/// `frame` plus four new atoms, spread over the regions or gaps.
fn universe(sort: Sort, frame: &[SymAtom]) -> Vec<SymAtom> {
    let extra = if sort == Sort::Ordered { frame.len() + 1 } else { 4 };
    truncation(sort, frame, frame.len() + extra)
}

/// A random element that may move the frame onto new atoms.
fn moving_element<R: Rng>(rng: &mut R, sort: Sort, frame: &[SymAtom]) -> Result<GroupElement> {
    match sort {
        Sort::Ordered => Ok(random_monotone(rng)),
        _ => random_element_on(rng, sort, &universe(sort, frame)),
    }
}

/// A random element fixing `fixed` pointwise.
fn fixing_element<R: Rng>(rng: &mut R, sort: Sort, fixed: &[SymAtom], universe: &[SymAtom]) -> Result<GroupElement> {
    if sort == Sort::Ordered {
        // Fix the named points; move one point inside each gap.
        let mut points: Vec<(_, _)> = fixed.iter().map(|a| (rat(a), rat(a))).collect();
        for g in 0..=fixed.len() {
            let x = gap_point(fixed, g, rng.gen_range(0..3), 3);
            let y = gap_point(fixed, g, rng.gen_range(0..3), 3);
            points.push((x, y));
        }
        points.sort();
        return GroupElement::monotone(points);
    }
    let free: Vec<SymAtom> = universe.iter().copied().filter(|a| !fixed.contains(a)).collect();
    random_element_on(rng, sort, &free)
}

fn rat(a: &SymAtom) -> crate::symbolic::Rational {
    match a {
        SymAtom::Rat(q) => *q,
        _ => unreachable!("ordered atoms"),
    }
}

/// Whether some tuple over `atoms` and their images tells `p` and `p^π` apart.
fn moves(pi: &GroupElement, p: &OrbitPredicate, atoms: &[SymAtom]) -> bool {
    let inv = pi.inverse();
    let mut wide: Vec<SymAtom> = atoms.to_vec();
    wide.extend(pi.apply_tuple(atoms));
    wide.extend(inv.apply_tuple(atoms));
    wide.sort();
    wide.dedup();
    tuples(&wide, p.arity()).iter().any(|t| p.contains(&pi.apply_tuple(t)) != p.contains(t))
}

/// Group elements fixing every support atom but `a`, each moving `a`.
fn drop_candidates(sort: Sort, support: &[SymAtom], a: SymAtom, universe: &[SymAtom]) -> Result<Vec<GroupElement>> {
    let frame = sort.frame(support);
    let fresh = |same: &dyn Fn(&SymAtom) -> bool| universe.iter().copied().find(|b| !frame.contains(b) && same(b));
    Ok(match (sort, a) {
        (Sort::Equality, _) => {
            fresh(&|_| true).map(|b| GroupElement::transposition(sort, a, b)).into_iter().collect::<Result<_>>()?
        }
        (Sort::TwoSorted, SymAtom::Half(h, _)) => fresh(&|b| matches!(b, SymAtom::Half(k, _) if *k == h))
            .map(|b| GroupElement::transposition(sort, a, b))
            .into_iter()
            .collect::<Result<_>>()?,
        (Sort::Paired, SymAtom::Pair(..)) => {
            let mut out = vec![GroupElement::transposition(sort, a, a.mate().expect("paired atoms have mates"))?];
            if let Some(b) = fresh(&|b| matches!(b, SymAtom::Pair(_, 0))) {
                out.push(GroupElement::transposition(sort, a, b)?);
            }
            out
        }
        (Sort::Ordered, SymAtom::Rat(q)) => {
            let i = frame.iter().position(|b| *b == a).expect("a is in the support");
            let half = crate::symbolic::Rational::new(1, 2);
            // Slide `a` halfway towards each neighbour, fixing the rest.
            let left = if i > 0 { (rat(&frame[i - 1]) + q) * half } else { q - 1 };
            let right = frame.get(i + 1).map_or(q + 1, |b| (rat(b) + q) * half);
            [left, right]
                .into_iter()
                .map(|target| {
                    let mut points: Vec<_> = frame.iter().filter(|b| **b != a).map(|b| (rat(b), rat(b))).collect();
                    points.push((q, target));
                    points.sort();
                    GroupElement::monotone(points)
                })
                .collect::<Result<_>>()?
        }
        _ => Vec::new(),
    })
}

/// A random unary or binary predicate over up to `k` support atoms.
fn random_pred<R: Rng>(rng: &mut R, sort: Sort, k: usize) -> Result<OrbitPredicate> {
    let arity = rng.gen_range(1..=2);
    random_predicate(rng, sort, arity, k)
}

/// The image of an orbit predicate is supported by the image frame and has
/// the image relation; acting back recovers the predicate.
pub fn symbolic_closure(ctx: &mut Ctx, s: &SymbolicStructure, n: u64) -> CheckRecord {
    let mut rec = record(Anchor::SymbolicClosure, s);
    let sort = s.sort();
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let p = random_pred(rng, sort, 3)?;
        let arity = p.arity();
        let pi = moving_element(rng, sort, p.frame())?;
        let q = symbolic_act(&pi, &p)?;
        let image_frame = pi.apply_tuple(p.frame());
        let u = universe(sort, &sort.frame(p.frame().iter().chain(&image_frame)));
        let relation_ok = tuples(&u, arity).iter().all(|t| q.contains(&pi.apply_tuple(t)) == p.contains(t));
        let back = symbolic_act(&pi.inverse(), &q)?;
        let ok = relation_ok && q.is_supported_by(&image_frame) && back.same_relation(&p);
        Ok((!ok).then(|| json!({ "predicate": predicate_json(&p), "pi": pi.to_string() })))
    });
    settle(rec, outcome)
}

/// `minimal_support(p^π)` and `π(minimal_support(p))` name the same atoms.
pub fn support_conjugation(ctx: &mut Ctx, s: &SymbolicStructure, n: u64) -> CheckRecord {
    let mut rec = record(Anchor::SupportConjugation, s);
    let sort = s.sort();
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let p = random_pred(rng, sort, 3)?;
        let pi = moving_element(rng, sort, p.frame())?;
        let q = symbolic_act(&pi, &p)?;
        let moved = sort.frame(&pi.apply_tuple(&p.minimal_support()));
        let direct = sort.frame(&q.minimal_support());
        Ok((moved != direct).then(|| {
            json!({
                "predicate": predicate_json(&p),
                "pi": pi.to_string(),
                "image_of_support": atoms_json(&moved),
                "support_of_image": atoms_json(&direct),
            })
        }))
    });
    settle(rec, outcome)
}

/// The least support supports `p` (random stabilizer elements fix it) and
/// every atom of it is needed (an element fixing the rest moves `p`).
pub fn support_minimality(ctx: &mut Ctx, s: &SymbolicStructure, n: u64) -> CheckRecord {
    let mut rec = record(Anchor::SupportMinimality, s);
    let sort = s.sort();
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let p = random_pred(rng, sort, 3)?;
        let support = p.minimal_support();
        let frame = sort.frame(&support);
        let u = universe(sort, &sort.frame(p.frame().iter().chain(&frame)));
        for _ in 0..3 {
            let pi = fixing_element(rng, sort, &frame, &u)?;
            if moves(&pi, &p, &u) {
                return Ok(Some(json!({
                    "predicate": predicate_json(&p),
                    "support": atoms_json(&support),
                    "problem": "an element fixing the support moves the predicate",
                    "pi": pi.to_string(),
                })));
            }
        }
        for &a in &support {
            let candidates = drop_candidates(sort, &support, a, &u)?;
            if !candidates.iter().any(|pi| moves(pi, &p, &u)) {
                return Ok(Some(json!({
                    "predicate": predicate_json(&p),
                    "support": atoms_json(&support),
                    "problem": format!("no element fixing the rest of the support and moving {a} changes the predicate"),
                })));
            }
        }
        Ok(None)
    });
    settle(rec, outcome)
}

/// Materializing on a sample commutes with the action. Discrete sorts permute
/// the sample; ordered samples move along with an order automorphism.
pub fn bridge_commutation(ctx: &mut Ctx, s: &SymbolicStructure, n: u64) -> CheckRecord {
    let mut rec = record(Anchor::BridgeCommutation, s);
    let sort = s.sort();
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let p = random_pred(rng, sort, 2)?;
        let frame = p.frame().to_vec();
        let step = if sort == Sort::Paired { 2 } else { 1 };
        let sizes: Vec<usize> =
            (frame.len().max(1)..=MAX_TRUNCATION).filter(|m| (m - frame.len()) % step == 0).collect();
        let m = *sizes.choose(rng).expect("frames have at most four atoms");
        let sample = truncation(sort, &frame, m);
        let (lhs, rhs, pi) = if sort == Sort::Ordered {
            let pi = random_monotone(rng);
            let moved = pi.apply_tuple(&sample);
            (symbolic_act(&pi, &p)?.to_finite_with(&moved)?, p.to_finite_with(&sample)?, pi)
        } else {
            let pi = random_element_on(rng, sort, &sample)?;
            let hat: Vec<Atom> = sample
                .iter()
                .map(|a| sample.iter().position(|b| *b == pi.apply(*a)).expect("π permutes the sample") as Atom)
                .collect();
            let hat = Permutation::from_images(hat)?;
            (symbolic_act(&pi, &p)?.to_finite_with(&sample)?, p.to_finite_with(&sample)?.act(&hat), pi)
        };
        Ok((lhs != rhs).then(|| {
            json!({
                "predicate": predicate_json(&p),
                "sample": atoms_json(&sample),
                "pi": pi.to_string(),
            })
        }))
    });
    settle(rec, outcome)
}

/// Fresh atoms a sample needs beyond `frame` for quantifier depth `d`.
fn saturation(sort: Sort, frame_len: usize, d: u32) -> usize {
    match sort {
        Sort::Equality => d as usize,
        Sort::TwoSorted | Sort::Paired => 2 * d as usize,
        Sort::Ordered => (frame_len + 1) * ((1usize << d) - 1),
    }
}

/// First-order truth over the atoms equals truth over a sample that
/// realizes every type `d` quantifiers can reach.
pub fn first_order_agreement(ctx: &mut Ctx, s: &SymbolicStructure, n: u64) -> CheckRecord {
    let mut rec = record(Anchor::FirstOrderAgreement, s);
    let sort = s.sort();
    let Ctx { rng, deadline, .. } = ctx;
    let outcome = sample_loop(&mut rec, n, deadline, || {
        let base = loop {
            let k = rng.gen_range(1..=2);
            let b = random_support(rng, sort, k);
            if sort.frame(&b).len() < MAX_TRUNCATION {
                break b;
            }
        };
        let frame = sort.frame(&base);
        let d_max =
            (0..=3u32).rev().find(|&d| frame.len() + saturation(sort, frame.len(), d) <= MAX_TRUNCATION).unwrap_or(0);
        let d = if rng.gen_bool(0.7) { d_max } else { rng.gen_range(0..=d_max) };
        let sample = truncation(sort, &frame, frame.len() + saturation(sort, frame.len(), d));
        let pick_types = |rng: &mut _, arity| -> Result<OrbitPredicate> {
            let types: Vec<_> =
                orbits_over(sort, &base, arity)?.into_iter().filter(|_| Rng::gen_bool(rng, 0.5)).collect();
            OrbitPredicate::from_types(sort, &base, arity, types)
        };
        let p1 = pick_types(rng, 1)?;
        let p2 = pick_types(rng, 2)?;
        let mut f = SymbolicAssignment::new()
            .with_pred(PredVar::new(1, 1), p1.clone())
            .with_pred(PredVar::new(2, 2), p2.clone());
        let mut g = FiniteAssignment::new()
            .with_pred(PredVar::new(1, 1), p1.to_finite_with(&sample)?)
            .with_pred(PredVar::new(2, 2), p2.to_finite_with(&sample)?);
        for v in 1..=3 {
            let x = *frame.choose(rng).expect("non-empty frame");
            f = f.with_ind(v, x);
            g = g.with_ind(v, sample.iter().position(|b| *b == x).expect("the sample contains the frame") as Atom);
        }
        let h = random_formula(rng, &FormulaSpec::first_order(3, d as usize));
        let symbolic = evaluate(s, &f, &h)?;
        let finite_model = FiniteStructure::full_unmaterialized(Domain::range(sample.len()), 2);
        let finite = crate::logic::evaluate(&finite_model, &g, &h)?;
        let ok = symbolic.is_exact() && symbolic.value == finite.value;
        Ok((!ok).then(|| {
            json!({
                "formula": h.to_string(),
                "sample": atoms_json(&sample),
                "A1#1": predicate_json(&p1),
                "A2#2": predicate_json(&p2),
                "individuals": f.individuals.iter().map(|(v, a)| (v.to_string(), a.to_string())).collect::<std::collections::BTreeMap<_, _>>(),
                "symbolic": symbolic.value,
                "finite": finite.value,
            })
        }))
    });
    settle(rec, outcome)
}

/// Runs the swap refuter and replays its trace.
pub fn refutation(s: &SymbolicStructure, template: Template) -> CheckRecord {
    let anchor = match template {
        Template::LinearOrder => Anchor::NoLinearOrder,
        Template::ComparabilityInjection => Anchor::NoComparability,
    };
    let mut rec = record(anchor, s);
    rec.claim = Some(format!("{} fails", template.name()));
    let outcome = swap_refute(s, template).map(|v| {
        rec.verdict = Some(v.status().to_string());
        match v {
            Verdict::RefutedWithArgument { trace } => {
                rec.samples = trace.instances.len() as u64;
                let replay = trace.replay();
                rec.witness = Some(json!({ "trace": trace }));
                if let Err(e) = replay {
                    rec.status = CheckStatus::Fail;
                    rec.note = Some(format!("trace replay failed: {e}"));
                }
            }
            other => {
                rec.status = CheckStatus::Fail;
                rec.witness = Some(serde_json::to_value(&other).expect("verdicts serialize"));
            }
        }
    });
    settle(rec, outcome)
}

/// Searches for a linear order with no new atoms and checks the witness
/// against the built-in order.
pub fn linear_order_witness(s: &SymbolicStructure, exec: Exec) -> CheckRecord {
    let mut rec = record(Anchor::LinearOrderWitness, s);
    rec.claim = Some(format!("{} holds", Template::LinearOrder.name()));
    let outcome =
        bounded_witness_search(s, &linear_order_formula(), &SymbolicAssignment::new(), 0, exec).and_then(|v| {
            rec.verdict = Some(v.status().to_string());
            match &v {
                Verdict::HoldsWithWitness { witness, support, candidates_tried } => {
                    rec.samples = *candidates_tried;
                    let le = OrbitPredicate::define(s.sort(), &[], 2, |t| t[0] <= t[1])?;
                    if !support.is_empty() || !witness.same_relation(&le) {
                        rec.status = CheckStatus::Fail;
                        rec.note = Some("the witness is not the built-in order with empty support".into());
                    }
                }
                _ => rec.status = CheckStatus::Fail,
            }
            rec.witness = Some(serde_json::to_value(&v).expect("verdicts serialize"));
            Ok(())
        });
    settle(rec, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::finite_checks::Deadline;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(seed: u64) -> Ctx {
        Ctx { rng: ChaCha8Rng::seed_from_u64(seed), deadline: Deadline::new(None), exec: Exec::Sequential }
    }

    #[test]
    fn sampled_symbolic_checks_pass_for_every_sort() {
        for sort in Sort::ALL {
            let s = SymbolicStructure::new(sort, sort.name());
            let mut c = ctx(11);
            for rec in [
                symbolic_closure(&mut c, &s, 25),
                support_conjugation(&mut c, &s, 25),
                support_minimality(&mut c, &s, 25),
                bridge_commutation(&mut c, &s, 25),
                first_order_agreement(&mut c, &s, 25),
            ] {
                assert_eq!(rec.status, CheckStatus::Pass, "{sort}: {rec:?}");
                assert_eq!(rec.samples, 25);
            }
        }
    }

    #[test]
    fn qualitative_rows() {
        let basic = SymbolicStructure::new(Sort::Equality, "basic");
        let rec = refutation(&basic, Template::LinearOrder);
        assert_eq!(rec.status, CheckStatus::Pass);
        assert_eq!(rec.verdict.as_deref(), Some("refuted-with-argument"));
        let ordered = SymbolicStructure::new(Sort::Ordered, "mostowski-asser");
        let rec = linear_order_witness(&ordered, Exec::Sequential);
        assert_eq!(rec.status, CheckStatus::Pass, "{rec:?}");
        assert_eq!(rec.verdict.as_deref(), Some("holds-with-witness"));
        assert_eq!(refutation(&ordered, Template::LinearOrder).status, CheckStatus::Fail);
    }

    #[test]
    fn saturation_fits_the_truncation_cap() {
        assert_eq!(saturation(Sort::Ordered, 1, 1), 2);
        assert_eq!(saturation(Sort::Ordered, 0, 2), 3);
        assert_eq!(saturation(Sort::Paired, 2, 2), 4);
    }
}
