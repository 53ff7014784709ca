//! Worked values recomputed by brute force, independent of the library's
//! own algorithms.

use std::collections::BTreeSet;

use forge_core::family::{
    check_normal_filter_axioms, check_normal_ideal_axioms, Axiom, Family, NormalFilter, NormalIdeal, Status, Support,
    Witness,
};
use forge_core::harness::ModelConfig;
use forge_core::logic::{comprehension_audit, evaluate, FiniteAssignment, PredVar};
use forge_core::perm::{Atom, Domain, PermGroup, Permutation, PredicateRel};
use forge_core::structure::{build_model, make_catalog_model, ModelId};
use forge_core::symbolic::{
    bounded_witness_search, linear_order_formula, orbits_over, symbolic_act, truncation, GroupElement, OrbitPredicate,
    Sort, SymAtom, SymbolicAssignment, SymbolicStructure, Verdict,
};
use forge_core::Exec;
use itertools::Itertools;

/// Every permutation of `0..n`, as image vectors.
fn all_perms(n: usize) -> Vec<Vec<Atom>> {
    (0..n as Atom).permutations(n).collect()
}

fn images(g: &PermGroup) -> BTreeSet<Vec<Atom>> {
    g.elements().iter().map(|p| p.images().to_vec()).collect()
}

fn perm(images: &[Atom]) -> Permutation {
    Permutation::from_images(images.to_vec()).unwrap()
}

fn s3() -> PermGroup {
    PermGroup::symmetric(3).unwrap()
}

fn set(elems: &[&[Atom]]) -> BTreeSet<Vec<Atom>> {
    elems.iter().map(|e| e.to_vec()).collect()
}

/// Closure of the generators under composition, by fixpoint iteration.
fn naive_closure(n: usize, gens: &[Vec<Atom>]) -> BTreeSet<Vec<Atom>> {
    let mut out: BTreeSet<Vec<Atom>> = [(0..n as Atom).collect()].into();
    loop {
        let next: BTreeSet<Vec<Atom>> = out
            .iter()
            .cartesian_product(gens)
            .map(|(a, g)| a.iter().map(|&x| g[x as usize]).collect())
            .chain(out.iter().cloned())
            .collect();
        if next.len() == out.len() {
            return out;
        }
        out = next;
    }
}

#[test]
fn generated_group_is_the_naive_closure() {
    let gens = vec![perm(&[1, 0, 2]), perm(&[0, 2, 1])];
    let g = PermGroup::generate(3, gens.clone()).unwrap();
    let oracle = naive_closure(3, &gens.iter().map(|p| p.images().to_vec()).collect::<Vec<_>>());
    assert_eq!(oracle.len(), 6);
    assert_eq!(images(&g), oracle);
}

#[test]
fn pointwise_stabilizer_by_filtering() {
    let oracle: BTreeSet<Vec<Atom>> = all_perms(3).into_iter().filter(|p| p[0] == 0).collect();
    assert_eq!(images(&s3().pointwise_stabilizer(&[0]).unwrap()), oracle);
    assert_eq!(oracle, set(&[&[0, 1, 2], &[0, 2, 1]]));
}

#[test]
fn conjugation_elementwise() {
    let h = PermGroup::generate(3, vec![perm(&[0, 2, 1])]).unwrap();
    let pi = perm(&[1, 0, 2]);
    let oracle: BTreeSet<Vec<Atom>> =
        h.elements().iter().map(|x| (0..3).map(|i| pi.apply(x.apply(pi.inverse().apply(i)))).collect()).collect();
    assert_eq!(oracle, set(&[&[0, 1, 2], &[2, 1, 0]]));
    assert_eq!(images(&h.conjugate_by(&pi).unwrap()), oracle);
}

/// Permutations of `0..3` mapping the tuple set onto itself.
fn naive_sym(tuples: &[Vec<Atom>]) -> BTreeSet<Vec<Atom>> {
    let target: BTreeSet<Vec<Atom>> = tuples.iter().cloned().collect();
    all_perms(3)
        .into_iter()
        .filter(|p| {
            tuples.iter().map(|t| t.iter().map(|&x| p[x as usize]).collect::<Vec<_>>()).collect::<BTreeSet<_>>()
                == target
        })
        .collect()
}

#[test]
fn symmetry_groups_by_checking_all_six() {
    let unary = PredicateRel::from_tuples(3, 1, [vec![0]]).unwrap();
    assert_eq!(images(&s3().sym_subgroup(&unary).unwrap()), naive_sym(&[vec![0]]));
    assert_eq!(naive_sym(&[vec![0]]), set(&[&[0, 1, 2], &[0, 2, 1]]));
    let pairs = [vec![0, 1], vec![1, 0]];
    let binary = PredicateRel::from_tuples(3, 2, pairs.clone()).unwrap();
    assert_eq!(images(&s3().sym_subgroup(&binary).unwrap()), naive_sym(&pairs));
    assert_eq!(naive_sym(&pairs), set(&[&[0, 1, 2], &[1, 0, 2]]));
}

#[test]
fn empty_set_does_not_support_a_singleton() {
    let alpha = PredicateRel::from_tuples(3, 1, [vec![0]]).unwrap();
    assert!(!alpha.is_fixed_by(&perm(&[1, 0, 2])));
    assert!(!s3().is_support(&[], &alpha).unwrap());
}

#[test]
fn union_failure_of_small_subsets() {
    let members: Vec<Support> =
        std::iter::once(Support::atoms([])).chain((0..3).map(|a| Support::atoms([a]))).collect();
    // Oracle: the first pair of members whose union is not a member.
    let as_sets: Vec<BTreeSet<Atom>> = members.iter().map(|m| m.atoms.iter().copied().collect()).collect();
    let (l, r) =
        as_sets.iter().tuple_combinations().find(|(a, b)| !as_sets.contains(&a.union(b).copied().collect())).unwrap();
    assert_eq!((l.len(), r.len()), (1, 1));
    let report = check_normal_ideal_axioms(&s3(), &NormalIdeal::explicit(members, false)).unwrap();
    let v = report.verdict(Axiom::III);
    assert_eq!(v.status, Status::Fail);
    let Some(Witness::Union { left, right }) = &v.witness else { panic!("{v:?}") };
    let union: BTreeSet<Atom> = left.atoms.iter().chain(&right.atoms).copied().collect();
    assert_eq!(union.len(), 2);
    assert!(!as_sets.contains(&union));
}

#[test]
fn filter_of_the_whole_group_misses_a_stabilizer() {
    let report = check_normal_filter_axioms(&s3(), &NormalFilter::explicit(vec![s3()], false)).unwrap();
    let v = report.verdict(Axiom::V);
    assert_eq!(v.status, Status::Fail);
    let Some(Witness::Stabilizer(p)) = &v.witness else { panic!("{v:?}") };
    assert_eq!(p.len(), 1);
    let oracle: BTreeSet<Vec<Atom>> = all_perms(3).into_iter().filter(|g| g[p[0] as usize] == p[0]).collect();
    assert_eq!(oracle.len(), 2);
    assert_ne!(oracle, images(&s3()));
}

#[test]
fn filter_without_intermediate_subgroups_is_not_upward_closed() {
    let trivial = PermGroup::trivial(3);
    let report = check_normal_filter_axioms(&s3(), &NormalFilter::explicit(vec![trivial, s3()], false)).unwrap();
    let v = report.verdict(Axiom::II);
    assert_eq!(v.status, Status::Fail);
    let Some(Witness::Upward { superset, .. }) = &v.witness else { panic!("{v:?}") };
    // Oracle: the order-2 subgroups of S_3 are exactly {id, t} for the three transpositions.
    let order_two: Vec<BTreeSet<Vec<Atom>>> = all_perms(3)
        .into_iter()
        .filter(|p| p.iter().enumerate().filter(|(i, &x)| *i as Atom != x).count() == 2)
        .map(|t| [vec![0, 1, 2], t].into())
        .collect();
    assert!(order_two.contains(&images(superset)), "{superset:?}");
}

/// Unary predicates invariant under every generator.
fn naive_invariant_unary(n: usize, gens: &[Vec<Atom>]) -> BTreeSet<BTreeSet<Atom>> {
    (0..1u32 << n)
        .map(|m| (0..n as Atom).filter(|i| m >> i & 1 == 1).collect::<BTreeSet<Atom>>())
        .filter(|s| gens.iter().all(|g| s.iter().map(|&x| g[x as usize]).collect::<BTreeSet<_>>() == *s))
        .collect()
}

fn unary_members(s: &forge_core::structure::FiniteStructure) -> BTreeSet<BTreeSet<Atom>> {
    s.members(1).unwrap().iter().map(|p| p.tuples().into_iter().map(|t| t[0]).collect()).collect()
}

#[test]
fn finite_supports_on_two_atoms_give_every_unary_predicate() {
    let s = build_model(
        &Domain::range(2),
        &PermGroup::symmetric(2).unwrap(),
        &Family::Ideal(NormalIdeal::finite_supports()),
        1,
    )
    .unwrap();
    let oracle: BTreeSet<BTreeSet<Atom>> = (0..4u32).map(|m| (0..2).filter(|i| m >> i & 1 == 1).collect()).collect();
    assert_eq!(oracle.len(), 4);
    assert_eq!(unary_members(&s), oracle);
}

fn pair_model() -> forge_core::structure::FiniteStructure {
    ModelConfig::pair_model().instantiate().unwrap().as_finite().unwrap().clone()
}

#[test]
fn pair_model_unary_level_is_the_flip_invariant_sets() {
    let s = pair_model();
    let oracle = naive_invariant_unary(4, &[vec![1, 0, 2, 3], vec![0, 1, 3, 2]]);
    let expected: BTreeSet<BTreeSet<Atom>> =
        [vec![], vec![0, 1], vec![2, 3], vec![0, 1, 2, 3]].into_iter().map(|v| v.into_iter().collect()).collect();
    assert_eq!(oracle, expected);
    assert_eq!(unary_members(&s), oracle);
    assert!(s.is_member(&PredicateRel::from_tuples(4, 1, [vec![0], vec![1]]).unwrap()).unwrap());
    assert!(!s.is_member(&PredicateRel::from_tuples(4, 1, [vec![0]]).unwrap()).unwrap());
}

#[test]
fn fraenkel_zermelo_group_by_brute_force() {
    let m = make_catalog_model(ModelId::FraenkelZermelo { k: Some(2), pair_permuting: false }, 1).unwrap();
    let s = m.as_finite().unwrap();
    // Atoms a0, b0, a1, b1; t_n = {(a_n, b_n), (b_n, a_n)} must be preserved.
    let t = |a: Atom, b: Atom| -> BTreeSet<(Atom, Atom)> { [(a, b), (b, a)].into() };
    let oracle: BTreeSet<Vec<Atom>> = all_perms(4)
        .into_iter()
        .filter(|p| {
            [t(0, 1), t(2, 3)]
                .iter()
                .all(|r| r.iter().map(|&(x, y)| (p[x as usize], p[y as usize])).collect::<BTreeSet<_>>() == *r)
        })
        .collect();
    assert_eq!(oracle.len(), 4);
    assert_eq!(images(s.group()), oracle);
}

/// `ex A1#1. A1#1(x1) & ~A1#1(x2)` by scanning the members of `J_1`.
fn separable(s: &forge_core::structure::FiniteStructure, a: Atom, b: Atom) -> bool {
    s.members(1).unwrap().iter().any(|p| p.contains(&[a]) && !p.contains(&[b]))
}

#[test]
fn separating_quantifier_against_a_scan() {
    let h = "ex A1#1. A1#1(x1) & ~A1#1(x2)".parse().unwrap();
    let f = FiniteAssignment::new().with_ind(1, 0).with_ind(2, 1);
    let full = make_catalog_model(ModelId::Standard { size: 2 }, 1).unwrap();
    let full = full.as_finite().unwrap();
    assert!(separable(full, 0, 1));
    assert!(evaluate(full, &f, &h).unwrap().value);
    let pair = pair_model();
    assert!(!separable(&pair, 0, 1));
    assert!(!evaluate(&pair, &f, &h).unwrap().value);
}

#[test]
fn pair_model_comprehension_counterexample_is_a_singleton() {
    let s = pair_model();
    let report = comprehension_audit(&s, 2, 1).unwrap();
    let c = report.counterexample.expect("the pair model is not closed under definitions");
    assert_eq!(c.predicate.len(), 1);
    let atom = c.predicate.tuples()[0][0];
    let oracle = naive_invariant_unary(4, &[vec![1, 0, 2, 3], vec![0, 1, 3, 2]]);
    assert!(!oracle.contains(&[atom].into()));
}

/// Orbits of `arity`-tuples over a truncation under the permutations that
/// fix `support`, with tuples and permutations restricted to `atoms`.
fn truncation_orbits(atoms: &[SymAtom], support: &[SymAtom], arity: usize, ordered: bool) -> usize {
    let n = atoms.len();
    let perms: Vec<Vec<usize>> = (0..n)
        .permutations(n)
        .filter(|p| support.iter().all(|s| atoms[p[atoms.iter().position(|a| a == s).unwrap()]] == *s))
        .filter(|p| !ordered || p.iter().enumerate().all(|(i, &x)| i == x))
        .collect();
    let tuples: Vec<Vec<usize>> = (0..arity).map(|_| 0..n).multi_cartesian_product().collect();
    if ordered {
        // Order types relative to the support, read off a dense enough sample.
        let key = |t: &Vec<usize>| -> Vec<i32> {
            let mut k = Vec::new();
            for &i in t {
                for s in support {
                    k.push((atoms[i].cmp(s)) as i32);
                }
            }
            for (a, b) in t.iter().tuple_combinations() {
                k.push(atoms[*a].cmp(&atoms[*b]) as i32);
            }
            k
        };
        return tuples.iter().map(key).collect::<BTreeSet<_>>().len();
    }
    let mut seen = BTreeSet::new();
    let mut count = 0;
    for t in &tuples {
        if seen.contains(t) {
            continue;
        }
        count += 1;
        for p in &perms {
            seen.insert(t.iter().map(|&i| p[i]).collect::<Vec<_>>());
        }
    }
    count
}

#[test]
fn orbit_counts_match_truncation_oracles() {
    let a = SymAtom::Eq(0);
    let eq5 = truncation(Sort::Equality, &[a], 5);
    assert_eq!(truncation_orbits(&eq5, &[a], 1, false), 2);
    assert_eq!(orbits_over(Sort::Equality, &[a], 1).unwrap().len(), 2);
    let eq4 = truncation(Sort::Equality, &[], 4);
    assert_eq!(truncation_orbits(&eq4, &[], 2, false), 2);
    assert_eq!(orbits_over(Sort::Equality, &[], 2).unwrap().len(), 2);
    let q = SymAtom::rat(0, 1);
    let ord5 = truncation(Sort::Ordered, &[q], 5);
    assert_eq!(truncation_orbits(&ord5, &[q], 1, true), 3);
    assert_eq!(orbits_over(Sort::Ordered, &[q], 1).unwrap().len(), 3);
}

#[test]
fn least_support_of_an_order_cut_by_drop_test() {
    let half = forge_core::symbolic::Rational::new(1, 2);
    let q = SymAtom::Rat(half);
    let p = OrbitPredicate::define(Sort::Ordered, &[q], 1, |t| t[0] < q).unwrap();
    assert_eq!(p.minimal_support(), vec![q]);
    // Dropping q: a shift by 1 fixes the empty support but moves the cut.
    let shift = GroupElement::monotone(vec![(half, half + 1)]).unwrap();
    let moved = symbolic_act(&shift, &p).unwrap();
    assert!(!moved.same_relation(&p));
}

#[test]
fn commuting_square_for_elements_fixing_the_sample() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for sort in [Sort::Equality, Sort::Paired, Sort::TwoSorted] {
        for _ in 0..50 {
            let p = forge_core::symbolic::sample::random_predicate(&mut rng, sort, 2, 2).unwrap();
            let sample = truncation(sort, p.frame(), p.frame().len() + 2);
            let pi = forge_core::symbolic::sample::random_element_on(&mut rng, sort, &sample).unwrap();
            let hat: Vec<Atom> =
                sample.iter().map(|a| sample.iter().position(|b| *b == pi.apply(*a)).unwrap() as Atom).collect();
            let hat = Permutation::from_images(hat).unwrap();
            // Oracle: the image relation tuple by tuple.
            let lhs = symbolic_act(&pi, &p).unwrap().to_finite_with(&sample).unwrap();
            let rhs = p.to_finite_with(&sample).unwrap().act(&hat);
            assert_eq!(lhs, rhs);
            for t in (0..2).map(|_| 0..sample.len()).multi_cartesian_product() {
                let orig: Vec<SymAtom> = t.iter().map(|&i| sample[i]).collect();
                let image: Vec<Atom> = t.iter().map(|&i| hat.apply(i as Atom)).collect();
                assert_eq!(rhs.contains(&image), p.contains(&orig));
            }
        }
    }
}

#[test]
fn bounded_order_search() {
    let ordered = SymbolicStructure::new(Sort::Ordered, "mostowski-asser");
    let v = bounded_witness_search(&ordered, &linear_order_formula(), &SymbolicAssignment::new(), 0, Exec::Sequential)
        .unwrap();
    let Verdict::HoldsWithWitness { witness, support, .. } = v else { panic!("{v:?}") };
    assert!(support.is_empty());
    // Oracle: the witness agrees with <= on every pair of a five-point sample.
    let pts = truncation(Sort::Ordered, &[], 5);
    for (a, b) in pts.iter().cartesian_product(&pts) {
        assert_eq!(witness.contains(&[*a, *b]), a <= b);
    }
    let basic = SymbolicStructure::new(Sort::Equality, "basic");
    let v = bounded_witness_search(&basic, &linear_order_formula(), &SymbolicAssignment::new(), 2, Exec::Sequential)
        .unwrap();
    assert!(matches!(v, Verdict::InconclusiveBounded { .. }), "{v:?}");
}

#[test]
fn symbolic_basic_model_is_closed_under_the_action() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let s = SymbolicStructure::new(Sort::Equality, "basic");
    for _ in 0..50 {
        let p = forge_core::symbolic::sample::random_predicate(&mut rng, Sort::Equality, 2, 3).unwrap();
        let u = truncation(Sort::Equality, p.frame(), p.frame().len() + 3);
        let pi = forge_core::symbolic::sample::random_element_on(&mut rng, Sort::Equality, &u).unwrap();
        let q = symbolic_act(&pi, &p).unwrap();
        assert!(s.is_member(&q).unwrap());
        for t in (0..2).map(|_| u.iter().copied()).multi_cartesian_product() {
            assert_eq!(q.contains(&pi.apply_tuple(&t)), p.contains(&t));
        }
    }
}

#[test]
fn predicate_variables_display_as_parsed() {
    assert_eq!(PredVar::new(1, 2).to_string(), "A1#2");
}
