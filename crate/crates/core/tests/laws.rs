//! Algebraic laws of the actions, checked on random inputs.

use forge_core::harness::gen::{random_formula, FormulaSpec};
use forge_core::logic::parse_formula;
use forge_core::perm::{Atom, PermGroup, Permutation, PredicateRel};
use forge_core::symbolic::sample::{random_element_on, random_predicate};
use forge_core::symbolic::{symbolic_act, truncation, Sort};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n as Atom).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::from_images(v).unwrap())
}

fn predicate(n: usize, arity: usize) -> impl Strategy<Value = PredicateRel> {
    let cells = n.pow(arity as u32);
    prop::collection::vec(any::<bool>(), cells).prop_map(move |bits| {
        let mut p = PredicateRel::empty(n, arity);
        for (c, b) in bits.into_iter().enumerate() {
            if b {
                p.set_cell(c);
            }
        }
        p
    })
}

proptest! {
    #[test]
    fn action_is_a_left_action(
        (sigma, tau, alpha) in (1usize..=4, 1usize..=2)
            .prop_flat_map(|(n, k)| (permutation(n), permutation(n), predicate(n, k)))
    ) {
        prop_assert_eq!(alpha.act(&sigma.compose(&tau)), alpha.act(&tau).act(&sigma));
        prop_assert_eq!(alpha.act(&Permutation::identity(sigma.degree())), alpha.clone());
        prop_assert_eq!(alpha.act(&sigma).len(), alpha.len());
        prop_assert_eq!(alpha.complement().act(&sigma), alpha.act(&sigma).complement());
        prop_assert_eq!(alpha.act(&sigma).act(&sigma.inverse()), alpha);
    }

    #[test]
    fn symmetry_group_conjugates(
        (pi, alpha) in (1usize..=4).prop_flat_map(|n| (permutation(n), predicate(n, 1)))
    ) {
        let g = PermGroup::symmetric(pi.degree()).unwrap();
        let moved = g.sym_subgroup(&alpha.act(&pi)).unwrap();
        let conj = g.sym_subgroup(&alpha).unwrap().conjugate_by(&pi).unwrap();
        prop_assert_eq!(moved.elements(), conj.elements());
    }

    #[test]
    fn stabilizers_conjugate(
        (pi, atoms) in (2usize..=4).prop_flat_map(|n| (permutation(n), prop::collection::btree_set(0..n as Atom, 0..n)))
    ) {
        let g = PermGroup::symmetric(pi.degree()).unwrap();
        let atoms: Vec<Atom> = atoms.into_iter().collect();
        let moved: Vec<Atom> = pi.apply_tuple(&atoms);
        let lhs = g.pointwise_stabilizer(&moved).unwrap();
        let rhs = g.pointwise_stabilizer(&atoms).unwrap().conjugate_by(&pi).unwrap();
        prop_assert_eq!(lhs.elements(), rhs.elements());
    }

    #[test]
    fn formulas_print_and_parse_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_formula(&mut rng, &FormulaSpec::first_order(4, 3));
        prop_assert_eq!(parse_formula(&h.to_string()).unwrap(), h);
    }

    #[test]
    fn symbolic_action_is_invertible(seed in any::<u64>(), sort_index in 0usize..4) {
        let sort = Sort::ALL[sort_index];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_predicate(&mut rng, sort, 2, 3).unwrap();
        let sample = truncation(sort, p.frame(), p.frame().len() + 2);
        let pi = random_element_on(&mut rng, sort, &sample).unwrap();
        let q = symbolic_act(&pi, &p).unwrap();
        prop_assert!(symbolic_act(&pi.inverse(), &q).unwrap().same_relation(&p));
        prop_assert_eq!(q.minimal_support().len(), p.minimal_support().len());
    }
}
