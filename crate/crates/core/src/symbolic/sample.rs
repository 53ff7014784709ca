//! Seeded random predicates and group elements for the symbolic sorts.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::symbolic::atom::{Rational, Sort, SymAtom};
use crate::symbolic::group::GroupElement;
use crate::symbolic::predicate::OrbitPredicate;
use crate::symbolic::types::orbits_in_frame;

/// A random atom from a small range of each sort.
pub fn random_atom<R: Rng + ?Sized>(rng: &mut R, sort: Sort) -> SymAtom {
    match sort {
        Sort::Equality => SymAtom::Eq(rng.gen_range(0..8)),
        Sort::Ordered => SymAtom::rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)),
        Sort::Paired => SymAtom::Pair(rng.gen_range(0..4), rng.gen_range(0..2)),
        Sort::TwoSorted => SymAtom::Half(rng.gen_range(0..2), rng.gen_range(0..4)),
    }
}

/// Up to `k` distinct random atoms, sorted.
pub fn random_support<R: Rng + ?Sized>(rng: &mut R, sort: Sort, k: usize) -> Vec<SymAtom> {
    let mut out: Vec<SymAtom> = (0..k).map(|_| random_atom(rng, sort)).collect();
    out.sort();
    out.dedup();
    out
}

/// A random union of orbit types over a random support of at most `k` atoms.
pub fn random_predicate<R: Rng + ?Sized>(rng: &mut R, sort: Sort, arity: usize, k: usize) -> Result<OrbitPredicate> {
    let support = random_support(rng, sort, k);
    let frame = sort.frame(&support);
    let types: Vec<_> = orbits_in_frame(sort, &frame, arity).into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    OrbitPredicate::from_types(sort, &support, arity, types)
}

/// A random group element mapping the finite set `atoms` onto itself.
///
/// Two-sorted elements shuffle each half; paired elements shuffle the pairs
/// whose both sides are listed and flip some of them. For the ordered sort the
/// only such element is the identity, so a random order automorphism is
/// returned instead; see [`random_monotone`].
pub fn random_element_on<R: Rng + ?Sized>(rng: &mut R, sort: Sort, atoms: &[SymAtom]) -> Result<GroupElement> {
    let shuffle_within = |rng: &mut R, xs: Vec<SymAtom>| {
        let mut ys = xs.clone();
        ys.shuffle(rng);
        xs.into_iter().zip(ys).collect::<Vec<_>>()
    };
    match sort {
        Sort::Ordered => Ok(random_monotone(rng)),
        Sort::Equality => {
            let pairs = shuffle_within(rng, atoms.to_vec());
            GroupElement::new(sort, &pairs)
        }
        Sort::TwoSorted => {
            let mut pairs = Vec::new();
            for h in 0..2u8 {
                let half: Vec<SymAtom> =
                    atoms.iter().copied().filter(|a| matches!(a, SymAtom::Half(g, _) if *g == h)).collect();
                pairs.extend(shuffle_within(rng, half));
            }
            GroupElement::new(sort, &pairs)
        }
        Sort::Paired => {
            let firsts: Vec<SymAtom> = atoms
                .iter()
                .copied()
                .filter(|a| matches!(a, SymAtom::Pair(_, 0)) && atoms.contains(&a.mate().unwrap()))
                .collect();
            let pairs: Vec<(SymAtom, SymAtom)> = shuffle_within(rng, firsts)
                .into_iter()
                .map(|(x, y)| if rng.gen_bool(0.5) { (x, y.mate().unwrap()) } else { (x, y) })
                .collect();
            GroupElement::new(sort, &pairs)
        }
    }
}

/// A random order automorphism through up to three breakpoints.
pub fn random_monotone<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
    let n = rng.gen_range(0..=3);
    let mut xs: Vec<Rational> = (0..n).map(|_| Rational::new(rng.gen_range(-8..=8), rng.gen_range(1..=2))).collect();
    let mut ys: Vec<Rational> = (0..n).map(|_| Rational::new(rng.gen_range(-8..=8), rng.gen_range(1..=2))).collect();
    xs.sort();
    xs.dedup();
    ys.sort();
    ys.dedup();
    let m = xs.len().min(ys.len());
    GroupElement::monotone(xs.into_iter().zip(ys).take(m).collect()).expect("sorted distinct points are monotone")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_elements_respect_their_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for sort in [Sort::Equality, Sort::Paired, Sort::TwoSorted] {
            for _ in 0..50 {
                let atoms = sort.frame(&random_support(&mut rng, sort, 5));
                let g = random_element_on(&mut rng, sort, &atoms).unwrap();
                let mut image = g.apply_tuple(&atoms);
                image.sort();
                assert_eq!(image, atoms, "{sort} {g}");
            }
        }
    }
}
