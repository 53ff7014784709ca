//! Orbit types of tuples relative to a finite frame of named atoms.
//!
//! Two tuples lie in the same orbit of the frame's pointwise stabilizer exactly
//! when they have the same type. A coordinate is either a named frame atom or
//! fresh; fresh coordinates carry a region and a rank:
//!
//! | sort       | region                     | rank                          |
//! |------------|----------------------------|-------------------------------|
//! | equality   | always 0                   | equality class, first seen    |
//! | ordered    | gap between frame atoms    | dense order rank in the gap   |
//! | paired     | pair class, first seen     | side relative to first seen   |
//! | two-sorted | half                       | equality class in the half    |

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbolic::atom::{Rational, Sort, SymAtom};

/// Largest tuple arity handled symbolically.
pub const SYMBOLIC_ARITY_CAP: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Slot {
    Named(u32),
    Fresh { region: u32, rank: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TupleType(pub Vec<Slot>);

impl TupleType {
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Conjunction of literals over coordinates `i` and frame atoms `s_k`.
    ///
    /// Vocabulary: `eq(i,s_k)`, `eq(i,j)`, `new(i)`, `lt(i,j)`, `lt(i,s_k)`,
    /// `lt(s_k,i)`, `half(i,h)`, `pairmate(i,j)`. Fresh coordinates differ from
    /// every frame atom and from coordinates not stated equal.
    pub fn describe(&self, sort: Sort, frame_len: usize) -> String {
        let mut lits: Vec<String> = Vec::new();
        for (i, slot) in self.0.iter().enumerate() {
            match *slot {
                Slot::Named(k) => lits.push(format!("eq({i},s_{k})")),
                Slot::Fresh { region, rank } => {
                    let earlier = self.0[..i]
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| matches!(s, Slot::Fresh { region: r, .. } if *r == region));
                    match sort {
                        Sort::Ordered => {
                            if region > 0 {
                                lits.push(format!("lt(s_{},{i})", region - 1));
                            }
                            if (region as usize) < frame_len {
                                lits.push(format!("lt({i},s_{region})"));
                            }
                            for (j, s) in earlier {
                                let Slot::Fresh { rank: rj, .. } = *s else { unreachable!() };
                                lits.push(match rj.cmp(&rank) {
                                    std::cmp::Ordering::Less => format!("lt({j},{i})"),
                                    std::cmp::Ordering::Equal => format!("eq({j},{i})"),
                                    std::cmp::Ordering::Greater => format!("lt({i},{j})"),
                                });
                            }
                        }
                        _ => {
                            if sort == Sort::TwoSorted {
                                lits.push(format!("half({i},{region})"));
                            }
                            let mut linked = false;
                            for (j, s) in earlier {
                                let Slot::Fresh { rank: rj, .. } = *s else { unreachable!() };
                                if rj == rank {
                                    lits.push(format!("eq({i},{j})"));
                                    linked = true;
                                    break;
                                }
                                if sort == Sort::Paired {
                                    lits.push(format!("pairmate({i},{j})"));
                                    linked = true;
                                    break;
                                }
                            }
                            if !linked {
                                lits.push(format!("new({i})"));
                            }
                        }
                    }
                }
            }
        }
        lits.join(" & ")
    }
}

fn named(frame: &[SymAtom], a: &SymAtom) -> Option<u32> {
    frame.binary_search(a).ok().map(|k| k as u32)
}

/// The orbit type of `tuple` over `frame` (a sorted frame from [`Sort::frame`]).
pub fn type_of(sort: Sort, frame: &[SymAtom], tuple: &[SymAtom]) -> TupleType {
    let mut slots = Vec::with_capacity(tuple.len());
    match sort {
        Sort::Equality | Sort::TwoSorted => {
            let mut classes: Vec<SymAtom> = Vec::new();
            for a in tuple {
                if let Some(k) = named(frame, a) {
                    slots.push(Slot::Named(k));
                    continue;
                }
                let region = match a {
                    SymAtom::Half(h, _) => *h as u32,
                    _ => 0,
                };
                let rank = match classes.iter().filter(|c| region_of(c) == region).position(|c| c == a) {
                    Some(r) => r,
                    None => {
                        classes.push(*a);
                        classes.iter().filter(|c| region_of(c) == region).count() - 1
                    }
                };
                slots.push(Slot::Fresh { region, rank: rank as u32 });
            }
        }
        Sort::Ordered => {
            for a in tuple {
                if let Some(k) = named(frame, a) {
                    slots.push(Slot::Named(k));
                    continue;
                }
                let gap = frame.partition_point(|f| f < a) as u32;
                let mut same_gap: Vec<&SymAtom> = tuple
                    .iter()
                    .filter(|b| named(frame, b).is_none() && frame.partition_point(|f| f < *b) as u32 == gap)
                    .collect();
                same_gap.sort();
                same_gap.dedup();
                let rank = same_gap.iter().position(|b| *b == a).unwrap() as u32;
                slots.push(Slot::Fresh { region: gap, rank });
            }
        }
        Sort::Paired => {
            let mut pairs: Vec<(u32, u8)> = Vec::new();
            for a in tuple {
                if let Some(k) = named(frame, a) {
                    slots.push(Slot::Named(k));
                    continue;
                }
                let SymAtom::Pair(n, s) = *a else { unreachable!("sort checked") };
                let region = match pairs.iter().position(|(m, _)| *m == n) {
                    Some(r) => r,
                    None => {
                        pairs.push((n, s));
                        pairs.len() - 1
                    }
                };
                let rank = (s ^ pairs[region].1) as u32;
                slots.push(Slot::Fresh { region: region as u32, rank });
            }
        }
    }
    TupleType(slots)
}

fn region_of(a: &SymAtom) -> u32 {
    match a {
        SymAtom::Half(h, _) => *h as u32,
        _ => 0,
    }
}

/// Point strictly inside gap `g` of `frame`, the `r`-th of `count` spread points.
pub(crate) fn gap_point(frame: &[SymAtom], g: usize, r: usize, count: usize) -> Rational {
    let val = |a: &SymAtom| match a {
        SymAtom::Rat(q) => *q,
        _ => unreachable!("ordered frame"),
    };
    let lo = g.checked_sub(1).map(|i| val(&frame[i]));
    let hi = frame.get(g).map(val);
    let r = r as i64;
    let c = count as i64;
    match (lo, hi) {
        (Some(lo), Some(hi)) => lo + (hi - lo) * Rational::new(r + 1, c + 1),
        (Some(lo), None) => lo + Rational::from_integer(r + 1),
        (None, Some(hi)) => hi - Rational::from_integer(c - r),
        (None, None) => Rational::from_integer(r),
    }
}

/// Largest numeric index used by atoms of a region.
fn max_index(atoms: &[SymAtom], half: Option<u8>) -> Option<u32> {
    atoms
        .iter()
        .filter_map(|a| match *a {
            SymAtom::Eq(k) => Some(k),
            SymAtom::Pair(n, _) => Some(n),
            SymAtom::Half(h, n) if Some(h) == half => Some(n),
            _ => None,
        })
        .max()
}

fn next_index(frame: &[SymAtom], avoid: &[SymAtom], half: Option<u8>) -> u32 {
    let a = max_index(frame, half);
    let b = max_index(avoid, half);
    a.max(b).map_or(0, |m| m + 1)
}

/// A concrete tuple of type `ty`, with fresh atoms outside `frame` and `avoid`.
pub fn representative(sort: Sort, frame: &[SymAtom], ty: &TupleType, avoid: &[SymAtom]) -> Vec<SymAtom> {
    let fresh_count = |region: u32| {
        ty.0.iter()
            .filter_map(|s| match s {
                Slot::Fresh { region: r, rank } if *r == region => Some(*rank as usize + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    };
    ty.0.iter()
        .map(|slot| match *slot {
            Slot::Named(k) => frame[k as usize],
            Slot::Fresh { region, rank } => match sort {
                Sort::Equality => SymAtom::Eq(next_index(frame, avoid, None) + rank),
                Sort::Ordered => SymAtom::Rat(gap_point(frame, region as usize, rank as usize, fresh_count(region))),
                Sort::Paired => SymAtom::Pair(next_index(frame, avoid, None) + region, rank as u8),
                Sort::TwoSorted => {
                    let h = region as u8;
                    SymAtom::Half(h, next_index(frame, avoid, Some(h)) + rank)
                }
            },
        })
        .collect()
}

/// Frame plus enough fresh atoms to realize every type of the given arity.
pub fn pool(sort: Sort, frame: &[SymAtom], arity: usize) -> Vec<SymAtom> {
    let mut out = frame.to_vec();
    match sort {
        Sort::Equality => {
            let base = next_index(frame, &[], None);
            out.extend((0..arity as u32).map(|i| SymAtom::Eq(base + i)));
        }
        Sort::Ordered => {
            for g in 0..=frame.len() {
                out.extend((0..arity).map(|r| SymAtom::Rat(gap_point(frame, g, r, arity))));
            }
        }
        Sort::Paired => {
            let base = next_index(frame, &[], None);
            for i in 0..arity as u32 {
                out.push(SymAtom::Pair(base + i, 0));
                out.push(SymAtom::Pair(base + i, 1));
            }
        }
        Sort::TwoSorted => {
            for h in 0..2u8 {
                let base = next_index(frame, &[], Some(h));
                out.extend((0..arity as u32).map(|i| SymAtom::Half(h, base + i)));
            }
        }
    }
    out
}

/// Every tuple of the given arity over `atoms`, first coordinate slowest.
pub(crate) fn tuples(atoms: &[SymAtom], arity: usize) -> impl Iterator<Item = Vec<SymAtom>> + '_ {
    itertools::Itertools::multi_cartesian_product((0..arity).map(move |_| atoms.iter().copied()))
}

/// The orbit decomposition of `arity`-tuples under the stabilizer of `support`.
pub fn orbits_over(sort: Sort, support: &[SymAtom], arity: usize) -> Result<Vec<TupleType>> {
    if arity == 0 || arity > SYMBOLIC_ARITY_CAP {
        return Err(Error::ArityOutOfRange { arity, cap: SYMBOLIC_ARITY_CAP });
    }
    sort.check(support)?;
    let frame = sort.frame(support);
    Ok(orbits_in_frame(sort, &frame, arity))
}

pub(crate) fn orbits_in_frame(sort: Sort, frame: &[SymAtom], arity: usize) -> Vec<TupleType> {
    let p = pool(sort, frame, arity);
    let set: BTreeSet<TupleType> = tuples(&p, arity).map(|t| type_of(sort, frame, &t)).collect();
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(k: u32) -> SymAtom {
        SymAtom::Eq(k)
    }

    #[test]
    fn spec_orbit_counts() {
        assert_eq!(orbits_over(Sort::Equality, &[a(0)], 1).unwrap().len(), 2);
        assert_eq!(orbits_over(Sort::Equality, &[], 2).unwrap().len(), 2);
        assert_eq!(orbits_over(Sort::Ordered, &[SymAtom::rat(1, 2)], 1).unwrap().len(), 3);
        assert_eq!(orbits_over(Sort::Ordered, &[], 2).unwrap().len(), 3);
        assert!(orbits_over(Sort::Equality, &[], 4).is_err());
    }

    /// Orbit counts from a brute-force truncation: classes of tuples over a
    /// finite sample under all sample permutations fixing the support.
    fn truncation_orbits(support: &[u32], size: u32, arity: usize) -> usize {
        let atoms: Vec<u32> = (0..size).collect();
        let perms: Vec<Vec<u32>> = itertools::Itertools::permutations(atoms.iter().copied(), atoms.len())
            .filter(|p| support.iter().all(|&s| p[s as usize] == s))
            .collect();
        let mut seen = BTreeSet::new();
        let mut count = 0;
        for t in itertools::Itertools::multi_cartesian_product((0..arity).map(|_| atoms.iter().copied())) {
            if seen.contains(&t) {
                continue;
            }
            count += 1;
            for p in &perms {
                seen.insert(t.iter().map(|&x| p[x as usize]).collect::<Vec<_>>());
            }
        }
        count
    }

    #[test]
    fn equality_orbits_match_truncation() {
        for (support, arity) in [(vec![], 1), (vec![0], 1), (vec![], 2), (vec![0, 1], 2), (vec![0], 3)] {
            let sym: Vec<SymAtom> = support.iter().map(|&k| a(k)).collect();
            let n = orbits_over(Sort::Equality, &sym, arity).unwrap().len();
            assert_eq!(n, truncation_orbits(&support, support.len() as u32 + arity as u32 + 1, arity));
        }
    }

    #[test]
    fn ordered_types_respect_order() {
        let frame = Sort::Ordered.frame(&[SymAtom::rat(0, 1), SymAtom::rat(1, 1)]);
        let t = type_of(Sort::Ordered, &frame, &[SymAtom::rat(1, 3), SymAtom::rat(1, 4), SymAtom::rat(5, 1)]);
        assert_eq!(
            t.0,
            vec![
                Slot::Fresh { region: 1, rank: 1 },
                Slot::Fresh { region: 1, rank: 0 },
                Slot::Fresh { region: 2, rank: 0 }
            ]
        );
        assert_eq!(t.describe(Sort::Ordered, 2), "lt(s_0,0) & lt(0,s_1) & lt(s_0,1) & lt(1,s_1) & lt(1,0) & lt(s_1,2)");
    }

    #[test]
    fn representatives_realize_their_types() {
        for sort in Sort::ALL {
            let support: Vec<SymAtom> = match sort {
                Sort::Equality => vec![a(2), a(5)],
                Sort::Ordered => vec![SymAtom::rat(-1, 1), SymAtom::rat(3, 2)],
                Sort::Paired => vec![SymAtom::Pair(1, 0)],
                Sort::TwoSorted => vec![SymAtom::Half(0, 1), SymAtom::Half(1, 0)],
            };
            let frame = sort.frame(&support);
            for arity in 1..=3 {
                for ty in orbits_in_frame(sort, &frame, arity) {
                    let rep = representative(sort, &frame, &ty, &[a(9), SymAtom::Pair(7, 1), SymAtom::Half(1, 4)]);
                    assert_eq!(type_of(sort, &frame, &rep), ty, "{sort} {ty:?}");
                }
            }
        }
    }

    #[test]
    fn paired_sides_are_relative() {
        let t1 = type_of(Sort::Paired, &[], &[SymAtom::Pair(4, 1), SymAtom::Pair(4, 0)]);
        let t2 = type_of(Sort::Paired, &[], &[SymAtom::Pair(9, 0), SymAtom::Pair(9, 1)]);
        assert_eq!(t1, t2);
        assert_eq!(t1.describe(Sort::Paired, 0), "new(0) & pairmate(1,0)");
        assert_eq!(orbits_over(Sort::Paired, &[], 2).unwrap().len(), 3);
    }
}
