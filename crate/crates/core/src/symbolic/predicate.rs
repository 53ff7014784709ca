//! Finitely supported predicates as unions of orbit types.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{Atom, PredicateRel};
use crate::symbolic::atom::{Sort, SymAtom};
use crate::symbolic::types::{
    gap_point, orbits_in_frame, pool, representative, tuples, type_of, TupleType, SYMBOLIC_ARITY_CAP,
};

/// A predicate over an infinite sort, given by the orbit types it contains
/// relative to a frame of named atoms.
///
/// Invariant: the frame is sorted and mate-closed, and `types` is a subset of
/// the orbit decomposition over it. Equality is extensional.
#[derive(Clone, Debug)]
pub struct OrbitPredicate {
    sort: Sort,
    arity: usize,
    frame: Vec<SymAtom>,
    types: BTreeSet<TupleType>,
}

fn check_arity(arity: usize) -> Result<()> {
    if arity == 0 || arity > SYMBOLIC_ARITY_CAP {
        return Err(Error::ArityOutOfRange { arity, cap: SYMBOLIC_ARITY_CAP });
    }
    Ok(())
}

impl OrbitPredicate {
    /// The predicate supported by `support` whose tuples satisfy `rule`.
    ///
    /// `rule` is consulted once per orbit, on a representative, so it must be
    /// invariant under the pointwise stabilizer of `support`.
    pub fn define(sort: Sort, support: &[SymAtom], arity: usize, rule: impl Fn(&[SymAtom]) -> bool) -> Result<Self> {
        check_arity(arity)?;
        sort.check(support)?;
        let frame = sort.frame(support);
        let types = orbits_in_frame(sort, &frame, arity)
            .into_iter()
            .filter(|ty| rule(&representative(sort, &frame, ty, &[])))
            .collect();
        Ok(OrbitPredicate { sort, arity, frame, types }.canonical())
    }

    /// Union of the given orbit types over `support`.
    pub fn from_types(
        sort: Sort,
        support: &[SymAtom],
        arity: usize,
        types: impl IntoIterator<Item = TupleType>,
    ) -> Result<Self> {
        check_arity(arity)?;
        sort.check(support)?;
        let frame = sort.frame(support);
        let valid: BTreeSet<TupleType> = orbits_in_frame(sort, &frame, arity).into_iter().collect();
        let types: BTreeSet<TupleType> = types.into_iter().collect();
        if let Some(bad) = types.iter().find(|t| !valid.contains(*t)) {
            return Err(Error::Config(format!("{bad:?} is not an orbit type over the support")));
        }
        Ok(OrbitPredicate { sort, arity, frame, types }.canonical())
    }

    /// Unchecked constructor for search loops; `frame` must come from
    /// [`Sort::frame`] and `types` from its orbit decomposition.
    pub(crate) fn raw(sort: Sort, arity: usize, frame: Vec<SymAtom>, types: BTreeSet<TupleType>) -> Self {
        OrbitPredicate { sort, arity, frame, types }
    }

    pub fn empty(sort: Sort, arity: usize) -> Result<Self> {
        Self::define(sort, &[], arity, |_| false)
    }

    pub fn full(sort: Sort, arity: usize) -> Result<Self> {
        Self::define(sort, &[], arity, |_| true)
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The named atoms the descriptors refer to as `s_0, s_1, ...`.
    pub fn frame(&self) -> &[SymAtom] {
        &self.frame
    }

    pub fn types(&self) -> &BTreeSet<TupleType> {
        &self.types
    }

    pub fn contains(&self, tuple: &[SymAtom]) -> bool {
        tuple.len() == self.arity
            && tuple.iter().all(|a| self.sort.accepts(a))
            && self.types.contains(&type_of(self.sort, &self.frame, tuple))
    }

    /// Whether the pointwise stabilizer of `atoms` leaves the predicate fixed.
    pub fn is_supported_by(&self, atoms: &[SymAtom]) -> bool {
        let candidate = self.sort.frame(atoms);
        let union = self.sort.frame(self.frame.iter().chain(&candidate));
        // Every type over the union is realized in its pool, and membership is
        // constant on those types, so this check is exhaustive.
        let mut seen: BTreeMap<TupleType, bool> = BTreeMap::new();
        for t in tuples(&pool(self.sort, &union, self.arity), self.arity) {
            let inside = self.contains(&t);
            if *seen.entry(type_of(self.sort, &candidate, &t)).or_insert(inside) != inside {
                return false;
            }
        }
        true
    }

    /// The least frame supporting the predicate, by greedy drop-testing.
    ///
    /// Supports of these sorts are closed under intersection, so the greedy
    /// result does not depend on the drop order. Paired atoms drop with their mates.
    fn minimal_frame(&self) -> Vec<SymAtom> {
        let mut frame = self.frame.clone();
        let mut i = 0;
        while i < frame.len() {
            let a = frame[i];
            let trial: Vec<SymAtom> = frame.iter().copied().filter(|&b| b != a && Some(b) != a.mate()).collect();
            if self.is_supported_by(&trial) {
                frame = trial;
                i = frame.iter().filter(|b| **b < a).count();
            } else {
                i += 1;
            }
        }
        frame
    }

    /// The smallest support. For paired atoms, where a pair is fixed as soon
    /// as one side is, each pair is named by its side-0 atom.
    pub fn minimal_support(&self) -> Vec<SymAtom> {
        let frame = self.minimal_frame();
        match self.sort {
            Sort::Paired => frame.into_iter().filter(|a| matches!(a, SymAtom::Pair(_, 0))).collect(),
            _ => frame,
        }
    }

    /// The same relation, described over `frame`; `frame` must support it.
    fn reframed(&self, frame: Vec<SymAtom>) -> Self {
        let types = orbits_in_frame(self.sort, &frame, self.arity)
            .into_iter()
            .filter(|ty| self.contains(&representative(self.sort, &frame, ty, &self.frame)))
            .collect();
        OrbitPredicate { sort: self.sort, arity: self.arity, frame, types }
    }

    /// The same relation over its least frame.
    pub fn canonical(&self) -> Self {
        let frame = self.minimal_frame();
        if frame == self.frame {
            return self.clone();
        }
        self.reframed(frame)
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        if self.sort != other.sort || self.arity != other.arity {
            return Err(Error::Config("predicates of different sorts or arities".into()));
        }
        let frame = self.sort.frame(self.frame.iter().chain(&other.frame));
        let avoid: Vec<SymAtom> = frame.clone();
        let types = orbits_in_frame(self.sort, &frame, self.arity)
            .into_iter()
            .filter(|ty| {
                let t = representative(self.sort, &frame, ty, &avoid);
                op(self.contains(&t), other.contains(&t))
            })
            .collect();
        Ok(OrbitPredicate { sort: self.sort, arity: self.arity, frame, types }.canonical())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x || y)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x && y)
    }

    pub fn complement(&self) -> Self {
        let types = orbits_in_frame(self.sort, &self.frame, self.arity)
            .into_iter()
            .filter(|ty| !self.types.contains(ty))
            .collect();
        OrbitPredicate { sort: self.sort, arity: self.arity, frame: self.frame.clone(), types }
    }

    /// Extensional equality.
    pub fn same_relation(&self, other: &Self) -> bool {
        if self.sort != other.sort || self.arity != other.arity {
            return false;
        }
        let frame = self.sort.frame(self.frame.iter().chain(&other.frame));
        orbits_in_frame(self.sort, &frame, self.arity).iter().all(|ty| {
            let t = representative(self.sort, &frame, ty, &frame);
            self.contains(&t) == other.contains(&t)
        })
    }

    pub fn descriptors(&self) -> Vec<String> {
        self.types.iter().map(|t| t.describe(self.sort, self.frame.len())).collect()
    }

    /// Materializes the predicate over `sample`, atom `sample[i]` becoming `i`.
    pub fn to_finite_with(&self, sample: &[SymAtom]) -> Result<PredicateRel> {
        self.sort.check(sample)?;
        let mut sorted = sample.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != sample.len() {
            return Err(Error::DuplicateAtom("sample lists an atom twice".into()));
        }
        let index: Vec<Atom> = (0..sample.len() as Atom).collect();
        let members = tuples(sample, self.arity)
            .zip(itertools::Itertools::multi_cartesian_product((0..self.arity).map(|_| index.iter().copied())))
            .filter(|(t, _)| self.contains(t))
            .map(|(_, ix)| ix);
        PredicateRel::from_tuples(sample.len(), self.arity, members)
    }

    /// Materializes the predicate over the standard truncation of `m` atoms.
    pub fn to_finite(&self, m: usize) -> Result<(Vec<SymAtom>, PredicateRel)> {
        let frame = self.minimal_frame();
        let needed = self.minimal_support().len() + 2;
        if m < needed || m < frame.len() {
            return Err(Error::TruncationTooSmall { truncation: m, needed: needed.max(frame.len()) });
        }
        let s = truncation(self.sort, &frame, m);
        let rel = self.to_finite_with(&s)?;
        Ok((s, rel))
    }
}

/// `m` atoms of `sort` in increasing order, containing `frame` when it fits:
/// the least unused indices for the discrete sorts, and points spread over the
/// gaps of the frame for the ordered sort.
pub fn truncation(sort: Sort, frame: &[SymAtom], m: usize) -> Vec<SymAtom> {
    let mut out: Vec<SymAtom> = frame.iter().copied().take(m).collect();
    let mut extras = m - out.len();
    match sort {
        Sort::Equality => {
            out.extend((0u32..).map(SymAtom::Eq).filter(|a| !frame.contains(a)).take(extras));
        }
        Sort::Paired => {
            for n in (0u32..).filter(|n| !frame.contains(&SymAtom::Pair(*n, 0))) {
                if extras == 0 {
                    break;
                }
                for s in 0..2u8.min(extras as u8) {
                    out.push(SymAtom::Pair(n, s));
                    extras -= 1;
                }
            }
        }
        Sort::TwoSorted => {
            let mut next = [0u32; 2];
            let mut h = 0;
            while extras > 0 {
                let a = SymAtom::Half(h as u8, next[h]);
                next[h] += 1;
                if !frame.contains(&a) {
                    out.push(a);
                    extras -= 1;
                    h = 1 - h;
                }
            }
        }
        Sort::Ordered => {
            let gaps = frame.len() + 1;
            let counts: Vec<usize> = (0..gaps).map(|g| extras / gaps + usize::from(g < extras % gaps)).collect();
            for (g, &c) in counts.iter().enumerate() {
                out.extend((0..c).map(|r| SymAtom::Rat(gap_point(frame, g, r, c))));
            }
        }
    }
    out.sort();
    out
}

impl PartialEq for OrbitPredicate {
    fn eq(&self, other: &Self) -> bool {
        self.same_relation(other)
    }
}

impl Eq for OrbitPredicate {}

impl fmt::Display for OrbitPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let frame: Vec<String> = self.frame.iter().map(|a| a.to_string()).collect();
        let desc = self.descriptors();
        write!(f, "{}/{} over [{}]: ", self.sort, self.arity, frame.join(", "))?;
        if desc.is_empty() {
            f.write_str("false")
        } else {
            f.write_str(&desc.join(" | "))
        }
    }
}

impl Serialize for OrbitPredicate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OrbitPredicate", 4)?;
        st.serialize_field("sort", &self.sort)?;
        st.serialize_field("arity", &self.arity)?;
        st.serialize_field("support", &self.frame)?;
        st.serialize_field("descriptors", &self.descriptors())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(k: u32) -> SymAtom {
        SymAtom::Eq(k)
    }

    #[test]
    fn minimal_support_examples() {
        let p =
            OrbitPredicate::define(Sort::Equality, &[a(0), a(1), a(2)], 1, |t| t[0] == a(0) || t[0] == a(1)).unwrap();
        assert_eq!(p.minimal_support(), vec![a(0), a(1)]);
        assert_eq!(p.frame(), &[a(0), a(1)]);
        assert!(OrbitPredicate::full(Sort::Equality, 2).unwrap().minimal_support().is_empty());
        let q = SymAtom::rat(1, 2);
        let lt = OrbitPredicate::define(Sort::Ordered, &[q, SymAtom::rat(3, 1)], 1, |t| t[0] < q).unwrap();
        assert_eq!(lt.minimal_support(), vec![q]);
        let pair =
            OrbitPredicate::define(Sort::Paired, &[SymAtom::Pair(2, 1)], 1, |t| t[0] == SymAtom::Pair(2, 1)).unwrap();
        assert_eq!(pair.minimal_support(), vec![SymAtom::Pair(2, 0)]);
    }

    #[test]
    fn to_finite_examples() {
        let ne = OrbitPredicate::define(Sort::Equality, &[a(0)], 1, |t| t[0] != a(0)).unwrap();
        let (sample, rel) = ne.to_finite(4).unwrap();
        assert_eq!(sample, vec![a(0), a(1), a(2), a(3)]);
        assert_eq!(rel.tuples(), vec![vec![1], vec![2], vec![3]]);
        assert!(matches!(ne.to_finite(2), Err(Error::TruncationTooSmall { .. })));

        let le = OrbitPredicate::define(Sort::Ordered, &[], 2, |t| t[0] <= t[1]).unwrap();
        let (_, rel) = le.to_finite(4).unwrap();
        let expected: Vec<Vec<Atom>> = (0..4).flat_map(|i| (i..4).map(move |j| vec![i, j])).collect();
        let mut got = rel.tuples();
        got.sort();
        let mut want = expected;
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn boolean_operations_are_extensional() {
        let x0 = OrbitPredicate::define(Sort::Equality, &[a(0)], 1, |t| t[0] == a(0)).unwrap();
        let x1 = OrbitPredicate::define(Sort::Equality, &[a(1)], 1, |t| t[0] == a(1)).unwrap();
        let both = x0.union(&x1).unwrap();
        assert_eq!(both.minimal_support(), vec![a(0), a(1)]);
        assert!(both.contains(&[a(1)]) && !both.contains(&[a(5)]));
        assert_eq!(x0.intersection(&x1).unwrap(), OrbitPredicate::empty(Sort::Equality, 1).unwrap());
        assert_eq!(x0.union(&x0.complement()).unwrap(), OrbitPredicate::full(Sort::Equality, 1).unwrap());
    }

    #[test]
    fn json_lists_descriptors() {
        let p = OrbitPredicate::define(Sort::Equality, &[a(0)], 2, |t| t[0] == a(0) && t[1] != a(0)).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["support"], serde_json::json!(["a0"]));
        assert_eq!(v["descriptors"], serde_json::json!(["eq(0,s_0) & new(1)"]));
    }
}
