//! Permutation models: the predicate domains `J_n` determined by a group and a
//! normal filter or ideal.

mod catalog;

pub use catalog::{make_catalog_model, ModelId};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::family::{filter_contains, Family, FilterKind, IdealKind};
use crate::perm::{Atom, Domain, PermGroup, Permutation, PredicateRel};
use crate::symbolic::SymbolicStructure;

/// Whether `J_n` over a domain of `size` atoms may be enumerated.
pub fn level_enumerable(size: usize, arity: usize, allow_large: bool) -> bool {
    match arity {
        1 => size <= 16,
        2 => size <= 4 || (allow_large && size == 5),
        3 => size <= 2,
        _ => false,
    }
}

/// One predicate domain `J_n`.
#[derive(Clone, Debug)]
pub struct Level {
    arity: usize,
    /// Sorted by encoding; `None` when the level answers membership only.
    members: Option<Vec<PredicateRel>>,
}

impl Level {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn members(&self) -> Option<&[PredicateRel]> {
        self.members.as_deref()
    }
}

#[derive(Clone, Debug)]
pub struct FiniteStructure {
    domain: Domain,
    group: PermGroup,
    /// `None` for hand-built structures and for unmaterialized full ones.
    family: Option<Family>,
    provenance: String,
    generalized: bool,
    levels: Vec<Level>,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub arity_cap: usize,
    /// Enumerates binary predicates over five atoms.
    pub allow_large: bool,
    pub exec: Exec,
}

impl BuildOptions {
    pub fn new(arity_cap: usize) -> Self {
        BuildOptions { arity_cap, allow_large: false, exec: Exec::default() }
    }
}

pub fn build_model(domain: &Domain, group: &PermGroup, family: &Family, arity_cap: usize) -> Result<FiniteStructure> {
    build_model_with(domain, group, family, &BuildOptions::new(arity_cap))
}

pub fn build_model_with(
    domain: &Domain,
    group: &PermGroup,
    family: &Family,
    opts: &BuildOptions,
) -> Result<FiniteStructure> {
    if group.degree() != domain.len() {
        return Err(Error::DomainMismatch { expected: domain.len(), found: group.degree() });
    }
    validate_family(group, family)?;
    let mut levels = Vec::with_capacity(opts.arity_cap);
    for n in 1..=opts.arity_cap {
        if !level_enumerable(domain.len(), n, opts.allow_large) {
            return Err(Error::CapExceeded(format!(
                "J_{n} over {} atoms is beyond the enumeration caps",
                domain.len()
            )));
        }
        levels.push(Level { arity: n, members: Some(enumerate_level(group, family, n, opts.exec)?) });
    }
    Ok(FiniteStructure {
        domain: domain.clone(),
        group: group.clone(),
        family: Some(family.clone()),
        provenance: family.name(),
        generalized: family.generalized(),
        levels,
    })
}

fn validate_family(group: &PermGroup, family: &Family) -> Result<()> {
    let n = group.degree();
    let check_pred = |p: &PredicateRel| {
        if p.domain_size() != n {
            return Err(Error::FamilyMismatch(format!("predicate over {} atoms", p.domain_size())));
        }
        Ok(())
    };
    let check_ideal = |kind: &IdealKind| -> Result<()> {
        match kind {
            IdealKind::FiniteSupports => Ok(()),
            IdealKind::Extended(p0) => p0.iter().try_for_each(check_pred),
            IdealKind::Explicit(members) => members.iter().try_for_each(|m| {
                if m.atoms.iter().any(|&a| a as usize >= n) {
                    return Err(Error::FamilyMismatch("support atom outside the domain".into()));
                }
                m.preds.iter().try_for_each(check_pred)
            }),
        }
    };
    match family {
        Family::Ideal(i) => check_ideal(&i.kind),
        Family::Filter(f) => match &f.kind {
            FilterKind::AllSubgroups => Ok(()),
            FilterKind::Induced(i) => check_ideal(&i.kind),
            FilterKind::Explicit(list) => {
                if list.iter().any(|h| h.degree() != n) {
                    return Err(Error::FamilyMismatch("subgroup over another domain".into()));
                }
                if list.iter().any(|h| !h.is_subgroup_of(group)) {
                    return Err(Error::NotASubgroup);
                }
                Ok(())
            }
        },
    }
}

/// Whether a predicate with symmetry subgroup `h` is admitted by the family.
pub fn family_admits(group: &PermGroup, family: &Family, h: &PermGroup) -> Result<bool> {
    match family {
        Family::Filter(f) => filter_contains(group, f, h),
        Family::Ideal(i) => Ok(i.support_witness(group, h)?.is_some()),
    }
}

/// Applies a cell map to a bit mask.
#[inline]
fn act_mask(map: &[u32], mut mask: u64) -> u64 {
    let mut out = 0;
    while mask != 0 {
        let c = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        out |= 1 << map[c];
    }
    out
}

/// Enumerates `J_n` one `G`-orbit of `pred_n(I)` at a time.
fn enumerate_level(group: &PermGroup, family: &Family, arity: usize, exec: Exec) -> Result<Vec<PredicateRel>> {
    let size = group.degree();
    let cells = size.pow(arity as u32);
    debug_assert!(cells <= 32);
    let total = 1usize << cells;
    let gen_maps: Vec<Vec<u32>> = group.generators().iter().map(|g| PredicateRel::cell_map(g, size, arity)).collect();

    // Orbits by breadth-first search over generators; ascending scan order
    // makes the first mask seen in each orbit its least element.
    const UNSEEN: u32 = u32::MAX;
    let mut orbit_of = vec![UNSEEN; total];
    let mut reps: Vec<u64> = Vec::new();
    let mut stack = Vec::new();
    for start in 0..total {
        if orbit_of[start] != UNSEEN {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(start as u64);
        orbit_of[start] = id;
        stack.push(start as u64);
        while let Some(m) = stack.pop() {
            for map in &gen_maps {
                let img = act_mask(map, m) as usize;
                if orbit_of[img] == UNSEEN {
                    orbit_of[img] = id;
                    stack.push(img as u64);
                }
            }
        }
    }

    let elem_maps: Vec<Vec<u32>> = group.elements().iter().map(|g| PredicateRel::cell_map(g, size, arity)).collect();
    let words = group.order().div_ceil(64);
    // Symmetry subgroup of each representative, as a bitset over group elements.
    let keys: Vec<Vec<u64>> = exec.map(&reps, |&m| {
        let mut key = vec![0u64; words];
        for (i, map) in elem_maps.iter().enumerate() {
            if act_mask(map, m) == m {
                key[i / 64] |= 1 << (i % 64);
            }
        }
        key
    });
    let mut distinct: HashMap<&[u64], usize> = HashMap::new();
    let mut unique: Vec<&[u64]> = Vec::new();
    let key_ids: Vec<usize> = keys
        .iter()
        .map(|k| {
            *distinct.entry(k.as_slice()).or_insert_with(|| {
                unique.push(k.as_slice());
                unique.len() - 1
            })
        })
        .collect();
    let verdicts: Vec<Result<bool>> = exec.map(&unique, |key| {
        let elements: Vec<Permutation> = group
            .elements()
            .iter()
            .enumerate()
            .filter(|(i, _)| key[i / 64] >> (i % 64) & 1 == 1)
            .map(|(_, e)| e.clone())
            .collect();
        family_admits(group, family, &PermGroup::from_closed(size, elements))
    });
    let verdicts = verdicts.into_iter().collect::<Result<Vec<bool>>>()?;
    let admitted: Vec<bool> = key_ids.iter().map(|&k| verdicts[k]).collect();
    Ok((0..total)
        .filter(|&m| admitted[orbit_of[m] as usize])
        .map(|m| PredicateRel::from_mask(size, arity, m as u64))
        .collect())
}

/// Outcome of a closure audit; the witness is the first `(π, α)` with `α^π ∉ J_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    pub closed: bool,
    pub witness: Option<(Permutation, PredicateRel)>,
    /// Levels skipped because they are not materialized.
    pub skipped_levels: Vec<usize>,
}

impl FiniteStructure {
    /// A structure given by explicit member lists for `J_1, J_2, ...`.
    pub fn hand_built(domain: Domain, group: PermGroup, levels: Vec<Vec<PredicateRel>>) -> Result<Self> {
        if group.degree() != domain.len() {
            return Err(Error::DomainMismatch { expected: domain.len(), found: group.degree() });
        }
        let mut out = Vec::new();
        for (i, mut members) in levels.into_iter().enumerate() {
            if let Some(p) = members.iter().find(|p| p.arity() != i + 1 || p.domain_size() != domain.len()) {
                return Err(Error::ArityOutOfRange { arity: p.arity(), cap: i + 1 });
            }
            members.sort();
            members.dedup();
            out.push(Level { arity: i + 1, members: Some(members) });
        }
        Ok(FiniteStructure {
            domain,
            group,
            family: None,
            provenance: "hand-built".into(),
            generalized: false,
            levels: out,
        })
    }

    /// The full structure `J_n = pred_n(I)` with membership answered lazily.
    pub fn full_unmaterialized(domain: Domain, arity_cap: usize) -> Self {
        let n = domain.len();
        FiniteStructure {
            domain,
            group: PermGroup::trivial(n),
            family: None,
            provenance: "full".into(),
            generalized: false,
            levels: (1..=arity_cap).map(|arity| Level { arity, members: None }).collect(),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn set_provenance(&mut self, p: impl Into<String>) {
        self.provenance = p.into();
    }

    pub fn generalized(&self) -> bool {
        self.generalized
    }

    pub fn arity_cap(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `J_0 = I`.
    pub fn individuals(&self) -> impl Iterator<Item = Atom> {
        self.domain.atoms()
    }

    /// Built from a family (so closed under the group by construction).
    pub fn is_built(&self) -> bool {
        self.family.is_some()
    }

    pub fn level(&self, arity: usize) -> Result<&Level> {
        if arity == 0 || arity > self.levels.len() {
            return Err(Error::ArityOutOfRange { arity, cap: self.levels.len() });
        }
        Ok(&self.levels[arity - 1])
    }

    /// Members of `J_n`, failing when the level is not materialized.
    pub fn members(&self, arity: usize) -> Result<&[PredicateRel]> {
        self.level(arity)?.members().ok_or_else(|| Error::CapExceeded(format!("J_{arity} is not materialized")))
    }

    pub fn is_member(&self, alpha: &PredicateRel) -> Result<bool> {
        let level = self.level(alpha.arity())?;
        if alpha.domain_size() != self.domain.len() {
            return Err(Error::DomainMismatch { expected: self.domain.len(), found: alpha.domain_size() });
        }
        match (&level.members, &self.family) {
            (Some(m), _) => Ok(m.binary_search(alpha).is_ok()),
            (None, Some(f)) => family_admits(&self.group, f, &self.group.sym_subgroup(alpha)?),
            (None, None) => Ok(true),
        }
    }

    /// Whether every materialized level is all of `pred_n(I)`.
    pub fn is_full(&self) -> bool {
        self.levels.iter().all(|l| match &l.members {
            Some(m) => Some(m.len()) == 1usize.checked_shl(self.domain.len().pow(l.arity as u32) as u32),
            None => self.family.is_none(),
        })
    }

    pub fn check_group_closure(&self) -> ClosureReport {
        self.check_group_closure_with(Exec::default())
    }

    pub fn check_group_closure_with(&self, exec: Exec) -> ClosureReport {
        let mut skipped = Vec::new();
        for level in &self.levels {
            let Some(members) = &level.members else {
                skipped.push(level.arity);
                continue;
            };
            let witness = exec.find_first(self.group.elements(), |pi| {
                members.iter().find(|a| members.binary_search(&a.act(pi)).is_err()).map(|a| (pi.clone(), a.clone()))
            });
            if let Some(w) = witness {
                return ClosureReport { closed: false, witness: Some(w), skipped_levels: skipped };
            }
        }
        ClosureReport { closed: true, witness: None, skipped_levels: skipped }
    }

    /// JSON export listing members of each level in canonical order.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "provenance": self.provenance,
            "generalized": self.generalized,
            "domain": self.domain,
            "group": {
                "order": self.group.order(),
                "generators": self.group.generator_strings(&self.domain),
            },
            "levels": self.levels.iter().map(|l| match &l.members {
                Some(m) => serde_json::json!({
                    "arity": l.arity,
                    "size": m.len(),
                    "members": m.iter().map(|p| p.format(&self.domain)).collect::<Vec<_>>(),
                }),
                None => serde_json::json!({ "arity": l.arity, "materialized": false }),
            }).collect::<Vec<_>>(),
        })
    }
}

/// A predicate structure with a finite or an orbit-finite backend.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum PredicateStructure {
    Finite(FiniteStructure),
    Symbolic(SymbolicStructure),
}

impl PredicateStructure {
    pub fn name(&self) -> String {
        match self {
            PredicateStructure::Finite(s) => s.provenance().to_string(),
            PredicateStructure::Symbolic(s) => s.name().to_string(),
        }
    }

    pub fn generalized(&self) -> bool {
        match self {
            PredicateStructure::Finite(s) => s.generalized(),
            PredicateStructure::Symbolic(_) => false,
        }
    }

    pub fn as_finite(&self) -> Result<&FiniteStructure> {
        match self {
            PredicateStructure::Finite(s) => Ok(s),
            PredicateStructure::Symbolic(_) => Err(Error::NeedsFinite),
        }
    }

    pub fn as_symbolic(&self) -> Result<&SymbolicStructure> {
        match self {
            PredicateStructure::Symbolic(s) => Ok(s),
            PredicateStructure::Finite(_) => Err(Error::NeedsSymbolic),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{NormalFilter, NormalIdeal, Support};

    fn pair_group() -> PermGroup {
        PermGroup::from_cycle_strings(&Domain::range(4), &["(0 1)", "(2 3)"]).unwrap()
    }

    pub(crate) fn pair_model() -> FiniteStructure {
        build_model(&Domain::range(4), &pair_group(), &Family::Ideal(NormalIdeal::empty_only()), 2).unwrap()
    }

    fn unary(n: usize, xs: &[Atom]) -> PredicateRel {
        PredicateRel::from_tuples(n, 1, xs.iter().map(|&x| [x])).unwrap()
    }

    #[test]
    fn two_atoms_give_full_unary_level() {
        let g = PermGroup::symmetric(2).unwrap();
        let s = build_model(&Domain::range(2), &g, &Family::Ideal(NormalIdeal::finite_supports()), 1).unwrap();
        assert_eq!(s.members(1).unwrap().len(), 4);
        assert!(s.is_full());
    }

    #[test]
    fn pair_model_keeps_flip_invariant_sets() {
        let s = pair_model();
        let got: Vec<String> = s.members(1).unwrap().iter().map(|p| p.format(s.domain())).collect();
        assert_eq!(got, vec!["{}", "{0,1}", "{2,3}", "{0,1,2,3}"]);
        assert!(s.is_member(&unary(4, &[0, 1])).unwrap());
        assert!(!s.is_member(&unary(4, &[0])).unwrap());
        assert!(s.generalized());
        // Brute-force oracle for the binary level.
        let g = pair_group();
        let expected = (0u64..1 << 16)
            .map(|m| PredicateRel::from_mask(4, 2, m))
            .filter(|p| g.elements().iter().all(|e| p.is_fixed_by(e)))
            .count();
        assert_eq!(s.members(2).unwrap().len(), expected);
        assert_eq!(expected, 64);
    }

    #[test]
    fn trivial_group_is_standard() {
        let s =
            build_model(&Domain::range(3), &PermGroup::trivial(3), &Family::Ideal(NormalIdeal::finite_supports()), 2)
                .unwrap();
        assert_eq!(s.members(1).unwrap().len(), 8);
        assert_eq!(s.members(2).unwrap().len(), 512);
    }

    #[test]
    fn filter_and_ideal_routes_agree() {
        let d = Domain::range(3);
        for gens in [vec![], vec!["(0 1)"], vec!["(0 1 2)"], vec!["(0 1)", "(1 2)"]] {
            let g = PermGroup::from_cycle_strings(&d, &gens).unwrap();
            let ideals = [
                NormalIdeal::finite_supports(),
                NormalIdeal::empty_only(),
                NormalIdeal::explicit(vec![Support::default(), Support::atoms([0])], true),
            ];
            for ideal in ideals {
                let a = build_model(&d, &g, &Family::Ideal(ideal.clone()), 2).unwrap();
                let b = build_model(&d, &g, &Family::Filter(NormalFilter::induced(ideal)), 2).unwrap();
                for n in 1..=2 {
                    assert_eq!(a.members(n).unwrap(), b.members(n).unwrap());
                }
            }
        }
    }

    #[test]
    fn members_round_trip_through_the_filter() {
        let s = pair_model();
        let f = NormalFilter::induced(NormalIdeal::empty_only());
        for alpha in s.members(2).unwrap() {
            let h = s.group().sym_subgroup(alpha).unwrap();
            assert!(filter_contains(s.group(), &f, &h).unwrap());
        }
    }

    #[test]
    fn larger_filters_give_larger_levels() {
        let d = Domain::range(4);
        let g = pair_group();
        let small = build_model(&d, &g, &Family::Ideal(NormalIdeal::empty_only()), 2).unwrap();
        let mid = NormalIdeal::explicit(
            vec![Support::default(), Support::atoms([0, 1]), Support::atoms([2, 3]), Support::atoms([0, 1, 2, 3])],
            true,
        );
        let mid = build_model(&d, &g, &Family::Ideal(mid), 2).unwrap();
        let big = build_model(&d, &g, &Family::Filter(NormalFilter::all_subgroups()), 2).unwrap();
        for n in 1..=2 {
            for p in small.members(n).unwrap() {
                assert!(mid.is_member(p).unwrap());
            }
            for p in mid.members(n).unwrap() {
                assert!(big.is_member(p).unwrap());
            }
        }
    }

    #[test]
    fn sequential_and_parallel_builds_match() {
        let d = Domain::range(4);
        let g = PermGroup::symmetric(4).unwrap();
        let fam = Family::Ideal(NormalIdeal::empty_only());
        let mut opts = BuildOptions::new(2);
        opts.exec = Exec::Sequential;
        let a = build_model_with(&d, &g, &fam, &opts).unwrap();
        opts.exec = Exec::Parallel;
        let b = build_model_with(&d, &g, &fam, &opts).unwrap();
        assert_eq!(a.members(2).unwrap(), b.members(2).unwrap());
    }

    #[test]
    fn caps_are_enforced() {
        let d = Domain::range(5);
        let g = PermGroup::trivial(5);
        let fam = Family::Ideal(NormalIdeal::finite_supports());
        assert!(matches!(build_model(&d, &g, &fam, 2), Err(Error::CapExceeded(_))));
        assert!(matches!(build_model(&Domain::range(3), &g, &fam, 1), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn planted_non_closed_structure() {
        let s =
            FiniteStructure::hand_built(Domain::range(2), PermGroup::symmetric(2).unwrap(), vec![vec![unary(2, &[0])]])
                .unwrap();
        let r = s.check_group_closure();
        assert!(!r.closed);
        let (pi, alpha) = r.witness.unwrap();
        assert_eq!(pi.to_string(), "(0 1)");
        assert_eq!(alpha, unary(2, &[0]));
        assert!(pair_model().check_group_closure().closed);
    }

    #[test]
    fn arity_range_is_checked() {
        let s = pair_model();
        let t = PredicateRel::empty(4, 3);
        assert!(matches!(s.is_member(&t), Err(Error::ArityOutOfRange { .. })));
    }
}
