//! Normal filters of subgroups and (extended) normal ideals of supports,
//! together with exhaustive axiom audits.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{Atom, Domain, PermGroup, Permutation, PredicateRel};

/// A subset of `I ∪ pred(I)`: finitely many atoms plus finitely many predicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    pub atoms: BTreeSet<Atom>,
    pub preds: BTreeSet<PredicateRel>,
}

impl Support {
    pub fn atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Self {
        Support { atoms: atoms.into_iter().collect(), preds: BTreeSet::new() }
    }

    pub fn len(&self) -> usize {
        self.atoms.len() + self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.preds.is_empty()
    }

    /// `πP = {π(x) | x ∈ P ∩ I} ∪ {α^π | α ∈ P ∩ pred(I)}`.
    pub fn act(&self, pi: &Permutation) -> Support {
        Support {
            atoms: self.atoms.iter().map(|&a| pi.apply(a)).collect(),
            preds: self.preds.iter().map(|p| p.act(pi)).collect(),
        }
    }

    pub fn union(&self, other: &Support) -> Support {
        Support {
            atoms: self.atoms.union(&other.atoms).copied().collect(),
            preds: self.preds.union(&other.preds).cloned().collect(),
        }
    }

    /// `G(P)`.
    pub fn stabilizer(&self, group: &PermGroup) -> Result<PermGroup> {
        let atoms: Vec<Atom> = self.atoms.iter().copied().collect();
        let preds: Vec<PredicateRel> = self.preds.iter().cloned().collect();
        group.support_stabilizer(&atoms, &preds)
    }

    fn fixed_by(&self, pi: &Permutation) -> bool {
        self.atoms.iter().all(|&a| pi.fixes(a)) && self.preds.iter().all(|p| p.is_fixed_by(pi))
    }

    /// Canonical order: by size, then lexicographically.
    fn canonical_key(&self) -> (usize, &BTreeSet<Atom>, &BTreeSet<PredicateRel>) {
        (self.len(), &self.atoms, &self.preds)
    }

    pub fn render(&self, domain: &Domain) -> String {
        let mut parts: Vec<String> = self.atoms.iter().map(|&a| domain.label(a).to_string()).collect();
        parts.extend(self.preds.iter().map(|p| p.format(domain)));
        format!("{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealKind {
    /// All finite subsets of `I`.
    FiniteSupports,
    /// The listed supports, kept sorted and duplicate-free.
    Explicit(Vec<Support>),
    /// All finite subsets of `I ∪ P0`.
    Extended(Vec<PredicateRel>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalIdeal {
    pub kind: IdealKind,
    /// Permits violations of the "every finite subset of I" axiom.
    pub generalized: bool,
}

impl NormalIdeal {
    pub fn finite_supports() -> Self {
        NormalIdeal { kind: IdealKind::FiniteSupports, generalized: false }
    }

    pub fn explicit(mut members: Vec<Support>, generalized: bool) -> Self {
        members.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
        members.dedup();
        NormalIdeal { kind: IdealKind::Explicit(members), generalized }
    }

    /// The generalized ideal `{∅}`.
    pub fn empty_only() -> Self {
        Self::explicit(vec![Support::default()], true)
    }

    pub fn extended(mut preds: Vec<PredicateRel>) -> Self {
        preds.sort();
        preds.dedup();
        NormalIdeal { kind: IdealKind::Extended(preds), generalized: false }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            IdealKind::FiniteSupports => "finite-supports".into(),
            IdealKind::Explicit(m) => format!("explicit[{} members]", m.len()),
            IdealKind::Extended(p) => format!("extended[{} predicates]", p.len()),
        }
    }

    pub fn contains(&self, p: &Support) -> bool {
        match &self.kind {
            IdealKind::FiniteSupports => p.preds.is_empty(),
            IdealKind::Extended(p0) => p.preds.iter().all(|a| p0.binary_search(a).is_ok()),
            IdealKind::Explicit(members) => members.contains(p),
        }
    }

    /// Some `P` in the ideal with `G(P) ⊆ H`, preferring small ones.
    pub fn support_witness(&self, group: &PermGroup, h: &PermGroup) -> Result<Option<Support>> {
        let admits = |p: &Support| -> bool { group.elements().iter().filter(|e| p.fixed_by(e)).all(|e| h.contains(e)) };
        match &self.kind {
            IdealKind::Explicit(members) => Ok(members.iter().find(|p| admits(p)).cloned()),
            IdealKind::FiniteSupports | IdealKind::Extended(_) => {
                let p0: &[PredicateRel] = match &self.kind {
                    IdealKind::Extended(p0) => p0,
                    _ => &[],
                };
                // The fixed-point structure of H is the natural first guess.
                let fixed = Support {
                    atoms: (0..group.degree() as Atom).filter(|&a| h.elements().iter().all(|e| e.fixes(a))).collect(),
                    preds: p0.iter().filter(|a| h.elements().iter().all(|e| a.is_fixed_by(e))).cloned().collect(),
                };
                let universe = group.degree() + p0.len();
                if universe <= 8 {
                    for k in 0..=universe {
                        for pick in itertools::Itertools::combinations(0..universe, k) {
                            let p = Support {
                                atoms: pick.iter().filter(|&&i| i < group.degree()).map(|&i| i as Atom).collect(),
                                preds: pick
                                    .iter()
                                    .filter(|&&i| i >= group.degree())
                                    .map(|&i| p0[i - group.degree()].clone())
                                    .collect(),
                            };
                            if admits(&p) {
                                return Ok(Some(p));
                            }
                        }
                    }
                    return Ok(None);
                }
                if admits(&fixed) {
                    return Ok(Some(fixed));
                }
                // G(I) is trivial on a finite domain.
                Ok(Some(Support::atoms(0..group.degree() as Atom)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterKind {
    /// Every subgroup of `G`.
    AllSubgroups,
    /// `{H ≤ G | ∃P ∈ ideal: G(P) ⊆ H}`.
    Induced(NormalIdeal),
    /// A literal list of subgroups. Axiom audits treat the list as the whole
    /// system; membership queries use its upward closure.
    Explicit(Vec<PermGroup>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFilter {
    pub kind: FilterKind,
    pub generalized: bool,
}

impl NormalFilter {
    pub fn all_subgroups() -> Self {
        NormalFilter { kind: FilterKind::AllSubgroups, generalized: false }
    }

    pub fn induced(ideal: NormalIdeal) -> Self {
        let generalized = ideal.generalized;
        NormalFilter { kind: FilterKind::Induced(ideal), generalized }
    }

    pub fn explicit(mut subgroups: Vec<PermGroup>, generalized: bool) -> Self {
        subgroups.sort_by_cached_key(PermGroup::canonical_key);
        subgroups.dedup();
        NormalFilter { kind: FilterKind::Explicit(subgroups), generalized }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            FilterKind::AllSubgroups => "all-subgroups".into(),
            FilterKind::Induced(i) => format!("induced({})", i.name()),
            FilterKind::Explicit(l) => format!("explicit-subgroups[{}]", l.len()),
        }
    }
}

/// A normal filter or a normal ideal; either one determines a permutation model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Filter(NormalFilter),
    Ideal(NormalIdeal),
}

impl Family {
    pub fn generalized(&self) -> bool {
        match self {
            Family::Filter(f) => f.generalized,
            Family::Ideal(i) => i.generalized,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Family::Filter(f) => format!("filter:{}", f.name()),
            Family::Ideal(i) => format!("ideal:{}", i.name()),
        }
    }
}

/// Membership of `H` in the filter (for explicit lists: in their upward closure).
pub fn filter_contains(group: &PermGroup, filter: &NormalFilter, h: &PermGroup) -> Result<bool> {
    if !h.is_subgroup_of(group) {
        return Err(Error::NotASubgroup);
    }
    Ok(match &filter.kind {
        FilterKind::AllSubgroups => true,
        FilterKind::Induced(ideal) => ideal.support_witness(group, h)?.is_some(),
        FilterKind::Explicit(list) => list.iter().any(|k| k.is_subgroup_of(h)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
    #[serde(rename = "v")]
    V,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [Axiom::I, Axiom::II, Axiom::III, Axiom::IV, Axiom::V];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::I => "i",
            Axiom::II => "ii",
            Axiom::III => "iii",
            Axiom::IV => "iv",
            Axiom::V => "v",
        };
        f.write_str(s)
    }
}

/// Concrete evidence of an axiom violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A required support is absent.
    MissingSupport(Support),
    /// A member whose subset is absent.
    Subset {
        member: Support,
        subset: Support,
    },
    Union {
        left: Support,
        right: Support,
    },
    Image {
        member: Support,
        pi: Permutation,
    },
    /// A required subgroup is absent (`G` itself for (i)).
    MissingGroup(PermGroup),
    Upward {
        member: PermGroup,
        superset: PermGroup,
    },
    Intersection {
        left: PermGroup,
        right: PermGroup,
    },
    Conjugate {
        member: PermGroup,
        pi: Permutation,
    },
    /// `G(P)` is absent for this finite `P ⊆ I`.
    Stabilizer(Vec<Atom>),
}

impl Witness {
    pub fn render(&self, domain: &Domain) -> String {
        match self {
            Witness::MissingSupport(p) => format!("missing {}", p.render(domain)),
            Witness::Subset { member, subset } => {
                format!("{} is a member but its subset {} is not", member.render(domain), subset.render(domain))
            }
            Witness::Union { left, right } => {
                format!("union of {} and {} is missing", left.render(domain), right.render(domain))
            }
            Witness::Image { member, pi } => {
                format!("image of {} under {} is missing", member.render(domain), pi.to_cycle_string(domain))
            }
            Witness::MissingGroup(g) => format!("missing subgroup {}", g.describe(domain)),
            Witness::Upward { member, superset } => format!(
                "{} is a member but its supergroup {} is not",
                member.describe(domain),
                superset.describe(domain)
            ),
            Witness::Intersection { left, right } => {
                format!("intersection of {} and {} is missing", left.describe(domain), right.describe(domain))
            }
            Witness::Conjugate { member, pi } => {
                format!("conjugate of {} by {} is missing", member.describe(domain), pi.to_cycle_string(domain))
            }
            Witness::Stabilizer(p) => {
                let labels: Vec<&str> = p.iter().map(|&a| domain.label(a)).collect();
                format!("G({{{}}}) is missing", labels.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// A violation of axiom (v) tolerated by a generalized family.
    Waived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub status: Status,
    pub witness: Option<Witness>,
    /// `exhaustive` or `structural`.
    pub method: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub family: String,
    pub generalized: bool,
    pub verdicts: Vec<AxiomVerdict>,
}

impl AxiomReport {
    pub fn verdict(&self, axiom: Axiom) -> &AxiomVerdict {
        &self.verdicts[axiom as usize]
    }

    /// Every axiom holds outright.
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.status == Status::Pass)
    }

    /// No failures other than waived ones.
    pub fn acceptable(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Fail)
    }

    pub fn to_json(&self, domain: &Domain) -> serde_json::Value {
        serde_json::json!({
            "family": self.family,
            "generalized": self.generalized,
            "axioms": self.verdicts.iter().map(|v| serde_json::json!({
                "axiom": v.axiom,
                "status": v.status,
                "method": v.method,
                "witness": v.witness.as_ref().map(|w| w.render(domain)),
            })).collect::<Vec<_>>(),
        })
    }
}

fn verdict(axiom: Axiom, witness: Option<Witness>, generalized: bool, method: &'static str) -> AxiomVerdict {
    let status = match (&witness, axiom) {
        (None, _) => Status::Pass,
        (Some(_), Axiom::V) if generalized => Status::Waived,
        (Some(_), _) => Status::Fail,
    };
    AxiomVerdict { axiom, status, witness, method }
}

/// Subsets of `0..n` by size, then lexicographically.
fn finite_subsets(n: usize) -> impl Iterator<Item = Vec<Atom>> {
    (0..=n).flat_map(move |k| itertools::Itertools::combinations(0..n as Atom, k))
}

/// Largest domain whose subsets are all enumerated for axiom (v).
pub const SUBSET_ENUMERATION_CAP: usize = 16;

pub fn check_normal_ideal_axioms(group: &PermGroup, ideal: &NormalIdeal) -> Result<AxiomReport> {
    let n = group.degree();
    let generalized = ideal.generalized;
    let verdicts = match &ideal.kind {
        IdealKind::FiniteSupports => Axiom::ALL.iter().map(|&a| verdict(a, None, generalized, "structural")).collect(),
        IdealKind::Extended(p0) => {
            for p in p0 {
                if p.domain_size() != n {
                    return Err(Error::DomainMismatch { expected: n, found: p.domain_size() });
                }
            }
            // Closure of P0 under G is what (iv) needs; the rest holds for any
            // system of all finite subsets of a set.
            let escape = p0.iter().find_map(|a| {
                group.generators().iter().find(|g| p0.binary_search(&a.act(g)).is_err()).map(|g| Witness::Image {
                    member: Support { atoms: BTreeSet::new(), preds: [a.clone()].into() },
                    pi: g.clone(),
                })
            });
            Axiom::ALL
                .iter()
                .map(|&a| {
                    let w = if a == Axiom::IV { escape.clone() } else { None };
                    verdict(a, w, generalized, if a == Axiom::IV { "exhaustive" } else { "structural" })
                })
                .collect()
        }
        IdealKind::Explicit(members) => {
            for m in members {
                if let Some(&a) = m.atoms.iter().find(|&&a| a as usize >= n) {
                    return Err(Error::FamilyMismatch(format!("atom {a} outside the domain")));
                }
                if let Some(p) = m.preds.iter().find(|p| p.domain_size() != n) {
                    return Err(Error::DomainMismatch { expected: n, found: p.domain_size() });
                }
            }
            let set: HashSet<&Support> = members.iter().collect();
            let has = |p: &Support| set.contains(p);
            let w1 = (!has(&Support::default())).then(|| Witness::MissingSupport(Support::default()));
            let w2 = members.iter().find_map(|m| {
                let drop_atom = m.atoms.iter().find_map(|&a| {
                    let mut s = m.clone();
                    s.atoms.remove(&a);
                    (!has(&s)).then_some(s)
                });
                let drop_pred = || {
                    m.preds.iter().find_map(|p| {
                        let mut s = m.clone();
                        s.preds.remove(p);
                        (!has(&s)).then_some(s)
                    })
                };
                drop_atom.or_else(drop_pred).map(|subset| Witness::Subset { member: m.clone(), subset })
            });
            let w3 = members.iter().enumerate().find_map(|(i, a)| {
                members[i + 1..]
                    .iter()
                    .find(|b| !has(&a.union(b)))
                    .map(|b| Witness::Union { left: a.clone(), right: b.clone() })
            });
            let w4 = members.iter().find_map(|m| {
                group
                    .elements()
                    .iter()
                    .find(|pi| !has(&m.act(pi)))
                    .map(|pi| Witness::Image { member: m.clone(), pi: pi.clone() })
            });
            if n > SUBSET_ENUMERATION_CAP {
                return Err(Error::CapExceeded(format!(
                    "axiom (v) enumerates subsets of |I| <= {SUBSET_ENUMERATION_CAP}"
                )));
            }
            let w5 = finite_subsets(n).find_map(|p| {
                let s = Support::atoms(p.iter().copied());
                (!has(&s)).then_some(Witness::MissingSupport(s))
            });
            [w1, w2, w3, w4, w5]
                .into_iter()
                .zip(Axiom::ALL)
                .map(|(w, a)| verdict(a, w, generalized, "exhaustive"))
                .collect()
        }
    };
    Ok(AxiomReport { family: format!("ideal:{}", ideal.name()), generalized, verdicts })
}

/// The filter as an explicit list of subgroups of `group`.
fn filter_members(group: &PermGroup, filter: &NormalFilter, all: &[PermGroup]) -> Result<Vec<PermGroup>> {
    match &filter.kind {
        FilterKind::Explicit(list) => {
            if list.iter().any(|k| !k.is_subgroup_of(group)) {
                return Err(Error::NotASubgroup);
            }
            Ok(list.clone())
        }
        _ => {
            let mut out = Vec::new();
            for h in all {
                if filter_contains(group, filter, h)? {
                    out.push(h.clone());
                }
            }
            Ok(out)
        }
    }
}

pub fn check_normal_filter_axioms(group: &PermGroup, filter: &NormalFilter) -> Result<AxiomReport> {
    let all = group.subgroups()?;
    let members = filter_members(group, filter, &all)?;
    // Hashing reads only the degree and elements; the cached generators are ignored.
    #[allow(clippy::mutable_key_type)]
    let set: HashSet<&PermGroup> = members.iter().collect();
    let has = |h: &PermGroup| set.contains(h);
    let generalized = filter.generalized;

    let w1 = (!has(group)).then(|| Witness::MissingGroup(group.clone()));
    let w2 = members.iter().find_map(|h| {
        all.iter()
            .find(|k| h.is_subgroup_of(k) && !has(k))
            .map(|k| Witness::Upward { member: h.clone(), superset: k.clone() })
    });
    let w3 = members.iter().enumerate().find_map(|(i, a)| {
        members[i + 1..]
            .iter()
            .find(|b| !has(&a.intersection(b)))
            .map(|b| Witness::Intersection { left: a.clone(), right: b.clone() })
    });
    let mut w4 = None;
    'outer: for h in &members {
        for pi in group.elements() {
            if !has(&h.conjugate_by(pi)?) {
                w4 = Some(Witness::Conjugate { member: h.clone(), pi: pi.clone() });
                break 'outer;
            }
        }
    }
    if group.degree() > SUBSET_ENUMERATION_CAP {
        return Err(Error::CapExceeded(format!("axiom (v) enumerates subsets of |I| <= {SUBSET_ENUMERATION_CAP}")));
    }
    let mut w5 = None;
    for p in finite_subsets(group.degree()) {
        if !has(&group.pointwise_stabilizer(&p)?) {
            w5 = Some(Witness::Stabilizer(p));
            break;
        }
    }
    let verdicts = [w1, w2, w3, w4, w5]
        .into_iter()
        .zip(Axiom::ALL)
        .map(|(w, a)| verdict(a, w, generalized, "exhaustive"))
        .collect();
    Ok(AxiomReport { family: format!("filter:{}", filter.name()), generalized, verdicts })
}

/// Re-checks that a witness really violates its axiom for the given ideal.
pub fn ideal_witness_holds(group: &PermGroup, ideal: &NormalIdeal, w: &Witness) -> bool {
    match w {
        Witness::MissingSupport(p) => !ideal.contains(p),
        Witness::Subset { member, subset } => {
            ideal.contains(member)
                && subset.atoms.is_subset(&member.atoms)
                && subset.preds.is_subset(&member.preds)
                && !ideal.contains(subset)
        }
        Witness::Union { left, right } => {
            ideal.contains(left) && ideal.contains(right) && !ideal.contains(&left.union(right))
        }
        Witness::Image { member, pi } => {
            group.contains(pi) && ideal.contains(member) && !ideal.contains(&member.act(pi))
        }
        _ => false,
    }
}

/// Re-checks a filter witness against the filter's member system.
pub fn filter_witness_holds(group: &PermGroup, filter: &NormalFilter, w: &Witness) -> Result<bool> {
    let all = group.subgroups()?;
    let members = filter_members(group, filter, &all)?;
    let has = |h: &PermGroup| members.contains(h);
    Ok(match w {
        Witness::MissingGroup(g) => !has(g),
        Witness::Upward { member, superset } => {
            has(member) && member.is_subgroup_of(superset) && superset.is_subgroup_of(group) && !has(superset)
        }
        Witness::Intersection { left, right } => has(left) && has(right) && !has(&left.intersection(right)),
        Witness::Conjugate { member, pi } => has(member) && group.contains(pi) && !has(&member.conjugate_by(pi)?),
        Witness::Stabilizer(p) => !has(&group.pointwise_stabilizer(p)?),
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> PermGroup {
        PermGroup::symmetric(3).unwrap()
    }

    fn group(n: usize, gens: &[&str]) -> PermGroup {
        PermGroup::from_cycle_strings(&Domain::range(n), gens).unwrap()
    }

    #[test]
    fn finite_supports_ideal_passes() {
        let r = check_normal_ideal_axioms(&s3(), &NormalIdeal::finite_supports()).unwrap();
        assert!(r.all_pass());
    }

    #[test]
    fn missing_empty_set_fails_first_axiom() {
        let ideal = NormalIdeal::explicit(vec![Support::atoms([0])], false);
        let r = check_normal_ideal_axioms(&s3(), &ideal).unwrap();
        let v = r.verdict(Axiom::I);
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witness, Some(Witness::MissingSupport(Support::default())));
        assert!(ideal_witness_holds(&s3(), &ideal, v.witness.as_ref().unwrap()));
    }

    #[test]
    fn singletons_are_not_union_closed() {
        let members = vec![Support::default(), Support::atoms([0]), Support::atoms([1]), Support::atoms([2])];
        let ideal = NormalIdeal::explicit(members, false);
        let r = check_normal_ideal_axioms(&s3(), &ideal).unwrap();
        let v = r.verdict(Axiom::III);
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witness, Some(Witness::Union { left: Support::atoms([0]), right: Support::atoms([1]) }));
        assert_eq!(r.verdict(Axiom::I).status, Status::Pass);
        assert_eq!(r.verdict(Axiom::II).status, Status::Pass);
        assert_eq!(r.verdict(Axiom::IV).status, Status::Pass);
        for v in &r.verdicts {
            if let Some(w) = &v.witness {
                assert!(ideal_witness_holds(&s3(), &ideal, w));
            }
        }
    }

    #[test]
    fn generalized_waives_only_axiom_v() {
        let r = check_normal_ideal_axioms(&s3(), &NormalIdeal::empty_only()).unwrap();
        assert_eq!(r.verdict(Axiom::V).status, Status::Waived);
        assert!(r.acceptable());
        assert!(!r.all_pass());
    }

    #[test]
    fn extended_ideal_audits_predicate_closure() {
        let g = s3();
        let orbit: Vec<PredicateRel> = (0..3).map(|a| PredicateRel::from_tuples(3, 1, [[a]]).unwrap()).collect();
        assert!(check_normal_ideal_axioms(&g, &NormalIdeal::extended(orbit.clone())).unwrap().all_pass());
        let r = check_normal_ideal_axioms(&g, &NormalIdeal::extended(orbit[..1].to_vec())).unwrap();
        assert_eq!(r.verdict(Axiom::IV).status, Status::Fail);
    }

    #[test]
    fn all_subgroups_filter_passes() {
        let r = check_normal_filter_axioms(&s3(), &NormalFilter::all_subgroups()).unwrap();
        assert!(r.all_pass());
    }

    #[test]
    fn whole_group_alone_fails_axiom_v_at_zero() {
        let f = NormalFilter::explicit(vec![s3()], false);
        let r = check_normal_filter_axioms(&s3(), &f).unwrap();
        assert_eq!(r.verdict(Axiom::V).status, Status::Fail);
        assert_eq!(r.verdict(Axiom::V).witness, Some(Witness::Stabilizer(vec![0])));
        assert!(filter_witness_holds(&s3(), &f, r.verdict(Axiom::V).witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn trivial_plus_whole_fails_upward_closure() {
        let f = NormalFilter::explicit(vec![PermGroup::trivial(3), s3()], false);
        let r = check_normal_filter_axioms(&s3(), &f).unwrap();
        let v = r.verdict(Axiom::II);
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witness, Some(Witness::Upward { member: PermGroup::trivial(3), superset: group(3, &["(0 1)"]) }));
        assert!(filter_witness_holds(&s3(), &f, v.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn filter_contains_examples() {
        let g = s3();
        let f0 = NormalFilter::induced(NormalIdeal::finite_supports());
        assert!(filter_contains(&g, &f0, &PermGroup::trivial(3)).unwrap());
        let gen = NormalFilter::induced(NormalIdeal::empty_only());
        assert!(!filter_contains(&g, &gen, &group(3, &["(1 2)"])).unwrap());
        let stab = g.pointwise_stabilizer(&[0]).unwrap();
        assert!(filter_contains(&g, &f0, &stab).unwrap());
        let w = NormalIdeal::finite_supports().support_witness(&g, &stab).unwrap();
        assert_eq!(w, Some(Support::atoms([0])));
        assert!(matches!(filter_contains(&group(3, &["(0 1)"]), &f0, &g), Err(Error::NotASubgroup)));
    }

    #[test]
    fn explicit_filter_membership_is_upward() {
        let g = s3();
        let f = NormalFilter::explicit(vec![PermGroup::trivial(3)], true);
        assert!(filter_contains(&g, &f, &group(3, &["(0 1)"])).unwrap());
    }

    #[test]
    fn induced_equals_finite_filter_on_s3() {
        // F0(I,G,I0) and F0(I,G) coincide; the latter is "contains some G(P), P finite".
        let g = s3();
        let induced = NormalFilter::induced(NormalIdeal::finite_supports());
        for h in g.subgroups().unwrap() {
            let direct = finite_subsets(3).any(|p| g.pointwise_stabilizer(&p).unwrap().is_subgroup_of(&h));
            assert_eq!(filter_contains(&g, &induced, &h).unwrap(), direct);
        }
    }

    #[test]
    fn large_groups_refuse_upward_audit() {
        let s5 = PermGroup::symmetric(5).unwrap();
        assert!(matches!(check_normal_filter_axioms(&s5, &NormalFilter::all_subgroups()), Err(Error::CapExceeded(_))));
    }
}
