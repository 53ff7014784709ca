use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::perm::domain::{Atom, Domain};
use crate::perm::permutation::Permutation;
use crate::perm::predicate::PredicateRel;

/// Largest group materialized by closure (|S7|).
pub const DEFAULT_GROUP_CAP: usize = 10_080;

/// Largest group whose full subgroup lattice is enumerated.
pub const SUBGROUP_ENUMERATION_CAP: usize = 24;

/// Largest degree for brute-force automorphism search (8! permutations).
pub const AUTOMORPHISM_DEGREE_CAP: usize = 8;

/// A finite permutation group with all of its elements materialized.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: OnceLock<Vec<Permutation>>,
    elements: Vec<Permutation>,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermGroup {}

impl std::hash::Hash for PermGroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.degree.hash(state);
        self.elements.hash(state);
    }
}

impl PermGroup {
    /// Closure of `generators ∪ {id}` under composition.
    pub fn generate(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        Self::generate_capped(degree, generators, DEFAULT_GROUP_CAP)
    }

    pub fn generate_capped(degree: usize, generators: Vec<Permutation>, cap: usize) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DomainMismatch { expected: degree, found: g.degree() });
            }
        }
        let elements = closure(degree, &[], &generators, cap)?;
        let generators = OnceLock::from(generators);
        Ok(PermGroup { degree, generators, elements })
    }

    /// Wraps an element set already known to be closed.
    pub(crate) fn from_closed(degree: usize, mut elements: Vec<Permutation>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        debug_assert!(elements.first().is_some_and(Permutation::is_identity));
        PermGroup { degree, generators: OnceLock::new(), elements }
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_closed(degree, vec![Permutation::identity(degree)])
    }

    pub fn symmetric(degree: usize) -> Result<Self> {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::transposition(degree, 0, 1)?);
        }
        if degree >= 3 {
            gens.push(Permutation::from_cycles(degree, &[(0..degree as Atom).collect()])?);
        }
        Self::generate(degree, gens)
    }

    /// Parses `{"generators": ["(0 1)", ...]}` style generator strings.
    pub fn from_cycle_strings<S: AsRef<str>>(domain: &Domain, gens: &[S]) -> Result<Self> {
        let gens = gens.iter().map(|g| Permutation::parse_cycles(domain, g.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::generate(domain.len(), gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements in ascending image-table order; the identity comes first.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    /// A generating set: the one supplied at construction, or a greedy one.
    pub fn generators(&self) -> &[Permutation] {
        self.generators.get_or_init(|| {
            let mut gens: Vec<Permutation> = Vec::new();
            let mut span: HashSet<Permutation> = HashSet::from([Permutation::identity(self.degree)]);
            for e in &self.elements {
                if span.contains(e) {
                    continue;
                }
                gens.push(e.clone());
                let closed = closure(self.degree, &[], &gens, usize::MAX).expect("uncapped");
                span = closed.into_iter().collect();
            }
            gens
        })
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|e| other.contains(e))
    }

    pub fn intersection(&self, other: &PermGroup) -> PermGroup {
        let elements = self.elements.iter().filter(|e| other.contains(e)).cloned().collect();
        PermGroup::from_closed(self.degree, elements)
    }

    fn check_atoms(&self, atoms: &[Atom]) -> Result<()> {
        match atoms.iter().find(|&&a| a as usize >= self.degree) {
            Some(a) => Err(Error::UnknownAtom(a.to_string())),
            None => Ok(()),
        }
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        if degree != self.degree {
            return Err(Error::DomainMismatch { expected: self.degree, found: degree });
        }
        Ok(())
    }

    /// `G(P)`: elements fixing every atom of `atoms`.
    pub fn pointwise_stabilizer(&self, atoms: &[Atom]) -> Result<PermGroup> {
        self.check_atoms(atoms)?;
        let elements = self.elements.iter().filter(|e| atoms.iter().all(|&a| e.fixes(a))).cloned().collect();
        Ok(PermGroup::from_closed(self.degree, elements))
    }

    /// `G(P)` for a mixed support: fixes the atoms and every listed predicate.
    pub fn support_stabilizer(&self, atoms: &[Atom], preds: &[PredicateRel]) -> Result<PermGroup> {
        self.check_atoms(atoms)?;
        for p in preds {
            self.check_degree(p.domain_size())?;
        }
        let elements = self
            .elements
            .iter()
            .filter(|e| atoms.iter().all(|&a| e.fixes(a)) && preds.iter().all(|p| p.is_fixed_by(e)))
            .cloned()
            .collect();
        Ok(PermGroup::from_closed(self.degree, elements))
    }

    /// `pi H pi⁻¹`.
    pub fn conjugate_by(&self, pi: &Permutation) -> Result<PermGroup> {
        self.check_degree(pi.degree())?;
        let inv = pi.inverse();
        let elements = self.elements.iter().map(|h| pi.compose(h).compose(&inv)).collect();
        Ok(PermGroup::from_closed(self.degree, elements))
    }

    /// `sym_G(alpha)`: elements leaving `alpha` invariant.
    pub fn sym_subgroup(&self, alpha: &PredicateRel) -> Result<PermGroup> {
        self.check_degree(alpha.domain_size())?;
        let elements = self.elements.iter().filter(|e| alpha.is_fixed_by(e)).cloned().collect();
        Ok(PermGroup::from_closed(self.degree, elements))
    }

    /// Whether `G(P) ⊆ sym_G(alpha)`.
    pub fn is_support(&self, atoms: &[Atom], alpha: &PredicateRel) -> Result<bool> {
        self.check_atoms(atoms)?;
        self.check_degree(alpha.domain_size())?;
        Ok(self.elements.iter().filter(|e| atoms.iter().all(|&a| e.fixes(a))).all(|e| alpha.is_fixed_by(e)))
    }

    pub fn orbit(&self, tuple: &[Atom]) -> Result<BTreeSet<Vec<Atom>>> {
        self.check_atoms(tuple)?;
        Ok(self.elements.iter().map(|e| e.apply_tuple(tuple)).collect())
    }

    /// Orbits on points, each sorted, ordered by least element.
    pub fn point_orbits(&self) -> Vec<Vec<Atom>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree as Atom {
            if seen[x as usize] {
                continue;
            }
            let orbit: BTreeSet<Atom> = self.elements.iter().map(|e| e.apply(x)).collect();
            for &y in &orbit {
                seen[y as usize] = true;
            }
            out.push(orbit.into_iter().collect());
        }
        out
    }

    /// Every subgroup, in canonical order (by order, then cycle notation of elements).
    pub fn subgroups(&self) -> Result<Vec<PermGroup>> {
        if self.order() > SUBGROUP_ENUMERATION_CAP {
            return Err(Error::CapExceeded(format!(
                "subgroup enumeration needs |G| <= {SUBGROUP_ENUMERATION_CAP}, got {}",
                self.order()
            )));
        }
        let trivial = vec![Permutation::identity(self.degree)];
        let mut seen: HashSet<Vec<Permutation>> = HashSet::from([trivial.clone()]);
        let mut queue = VecDeque::from([trivial]);
        let mut found = Vec::new();
        while let Some(h) = queue.pop_front() {
            for g in &self.elements {
                if h.binary_search(g).is_ok() {
                    continue;
                }
                let k = closure(self.degree, &h, std::slice::from_ref(g), usize::MAX)?;
                if seen.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
            found.push(PermGroup::from_closed(self.degree, h));
        }
        found.sort_by_cached_key(PermGroup::canonical_key);
        Ok(found)
    }

    /// Sort key used wherever subgroups are listed for humans.
    pub fn canonical_key(&self) -> (usize, Vec<Vec<Vec<Atom>>>) {
        let mut cycles: Vec<Vec<Vec<Atom>>> = self.elements.iter().map(Permutation::cycles).collect();
        cycles.sort();
        (self.order(), cycles)
    }

    pub fn describe(&self, domain: &Domain) -> String {
        let mut names: Vec<(Vec<Vec<Atom>>, String)> =
            self.elements.iter().map(|e| (e.cycles(), e.to_cycle_string(domain))).collect();
        names.sort();
        let names: Vec<String> = names.into_iter().map(|(_, s)| s).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn generator_strings(&self, domain: &Domain) -> Vec<String> {
        self.generators().iter().map(|g| g.to_cycle_string(domain)).collect()
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe(&Domain::range(self.degree)))
    }
}

/// Sorted closure of `base ∪ extra` under composition.
fn closure(degree: usize, base: &[Permutation], extra: &[Permutation], cap: usize) -> Result<Vec<Permutation>> {
    let mut gens: Vec<Permutation> = base.iter().filter(|p| !p.is_identity()).cloned().collect();
    gens.extend(extra.iter().filter(|p| !p.is_identity()).cloned());
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(e) = queue.pop_front() {
        for g in &gens {
            let next = g.compose(&e);
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Permutation> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// `auto(I; R_0, R_1, ..)`: permutations preserving each relation individually.
pub fn automorphisms(degree: usize, relations: &[PredicateRel]) -> Result<PermGroup> {
    if degree > AUTOMORPHISM_DEGREE_CAP {
        return Err(Error::CapExceeded(format!(
            "brute-force automorphism search needs |I| <= {AUTOMORPHISM_DEGREE_CAP}"
        )));
    }
    for r in relations {
        if r.domain_size() != degree {
            return Err(Error::DomainMismatch { expected: degree, found: r.domain_size() });
        }
    }
    let elements = (0..degree as Atom)
        .permutations(degree)
        .map(|images| Permutation::from_images(images).expect("permutations are bijective"))
        .filter(|p| relations.iter().all(|r| r.is_fixed_by(p)))
        .collect();
    Ok(PermGroup::from_closed(degree, elements))
}
