//! Seeded random formulas, assignments and model configurations.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::harness::config::{BuiltConfig, DomainConfig, FamilyConfig, GroupConfig, PredicateConfig};
use crate::logic::FiniteAssignment;
use crate::logic::{Binder, Formula, PredVar, Quantifier};
use crate::perm::{Atom, Domain, PermGroup, Permutation, PredicateRel};
use crate::structure::FiniteStructure;

/// Free predicate variables every generated formula may use.
pub const FREE_PREDICATES: [PredVar; 2] = [PredVar { index: 1, arity: 1 }, PredVar { index: 2, arity: 2 }];

/// Shape limits for [`random_formula`].
#[derive(Clone, Debug)]
pub struct FormulaSpec {
    /// Connective and quantifier nesting.
    pub depth: usize,
    /// Quantifier nesting.
    pub quantifier_depth: usize,
    /// Individual variables are `x1..=x{ind_vars}`.
    pub ind_vars: u32,
    pub free_preds: Vec<PredVar>,
    /// Arities a predicate quantifier may bind, with the size of their range.
    pub pred_ranges: Vec<(u32, u64)>,
    /// Size of the individual range.
    pub ind_range: u64,
    /// Bound on the product of quantifier ranges along any branch.
    pub cost: u64,
}

impl FormulaSpec {
    /// First-order formulas over `x1..x3`, `A1#1` and `A2#2`.
    pub fn first_order(depth: usize, quantifier_depth: usize) -> Self {
        FormulaSpec {
            depth,
            quantifier_depth,
            ind_vars: 3,
            free_preds: FREE_PREDICATES.to_vec(),
            pred_ranges: Vec::new(),
            ind_range: 1,
            cost: u64::MAX,
        }
    }

    /// Formulas whose predicate quantifiers range over levels of `s` small
    /// enough for `cost` evaluations of the matrix.
    pub fn for_structure(s: &FiniteStructure, depth: usize, cost: u64) -> Self {
        let pred_ranges = s
            .levels()
            .iter()
            .filter_map(|l| l.members().map(|m| (l.arity() as u32, m.len() as u64)))
            .filter(|&(_, n)| n <= cost)
            .collect();
        FormulaSpec {
            depth,
            quantifier_depth: depth,
            ind_vars: 3,
            free_preds: FREE_PREDICATES.iter().copied().filter(|p| (p.arity as usize) <= s.arity_cap()).collect(),
            pred_ranges,
            ind_range: s.domain().len() as u64,
            cost,
        }
    }
}

pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, spec: &FormulaSpec) -> Formula {
    let depth = rng.gen_range(0..=spec.depth);
    let mut scope = spec.free_preds.clone();
    grow(rng, spec, depth, spec.quantifier_depth, spec.cost, &mut scope)
}

fn grow<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &FormulaSpec,
    depth: usize,
    qdepth: usize,
    cost: u64,
    scope: &mut Vec<PredVar>,
) -> Formula {
    let var = |rng: &mut R| rng.gen_range(1..=spec.ind_vars);
    if depth == 0 {
        if !scope.is_empty() && rng.gen_bool(0.6) {
            let p = *scope.choose(rng).expect("non-empty scope");
            let args: Vec<u32> = (0..p.arity).map(|_| var(rng)).collect();
            return Formula::atom(p.index, &args);
        }
        return Formula::eq(var(rng), var(rng));
    }
    let ind_ok = qdepth > 0 && spec.ind_range <= cost;
    let preds: Vec<(u32, u64)> =
        if qdepth > 0 { spec.pred_ranges.iter().copied().filter(|&(_, n)| n <= cost).collect() } else { Vec::new() };
    let weights = [2u32, 4, if ind_ok { 3 } else { 0 }, if preds.is_empty() { 0 } else { 1 }];
    let roll = rng.gen_range(0..weights.iter().sum::<u32>());
    let kind = {
        let mut acc = 0;
        weights.iter().position(|&w| {
            acc += w;
            roll < acc
        })
    };
    let q = if rng.gen_bool(0.5) { Quantifier::All } else { Quantifier::Ex };
    match kind {
        Some(0) => grow(rng, spec, depth - 1, qdepth, cost, scope).not(),
        Some(1) => {
            let a = grow(rng, spec, depth - 1, qdepth, cost, scope);
            let b = grow(rng, spec, depth - 1, qdepth, cost, scope);
            match rng.gen_range(0..4) {
                0 => a.and(b),
                1 => a.or(b),
                2 => a.implies(b),
                _ => a.iff(b),
            }
        }
        Some(2) => {
            let body = grow(rng, spec, depth - 1, qdepth - 1, cost / spec.ind_range.max(1), scope);
            Formula::Quant(q, Binder::Ind(crate::logic::Var(var(rng))), Box::new(body))
        }
        _ => {
            let &(arity, n) = preds.choose(rng).expect("a predicate range fits");
            let p = PredVar::new(3 + rng.gen_range(0..2), arity);
            scope.push(p);
            let body = grow(rng, spec, depth - 1, qdepth - 1, cost / n.max(1), scope);
            scope.pop();
            Formula::Quant(q, Binder::Pred(p), Box::new(body))
        }
    }
}

/// Values for `x1..=x{ind_vars}` and the given predicate variables, drawn
/// from the structure's levels.
pub fn random_assignment<R: Rng + ?Sized>(
    rng: &mut R,
    s: &FiniteStructure,
    ind_vars: u32,
    preds: &[PredVar],
) -> FiniteAssignment {
    let n = s.domain().len();
    let mut f = FiniteAssignment::new();
    for v in 1..=ind_vars {
        f = f.with_ind(v, rng.gen_range(0..n as Atom));
    }
    for &p in preds {
        let alpha = match s.members(p.arity as usize) {
            Ok(members) if !members.is_empty() => members.choose(rng).expect("non-empty").clone(),
            _ => random_predicate(rng, n, p.arity as usize),
        };
        f = f.with_pred(p, alpha);
    }
    f
}

pub fn random_predicate<R: Rng + ?Sized>(rng: &mut R, size: usize, arity: usize) -> PredicateRel {
    let mut alpha = PredicateRel::empty(size, arity);
    for c in 0..alpha.cells() {
        if rng.gen_bool(0.5) {
            alpha.set_cell(c);
        }
    }
    alpha
}

pub fn random_element<R: Rng + ?Sized>(rng: &mut R, g: &PermGroup) -> Permutation {
    g.elements().choose(rng).expect("groups contain the identity").clone()
}

fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Permutation {
    if rng.gen_bool(0.5) && n >= 2 {
        let a = rng.gen_range(0..n as Atom);
        let b = (a + rng.gen_range(1..n as Atom)) % n as Atom;
        Permutation::transposition(n, a, b).expect("distinct atoms in range")
    } else {
        let mut images: Vec<Atom> = (0..n as Atom).collect();
        images.shuffle(rng);
        Permutation::from_images(images).expect("a shuffle is a bijection")
    }
}

/// A random `(I, G, family)` with `2 ≤ |I| ≤ max_size` and arity cap 2.
pub fn random_config<R: Rng + ?Sized>(rng: &mut R, max_size: usize) -> BuiltConfig {
    let n = rng.gen_range(2..=max_size.max(2));
    let domain = Domain::range(n);
    let mut gens: Vec<Permutation> = (0..rng.gen_range(0..=2)).map(|_| random_permutation(rng, n)).collect();
    gens.retain(|g| !g.is_identity());
    gens.dedup();
    let group = PermGroup::generate(n, gens.clone()).expect("subgroups of S_n for n <= 4 are within the cap");
    let generators = gens.iter().map(|g| g.to_cycle_string(&domain)).collect();
    let family = match rng.gen_range(0..6) {
        0 => FamilyConfig::FiniteSupports,
        1 => FamilyConfig::Induced { ideal: Box::new(FamilyConfig::FiniteSupports) },
        2 => FamilyConfig::AllSubgroups,
        3 => {
            // P0 is a whole orbit, hence closed under the group.
            let seed = random_predicate(rng, n, 1);
            let mut orbit: Vec<PredicateRel> = group.elements().iter().map(|g| seed.act(g)).collect();
            orbit.sort();
            orbit.dedup();
            let predicates = orbit.iter().map(|p| PredicateConfig { arity: 1, set: p.format(&domain) }).collect();
            FamilyConfig::Extended { predicates }
        }
        k => {
            // All subsets of a G-invariant set U: generalized unless U = I.
            let mut u: Vec<Atom> = Vec::new();
            for orbit in group.point_orbits() {
                if rng.gen_bool(0.5) {
                    u.extend(orbit);
                }
            }
            u.sort();
            let members = (0..=u.len())
                .flat_map(|k| itertools::Itertools::combinations(u.iter().copied(), k))
                .map(|m| m.into_iter().map(crate::harness::config::AtomRef::Index).collect())
                .collect();
            let ideal = FamilyConfig::Explicit { members, generalized: u.len() < n };
            if k == 4 {
                ideal
            } else {
                FamilyConfig::Induced { ideal: Box::new(ideal) }
            }
        }
    };
    BuiltConfig {
        domain: DomainConfig::Size { size: n },
        group: GroupConfig::Generators { generators },
        family,
        arity_cap: 2,
    }
}
