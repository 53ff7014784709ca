//! Semantic audit of the comprehension scheme `∃Aⁿ∀x̄(Aⁿ(x̄) ↔ H)`.
//!
//! Every formula over the pool `x1, x2, x3, A1#1, A2#k` up to a given depth is
//! evaluated at once for all values of the pool, as one bit table. The
//! predicate it defines in `x1` (or `x1, x2`) for each parameter choice must
//! lie in `J_n`. The pool is closed under renaming of individual variables, so
//! fixing the defined variables loses no formulas.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::logic::finite::FiniteAssignment;
use crate::logic::syntax::{Formula, PredVar, Var};
use crate::perm::{Atom, PredicateRel};
use crate::structure::FiniteStructure;

/// Largest truth table (in bits) the audit will build.
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub formula: Formula,
    pub defined: Vec<Var>,
    /// Values of the free variables of `formula` other than the defined ones.
    pub assignment: FiniteAssignment,
    pub predicate: PredicateRel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub depth: usize,
    pub arity: usize,
    /// Distinct truth tables examined.
    pub formulas: usize,
    /// Parameter choices per formula.
    pub parameter_choices: usize,
    /// The structure is full, so every defined predicate is a member.
    pub trivial: bool,
    pub counterexample: Option<Counterexample>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

struct Pool<'a> {
    n: usize,
    j1: &'a [PredicateRel],
    j2: &'a [PredicateRel],
    k: usize,
    bits: usize,
}

type Table = Vec<u64>;

impl Pool<'_> {
    fn words(&self) -> usize {
        self.bits.div_ceil(64)
    }

    /// Stride of each pool coordinate: x1, x2, x3, A1, A2.
    fn stride(&self, coord: usize) -> usize {
        let n = self.n;
        [1, n, n * n, n * n * n, n * n * n * self.j1.len()][coord]
    }

    fn count(&self, coord: usize) -> usize {
        [self.n, self.n, self.n, self.j1.len(), self.j2.len()][coord]
    }

    fn digit(&self, idx: usize, coord: usize) -> usize {
        idx / self.stride(coord) % self.count(coord)
    }

    fn build(&self, f: impl Fn(usize) -> bool) -> Table {
        let mut t = vec![0u64; self.words()];
        for idx in 0..self.bits {
            if f(idx) {
                t[idx / 64] |= 1 << (idx % 64);
            }
        }
        t
    }

    fn atoms(&self) -> Vec<(Formula, Table)> {
        let mut out = Vec::new();
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            out.push((
                Formula::eq(i, j),
                self.build(|idx| self.digit(idx, i as usize - 1) == self.digit(idx, j as usize - 1)),
            ));
        }
        for i in 1..=3u32 {
            out.push((
                Formula::atom(1, &[i]),
                self.build(|idx| self.j1[self.digit(idx, 3)].contains(&[self.digit(idx, i as usize - 1) as Atom])),
            ));
        }
        for args in itertools::Itertools::multi_cartesian_product((0..self.k).map(|_| 1..=3u32)) {
            out.push((
                Formula::atom(2, &args),
                self.build(|idx| {
                    let xs: Vec<Atom> = args.iter().map(|&a| self.digit(idx, a as usize - 1) as Atom).collect();
                    self.j2[self.digit(idx, 4)].contains(&xs)
                }),
            ));
        }
        out
    }

    fn not(&self, t: &Table) -> Table {
        let mut out: Table = t.iter().map(|w| !w).collect();
        let rem = self.bits % 64;
        if rem != 0 {
            *out.last_mut().unwrap() &= (1u64 << rem) - 1;
        }
        out
    }

    fn exists(&self, t: &Table, coord: usize) -> Table {
        let stride = self.stride(coord);
        let count = self.count(coord);
        let block = stride * count;
        let mut out = vec![0u64; self.words()];
        let get = |i: usize| t[i / 64] >> (i % 64) & 1 == 1;
        for outer in (0..self.bits).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                if (0..count).any(|v| get(base + v * stride)) {
                    for v in 0..count {
                        let i = base + v * stride;
                        out[i / 64] |= 1 << (i % 64);
                    }
                }
            }
        }
        out
    }
}

fn exists_formula(coord: usize, k: usize, body: Formula) -> Formula {
    match coord {
        0..=2 => Formula::ex(coord as u32 + 1, body),
        3 => Formula::ex_pred(PredVar::new(1, 1), body),
        _ => Formula::ex_pred(PredVar::new(2, k as u32), body),
    }
}

/// Audits comprehension for defined predicates of the given arity (1 or 2).
pub fn comprehension_audit(s: &FiniteStructure, depth: usize, arity: usize) -> Result<AuditReport> {
    comprehension_audit_with(s, depth, arity, DEFAULT_TABLE_BUDGET, Exec::default())
}

pub fn comprehension_audit_with(
    s: &FiniteStructure,
    depth: usize,
    arity: usize,
    budget: usize,
    exec: Exec,
) -> Result<AuditReport> {
    if !(1..=2).contains(&arity) {
        return Err(Error::ArityOutOfRange { arity, cap: 2 });
    }
    let n = s.domain().len();
    if s.is_full() && s.arity_cap() >= arity {
        return Ok(AuditReport {
            depth,
            arity,
            formulas: 0,
            parameter_choices: 0,
            trivial: true,
            counterexample: None,
        });
    }
    let k = arity;
    let j1 = s.members(1)?;
    let j2 = s.members(k)?;
    let target = s.members(arity)?;
    let bits = n.pow(3) * j1.len() * j2.len();
    if bits > budget {
        return Err(Error::Budget(format!("comprehension table needs {bits} bits, budget is {budget}")));
    }
    let pool = Pool { n, j1, j2, k, bits };

    // Generate tables level by level, keeping the first formula per table.
    let mut seen: HashSet<Table> = HashSet::new();
    let mut all: Vec<(Formula, Table)> = Vec::new();
    let mut levels: Vec<std::ops::Range<usize>> = Vec::new();
    let mut push = |items: Vec<(Formula, Table)>, all: &mut Vec<(Formula, Table)>| {
        let start = all.len();
        for (f, t) in items {
            if seen.insert(t.clone()) {
                all.push((f, t));
            }
        }
        start..all.len()
    };
    let r0 = push(pool.atoms(), &mut all);
    levels.push(r0);
    for d in 1..=depth {
        let prev = levels[d - 1].clone();
        let upto = all.len();
        let mut fresh: Vec<(Formula, Table)> = Vec::new();
        for i in prev.clone() {
            fresh.push((all[i].0.clone().not(), pool.not(&all[i].1)));
        }
        let lefts: Vec<usize> = prev.clone().collect();
        let ands: Vec<Vec<(Formula, Table)>> = exec.map(&lefts, |&i| {
            (0..upto)
                .filter(|&j| !(prev.contains(&j) && j <= i))
                .map(|j| {
                    let t: Table = all[i].1.iter().zip(&all[j].1).map(|(a, b)| a & b).collect();
                    (all[i].0.clone().and(all[j].0.clone()), t)
                })
                .collect()
        });
        fresh.extend(ands.into_iter().flatten());
        let quants: Vec<Vec<(Formula, Table)>> = exec.map(&lefts, |&i| {
            (0..5).map(|c| (exists_formula(c, k, all[i].0.clone()), pool.exists(&all[i].1, c))).collect()
        });
        fresh.extend(quants.into_iter().flatten());
        let r = push(fresh, &mut all);
        levels.push(r);
    }

    // Membership of every defined predicate.
    let chunk = n.pow(arity as u32);
    let choices = bits / chunk;
    let member_set: HashSet<u64> = target.iter().map(|p| p.mask().expect("small level")).collect();
    let to_mask: Vec<u64> = if arity == 1 {
        Vec::new()
    } else {
        (0..1usize << chunk)
            .map(|c| {
                let mut m = 0u64;
                for x1 in 0..n {
                    for x2 in 0..n {
                        if c >> (x2 * n + x1) & 1 == 1 {
                            m |= 1 << (x1 * n + x2);
                        }
                    }
                }
                m
            })
            .collect()
    };
    let extract = |t: &Table, start: usize| -> u64 {
        let mut c = 0u64;
        for b in 0..chunk {
            let i = start + b;
            c |= (t[i / 64] >> (i % 64) & 1) << b;
        }
        if arity == 1 {
            c
        } else {
            to_mask[c as usize]
        }
    };
    let failure = exec.find_first(&all, |(f, t)| {
        (0..choices).find_map(|p| {
            let m = extract(t, p * chunk);
            (!member_set.contains(&m)).then(|| (f.clone(), p * chunk, m))
        })
    });
    let counterexample = failure.map(|(formula, idx, m)| {
        let defined: Vec<Var> = (1..=arity as u32).map(Var).collect();
        let free_i = formula.free_individuals();
        let free_p = formula.free_predicates();
        let mut assignment = FiniteAssignment::new();
        for c in arity..3 {
            let v = Var(c as u32 + 1);
            if free_i.contains(&v) {
                assignment.individuals.insert(v, pool.digit(idx, c) as Atom);
            }
        }
        let p1 = PredVar::new(1, 1);
        if free_p.contains(&p1) {
            assignment.predicates.insert(p1, j1[pool.digit(idx, 3)].clone());
        }
        let p2 = PredVar::new(2, k as u32);
        if free_p.contains(&p2) {
            assignment.predicates.insert(p2, j2[pool.digit(idx, 4)].clone());
        }
        Counterexample { formula, defined, assignment, predicate: PredicateRel::from_mask(n, arity, m) }
    });
    Ok(AuditReport { depth, arity, formulas: all.len(), parameter_choices: choices, trivial: false, counterexample })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Family, NormalIdeal};
    use crate::logic::finite::defined_predicate;
    use crate::logic::syntax::parse_formula;
    use crate::perm::{Domain, PermGroup};
    use crate::structure::build_model;

    fn pair_model() -> FiniteStructure {
        let g = PermGroup::from_cycle_strings(&Domain::range(4), &["(0 1)", "(2 3)"]).unwrap();
        build_model(&Domain::range(4), &g, &Family::Ideal(NormalIdeal::empty_only()), 2).unwrap()
    }

    #[test]
    fn singleton_counterexample_on_pair_model() {
        let r = comprehension_audit(&pair_model(), 2, 1).unwrap();
        let c = r.counterexample.expect("generalized model must fail");
        assert_eq!(c.formula, parse_formula("x1 = x2").unwrap());
        assert_eq!(c.assignment, FiniteAssignment::new().with_ind(2, 0));
        assert_eq!(c.predicate.tuples(), vec![vec![0]]);
    }

    #[test]
    fn full_structures_pass_trivially() {
        let d = Domain::range(3);
        let s = build_model(&d, &PermGroup::trivial(3), &Family::Ideal(NormalIdeal::finite_supports()), 2).unwrap();
        let r = comprehension_audit(&s, 2, 2).unwrap();
        assert!(r.passed() && r.trivial);
    }

    fn pool_assignment(pool: &Pool, idx: usize) -> FiniteAssignment {
        FiniteAssignment::new()
            .with_ind(2, pool.digit(idx, 1) as Atom)
            .with_ind(3, pool.digit(idx, 2) as Atom)
            .with_pred(PredVar::new(1, 1), pool.j1[pool.digit(idx, 3)].clone())
            .with_pred(PredVar::new(2, 2), pool.j2[pool.digit(idx, 4)].clone())
    }

    fn assert_table(s: &FiniteStructure, pool: &Pool, h: &Formula, table: &Table) {
        for idx in (0..pool.bits).step_by(pool.n * 13) {
            let alpha = defined_predicate(s, h, &[Var(1)], &pool_assignment(pool, idx)).unwrap();
            for x in 0..pool.n {
                let bit = table[(idx + x) / 64] >> ((idx + x) % 64) & 1 == 1;
                assert_eq!(bit, alpha.contains(&[x as Atom]), "{h}");
            }
        }
    }

    #[test]
    fn atom_tables_match_direct_evaluation() {
        let s = pair_model();
        let (j1, j2) = (s.members(1).unwrap(), s.members(2).unwrap());
        let pool = Pool { n: 4, j1, j2, k: 2, bits: 64 * j1.len() * j2.len() };
        for (h, t) in pool.atoms() {
            assert_table(&s, &pool, &h, &t);
        }
    }

    #[test]
    fn generated_connectives_match_direct_evaluation() {
        let s = pair_model();
        let (j1, j2) = (s.members(1).unwrap(), s.members(2).unwrap());
        let pool = Pool { n: 4, j1, j2, k: 2, bits: 64 * j1.len() * j2.len() };
        let atoms = pool.atoms();
        let (f, t) = &atoms[3]; // A1#1(x1)
        let (g, u) = &atoms[8]; // A2#2(x1,x3)
        let cases = vec![
            (f.clone().and(g.clone()), t.iter().zip(u).map(|(a, b)| a & b).collect::<Table>()),
            (exists_formula(2, 2, g.clone()), pool.exists(u, 2)),
            (exists_formula(4, 2, g.clone().not()), pool.exists(&pool.not(u), 4)),
            (exists_formula(3, 2, f.clone()), pool.exists(t, 3)),
        ];
        for (h, table) in cases {
            assert_table(&s, &pool, &h, &table);
        }
    }

    #[test]
    fn budget_is_reported() {
        let s = pair_model();
        assert!(matches!(comprehension_audit_with(&s, 1, 1, 100, Exec::Sequential), Err(Error::Budget(_))));
    }
}
