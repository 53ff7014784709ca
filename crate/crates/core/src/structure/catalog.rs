//! Named models: basic, standard, ordered, paired and two-sorted.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{Family, NormalIdeal};
use crate::perm::{automorphisms, Domain, PermGroup, PredicateRel};
use crate::structure::{build_model, PredicateStructure};
use crate::symbolic::{Sort, SymbolicStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "catalog", rename_all = "kebab-case")]
pub enum ModelId {
    /// Finite supports under the full symmetric group; symbolic when unsized.
    Basic { size: Option<usize> },
    /// Trivial group: every predicate is a member.
    Standard { size: usize },
    /// Rationals under order automorphisms.
    MostowskiAsser,
    /// `k` pairs `{a_n, b_n}` with each `t_n = {(a_n,b_n),(b_n,a_n)}` preserved.
    /// `pair_permuting` preserves only their union. Symbolic when unsized,
    /// where the pair-permuting group is the one used.
    FraenkelZermelo {
        k: Option<usize>,
        #[serde(default)]
        pair_permuting: bool,
    },
    /// Two infinite halves, each preserved.
    TwoSorted,
}

impl ModelId {
    /// Every finite catalog model within the default caps.
    pub fn finite_catalog() -> Vec<ModelId> {
        vec![
            ModelId::Basic { size: Some(2) },
            ModelId::Basic { size: Some(3) },
            ModelId::Basic { size: Some(4) },
            ModelId::Standard { size: 2 },
            ModelId::Standard { size: 3 },
            ModelId::FraenkelZermelo { k: Some(1), pair_permuting: false },
            ModelId::FraenkelZermelo { k: Some(2), pair_permuting: false },
            ModelId::FraenkelZermelo { k: Some(2), pair_permuting: true },
        ]
    }

    pub fn symbolic_catalog() -> Vec<ModelId> {
        vec![
            ModelId::Basic { size: None },
            ModelId::MostowskiAsser,
            ModelId::FraenkelZermelo { k: None, pair_permuting: true },
            ModelId::TwoSorted,
        ]
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(
            self,
            ModelId::Basic { size: None }
                | ModelId::MostowskiAsser
                | ModelId::FraenkelZermelo { k: None, .. }
                | ModelId::TwoSorted
        )
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelId::Basic { size: Some(n) } => write!(f, "basic({n})"),
            ModelId::Basic { size: None } => f.write_str("basic"),
            ModelId::Standard { size } => write!(f, "standard({size})"),
            ModelId::MostowskiAsser => f.write_str("mostowski-asser"),
            ModelId::FraenkelZermelo { k: Some(k), pair_permuting: false } => write!(f, "fraenkel-zermelo({k})"),
            ModelId::FraenkelZermelo { k: Some(k), pair_permuting: true } => {
                write!(f, "fraenkel-zermelo({k},pair-permuting)")
            }
            ModelId::FraenkelZermelo { k: None, .. } => f.write_str("fraenkel-zermelo"),
            ModelId::TwoSorted => f.write_str("two-sorted"),
        }
    }
}

/// Labels `a0, b0, a1, b1, ...` and the relations `t_n`.
pub fn fraenkel_zermelo_signature(k: usize) -> Result<(Domain, Vec<PredicateRel>)> {
    let labels: Vec<String> = (0..k).flat_map(|n| [format!("a{n}"), format!("b{n}")]).collect();
    let domain = Domain::new(labels)?;
    let t = (0..k as u32)
        .map(|n| PredicateRel::from_tuples(2 * k, 2, [[2 * n, 2 * n + 1], [2 * n + 1, 2 * n]]))
        .collect::<Result<Vec<_>>>()?;
    Ok((domain, t))
}

pub fn make_catalog_model(id: ModelId, arity_cap: usize) -> Result<PredicateStructure> {
    let ideal = Family::Ideal(NormalIdeal::finite_supports());
    let finite = |domain: Domain, group: PermGroup| -> Result<PredicateStructure> {
        let mut s = build_model(&domain, &group, &ideal, arity_cap)?;
        s.set_provenance(id.to_string());
        Ok(PredicateStructure::Finite(s))
    };
    let symbolic = |sort: Sort| Ok(PredicateStructure::Symbolic(SymbolicStructure::new(sort, id.to_string())));
    match id {
        ModelId::Basic { size: Some(n) } => finite(Domain::range(n), PermGroup::symmetric(n)?),
        ModelId::Standard { size } => finite(Domain::range(size), PermGroup::trivial(size)),
        ModelId::FraenkelZermelo { k: Some(k), pair_permuting } => {
            if k == 0 {
                return Err(Error::Config("fraenkel-zermelo needs at least one pair".into()));
            }
            let (domain, t) = fraenkel_zermelo_signature(k)?;
            let relations = if pair_permuting {
                let mut union = t[0].clone();
                for r in &t[1..] {
                    for c in r.set_cells() {
                        union.set_cell(c);
                    }
                }
                vec![union]
            } else {
                t
            };
            finite(domain, automorphisms(2 * k, &relations)?)
        }
        ModelId::Basic { size: None } => symbolic(Sort::Equality),
        ModelId::MostowskiAsser => symbolic(Sort::Ordered),
        ModelId::FraenkelZermelo { k: None, .. } => symbolic(Sort::Paired),
        ModelId::TwoSorted => symbolic(Sort::TwoSorted),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    #[test]
    fn fraenkel_zermelo_group_by_brute_force() {
        let s = make_catalog_model(ModelId::FraenkelZermelo { k: Some(2), pair_permuting: false }, 1).unwrap();
        let s = s.as_finite().unwrap();
        assert_eq!(s.group().order(), 4);
        let (domain, t) = fraenkel_zermelo_signature(2).unwrap();
        let preserving = itertools::Itertools::permutations(0..4u32, 4)
            .map(|im| Permutation::from_images(im).unwrap())
            .filter(|p| t.iter().all(|r| r.is_fixed_by(p)))
            .count();
        assert_eq!(preserving, 4);
        assert_eq!(
            s.group().describe(&domain),
            PermGroup::from_cycle_strings(&domain, &["(a0 b0)", "(a1 b1)"]).unwrap().describe(&domain)
        );
        let wide = make_catalog_model(ModelId::FraenkelZermelo { k: Some(2), pair_permuting: true }, 1).unwrap();
        assert_eq!(wide.as_finite().unwrap().group().order(), 8);
    }

    #[test]
    fn catalog_shapes() {
        let basic = make_catalog_model(ModelId::Basic { size: Some(3) }, 2).unwrap();
        assert!(basic.as_finite().unwrap().is_full());
        let ma = make_catalog_model(ModelId::MostowskiAsser, 2).unwrap();
        assert_eq!(ma.as_symbolic().unwrap().sort(), Sort::Ordered);
        assert_eq!(ma.name(), "mostowski-asser");
        assert!(make_catalog_model(ModelId::Basic { size: Some(6) }, 2).is_err());
        let id: ModelId = serde_json::from_str(r#"{"catalog":"fraenkel-zermelo","k":2}"#).unwrap();
        assert_eq!(id, ModelId::FraenkelZermelo { k: Some(2), pair_permuting: false });
    }
}
