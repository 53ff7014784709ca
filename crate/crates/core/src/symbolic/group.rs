//! Finitely described elements of the infinite automorphism groups.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::symbolic::atom::{Rational, Sort, SymAtom};
use crate::symbolic::predicate::OrbitPredicate;
use crate::symbolic::types::type_of;

/// A group element of one sort's automorphism group.
///
/// Discrete sorts: a permutation of finitely many named atoms, identity
/// elsewhere. Ordered sort: the piecewise linear order automorphism through
/// the given points, with slope 1 beyond the outermost ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupElement {
    Finite { sort: Sort, map: BTreeMap<SymAtom, SymAtom> },
    Monotone(Vec<(Rational, Rational)>),
}

fn reject(msg: impl Into<String>) -> Error {
    Error::InvalidGroupElement(msg.into())
}

impl GroupElement {
    pub fn identity(sort: Sort) -> Self {
        match sort {
            Sort::Ordered => GroupElement::Monotone(Vec::new()),
            _ => GroupElement::Finite { sort, map: BTreeMap::new() },
        }
    }

    /// Validates `pairs` (atom, image) as an element of the sort's group.
    ///
    /// Paired maps are completed by mates: `p_n.s ↦ p_m.t` forces
    /// `p_n.(1-s) ↦ p_m.(1-t)`.
    pub fn new(sort: Sort, pairs: &[(SymAtom, SymAtom)]) -> Result<Self> {
        for (x, y) in pairs {
            sort.check(&[*x, *y]).map_err(|e| reject(e.to_string()))?;
        }
        if sort == Sort::Ordered {
            let mut points: Vec<(Rational, Rational)> = pairs
                .iter()
                .map(|(x, y)| match (x, y) {
                    (SymAtom::Rat(p), SymAtom::Rat(q)) => (*p, *q),
                    _ => unreachable!("sort checked"),
                })
                .collect();
            points.sort();
            points.dedup();
            return Self::monotone(points);
        }
        let mut map = BTreeMap::new();
        let mut insert = |x: SymAtom, y: SymAtom| match map.insert(x, y) {
            Some(old) if old != y => Err(reject(format!("{x} is sent to both {old} and {y}"))),
            _ => Ok(()),
        };
        for &(x, y) in pairs {
            insert(x, y)?;
            if let (Some(mx), Some(my)) = (x.mate(), y.mate()) {
                insert(mx, my)?;
            }
            if let (SymAtom::Half(h, _), SymAtom::Half(k, _)) = (x, y) {
                if h != k {
                    return Err(reject(format!("{x} ↦ {y} crosses halves")));
                }
            }
        }
        let images: BTreeSet<SymAtom> = map.values().copied().collect();
        if images.len() != map.len() {
            return Err(reject("two atoms share an image"));
        }
        if !map.keys().copied().eq(images.iter().copied()) {
            return Err(reject("the named atoms are not permuted among themselves"));
        }
        map.retain(|x, y| x != y);
        Ok(GroupElement::Finite { sort, map })
    }

    /// Order automorphism through strictly increasing `(source, image)` points.
    pub fn monotone(points: Vec<(Rational, Rational)>) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0 && w[0].1 < w[1].1) {
                return Err(reject(format!(
                    "{} ↦ {} and {} ↦ {} do not preserve the order",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(GroupElement::Monotone(points))
    }

    /// Swaps `a` and `b`; paired swaps carry the mates along.
    pub fn transposition(sort: Sort, a: SymAtom, b: SymAtom) -> Result<Self> {
        Self::new(sort, &[(a, b), (b, a)])
    }

    /// Cycle notation such as `(a0 a1)(a2 a3 a4)` for the discrete sorts,
    /// `0->1, 1/2->3/4` for the ordered sort, and `id`.
    pub fn parse(sort: Sort, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "id" || text.is_empty() {
            return Ok(Self::identity(sort));
        }
        let mut pairs = Vec::new();
        if sort == Sort::Ordered {
            for part in text.split(',') {
                let (x, y) = part.split_once("->").ok_or_else(|| reject(format!("expected `p->q`, got `{part}`")))?;
                pairs.push((sort.parse_atom(x.trim())?, sort.parse_atom(y.trim())?));
            }
            return Self::new(sort, &pairs);
        }
        let mut rest = text;
        while !rest.is_empty() {
            let inner = rest.strip_prefix('(').ok_or_else(|| reject(format!("expected `(` in `{text}`")))?;
            let close = inner.find(')').ok_or_else(|| reject(format!("unclosed cycle in `{text}`")))?;
            let atoms =
                inner[..close].split_whitespace().map(|w| sort.parse_atom(w)).collect::<Result<Vec<SymAtom>>>()?;
            for (i, x) in atoms.iter().enumerate() {
                pairs.push((*x, atoms[(i + 1) % atoms.len()]));
            }
            rest = inner[close + 1..].trim_start();
        }
        Self::new(sort, &pairs)
    }

    pub fn sort(&self) -> Sort {
        match self {
            GroupElement::Finite { sort, .. } => *sort,
            GroupElement::Monotone(_) => Sort::Ordered,
        }
    }

    pub fn apply(&self, a: SymAtom) -> SymAtom {
        match (self, a) {
            (GroupElement::Finite { map, .. }, _) => map.get(&a).copied().unwrap_or(a),
            (GroupElement::Monotone(points), SymAtom::Rat(x)) => SymAtom::Rat(monotone_apply(points, x)),
            (GroupElement::Monotone(_), _) => a,
        }
    }

    pub fn apply_tuple(&self, t: &[SymAtom]) -> Vec<SymAtom> {
        t.iter().map(|&a| self.apply(a)).collect()
    }

    pub fn fixes(&self, a: SymAtom) -> bool {
        self.apply(a) == a
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::Finite { sort, map } => {
                GroupElement::Finite { sort: *sort, map: map.iter().map(|(x, y)| (*y, *x)).collect() }
            }
            GroupElement::Monotone(points) => GroupElement::Monotone(points.iter().map(|(p, q)| (*q, *p)).collect()),
        }
    }

    /// `(atom, image)` pairs that determine the element.
    pub fn pairs(&self) -> Vec<(SymAtom, SymAtom)> {
        match self {
            GroupElement::Finite { map, .. } => map.iter().map(|(x, y)| (*x, *y)).collect(),
            GroupElement::Monotone(points) => {
                points.iter().map(|(p, q)| (SymAtom::Rat(*p), SymAtom::Rat(*q))).collect()
            }
        }
    }
}

fn monotone_apply(points: &[(Rational, Rational)], x: Rational) -> Rational {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return x;
    };
    if x <= first.0 {
        return x + (first.1 - first.0);
    }
    if x >= last.0 {
        return x + (last.1 - last.0);
    }
    let i = points.partition_point(|(p, _)| *p <= x) - 1;
    let (p0, q0) = points[i];
    let (p1, q1) = points[i + 1];
    q0 + (x - p0) * (q1 - q0) / (p1 - p0)
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Finite { map, .. } => {
                if map.is_empty() {
                    return f.write_str("id");
                }
                let mut done = BTreeSet::new();
                for &start in map.keys() {
                    if !done.insert(start) {
                        continue;
                    }
                    write!(f, "({start}")?;
                    let mut x = map[&start];
                    while x != start {
                        done.insert(x);
                        write!(f, " {x}")?;
                        x = map[&x];
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            GroupElement::Monotone(points) => {
                if points.is_empty() {
                    return f.write_str("id");
                }
                let parts: Vec<String> = points.iter().map(|(p, q)| format!("{p}->{q}")).collect();
                f.write_str(&parts.join(", "))
            }
        }
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `p^π = {π(t) | t ∈ p}`, computed one orbit at a time: π carries the orbit of
/// a representative over the frame to the orbit of its image over the image frame.
pub fn symbolic_act(pi: &GroupElement, p: &OrbitPredicate) -> Result<OrbitPredicate> {
    if pi.sort() != p.sort() {
        return Err(reject(format!("element of the {} group applied to a {} predicate", pi.sort(), p.sort())));
    }
    let sort = p.sort();
    let image_frame = sort.frame(&pi.apply_tuple(p.frame()));
    let types = p
        .types()
        .iter()
        .map(|ty| {
            let rep = crate::symbolic::types::representative(sort, p.frame(), ty, &[]);
            type_of(sort, &image_frame, &pi.apply_tuple(&rep))
        })
        .collect();
    Ok(OrbitPredicate::raw(sort, p.arity(), image_frame, types))
}
