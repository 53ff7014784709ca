use std::cmp::Ordering;
use std::fmt;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::perm::domain::{Atom, Domain};
use crate::perm::permutation::Permutation;

type Words = SmallVec<[u64; 4]>;

/// An n-ary predicate over a finite domain, stored as a dense truth table.
///
/// Tuples are encoded base-`size` with the first coordinate most significant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PredicateRel {
    arity: u32,
    size: u32,
    bits: Words,
}

pub(crate) fn cell_count(size: usize, arity: usize) -> Option<usize> {
    size.checked_pow(arity as u32)
}

impl PredicateRel {
    pub fn empty(size: usize, arity: usize) -> Self {
        assert!(arity >= 1, "predicates have arity at least one");
        let cells = cell_count(size, arity).expect("table size overflow");
        PredicateRel { arity: arity as u32, size: size as u32, bits: smallvec![0; cells.div_ceil(64)] }
    }

    pub fn full(size: usize, arity: usize) -> Self {
        let mut p = Self::empty(size, arity);
        for c in 0..p.cells() {
            p.set_cell(c);
        }
        p
    }

    pub fn from_tuples<I, T>(size: usize, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[Atom]>,
    {
        if arity == 0 {
            return Err(Error::ArityOutOfRange { arity, cap: usize::MAX });
        }
        let mut p = Self::empty(size, arity);
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity {
                return Err(Error::ArityOutOfRange { arity: t.len(), cap: arity });
            }
            if let Some(&bad) = t.iter().find(|&&x| x as usize >= size) {
                return Err(Error::UnknownAtom(bad.to_string()));
            }
            let c = p.encode(t);
            p.set_cell(c);
        }
        Ok(p)
    }

    /// Builds a predicate from the low `size^arity` bits of `mask`.
    pub fn from_mask(size: usize, arity: usize, mask: u64) -> Self {
        let mut p = Self::empty(size, arity);
        debug_assert!(p.cells() <= 64);
        p.bits[0] = mask;
        p
    }

    pub fn mask(&self) -> Option<u64> {
        (self.bits.len() <= 1).then(|| self.bits.first().copied().unwrap_or(0))
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn domain_size(&self) -> usize {
        self.size as usize
    }

    pub fn cells(&self) -> usize {
        (self.size as usize).pow(self.arity)
    }

    pub fn encode(&self, t: &[Atom]) -> usize {
        t.iter().fold(0usize, |acc, &x| acc * self.size as usize + x as usize)
    }

    pub fn decode(&self, mut cell: usize) -> Vec<Atom> {
        let n = self.size as usize;
        let mut t = vec![0; self.arity as usize];
        for slot in t.iter_mut().rev() {
            *slot = (cell % n) as Atom;
            cell /= n;
        }
        t
    }

    #[inline]
    pub fn cell(&self, c: usize) -> bool {
        self.bits[c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set_cell(&mut self, c: usize) {
        self.bits[c / 64] |= 1 << (c % 64);
    }

    pub fn contains(&self, t: &[Atom]) -> bool {
        t.len() == self.arity as usize && t.iter().all(|&x| x < self.size) && self.cell(self.encode(t))
    }

    pub fn insert(&mut self, t: &[Atom]) {
        let c = self.encode(t);
        self.set_cell(c);
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Set cells in ascending encoding order.
    pub fn set_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn tuples(&self) -> Vec<Vec<Atom>> {
        self.set_cells().map(|c| self.decode(c)).collect()
    }

    pub fn complement(&self) -> Self {
        let mut p = Self::empty(self.size as usize, self.arity as usize);
        for c in 0..self.cells() {
            if !self.cell(c) {
                p.set_cell(c);
            }
        }
        p
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// `alpha^pi = {pi(t) | t in alpha}`.
    pub fn act(&self, pi: &Permutation) -> Self {
        debug_assert_eq!(pi.degree(), self.size as usize);
        let mut out = Self::empty(self.size as usize, self.arity as usize);
        for c in self.set_cells() {
            let img = self.image_cell(pi, c);
            out.set_cell(img);
        }
        out
    }

    /// Whether `alpha^pi = alpha`.
    pub fn is_fixed_by(&self, pi: &Permutation) -> bool {
        self.set_cells().all(|c| self.cell(self.image_cell(pi, c)))
    }

    fn image_cell(&self, pi: &Permutation, mut cell: usize) -> usize {
        let n = self.size as usize;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.arity {
            let x = cell % n;
            cell /= n;
            out += pi.apply(x as Atom) as usize * place;
            place *= n;
        }
        out
    }

    /// Image of every cell under `pi`; used to act on many tables at once.
    pub fn cell_map(pi: &Permutation, size: usize, arity: usize) -> Vec<u32> {
        let probe = PredicateRel { arity: arity as u32, size: size as u32, bits: SmallVec::new() };
        (0..cell_count(size, arity).expect("table size overflow")).map(|c| probe.image_cell(pi, c) as u32).collect()
    }

    pub fn format(&self, domain: &Domain) -> String {
        let body: Vec<String> = self
            .tuples()
            .iter()
            .map(|t| {
                let xs: Vec<&str> = t.iter().map(|&x| domain.label(x)).collect();
                if self.arity == 1 {
                    xs[0].to_string()
                } else {
                    format!("({})", xs.join(","))
                }
            })
            .collect();
        format!("{{{}}}", body.join(","))
    }

    /// Parses `{a,b}` (unary) or `{(a,b),(b,a)}` against `domain`.
    pub fn parse(domain: &Domain, arity: usize, text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("bad predicate literal `{text}`: {m}"));
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| bad("expected braces"))?
            .trim();
        let mut tuples = Vec::new();
        if arity == 1 {
            for l in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                tuples.push(vec![domain.atom(l)?]);
            }
        } else {
            let mut rest = inner;
            while !rest.is_empty() {
                let open = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
                let close = open.find(')').ok_or_else(|| bad("unclosed tuple"))?;
                let t = open[..close].split(',').map(|l| domain.atom(l.trim())).collect::<Result<Vec<_>>>()?;
                tuples.push(t);
                rest = open[close + 1..].trim_start().trim_start_matches(',').trim_start();
            }
        }
        Self::from_tuples(domain.len(), arity, tuples)
    }
}

impl Ord for PredicateRel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arity
            .cmp(&other.arity)
            .then(self.size.cmp(&other.size))
            .then_with(|| self.bits.iter().rev().cmp(other.bits.iter().rev()))
    }
}

impl PartialOrd for PredicateRel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PredicateRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format(&Domain::range(self.size as usize)))
    }
}
