use std::fmt;

use crate::error::{Error, Result};
use crate::perm::domain::{Atom, Domain};

/// A bijection of `0..degree`, stored as its image table.
///
/// Composition follows `(p.compose(q))(x) = p(q(x))`, which makes the
/// predicate action `alpha^p = {p(t) | t in alpha}` a left action.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<Atom>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as Atom).collect() }
    }

    pub fn from_images(images: Vec<Atom>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn transposition(degree: usize, a: Atom, b: Atom) -> Result<Self> {
        Self::from_cycles(degree, &[vec![a, b]])
    }

    pub fn from_cycles(degree: usize, cycles: &[Vec<Atom>]) -> Result<Self> {
        let mut images: Vec<Atom> = (0..degree as Atom).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let xi = x as usize;
                if xi >= degree || std::mem::replace(&mut used[xi], true) {
                    return Err(Error::NotAPermutation(format!("cycle {cycle:?}")));
                }
                images[xi] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Parses cycle notation such as `(a b)(c d e)`; `()` is the identity.
    pub fn parse_cycles(domain: &Domain, text: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open =
                rest.strip_prefix('(').ok_or_else(|| Error::NotAPermutation(format!("expected `(` in `{text}`")))?;
            let close = open.find(')').ok_or_else(|| Error::NotAPermutation(format!("unclosed cycle in `{text}`")))?;
            let body = &open[..close];
            let cycle = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|l| domain.atom(l))
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = open[close + 1..].trim_start();
        }
        Self::from_cycles(domain.len(), &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Atom] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: Atom) -> Atom {
        self.images[x as usize]
    }

    pub fn apply_tuple(&self, t: &[Atom]) -> Vec<Atom> {
        t.iter().map(|&x| self.apply(x)).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as Atom;
        }
        Permutation { images: inv }
    }

    /// `self ∘ h ∘ self⁻¹`.
    pub fn conjugate(&self, h: &Permutation) -> Permutation {
        self.compose(h).compose(&self.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as Atom == x)
    }

    pub fn fixes(&self, x: Atom) -> bool {
        self.apply(x) == x
    }

    /// Non-trivial cycles, each starting at its least point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<Atom>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as Atom);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }

    pub fn to_cycle_string(&self, domain: &Domain) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles
            .iter()
            .map(|c| {
                let body: Vec<&str> = c.iter().map(|&x| domain.label(x)).collect();
                format!("({})", body.join(" "))
            })
            .collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_applies_right_factor_first() {
        let p = Permutation::from_cycles(3, &[vec![0, 1]]).unwrap();
        let q = Permutation::from_cycles(3, &[vec![1, 2]]).unwrap();
        // p(q(1)) = p(2) = 2
        assert_eq!(p.compose(&q).apply(1), 2);
        assert_eq!(p.compose(&q).to_string(), "(0 1 2)");
        assert_eq!(q.compose(&p).to_string(), "(0 2 1)");
    }

    #[test]
    fn inverse_and_identity() {
        let p = Permutation::from_cycles(4, &[vec![0, 2, 3]]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(Permutation::identity(3).to_string(), "()");
    }

    #[test]
    fn cycle_notation_round_trip() {
        let d = Domain::range(4);
        let p = Permutation::parse_cycles(&d, "(0 1)(2 3)").unwrap();
        assert_eq!(p.to_cycle_string(&d), "(0 1)(2 3)");
        assert!(Permutation::parse_cycles(&d, "()").unwrap().is_identity());
        assert!(Permutation::parse_cycles(&d, "(0 1)(1 2)").is_err());
        assert!(Permutation::parse_cycles(&d, "(0 7)").is_err());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 3]).is_err());
    }
}
