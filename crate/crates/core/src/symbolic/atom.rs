use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// An infinite atom sort together with its fixed automorphism group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sort {
    /// `ℕ` under all permutations.
    Equality,
    /// `ℚ` under order automorphisms.
    Ordered,
    /// `ℕ × {0,1}` under permutations that respect the pairs `{(n,0),(n,1)}`.
    Paired,
    /// `{0}×ℕ ∪ {1}×ℕ` under permutations that preserve each half.
    TwoSorted,
}

impl Sort {
    pub const ALL: [Sort; 4] = [Sort::Equality, Sort::Ordered, Sort::Paired, Sort::TwoSorted];

    pub fn name(self) -> &'static str {
        match self {
            Sort::Equality => "equality",
            Sort::Ordered => "ordered",
            Sort::Paired => "paired",
            Sort::TwoSorted => "two-sorted",
        }
    }

    pub fn accepts(self, a: &SymAtom) -> bool {
        matches!(
            (self, a),
            (Sort::Equality, SymAtom::Eq(_))
                | (Sort::Ordered, SymAtom::Rat(_))
                | (Sort::Paired, SymAtom::Pair(..))
                | (Sort::TwoSorted, SymAtom::Half(..))
        )
    }

    pub fn check(self, atoms: &[SymAtom]) -> Result<()> {
        match atoms.iter().find(|a| !self.accepts(a)) {
            Some(a) => Err(Error::UnknownAtom(format!("{a} is not a {} atom", self.name()))),
            None => Ok(()),
        }
    }

    /// Sorted, duplicate-free; paired frames also contain every mate.
    pub fn frame<'a, I: IntoIterator<Item = &'a SymAtom>>(self, atoms: I) -> Vec<SymAtom> {
        let mut out: Vec<SymAtom> = Vec::new();
        for a in atoms {
            out.push(*a);
            if let SymAtom::Pair(n, s) = *a {
                out.push(SymAtom::Pair(n, 1 - s));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn parse_atom(self, text: &str) -> Result<SymAtom> {
        let a: SymAtom = text.parse()?;
        if !self.accepts(&a) {
            return Err(Error::UnknownAtom(format!("{text} is not a {} atom", self.name())));
        }
        Ok(a)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sort {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Sort::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::Config(format!("unknown sort `{s}`")))
    }
}

/// An atom of one of the infinite sorts.
///
/// Written `a3` (equality), `-1/2` (ordered), `p3.1` (paired) and `h0.5`
/// (two-sorted, half 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymAtom {
    Eq(u32),
    Rat(Rational),
    Pair(u32, u8),
    Half(u8, u32),
}

impl SymAtom {
    pub fn rat(n: i64, d: i64) -> Self {
        SymAtom::Rat(Rational::new(n, d))
    }

    pub fn mate(self) -> Option<SymAtom> {
        match self {
            SymAtom::Pair(n, s) => Some(SymAtom::Pair(n, 1 - s)),
            _ => None,
        }
    }
}

impl fmt::Display for SymAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymAtom::Eq(k) => write!(f, "a{k}"),
            SymAtom::Rat(q) => write!(f, "{q}"),
            SymAtom::Pair(n, s) => write!(f, "p{n}.{s}"),
            SymAtom::Half(h, n) => write!(f, "h{h}.{n}"),
        }
    }
}

impl Serialize for SymAtom {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for SymAtom {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::UnknownAtom(text.to_string());
        let dotted = |rest: &str| -> Result<(u32, u32)> {
            let (x, y) = rest.split_once('.').ok_or_else(bad)?;
            Ok((x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?))
        };
        if let Some(rest) = text.strip_prefix('a') {
            return rest.parse().map(SymAtom::Eq).map_err(|_| bad());
        }
        if let Some(rest) = text.strip_prefix('p') {
            let (n, s) = dotted(rest)?;
            return if s <= 1 { Ok(SymAtom::Pair(n, s as u8)) } else { Err(bad()) };
        }
        if let Some(rest) = text.strip_prefix('h') {
            let (h, n) = dotted(rest)?;
            return if h <= 1 { Ok(SymAtom::Half(h as u8, n)) } else { Err(bad()) };
        }
        let q = match text.split_once('/') {
            Some((n, d)) => {
                let d: i64 = d.parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Rational::new(n.parse().map_err(|_| bad())?, d)
            }
            None => Rational::from_integer(text.parse().map_err(|_| bad())?),
        };
        Ok(SymAtom::Rat(q))
    }
}
