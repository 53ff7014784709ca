use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of an atom inside a [`Domain`].
pub type Atom = u32;

/// A finite individual domain: opaque labels mapped to `0..len`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub struct Domain {
    labels: Vec<String>,
    sorts: Option<Vec<String>>,
    index: HashMap<String, Atom>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.sorts == other.sorts
    }
}

impl Eq for Domain {}

impl Domain {
    /// Domain `{0, 1, .., n-1}` labelled by decimal indices.
    pub fn range(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string()).collect()).expect("decimal labels are distinct")
    }

    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i as Atom).is_some() {
                return Err(Error::DuplicateAtom(l.clone()));
            }
        }
        Ok(Domain { labels, sorts: None, index })
    }

    pub fn with_sorts(mut self, sorts: Vec<String>) -> Result<Self> {
        if sorts.len() != self.labels.len() {
            return Err(Error::DomainMismatch { expected: self.labels.len(), found: sorts.len() });
        }
        self.sorts = Some(sorts);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, atom: Atom) -> &str {
        &self.labels[atom as usize]
    }

    pub fn sort_of(&self, atom: Atom) -> Option<&str> {
        self.sorts.as_ref().map(|s| s[atom as usize].as_str())
    }

    pub fn atom(&self, label: &str) -> Result<Atom> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        0..self.labels.len() as Atom
    }

    /// Resolves a list of labels to a sorted, duplicate-free atom set.
    pub fn atom_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<Atom>> {
        let mut out = labels.iter().map(|l| self.atom(l.as_ref())).collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct DomainRepr {
    atoms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sorts: Option<Vec<String>>,
}

impl TryFrom<DomainRepr> for Domain {
    type Error = Error;

    fn try_from(r: DomainRepr) -> Result<Self> {
        let d = Domain::new(r.atoms)?;
        match r.sorts {
            Some(s) => d.with_sorts(s),
            None => Ok(d),
        }
    }
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        DomainRepr { atoms: d.labels, sorts: d.sorts }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_index_bijectively() {
        let d = Domain::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        assert_eq!(d.atom("b").unwrap(), 1);
        assert_eq!(d.label(2), "c");
        assert!(matches!(d.atom("z"), Err(Error::UnknownAtom(_))));
        assert_eq!(d.atom_set(&["c", "a", "c"]).unwrap(), vec![0, 2]);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(Domain::new(vec!["a".into(), "a".into()]), Err(Error::DuplicateAtom(_))));
    }

    #[test]
    fn json_shape() {
        let d = Domain::range(2).with_sorts(vec!["x".into(), "y".into()]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"atoms":["0","1"],"sorts":["x","y"]}"#);
        let back: Domain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
