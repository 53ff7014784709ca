//! JSON descriptions of domains, groups, families and models.
//!
//! Model files take one of four shapes:
//!
//! * `{"catalog": "fraenkel-zermelo", "k": 2, "arity_cap": 2}`
//! * `{"domain": {...}, "group": {...}, "family": {...}, "arity_cap": 2}`
//! * `{"domain": {...}, "group": {...}, "levels": [["{0}"], ["{(0,1)}"]]}` (hand-built)
//! * `{"random": 20, "max_size": 4}` (suite configs only: seeded random configurations)

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::family::{Family, NormalFilter, NormalIdeal, Support};
use crate::perm::{Atom, Domain, PermGroup, PredicateRel};
use crate::structure::{build_model, make_catalog_model, FiniteStructure, ModelId, PredicateStructure};

/// Default arity cap for models that do not state one.
pub const DEFAULT_ARITY_CAP: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainConfig {
    /// Atoms `0..size`.
    Size { size: usize },
    /// `{"atoms": [...], "sorts": [...]}`.
    Atoms(Domain),
}

impl DomainConfig {
    pub fn domain(&self) -> Result<Domain> {
        match self {
            DomainConfig::Size { size: 0 } => Err(Error::Config("the domain must be non-empty".into())),
            DomainConfig::Size { size } => Ok(Domain::range(*size)),
            DomainConfig::Atoms(d) if d.is_empty() => Err(Error::Config("the domain must be non-empty".into())),
            DomainConfig::Atoms(d) => Ok(d.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupPreset {
    Symmetric,
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupConfig {
    /// Cycle notation over the domain's labels, e.g. `"(0 1)(2 3)"`.
    Generators {
        generators: Vec<String>,
    },
    Preset {
        preset: GroupPreset,
    },
}

impl GroupConfig {
    pub fn group(&self, domain: &Domain) -> Result<PermGroup> {
        match self {
            GroupConfig::Generators { generators } => PermGroup::from_cycle_strings(domain, generators),
            GroupConfig::Preset { preset: GroupPreset::Symmetric } => PermGroup::symmetric(domain.len()),
            GroupConfig::Preset { preset: GroupPreset::Trivial } => Ok(PermGroup::trivial(domain.len())),
        }
    }
}

/// An atom given by label or by index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AtomRef {
    Index(u32),
    Label(String),
}

impl AtomRef {
    fn resolve(&self, domain: &Domain) -> Result<Atom> {
        match self {
            AtomRef::Index(i) if (*i as usize) < domain.len() => Ok(*i),
            AtomRef::Index(i) => Err(Error::UnknownAtom(i.to_string())),
            AtomRef::Label(l) => domain.atom(l),
        }
    }
}

/// A predicate literal such as `{"arity": 2, "set": "{(0,1),(1,0)}"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateConfig {
    pub arity: usize,
    pub set: String,
}

impl PredicateConfig {
    pub fn predicate(&self, domain: &Domain) -> Result<PredicateRel> {
        PredicateRel::parse(domain, self.arity, &self.set)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    FiniteSupports,
    /// The generalized ideal `{∅}`.
    EmptyOnly,
    Explicit {
        members: Vec<Vec<AtomRef>>,
        #[serde(default)]
        generalized: bool,
    },
    Extended {
        predicates: Vec<PredicateConfig>,
    },
    Induced {
        ideal: Box<FamilyConfig>,
    },
    AllSubgroups,
    /// Subgroups given by generators; membership is the upward closure.
    ExplicitSubgroups {
        subgroups: Vec<Vec<String>>,
        #[serde(default)]
        generalized: bool,
    },
}

impl FamilyConfig {
    pub fn family(&self, domain: &Domain) -> Result<Family> {
        match self {
            FamilyConfig::Induced { ideal } => match ideal.family(domain)? {
                Family::Ideal(i) => Ok(Family::Filter(NormalFilter::induced(i))),
                Family::Filter(_) => Err(Error::Config("an induced filter needs an ideal".into())),
            },
            FamilyConfig::AllSubgroups => Ok(Family::Filter(NormalFilter::all_subgroups())),
            FamilyConfig::ExplicitSubgroups { subgroups, generalized } => {
                let groups =
                    subgroups.iter().map(|g| PermGroup::from_cycle_strings(domain, g)).collect::<Result<Vec<_>>>()?;
                Ok(Family::Filter(NormalFilter::explicit(groups, *generalized)))
            }
            FamilyConfig::FiniteSupports => Ok(Family::Ideal(NormalIdeal::finite_supports())),
            FamilyConfig::EmptyOnly => Ok(Family::Ideal(NormalIdeal::empty_only())),
            FamilyConfig::Explicit { members, generalized } => {
                let members = members
                    .iter()
                    .map(|m| m.iter().map(|a| a.resolve(domain)).collect::<Result<Vec<_>>>().map(Support::atoms))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Family::Ideal(NormalIdeal::explicit(members, *generalized)))
            }
            FamilyConfig::Extended { predicates } => {
                let preds = predicates.iter().map(|p| p.predicate(domain)).collect::<Result<Vec<_>>>()?;
                Ok(Family::Ideal(NormalIdeal::extended(preds)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogConfig {
    #[serde(flatten)]
    pub id: ModelId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity_cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltConfig {
    pub domain: DomainConfig,
    pub group: GroupConfig,
    pub family: FamilyConfig,
    #[serde(default = "default_arity_cap")]
    pub arity_cap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandBuiltConfig {
    pub domain: DomainConfig,
    pub group: GroupConfig,
    /// `levels[i]` lists the members of `J_{i+1}` as set literals.
    pub levels: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomConfig {
    pub random: usize,
    #[serde(default = "default_max_size")]
    pub max_size: usize,
}

fn default_arity_cap() -> usize {
    DEFAULT_ARITY_CAP
}

fn default_max_size() -> usize {
    4
}

/// Input to the `family.json` of an axiom audit: a group and a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub domain: DomainConfig,
    pub group: GroupConfig,
    pub family: FamilyConfig,
}

impl FamilyFile {
    pub fn resolve(&self) -> Result<(Domain, PermGroup, Family)> {
        let domain = self.domain.domain()?;
        let group = self.group.group(&domain)?;
        let family = self.family.family(&domain)?;
        Ok((domain, group, family))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ModelConfig {
    Catalog(CatalogConfig),
    Built(BuiltConfig),
    HandBuilt(HandBuiltConfig),
    Random(RandomConfig),
}

impl<'de> Deserialize<'de> for ModelConfig {
    /// Dispatches on the distinguishing key so errors name the right shape.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let has = |k: &str| v.get(k).is_some();
        let out = if has("catalog") {
            serde_json::from_value(v).map(ModelConfig::Catalog)
        } else if has("random") {
            serde_json::from_value(v).map(ModelConfig::Random)
        } else if has("levels") {
            serde_json::from_value(v).map(ModelConfig::HandBuilt)
        } else if has("family") {
            serde_json::from_value(v).map(ModelConfig::Built)
        } else {
            return Err(D::Error::custom("a model needs one of `catalog`, `family`, `levels` or `random`"));
        };
        out.map_err(D::Error::custom)
    }
}

impl ModelConfig {
    /// The generalized pair model: `I = {0,1,2,3}`, `G = ⟨(0 1),(2 3)⟩`, ideal `{∅}`.
    pub fn pair_model() -> Self {
        ModelConfig::Built(BuiltConfig {
            domain: DomainConfig::Size { size: 4 },
            group: GroupConfig::Generators { generators: vec!["(0 1)".into(), "(2 3)".into()] },
            family: FamilyConfig::EmptyOnly,
            arity_cap: 2,
        })
    }

    /// The planted non-closed structure: `J_1 = {{0}}` under `S_2`.
    pub fn planted_non_closed() -> Self {
        ModelConfig::HandBuilt(HandBuiltConfig {
            domain: DomainConfig::Size { size: 2 },
            group: GroupConfig::Preset { preset: GroupPreset::Symmetric },
            levels: vec![vec!["{0}".into()]],
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// A name for reports: the catalog name, or a description of the parts.
    pub fn name(&self) -> String {
        match self {
            ModelConfig::Catalog(c) => c.id.to_string(),
            ModelConfig::Built(b) => {
                format!("{}|{}|{}", describe_domain(&b.domain), describe_group(&b.group), describe_family(&b.family))
            }
            ModelConfig::HandBuilt(h) => {
                format!("hand-built|{}|{}", describe_domain(&h.domain), describe_group(&h.group))
            }
            ModelConfig::Random(r) => format!("random[{}]", r.random),
        }
    }

    pub fn instantiate(&self) -> Result<PredicateStructure> {
        match self {
            ModelConfig::Catalog(c) => make_catalog_model(c.id, c.arity_cap.unwrap_or(DEFAULT_ARITY_CAP)),
            ModelConfig::Built(b) => {
                let domain = b.domain.domain()?;
                let group = b.group.group(&domain)?;
                let family = b.family.family(&domain)?;
                Ok(PredicateStructure::Finite(build_model(&domain, &group, &family, b.arity_cap)?))
            }
            ModelConfig::HandBuilt(h) => {
                let domain = h.domain.domain()?;
                let group = h.group.group(&domain)?;
                let levels = h
                    .levels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| l.iter().map(|s| PredicateRel::parse(&domain, i + 1, s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(PredicateStructure::Finite(FiniteStructure::hand_built(domain, group, levels)?))
            }
            ModelConfig::Random(_) => {
                Err(Error::Config("`random` entries only make sense inside a suite configuration".into()))
            }
        }
    }
}

fn describe_domain(d: &DomainConfig) -> String {
    match d {
        DomainConfig::Size { size } => format!("I={size}"),
        DomainConfig::Atoms(d) => format!("I={{{}}}", d.labels().join(",")),
    }
}

fn describe_group(g: &GroupConfig) -> String {
    match g {
        GroupConfig::Generators { generators } => format!("G=<{}>", generators.join(",")),
        GroupConfig::Preset { preset: GroupPreset::Symmetric } => "G=symmetric".into(),
        GroupConfig::Preset { preset: GroupPreset::Trivial } => "G=trivial".into(),
    }
}

fn describe_family(f: &FamilyConfig) -> String {
    match f {
        FamilyConfig::FiniteSupports => "ideal:finite-supports".into(),
        FamilyConfig::EmptyOnly => "ideal:empty-only".into(),
        FamilyConfig::Explicit { members, generalized } => {
            format!("ideal:explicit[{}]{}", members.len(), if *generalized { ":generalized" } else { "" })
        }
        FamilyConfig::Extended { predicates } => format!("ideal:extended[{}]", predicates.len()),
        FamilyConfig::Induced { ideal } => format!("filter:induced({})", describe_family(ideal)),
        FamilyConfig::AllSubgroups => "filter:all-subgroups".into(),
        FamilyConfig::ExplicitSubgroups { subgroups, generalized } => {
            format!("filter:explicit[{}]{}", subgroups.len(), if *generalized { ":generalized" } else { "" })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_parse_and_round_trip() {
        let texts = [
            r#"{"catalog":"fraenkel-zermelo","k":2}"#,
            r#"{"catalog":"basic","size":3,"arity_cap":1}"#,
            r#"{"domain":{"size":4},"group":{"generators":["(0 1)","(2 3)"]},"family":{"kind":"empty-only"}}"#,
            r#"{"domain":{"atoms":["a","b"]},"group":{"preset":"symmetric"},"family":{"kind":"induced","ideal":{"kind":"finite-supports"}},"arity_cap":1}"#,
            r#"{"domain":{"size":2},"group":{"preset":"symmetric"},"levels":[["{0}"]]}"#,
            r#"{"random":5}"#,
        ];
        for t in texts {
            let m = ModelConfig::from_json(t).unwrap();
            let back = ModelConfig::from_json(&serde_json::to_string(&m).unwrap()).unwrap();
            assert_eq!(back, m, "{t}");
        }
        assert!(ModelConfig::from_json(r#"{"domain":{"size":2}}"#).is_err());
        assert!(ModelConfig::from_json(r#"{"catalog":"nope"}"#).is_err());
    }

    #[test]
    fn pair_model_has_four_unary_members() {
        let s = ModelConfig::pair_model().instantiate().unwrap();
        let s = s.as_finite().unwrap();
        assert!(s.generalized());
        let members: Vec<String> = s.members(1).unwrap().iter().map(|p| p.format(s.domain())).collect();
        assert_eq!(members.len(), 4);
        assert!(members.contains(&"{0,1}".to_string()) && members.contains(&"{2,3}".to_string()));
    }

    #[test]
    fn explicit_members_accept_indices_and_labels() {
        let f: FamilyConfig =
            serde_json::from_str(r#"{"kind":"explicit","members":[[],[0],["1"],[0,1]],"generalized":false}"#).unwrap();
        let Family::Ideal(i) = f.family(&Domain::range(2)).unwrap() else { panic!() };
        assert!(i.contains(&Support::atoms([1])));
        assert!(f.family(&Domain::range(1)).is_err());
    }

    #[test]
    fn planted_structure_is_not_closed() {
        let s = ModelConfig::planted_non_closed().instantiate().unwrap();
        let report = s.as_finite().unwrap().check_group_closure();
        assert!(!report.closed);
    }
}
