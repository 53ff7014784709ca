//! The seeded invariant suite and the qualitative reproduction report.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::config::{CatalogConfig, ModelConfig};
use crate::harness::finite_checks::{self as fc, Ctx, Deadline, FiniteKnobs};
use crate::harness::gen::random_config;
use crate::harness::report::{CheckRecord, Report};
use crate::harness::symbolic_checks as sc;
use crate::structure::{FiniteStructure, ModelId, PredicateStructure};
use crate::symbolic::{Sort, SymbolicStructure, Template};
use crate::Exec;

/// Stream reserved for expanding `{"random": n}` entries.
const CONFIG_STREAM: u64 = u64::MAX;

/// Samples per model for each sampled check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub truth_invariance: u64,
    pub definable_equivariance: u64,
    pub free_variables: u64,
    pub pruning_soundness: u64,
    pub formula_stabilizer: u64,
    pub parameter_transport: u64,
    pub symbolic: u64,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            truth_invariance: 100,
            definable_equivariance: 100,
            free_variables: 50,
            pruning_soundness: 50,
            formula_stabilizer: 25,
            parameter_transport: 25,
            symbolic: 200,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Every check runs per model; an empty list yields an empty report.
    pub models: Vec<ModelConfig>,
    pub samples: Samples,
    /// Nesting bound for sampled formulas.
    pub depth: usize,
    pub comprehension_depth: usize,
    /// Comprehension audits run on built models up to this many atoms.
    pub comprehension_max_size: usize,
    /// Bound on the product of quantifier ranges along a sampled formula.
    pub formula_cost: u64,
    /// Per-check wall-clock cap; exceeding it reports budget-exhausted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_ms: Option<u64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let catalog = |id| ModelConfig::Catalog(CatalogConfig { id, arity_cap: None });
        let mut models: Vec<ModelConfig> = ModelId::finite_catalog().into_iter().map(catalog).collect();
        models.extend(ModelId::symbolic_catalog().into_iter().map(catalog));
        models.push(ModelConfig::pair_model());
        models.push(ModelConfig::Random(crate::harness::config::RandomConfig { random: 20, max_size: 4 }));
        SuiteConfig {
            seed: 42,
            models,
            samples: Samples::default(),
            depth: 3,
            comprehension_depth: 2,
            comprehension_max_size: 4,
            formula_cost: 1024,
            budget_ms: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Config(e.to_string()))
    }

    /// Named models, with random entries expanded from their own stream.
    pub fn jobs(&self) -> Vec<(String, ModelConfig)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(CONFIG_STREAM);
        let mut out = Vec::new();
        for m in &self.models {
            match m {
                ModelConfig::Random(r) => {
                    for i in 0..r.random {
                        let built = ModelConfig::Built(random_config(&mut rng, r.max_size));
                        out.push((format!("random-{i:02}|{}", built.name()), built));
                    }
                }
                other => out.push((other.name(), other.clone())),
            }
        }
        out
    }
}

/// Runs every check on every model. Job `i` draws from stream `i` of the
/// seed, so the report does not depend on scheduling.
pub fn run_suite(config: &SuiteConfig, exec: Exec) -> Result<Report> {
    let jobs: Vec<(usize, String, ModelConfig)> =
        config.jobs().into_iter().enumerate().map(|(i, (name, m))| (i, name, m)).collect();
    let records = exec.map(&jobs, |(i, name, model)| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(*i as u64);
        let mut ctx = Ctx { rng, deadline: Deadline::new(config.budget_ms), exec: Exec::Sequential };
        run_model(&mut ctx, config, name, model)
    });
    let checks = records.into_iter().collect::<Result<Vec<Vec<CheckRecord>>>>()?.concat();
    let echo = serde_json::to_value(config).expect("configs serialize");
    Ok(Report::assemble("suite", Some(config.seed), Some(echo), checks))
}

fn run_model(ctx: &mut Ctx, config: &SuiteConfig, name: &str, model: &ModelConfig) -> Result<Vec<CheckRecord>> {
    let s = model.instantiate()?;
    Ok(match &s {
        PredicateStructure::Finite(f) if matches!(model, ModelConfig::HandBuilt(_)) => {
            vec![fc::predicate_closure(f, name, ctx.exec)]
        }
        PredicateStructure::Finite(f) => finite_model(ctx, config, name, f),
        PredicateStructure::Symbolic(sym) => symbolic_model(ctx, config, sym),
    })
}

fn fresh_deadline(ctx: &mut Ctx, config: &SuiteConfig) {
    ctx.deadline = Deadline::new(config.budget_ms);
}

fn finite_model(ctx: &mut Ctx, config: &SuiteConfig, name: &str, s: &FiniteStructure) -> Vec<CheckRecord> {
    let n = &config.samples;
    let knobs = FiniteKnobs { depth: config.depth, cost: config.formula_cost };
    let mut out = vec![fc::predicate_closure(s, name, ctx.exec), fc::finite_triviality(s, name)];
    out.extend(fc::family_axioms(s, name));
    type Sampled = fn(&mut Ctx, &FiniteStructure, &str, u64, FiniteKnobs) -> CheckRecord;
    let sampled: [(Sampled, u64); 6] = [
        (fc::truth_invariance, n.truth_invariance),
        (fc::definable_equivariance, n.definable_equivariance),
        (fc::free_variables, n.free_variables),
        (fc::pruning_soundness, n.pruning_soundness),
        (fc::formula_stabilizer, n.formula_stabilizer),
        (fc::parameter_transport, n.parameter_transport),
    ];
    for (check, count) in sampled {
        fresh_deadline(ctx, config);
        out.push(check(ctx, s, name, count, knobs));
    }
    if s.domain().len() <= config.comprehension_max_size {
        out.push(fc::comprehension(s, name, config.comprehension_depth, ctx.exec));
    }
    out
}

fn symbolic_model(ctx: &mut Ctx, config: &SuiteConfig, s: &SymbolicStructure) -> Vec<CheckRecord> {
    let n = config.samples.symbolic;
    type Sampled = fn(&mut Ctx, &SymbolicStructure, u64) -> CheckRecord;
    let sampled: [Sampled; 5] = [
        sc::symbolic_closure,
        sc::support_conjugation,
        sc::support_minimality,
        sc::bridge_commutation,
        sc::first_order_agreement,
    ];
    let mut out = Vec::new();
    for check in sampled {
        fresh_deadline(ctx, config);
        out.push(check(ctx, s, n));
    }
    out.extend(qualitative(s, ctx.exec));
    out
}

/// The order and comparability verdicts expected of each sort.
fn qualitative(s: &SymbolicStructure, exec: Exec) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    match s.sort() {
        Sort::Ordered => out.push(sc::linear_order_witness(s, exec)),
        _ => out.push(sc::refutation(s, Template::LinearOrder)),
    }
    if s.sort() == Sort::TwoSorted {
        out.push(sc::refutation(s, Template::ComparabilityInjection));
    }
    out
}

/// Qualitative verdicts for the symbolic catalog plus the finite-triviality
/// audit of every finite catalog model.
pub fn reproduce_report(exec: Exec) -> Result<Report> {
    let mut checks = Vec::new();
    for id in ModelId::symbolic_catalog() {
        let s = crate::structure::make_catalog_model(id, crate::harness::config::DEFAULT_ARITY_CAP)?;
        checks.extend(qualitative(s.as_symbolic()?, exec));
    }
    for id in ModelId::finite_catalog() {
        let s = crate::structure::make_catalog_model(id, crate::harness::config::DEFAULT_ARITY_CAP)?;
        checks.push(fc::finite_triviality(s.as_finite()?, &id.to_string()));
    }
    Ok(Report::assemble("report", None, None, checks))
}
