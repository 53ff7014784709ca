//! `forge`: build permutation models, evaluate formulas and run the
//! invariant suite. JSON goes to stdout; `--pretty` prints tables instead.
//!
//! Exit codes: 0 all faithful checks pass, 1 some faithful check failed,
//! 2 the input or configuration was rejected.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use forge_core::family::{check_normal_filter_axioms, check_normal_ideal_axioms, Family};
use forge_core::harness::{reproduce_report, run_suite, FamilyFile, ModelConfig, Report, SuiteConfig};
use forge_core::logic::{Assignment, FiniteAssignment, Formula, PredVar, TruthValue};
use forge_core::perm::PredicateRel;
use forge_core::structure::PredicateStructure;
use forge_core::symbolic::types::representative;
use forge_core::symbolic::{orbits_over, OrbitPredicate, Sort, SymAtom, SymbolicAssignment};
use forge_core::Exec;
use serde_json::{json, Value};

/// `println!` that stops quietly once the reader closes the pipe.
macro_rules! out {
    ($($t:tt)*) => { write_line(format_args!($($t)*)) };
}

fn write_line(args: std::fmt::Arguments) {
    if let Err(e) = writeln!(io::stdout().lock(), "{args}") {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

/// Per-check wall-clock cap in milliseconds.
const BUDGET_ENV: &str = "FORGE_BUDGET_MS";

#[derive(Parser)]
#[command(name = "forge", version, about = "Second-order permutation models and their invariants")]
struct Cli {
    /// Print human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Run every loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit a normal ideal or filter against its axioms.
    CheckAxioms { family: PathBuf },
    /// Build a model and dump its levels.
    Build {
        model: PathBuf,
        /// Highest predicate arity to materialize.
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a formula under an assignment.
    Eval {
        model: PathBuf,
        formula: String,
        /// `x1=a`, `A1#1={0,2}`; symbolic predicates are `support;orbit indices`
        /// as listed by `forge orbits`, e.g. `A1#1=a0;0`.
        #[arg(long = "assign", value_name = "VAR=VALUE")]
        assign: Vec<String>,
    },
    /// List the orbits of tuples over a support in an infinite sort.
    Orbits {
        sort: String,
        /// Comma-separated atoms; `-` for the empty support.
        support: String,
        arity: usize,
    },
    /// Run the seeded invariant suite.
    Suite {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// The qualitative verdict table.
    Report,
}

/// Rejected input: exit code 2.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(e: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(ConfigError(e.into()))
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(config_err)
}

fn emit(pretty: bool, value: &Value, table: impl FnOnce() -> String) {
    if pretty {
        out!("{}", table());
    } else {
        out!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
    }
}

fn emit_report(pretty: bool, report: &Report) -> u8 {
    if pretty {
        out!("{}", report.to_table());
    } else {
        out!("{}", report.to_json());
    }
    report.exit_code() as u8
}

fn budget_ms() -> anyhow::Result<Option<u64>> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| config_err(anyhow!("{BUDGET_ENV}={v} is not a number"))),
        Err(_) => Ok(None),
    }
}

fn load_model(path: &Path) -> anyhow::Result<ModelConfig> {
    ModelConfig::from_json(&read(path)?).map_err(config_err)
}

fn check_axioms(pretty: bool, path: &Path) -> anyhow::Result<u8> {
    let file: FamilyFile = serde_json::from_str(&read(path)?).map_err(config_err)?;
    let (domain, group, family) = file.resolve().map_err(config_err)?;
    let report = match &family {
        Family::Ideal(i) => check_normal_ideal_axioms(&group, i)?,
        Family::Filter(f) => check_normal_filter_axioms(&group, f)?,
    };
    let value = report.to_json(&domain);
    emit(pretty, &value, || {
        let mut lines = vec![format!("{} on {}", report.family, group.describe(&domain))];
        for v in value["axioms"].as_array().into_iter().flatten() {
            let axiom = format!("({})", v["axiom"].as_str().unwrap_or("?"));
            let status = v["status"].as_str().unwrap_or("?");
            let witness = v["witness"].as_str().map(|w| format!("  witness: {w}")).unwrap_or_default();
            lines.push(format!("  {axiom:<6}{status:<8}{witness}").trim_end().to_string());
        }
        lines.push(format!("acceptable: {}", report.acceptable()));
        lines.join("\n")
    });
    Ok(u8::from(!report.acceptable()))
}

fn with_arity(model: ModelConfig, arity: Option<usize>) -> anyhow::Result<ModelConfig> {
    let Some(n) = arity else { return Ok(model) };
    Ok(match model {
        ModelConfig::Catalog(mut c) => {
            c.arity_cap = Some(n);
            ModelConfig::Catalog(c)
        }
        ModelConfig::Built(mut b) => {
            b.arity_cap = n;
            ModelConfig::Built(b)
        }
        _ => bail!(config_err(anyhow!("--arity applies to catalog and built models"))),
    })
}

fn build(pretty: bool, path: &Path, arity: Option<usize>, out: Option<&Path>) -> anyhow::Result<u8> {
    let model = with_arity(load_model(path)?, arity)?;
    let s = model.instantiate().map_err(config_err)?;
    let (value, closed) = match &s {
        PredicateStructure::Finite(f) => {
            let closure = f.check_group_closure();
            let mut v = f.to_json();
            v["closed"] = json!(closure.closed);
            (v, closure.closed)
        }
        PredicateStructure::Symbolic(sym) => (
            json!({
                "name": sym.name(),
                "sort": sym.sort(),
                "group": sym.group_descriptor(),
                "arity_cap": sym.arity_cap(),
                "levels": "every finitely supported predicate, as unions of orbit types",
            }),
            true,
        ),
    };
    let text = serde_json::to_string_pretty(&value).expect("values serialize");
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None if pretty => {
            let levels = value["levels"].as_array().cloned().unwrap_or_default();
            out!("{}", model.name());
            for l in levels {
                out!("  J_{}: {}", l["arity"], l.get("size").map_or("not materialized".into(), |n| n.to_string()));
            }
            out!("  closed under the group: {closed}");
        }
        None => out!("{text}"),
    }
    Ok(u8::from(!closed))
}

fn parse_binding(text: &str) -> anyhow::Result<(&str, &str)> {
    text.split_once('=').ok_or_else(|| config_err(anyhow!("expected VAR=VALUE, got `{text}`")))
}

fn parse_ind(name: &str) -> Option<u32> {
    name.strip_prefix('x')?.parse().ok()
}

fn parse_pred(name: &str) -> Option<PredVar> {
    let (i, n) = name.strip_prefix('A')?.split_once('#')?;
    Some(PredVar::new(i.parse().ok()?, n.parse().ok()?))
}

fn parse_support(sort: Sort, text: &str) -> anyhow::Result<Vec<SymAtom>> {
    let text = text.trim();
    if text.is_empty() || text == "-" {
        return Ok(Vec::new());
    }
    text.split(',').map(|a| sort.parse_atom(a.trim())).collect::<forge_core::Result<_>>().map_err(config_err)
}

fn bind<I: Clone, P: Clone>(
    bindings: &[String],
    mut ind: impl FnMut(&str) -> anyhow::Result<I>,
    mut pred: impl FnMut(PredVar, &str) -> anyhow::Result<P>,
) -> anyhow::Result<Assignment<I, P>> {
    let mut f = Assignment::new();
    for b in bindings {
        let (name, value) = parse_binding(b)?;
        if let Some(v) = parse_ind(name) {
            f = f.with_ind(v, ind(value)?);
        } else if let Some(p) = parse_pred(name) {
            f = f.with_pred(p, pred(p, value)?);
        } else {
            bail!(config_err(anyhow!("`{name}` is neither xN nor AN#K")));
        }
    }
    Ok(f)
}

fn eval(pretty: bool, path: &Path, formula: &str, assign: &[String]) -> anyhow::Result<u8> {
    let model = load_model(path)?;
    let h: Formula = formula.parse().map_err(config_err)?;
    let s = model.instantiate().map_err(config_err)?;
    let truth: TruthValue = match &s {
        PredicateStructure::Finite(fs) => {
            let domain = fs.domain();
            let f: FiniteAssignment = bind(
                assign,
                |v| {
                    domain
                        .atom(v)
                        .or_else(|_| v.parse().map_err(|_| forge_core::Error::UnknownAtom(v.into())))
                        .map_err(config_err)
                },
                |p, v| PredicateRel::parse(domain, p.arity as usize, v).map_err(config_err),
            )?;
            forge_core::logic::evaluate(fs, &f, &h).map_err(config_err)?
        }
        PredicateStructure::Symbolic(sym) => {
            let sort = sym.sort();
            let f: SymbolicAssignment = bind(
                assign,
                |v| sort.parse_atom(v).map_err(config_err),
                |p, v| {
                    let (support, picks) = v.split_once(';').unwrap_or((v, ""));
                    let support = parse_support(sort, support)?;
                    let orbits = orbits_over(sort, &support, p.arity as usize).map_err(config_err)?;
                    let types = picks
                        .split(',')
                        .filter(|t| !t.trim().is_empty())
                        .map(|t| {
                            t.trim()
                                .parse::<usize>()
                                .ok()
                                .and_then(|i| orbits.get(i).cloned())
                                .ok_or_else(|| config_err(anyhow!("`{t}` is not an orbit index")))
                        })
                        .collect::<anyhow::Result<Vec<_>>>()?;
                    OrbitPredicate::from_types(sort, &support, p.arity as usize, types).map_err(config_err)
                },
            )?;
            forge_core::symbolic::evaluate(sym, &f, &h).map_err(config_err)?
        }
    };
    let value = json!({
        "model": model.name(),
        "formula": h.to_string(),
        "value": truth.value,
        "completeness": truth.completeness,
    });
    emit(pretty, &value, || format!("{}  ⊨  {}  :  {} ({:?})", model.name(), h, truth.value, truth.completeness));
    Ok(0)
}

fn orbits(pretty: bool, sort: &str, support: &str, arity: usize) -> anyhow::Result<u8> {
    let sort: Sort = sort.parse().map_err(config_err)?;
    let support = parse_support(sort, support)?;
    let frame = sort.frame(&support);
    let types = orbits_over(sort, &support, arity).map_err(config_err)?;
    let rows: Vec<Value> = types
        .iter()
        .enumerate()
        .map(|(i, ty)| {
            let rep: Vec<String> = representative(sort, &frame, ty, &[]).iter().map(|a| a.to_string()).collect();
            json!({ "index": i, "descriptor": ty.describe(sort, frame.len()), "representative": rep })
        })
        .collect();
    let value = json!({ "sort": sort, "support": frame, "arity": arity, "orbits": rows });
    emit(pretty, &value, || {
        rows.iter()
            .map(|r| {
                format!(
                    "{:>3}  {:<40}  ({})",
                    r["index"],
                    r["descriptor"].as_str().unwrap_or(""),
                    r["representative"].as_array().map_or(String::new(), |a| a
                        .iter()
                        .filter_map(Value::as_str)
                        .collect::<Vec<_>>()
                        .join(", "))
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    });
    Ok(0)
}

fn suite(pretty: bool, exec: Exec, seed: Option<u64>, config: Option<&Path>) -> anyhow::Result<u8> {
    let mut c = match config {
        Some(p) => SuiteConfig::from_json(&read(p)?).map_err(config_err)?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = seed {
        c.seed = s;
    }
    if let Some(ms) = budget_ms()? {
        c.budget_ms = Some(ms);
    }
    let report = run_suite(&c, exec).map_err(config_err)?;
    Ok(emit_report(pretty, &report))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::CheckAxioms { family } => check_axioms(cli.pretty, &family),
        Command::Build { model, arity, out } => build(cli.pretty, &model, arity, out.as_deref()),
        Command::Eval { model, formula, assign } => eval(cli.pretty, &model, &formula, &assign),
        Command::Orbits { sort, support, arity } => orbits(cli.pretty, &sort, &support, arity),
        Command::Suite { seed, config } => suite(cli.pretty, exec, seed, config.as_deref()),
        Command::Report => Ok(emit_report(cli.pretty, &reproduce_report(exec)?)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("forge: {e:#}");
            // Everything but a rejected input is a failed check.
            ExitCode::from(if e.is::<ConfigError>() { 2 } else { 1 })
        }
    }
}
