//! Report records, summary counts and rendering.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::harness::registry::Anchor;
use crate::logic::Completeness;

/// Name and version of the sampling PRNG, recorded in every report header.
pub const PRNG: &str = "ChaCha8Rng (rand_chacha 0.3), one stream per job";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The per-check time or candidate budget ran out first.
    BudgetExhausted,
    /// The check could not run; counts as a failure.
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub anchor: Anchor,
    pub model: String,
    pub generalized: bool,
    pub samples: u64,
    pub status: CheckStatus,
    pub completeness: Completeness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(anchor: Anchor, model: impl Into<String>, generalized: bool) -> Self {
        CheckRecord {
            anchor,
            model: model.into(),
            generalized,
            samples: 0,
            status: CheckStatus::Pass,
            completeness: Completeness::Exact,
            claim: None,
            verdict: None,
            witness: None,
            note: None,
        }
    }

    pub fn fail(mut self, witness: serde_json::Value) -> Self {
        self.status = CheckStatus::Fail;
        self.witness = Some(witness);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// A failure that counts against the exit code.
    pub fn is_faithful_failure(&self) -> bool {
        !self.generalized && matches!(self.status, CheckStatus::Fail | CheckStatus::Error)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub prng: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    /// Statements of the anchors cited below.
    pub anchors: BTreeMap<&'static str, &'static str>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub budget_exhausted: usize,
    pub errors: usize,
    pub faithful_failures: usize,
    /// Failures under generalized families; informational only.
    pub generalized_findings: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub header: Header,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    /// Sorts the records by anchor, then model, and computes the summary.
    pub fn assemble(
        kind: &'static str,
        seed: Option<u64>,
        config: Option<serde_json::Value>,
        mut checks: Vec<CheckRecord>,
    ) -> Self {
        checks.sort_by(|a, b| (a.anchor, &a.model).cmp(&(b.anchor, &b.model)));
        let anchors = checks.iter().map(|c| (c.anchor.key(), c.anchor.statement())).collect();
        let mut summary = Summary { checks: checks.len(), ..Summary::default() };
        for c in &checks {
            match c.status {
                CheckStatus::Pass => summary.passed += 1,
                CheckStatus::Fail => summary.failed += 1,
                CheckStatus::BudgetExhausted => summary.budget_exhausted += 1,
                CheckStatus::Error => summary.errors += 1,
            }
            if c.is_faithful_failure() {
                summary.faithful_failures += 1;
            } else if c.generalized && c.status == CheckStatus::Fail {
                summary.generalized_findings += 1;
            }
        }
        Report {
            header: Header {
                tool: "forge",
                version: env!("CARGO_PKG_VERSION"),
                kind,
                seed,
                prng: PRNG,
                config,
                anchors,
            },
            checks,
            summary,
        }
    }

    /// 0 when every faithful check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.summary.faithful_failures > 0)
    }

    pub fn find(&self, anchor: Anchor, model: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.anchor == anchor && c.model == model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// A fixed-width table, one line per record.
    pub fn to_table(&self) -> String {
        let rows: Vec<[String; 5]> = self
            .checks
            .iter()
            .map(|c| {
                let status = serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from));
                let mut detail = c.verdict.clone().unwrap_or_default();
                if let Some(claim) = &c.claim {
                    detail = format!("{claim}: {detail}");
                }
                if let Some(n) = &c.note {
                    detail = if detail.is_empty() { n.clone() } else { format!("{detail} ({n})") };
                }
                let model = if c.generalized { format!("{} [generalized]", c.model) } else { c.model.clone() };
                [c.anchor.key().to_string(), model, c.samples.to_string(), status.unwrap_or_default(), detail]
            })
            .collect();
        let head = ["anchor", "model", "samples", "status", "detail"].map(String::from);
        let mut widths = head.clone().map(|h| h.len());
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |r: &[String; 5]| {
            let cells: Vec<String> = r
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| if i == 4 { c.clone() } else { format!("{c:<w$}") })
                .collect();
            cells.join("  ").trim_end().to_string()
        };
        let mut out = vec![line(&head)];
        out.push(widths.iter().map(|&w| "-".repeat(w.min(40))).collect::<Vec<_>>().join("  "));
        out.extend(rows.iter().map(line));
        let s = &self.summary;
        out.push(String::new());
        out.push(format!(
            "{} checks: {} passed, {} failed ({} faithful, {} generalized findings), {} over budget, {} errors",
            s.checks, s.passed, s.failed, s.faithful_failures, s.generalized_findings, s.budget_exhausted, s.errors
        ));
        out.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_separates_generalized_findings() {
        let pass = CheckRecord::new(Anchor::PredicateClosure, "b", false);
        let gen = CheckRecord::new(Anchor::Comprehension, "a", true).fail(serde_json::json!({}));
        let report = Report::assemble("suite", Some(1), None, vec![pass.clone(), gen]);
        assert_eq!(report.checks[0].anchor, Anchor::Comprehension);
        assert_eq!(report.summary.generalized_findings, 1);
        assert_eq!(report.exit_code(), 0);
        let bad = pass.fail(serde_json::json!({"pi": "(0 1)"}));
        let report = Report::assemble("suite", Some(1), None, vec![bad]);
        assert_eq!(report.exit_code(), 1);
        assert!(report.to_table().contains("predicate-closure"));
    }

    #[test]
    fn empty_report_passes() {
        let r = Report::assemble("suite", Some(42), None, Vec::new());
        assert_eq!(r.summary.checks, 0);
        assert_eq!(r.exit_code(), 0);
    }
}
