//! Verification reports: named assertions with both sides' values, plus
//! numeric evidence. Reports carry no timing so that identical inputs give
//! byte-identical JSON.

use heatlab_core::{LimitEstimate, LimitStatus, Settings, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::ExperimentKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub claim: String,
    pub expected: Value,
    pub observed: Value,
    pub tolerance: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub experiment: ExperimentKind,
    /// False when a precondition is unmet; such a report has no assertions
    /// and does not count as a failure.
    pub applicable: bool,
    pub passed: bool,
    pub inputs: Value,
    pub settings: Settings,
    pub seed: Option<u64>,
    pub assertions: Vec<Assertion>,
    pub evidence: Value,
    pub note: String,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    pub fn assertion(&self, claim: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.claim == claim)
    }
}

pub struct ReportBuilder {
    name: String,
    experiment: ExperimentKind,
    inputs: Value,
    settings: Settings,
    seed: Option<u64>,
    applicable: bool,
    assertions: Vec<Assertion>,
    evidence: Map<String, Value>,
    note: String,
}

impl ReportBuilder {
    pub fn new(name: impl Into<String>, experiment: ExperimentKind, inputs: Value, settings: &Settings) -> Self {
        Self {
            name: name.into(),
            experiment,
            inputs,
            settings: settings.clone(),
            seed: None,
            applicable: true,
            assertions: Vec::new(),
            evidence: Map::new(),
            note: String::new(),
        }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.note = note.into();
        self
    }

    pub fn not_applicable(&mut self, reason: impl Into<String>) -> &mut Self {
        self.applicable = false;
        self.note = reason.into();
        self
    }

    pub fn evidence(&mut self, key: &str, value: Value) -> &mut Self {
        self.evidence.insert(key.to_string(), value);
        self
    }

    pub fn check(&mut self, claim: impl Into<String>, expected: Value, observed: Value, tolerance: Option<f64>, passed: bool) -> bool {
        self.assertions.push(Assertion {
            claim: claim.into(),
            expected,
            observed,
            tolerance,
            passed,
        });
        passed
    }

    /// `|observed - expected| ≤ tol`; a missing observation fails.
    pub fn check_close(&mut self, claim: impl Into<String>, expected: f64, observed: Option<f64>, tol: f64) -> bool {
        let passed = observed.is_some_and(|o| (o - expected).abs() <= tol);
        self.check(claim, json!(expected), json!(observed), Some(tol), passed)
    }

    /// `observed ≤ bound`.
    pub fn check_at_most(&mut self, claim: impl Into<String>, bound: f64, observed: f64) -> bool {
        let passed = observed <= bound;
        self.check(claim, json!({ "at_most": bound }), json!(observed), Some(bound), passed)
    }

    pub fn check_label(&mut self, claim: impl Into<String>, expected: &str, observed: &str) -> bool {
        let passed = expected == observed;
        self.check(claim, json!(expected), json!(observed), None, passed)
    }

    pub fn finish(self) -> VerificationReport {
        let passed = self.assertions.iter().all(|a| a.passed);
        VerificationReport {
            name: self.name,
            experiment: self.experiment,
            applicable: self.applicable,
            passed,
            inputs: self.inputs,
            settings: self.settings,
            seed: self.seed,
            assertions: self.assertions,
            evidence: Value::Object(self.evidence),
            note: self.note,
        }
    }
}

pub fn status_label(s: LimitStatus) -> &'static str {
    match s {
        LimitStatus::Converged => "converged",
        LimitStatus::NonConvergent => "non_convergent",
        LimitStatus::Unbounded => "unbounded",
    }
}

pub fn verdict_label(v: &Verdict) -> &'static str {
    match v {
        Verdict::Exists(_) => "exists",
        Verdict::DoesNotExist => "does_not_exist",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// A limit estimate without its sample sequence.
pub fn limit_summary(l: &LimitEstimate) -> Value {
    json!({
        "status": status_label(l.status),
        "value": l.value,
        "oscillation": l.oscillation,
        "extrapolated": l.extrapolated,
        "last_sample": l.samples.last(),
    })
}

/// One aligned line per report, then one line per failed assertion.
pub fn summary_text(reports: &[VerificationReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in reports {
        let status = if !r.applicable {
            "N/A "
        } else if r.passed {
            "PASS"
        } else {
            "FAIL"
        };
        let ok = r.assertions.iter().filter(|a| a.passed).count();
        out.push_str(&format!(
            "{status}  {:<width$}  {ok:>3}/{:<3} assertions\n",
            r.name,
            r.assertions.len()
        ));
        for a in r.failures() {
            out.push_str(&format!(
                "      failed: {}: expected {}, observed {}\n",
                a.claim, a.expected, a.observed
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_observation_fails() {
        let mut b = ReportBuilder::new("x", ExperimentKind::Ray, Value::Null, &Settings::default());
        assert!(!b.check_close("c", 1.0, None, 1e-3));
        assert!(b.check_close("d", 1.0, Some(1.0005), 1e-3));
        let r = b.finish();
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
    }
}
