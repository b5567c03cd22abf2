//! Structured experiment outcomes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The measurement could not be made reliably (e.g. poor fit).
    Inconclusive,
    /// The configuration violates the hypotheses of the estimate under test.
    Rejected,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Stated in the source analysis.
    Analysis,
    /// Computed from a formula or an independent oracle.
    Derived,
    /// Follows from elementary identities.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub inputs: BTreeMap<String, String>,
    pub measured: BTreeMap<String, f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
    pub provenance: Provenance,
    pub notes: Vec<String>,
}

impl CaseReport {
    pub fn new(id: impl Into<String>, provenance: Provenance) -> Self {
        Self {
            id: id.into(),
            inputs: BTreeMap::new(),
            measured: BTreeMap::new(),
            expected: None,
            tolerance: None,
            verdict: Verdict::Inconclusive,
            provenance,
            notes: Vec::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn measure(&mut self, key: &str, value: f64) {
        self.measured.insert(key.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn expect(&mut self, expected: f64, tolerance: f64) {
        self.expected = Some(expected);
        self.tolerance = Some(tolerance);
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    /// One-line summary, e.g. `PASS smoothing/0.75-1 slope=-0.12`.
    pub fn summary(&self) -> String {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Rejected => "REJECTED",
        };
        let values: Vec<String> = self.measured.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        format!("{tag} {} {}", self.id, values.join(" "))
    }
}
