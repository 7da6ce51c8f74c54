use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

/// Lowest-degree word where a check failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub word: Vec<usize>,
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// One identity check within a suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub trial: usize,
    /// Short id of the identity, e.g. `semigroup`.
    pub id: String,
    /// The identity being checked, in plain notation.
    pub identity: String,
    pub parameters: Map<String, Value>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Largest absolute deviation, for float checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub seed: u64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub suite: String,
    pub config: Map<String, Value>,
    pub checks: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl ReportDocument {
    pub fn new(suite: &str, config: Map<String, Value>, checks: Vec<CheckRecord>) -> Self {
        let count = |v| checks.iter().filter(|c| c.verdict == v).count();
        Self {
            suite: suite.into(),
            config,
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            skipped: count(Verdict::Skipped),
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}
