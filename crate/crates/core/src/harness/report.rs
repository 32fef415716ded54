use serde::{Deserialize, Serialize};

use super::CheckConfig;
use crate::extended::serde_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Margin of a single trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: String,
    pub seed: Option<u64>,
    #[serde(with = "serde_f64")]
    pub margin: f64,
}

/// Outcome of one property over a batch of trials.
///
/// A margin is the slack of the checked relation (negative when it is
/// violated); the property passes when the worst margin is at least
/// `-tolerance`. The effective configuration is embedded so the report can be
/// replayed on its own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    /// Random trials (for continuity, the schedule length).
    pub trials: usize,
    /// Boundary cases evaluated in addition to the random trials.
    pub fixed_trials: usize,
    pub seed: u64,
    #[serde(with = "serde_f64")]
    pub tolerance: f64,
    #[serde(with = "serde_f64")]
    pub worst_margin: f64,
    pub worst_seed: Option<u64>,
    pub worst_trial: String,
    pub verdict: Verdict,
    /// Trials meeting an inequality with equality (|margin| ≤ 1e-10).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub saturated: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<TrialRecord>>,
    pub config: CheckConfig,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{:<22} {:>4}  trials={:<5} worst_margin={:+.3e} tol={:.1e} worst={}",
            self.property,
            match self.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            },
            self.trials,
            self.worst_margin,
            self.tolerance,
            self.worst_trial
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub reports: Vec<PropertyReport>,
    /// Seconds since the Unix epoch; omitted when suppressed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl SuiteReport {
    pub fn new(reports: Vec<PropertyReport>, timestamp: bool) -> Self {
        let timestamp = timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self { passed: reports.iter().all(PropertyReport::passed), reports, timestamp }
    }

    /// 0 when every property passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}
