//! Randomized verification of the identities and inequalities satisfied by
//! conditional entropy and coherent information.
//!
//! Each [`Property`] draws seeded random states (trial `i` uses seed
//! `master ^ i`), adds a few fixed boundary cases, and reduces the per-trial
//! margins to a [`PropertyReport`]. Trials run in parallel; results do not
//! depend on scheduling.

mod checks;
mod report;

use serde::{Deserialize, Serialize};

pub use checks::continuity_deviations;
pub use report::{PropertyReport, SuiteReport, TrialRecord, Verdict};

use crate::error::{Error, Result};
use crate::extended::serde_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// `H(C|A) + H(C|B) = 0` on pure `ρ_ABC`.
    Duality,
    /// `|H(C|A)| ≤ H(ρ_C)`.
    Bound,
    /// `H(A|BC) ≤ H(A|B)`.
    Monotonicity,
    /// Concavity of `H(A|B)` in `ρ_AB`.
    Concavity,
    /// `H(AB|CD) ≤ H(A|C) + H(B|D)`, its intermediate form and the chain rule.
    Subadditivity,
    /// `I_c(ρ, Φ) + I_c(ρ, Φ̃) = 0` and `|I_c| ≤ H(ρ)`.
    CoherentDuality,
    /// Relative-entropy form of `H(C|A)` against `H(AC) - H(A)`.
    Formulas,
    /// `H(C|A)` and `H(C|B)` through coherent information of partial traces.
    CoherentRoute,
    /// Convergence of `H(A|B)` along `(1 - 2⁻ⁿ) ρ₀ + 2⁻ⁿ I/d²`.
    Continuity,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Duality,
        Property::Bound,
        Property::Monotonicity,
        Property::Concavity,
        Property::Subadditivity,
        Property::CoherentDuality,
        Property::Formulas,
        Property::CoherentRoute,
        Property::Continuity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Duality => "duality",
            Property::Bound => "bound",
            Property::Monotonicity => "monotonicity",
            Property::Concavity => "concavity",
            Property::Subadditivity => "subadditivity",
            Property::CoherentDuality => "coherent_duality",
            Property::Formulas => "formulas",
            Property::CoherentRoute => "coherent_route",
            Property::Continuity => "continuity",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::parse("property", format!("unknown property `{name}`")))
    }

    /// Subsystem dimensions expected in [`CheckConfig::dims`].
    pub fn arity(self) -> usize {
        match self {
            Property::Duality | Property::Monotonicity | Property::CoherentRoute => 3,
            Property::CoherentDuality => 3,
            Property::Bound | Property::Concavity | Property::Formulas => 2,
            Property::Subadditivity => 4,
            Property::Continuity => 1,
        }
    }

    pub fn default_config(self, seed: u64) -> CheckConfig {
        let (dims, trials, tolerance): (&[usize], usize, f64) = match self {
            Property::Duality => (&[2, 2, 2], 500, 1e-7),
            Property::Bound => (&[3, 3], 1000, 1e-8),
            Property::Monotonicity => (&[2, 2, 2], 500, 1e-8),
            Property::Concavity => (&[2, 3], 500, 1e-8),
            Property::Subadditivity => (&[2, 2, 2, 2], 300, 1e-7),
            Property::CoherentDuality => (&[3, 3, 3], 300, 1e-7),
            Property::Formulas => (&[3, 3], 500, 1e-8),
            Property::CoherentRoute => (&[2, 2, 2], 500, 1e-7),
            // Deviation decays like ε ln(1/ε); 2⁻³⁰ leaves it near 1e-8.
            Property::Continuity => (&[2], 30, 1e-6),
        };
        CheckConfig { property: self, dims: dims.to_vec(), trials, seed, tolerance, records: false }
    }
}

/// Everything needed to rerun a check bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub property: Property,
    pub dims: Vec<usize>,
    /// Random trials; for [`Property::Continuity`] the largest exponent `n`.
    pub trials: usize,
    pub seed: u64,
    #[serde(with = "serde_f64")]
    pub tolerance: f64,
    #[serde(default)]
    pub records: bool,
}

impl CheckConfig {
    fn validate(&self) -> Result<()> {
        if self.dims.len() != self.property.arity() {
            return Err(Error::Selection(format!(
                "property `{}` needs {} dimensions, got {:?}",
                self.property.name(),
                self.property.arity(),
                self.dims
            )));
        }
        if self.dims.contains(&0) {
            return Err(Error::ZeroDimension(format!("{:?}", self.dims)));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::Domain(format!("tolerance {} must be nonnegative", self.tolerance)));
        }
        match self.property {
            Property::CoherentDuality if self.dims[1] * self.dims[2] < self.dims[0] => Err(Error::DimensionMismatch(
                format!("channel needs dim_out · env ≥ dim_in, got {:?}", self.dims),
            )),
            Property::Continuity if self.dims[0] < 2 => {
                Err(Error::Domain("continuity needs a Bell base of dimension ≥ 2".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Runs one property. Most properties yield one report; subadditivity,
/// coherent duality and continuity yield one per checked relation.
pub fn run_check(config: &CheckConfig) -> Result<Vec<PropertyReport>> {
    config.validate()?;
    Ok(checks::run(config))
}

/// Reruns the configuration embedded in `report` and returns the matching report.
pub fn replay(report: &PropertyReport) -> Result<PropertyReport> {
    run_check(&report.config)?
        .into_iter()
        .find(|r| r.property == report.property)
        .ok_or_else(|| Error::Selection(format!("replay produced no `{}` report", report.property)))
}

pub fn default_suite(seed: u64) -> Vec<CheckConfig> {
    Property::ALL.iter().map(|p| p.default_config(seed)).collect()
}

pub fn run_suite(configs: &[CheckConfig], timestamp: bool) -> Result<SuiteReport> {
    let mut reports = Vec::new();
    for c in configs {
        reports.extend(run_check(c)?);
    }
    Ok(SuiteReport::new(reports, timestamp))
}
