use std::fmt;
use std::str::FromStr;

use twinbeam_core::criteria::{evaluate_with, CriterionId};
use twinbeam_core::quantifiers::{self, ZERO_TOL};
use twinbeam_core::{Error, Statistics, TwoModeGaussianState};

use crate::error::CliError;

/// Something a scan can evaluate: a criterion or a quantifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Criterion(CriterionId),
    Negativity,
    LogNegativity,
    /// Local quantifier `I_ncl` of mode 1 or 2.
    Local(u8),
}

/// Result of evaluating a target at one point.
///
/// `indicator` is smooth across the classical/non-classical boundary and
/// non-positive exactly on the non-classical side; boundaries are zeros of
/// it. `value` is what gets reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetValue {
    pub value: f64,
    pub indicator: f64,
    pub nonclassical: bool,
}

impl Target {
    pub fn criterion(&self) -> Option<CriterionId> {
        match self {
            Target::Criterion(id) => Some(*id),
            _ => None,
        }
    }

    /// Derivative order needed from the moment engine.
    pub fn required_order(&self) -> usize {
        self.criterion().map_or(0, |id| id.required_order())
    }

    /// Evaluates with statistics prepared by the caller (needed for criteria).
    pub fn evaluate_with(&self, state: &TwoModeGaussianState, stats: Option<&Statistics>) -> Result<TargetValue, Error> {
        match self {
            Target::Criterion(id) => {
                let r = match stats {
                    Some(s) => evaluate_with(s, *id)?,
                    None => twinbeam_core::criteria::evaluate(state, *id)?,
                };
                Ok(TargetValue {
                    value: r.value,
                    indicator: r.value,
                    nonclassical: r.nonclassical,
                })
            }
            Target::Negativity | Target::LogNegativity => {
                let margin = quantifiers::negativity_margin(state)?;
                let value = if *self == Target::Negativity {
                    quantifiers::negativity(state)?
                } else {
                    quantifiers::log_negativity(state)?
                };
                Ok(TargetValue {
                    value,
                    indicator: -margin,
                    nonclassical: value > ZERO_TOL,
                })
            }
            Target::Local(j) => {
                let v = quantifiers::local_quantifier(state, *j);
                Ok(TargetValue {
                    value: v,
                    indicator: -v,
                    nonclassical: v > ZERO_TOL,
                })
            }
        }
    }

    pub fn evaluate(&self, state: &TwoModeGaussianState) -> Result<TargetValue, Error> {
        self.evaluate_with(state, None)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Criterion(id) => write!(f, "{id}"),
            Target::Negativity => f.write_str("negativity"),
            Target::LogNegativity => f.write_str("log_negativity"),
            Target::Local(j) => write!(f, "I_ncl{j}"),
        }
    }
}

impl FromStr for Target {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let key: String = s.trim().to_ascii_lowercase().chars().filter(|c| *c != '_').collect();
        match key.as_str() {
            "negativity" | "en" => return Ok(Target::Negativity),
            "lognegativity" | "logneg" => return Ok(Target::LogNegativity),
            "incl1" => return Ok(Target::Local(1)),
            "incl2" => return Ok(Target::Local(2)),
            _ => {}
        }
        s.parse::<CriterionId>().map(Target::Criterion).map_err(CliError::from)
    }
}
