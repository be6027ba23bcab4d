use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use twinbeam_core::state::{attenuate, beam_splitter, twin_beam, BeamSplitterParams, TwinBeamParams};
use twinbeam_core::TwoModeGaussianState;

use crate::error::CliError;

/// Parameters of a single point: a noisy twin beam, optionally sent through
/// a beam splitter and then detected with efficiency `eta` on both modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointParams {
    pub bp: f64,
    pub bs: f64,
    pub bi: f64,
    pub t: f64,
    pub phi: f64,
    pub eta: f64,
}

impl Default for PointParams {
    fn default() -> Self {
        Self {
            bp: 1.0,
            bs: 0.0,
            bi: 0.0,
            t: 1.0,
            phi: 0.0,
            eta: 1.0,
        }
    }
}

impl PointParams {
    pub fn state(&self) -> twinbeam_core::Result<TwoModeGaussianState> {
        let mut s = twin_beam(TwinBeamParams::new(self.bp, self.bs, self.bi)?);
        if self.t != 1.0 || self.phi != 0.0 {
            s = beam_splitter(&s, BeamSplitterParams::new(self.t, self.phi)?);
        }
        if self.eta != 1.0 {
            s = attenuate(&s, self.eta, self.eta)?;
        }
        Ok(s)
    }

    pub fn get(&self, axis: AxisName) -> f64 {
        match axis {
            AxisName::Bp => self.bp,
            AxisName::Bs => self.bs,
            AxisName::Bi => self.bi,
            AxisName::T => self.t,
            AxisName::Eta => self.eta,
        }
    }

    pub fn set(&mut self, axis: AxisName, v: f64) {
        match axis {
            AxisName::Bp => self.bp = v,
            AxisName::Bs => self.bs = v,
            AxisName::Bi => self.bi = v,
            AxisName::T => self.t = v,
            AxisName::Eta => self.eta = v,
        }
    }
}

/// Scannable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    Bp,
    Bs,
    Bi,
    T,
    Eta,
}

impl AxisName {
    pub const ALL: [AxisName; 5] = [AxisName::Bp, AxisName::Bs, AxisName::Bi, AxisName::T, AxisName::Eta];

    pub fn name(self) -> &'static str {
        match self {
            AxisName::Bp => "bp",
            AxisName::Bs => "bs",
            AxisName::Bi => "bi",
            AxisName::T => "t",
            AxisName::Eta => "eta",
        }
    }

    /// Closed interval of admissible values.
    pub fn domain(self) -> (f64, f64) {
        match self {
            AxisName::T | AxisName::Eta => (0.0, 1.0),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Search interval used by `boundary` when none is given.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            AxisName::Bp => (1e-3, 10.0),
            AxisName::Bs | AxisName::Bi => (0.0, 10.0),
            AxisName::T => (0.0, 1.0),
            AxisName::Eta => (1e-3, 1.0),
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxisName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bp" => Ok(AxisName::Bp),
            "bs" => Ok(AxisName::Bs),
            "bi" => Ok(AxisName::Bi),
            "t" => Ok(AxisName::T),
            "eta" => Ok(AxisName::Eta),
            _ => Err(CliError::usage("invalid_axis", format!("unknown axis '{s}' (expected bp, bs, bi, t or eta)"))),
        }
    }
}

/// How the idler noise `bi` relates to the signal noise `bs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// `bi = bs`
    Balanced,
    /// `bi = 0`
    Unbalanced,
    #[default]
    Independent,
}

impl NoiseMode {
    pub fn apply(self, p: &mut PointParams) {
        match self {
            NoiseMode::Balanced => p.bi = p.bs,
            NoiseMode::Unbalanced => p.bi = 0.0,
            NoiseMode::Independent => {}
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseMode::Balanced => "balanced",
            NoiseMode::Unbalanced => "unbalanced",
            NoiseMode::Independent => "independent",
        }
    }
}

impl FromStr for NoiseMode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "balanced" => Ok(NoiseMode::Balanced),
            "unbalanced" => Ok(NoiseMode::Unbalanced),
            "independent" => Ok(NoiseMode::Independent),
            _ => Err(CliError::usage(
                "invalid_noise_mode",
                format!("unknown noise mode '{s}' (expected balanced, unbalanced or independent)"),
            )),
        }
    }
}

/// Checks a value against the domain of `axis`.
pub fn check_value(axis: AxisName, v: f64) -> Result<(), CliError> {
    let (lo, hi) = axis.domain();
    if !v.is_finite() || v < lo || v > hi {
        return Err(CliError::usage(
            "invalid_parameter",
            format!("{axis} = {v} outside [{lo}, {hi}]"),
        ));
    }
    Ok(())
}

impl PointParams {
    pub fn validate(&self) -> Result<(), CliError> {
        for a in AxisName::ALL {
            check_value(a, self.get(a))?;
        }
        if !self.phi.is_finite() {
            return Err(CliError::usage("invalid_parameter", "phi must be finite"));
        }
        Ok(())
    }
}
