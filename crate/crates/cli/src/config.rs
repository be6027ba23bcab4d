//! TOML scan configuration.
//!
//! ```toml
//! noise_mode = "balanced"
//! targets = ["negativity", "E_p(0,0)"]
//!
//! [fixed]
//! t = 1.0
//!
//! [[axis]]
//! name = "bs"
//! min = 0.0
//! max = 1.0
//! count = 101
//!
//! [[axis]]
//! name = "bp"
//! min = 0.0
//! max = 5.0
//! count = 101
//!
//! [boundary]
//! tol = 1e-8
//! max_iter = 200
//!
//! [output]
//! csv = "grid.csv"
//! json = "boundaries.json"
//! svg = "map.svg"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;
use crate::params::{AxisName, NoiseMode};
use crate::scan::{Axis, ScanSpec, Spacing};
use crate::target::Target;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub noise_mode: Option<NoiseMode>,
    #[serde(default)]
    pub targets: Vec<String>,
    #[serde(default)]
    pub fixed: FixedConfig,
    #[serde(default, rename = "axis")]
    pub axes: Vec<AxisConfig>,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    pub max_order: Option<usize>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedConfig {
    pub bp: Option<f64>,
    pub bs: Option<f64>,
    pub bi: Option<f64>,
    pub t: Option<f64>,
    pub phi: Option<f64>,
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// Target drawn in the heatmap; the first target by default.
    pub svg_target: Option<String>,
}

impl ScanConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::usage("invalid_config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage("io", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Builds the (not yet validated) scan spec.
    pub fn to_spec(&self) -> Result<ScanSpec, CliError> {
        let axes = self
            .axes
            .iter()
            .map(|a| Axis {
                name: a.name,
                min: a.min,
                max: a.max,
                count: a.count,
                spacing: a.spacing,
            })
            .collect();
        let targets = self.targets.iter().map(|t| t.parse::<Target>()).collect::<Result<_, _>>()?;
        let mut spec = ScanSpec::new(axes, targets);
        let f = self.fixed;
        let p = &mut spec.fixed;
        for (slot, v) in [
            (&mut p.bp, f.bp),
            (&mut p.bs, f.bs),
            (&mut p.bi, f.bi),
            (&mut p.t, f.t),
            (&mut p.phi, f.phi),
            (&mut p.eta, f.eta),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(m) = self.noise_mode {
            spec.noise_mode = m;
        }
        if let Some(t) = self.boundary.tol {
            spec.boundary_tol = t;
        }
        if let Some(n) = self.boundary.max_iter {
            spec.max_iter = n;
        }
        if let Some(o) = self.max_order {
            spec.max_order = o;
        }
        Ok(spec)
    }
}
