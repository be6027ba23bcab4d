//! Dense parameter grids and boundary extraction.
//!
//! Every grid node is evaluated independently (in parallel); boundaries are
//! found on grid edges whose endpoints fall on opposite sides, refined by
//! bisection along the edge, and in 2-D chained into polylines by marching
//! squares.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twinbeam_core::roots::{self, is_negative};
use twinbeam_core::{Error, Statistics, TwoModeGaussianState};

use crate::error::{core_kind, CliError};
use crate::params::{check_value, AxisName, NoiseMode, PointParams};
use crate::target::Target;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "TWINBEAM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(CliError::usage("invalid_axis", format!("unknown spacing '{s}' (expected linear or log)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(name: AxisName, min: f64, max: f64, count: usize) -> Self {
        Self {
            name,
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(name: AxisName, min: f64, max: f64, count: usize) -> Self {
        Self {
            spacing: Spacing::Log,
            ..Self::linear(name, min, max, count)
        }
    }

    pub fn value_at(&self, i: usize) -> f64 {
        if self.count <= 1 || i == 0 {
            return self.min;
        }
        if i + 1 >= self.count {
            return self.max;
        }
        let f = i as f64 / (self.count - 1) as f64;
        match self.spacing {
            Spacing::Linear => self.min + (self.max - self.min) * f,
            Spacing::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (a + (b - a) * f).exp()
            }
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value_at(i)).collect()
    }

    fn midpoint(&self, a: f64, b: f64) -> f64 {
        match self.spacing {
            Spacing::Linear => 0.5 * (a + b),
            Spacing::Log => (a * b).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::usage("invalid_axis", format!("axis {}: {msg}", self.name)));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        check_value(self.name, self.min)?;
        check_value(self.name, self.max)?;
        if self.count > 1 && self.min >= self.max {
            return bad(format!("min {} must be below max {}", self.min, self.max));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return bad("log spacing needs min > 0".into());
        }
        Ok(())
    }
}

/// `name:min:max:count[:linear|log]`, e.g. `bp:1e-3:1e3:50:log`.
impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::usage("invalid_axis", format!("cannot parse axis '{s}' (expected name:min:max:count[:spacing])"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad());
        }
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        Ok(Axis {
            name: parts[0].parse()?,
            min: num(parts[1])?,
            max: num(parts[2])?,
            count: parts[3].trim().parse().map_err(|_| bad())?,
            spacing: match parts.get(4) {
                Some(sp) => sp.parse()?,
                None => Spacing::Linear,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub axes: Vec<Axis>,
    /// Values of the parameters that are not scanned.
    pub fixed: PointParams,
    pub targets: Vec<Target>,
    pub noise_mode: NoiseMode,
    /// Bisection tolerance along an edge, in axis units.
    pub boundary_tol: f64,
    pub max_iter: usize,
    pub max_order: usize,
}

impl ScanSpec {
    pub fn new(axes: Vec<Axis>, targets: Vec<Target>) -> Self {
        Self {
            axes,
            fixed: PointParams::default(),
            targets,
            noise_mode: NoiseMode::Independent,
            boundary_tol: roots::DEFAULT_TOL,
            max_iter: roots::DEFAULT_MAX_ITER,
            max_order: twinbeam_core::moments::DEFAULT_MAX_ORDER,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.targets.is_empty() {
            return Err(CliError::usage("no_targets", "scan needs at least one target"));
        }
        if self.axes.is_empty() || self.axes.len() > 3 {
            return Err(CliError::usage("invalid_axis", format!("scan needs 1 to 3 axes, got {}", self.axes.len())));
        }
        let mut seen = BTreeSet::new();
        for a in &self.axes {
            a.validate()?;
            if !seen.insert(a.name) {
                return Err(CliError::usage("invalid_axis", format!("axis {} given twice", a.name)));
            }
        }
        if seen.contains(&AxisName::Bi) && self.noise_mode != NoiseMode::Independent {
            return Err(CliError::usage(
                "invalid_axis",
                format!("bi is determined by bs in {} noise mode and cannot be scanned", self.noise_mode.name()),
            ));
        }
        self.fixed.validate()?;
        if !(self.boundary_tol > 0.0) {
            return Err(CliError::usage("invalid_parameter", "boundary tolerance must be positive"));
        }
        if self.max_iter == 0 {
            return Err(CliError::usage("invalid_parameter", "max_iter must be positive"));
        }
        Ok(())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Full parameter set at the given axis coordinates.
    pub fn point(&self, coords: &[f64]) -> PointParams {
        let mut p = self.fixed;
        for (a, &v) in self.axes.iter().zip(coords) {
            p.set(a.name, v);
        }
        self.noise_mode.apply(&mut p);
        p
    }

    fn grid_index(&self, mut flat: usize) -> Vec<usize> {
        self.axes
            .iter()
            .map(|a| {
                let i = flat % a.count;
                flat /= a.count;
                i
            })
            .collect()
    }

    fn coords_of(&self, flat: usize) -> Vec<f64> {
        self.grid_index(flat)
            .into_iter()
            .zip(&self.axes)
            .map(|(i, a)| a.value_at(i))
            .collect()
    }

    fn stride(&self, axis: usize) -> usize {
        self.axes[..axis].iter().map(|a| a.count).product()
    }

    fn indicator_at(&self, target: Target, coords: &[f64]) -> f64 {
        self.point(coords)
            .state()
            .and_then(|s| target.evaluate(&s))
            .map_or(f64::NAN, |v| v.indicator)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellValue {
    pub value: f64,
    pub indicator: f64,
    pub nonclassical: bool,
    /// Reason the evaluation failed; the numbers are NaN then.
    pub error: Option<String>,
}

impl CellValue {
    fn failed(e: &Error) -> Self {
        Self {
            value: f64::NAN,
            indicator: f64::NAN,
            nonclassical: false,
            error: Some(format!("{}: {e}", core_kind(e))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub coords: Vec<f64>,
    /// One entry per target, in target order.
    pub values: Vec<CellValue>,
}

/// A boundary point refined by bisection along one grid edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub coords: Vec<f64>,
    /// Index of the axis the edge runs along.
    pub axis: usize,
    /// Final bisection bracket along that axis.
    pub bracket: (f64, f64),
    /// Indicator at the bracket ends; their signs differ.
    pub bracket_indicator: (f64, f64),
    /// Indicator at the reported point.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    pub target: Target,
    /// In 2-D, chains of crossings following the boundary; otherwise every
    /// crossing is its own one-point polyline.
    pub polylines: Vec<Vec<Crossing>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub axes: Vec<Axis>,
    pub targets: Vec<Target>,
    /// Grid nodes with the first axis varying fastest.
    pub cells: Vec<Cell>,
    /// One entry per target.
    pub boundaries: Vec<Boundary>,
}

impl ScanResult {
    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }
}

fn evaluate_node(spec: &ScanSpec, state: &twinbeam_core::Result<TwoModeGaussianState>) -> Vec<CellValue> {
    let state = match state {
        Ok(s) => s,
        Err(e) => return spec.targets.iter().map(|_| CellValue::failed(e)).collect(),
    };
    let order = spec
        .targets
        .iter()
        .map(Target::required_order)
        .filter(|&o| o <= spec.max_order)
        .max()
        .unwrap_or(0);
    let stats = if spec.targets.iter().any(|t| t.criterion().is_some()) {
        Some(Statistics::new(state, order))
    } else {
        None
    };
    spec.targets
        .iter()
        .map(|t| {
            let r = if t.required_order() > spec.max_order {
                Err(Error::OrderExceeded {
                    requested: t.required_order(),
                    max: spec.max_order,
                })
            } else {
                match (&stats, t.criterion()) {
                    (Some(Err(e)), Some(_)) => Err(e.clone()),
                    (Some(Ok(s)), _) => t.evaluate_with(state, Some(s)),
                    _ => t.evaluate(state),
                }
            };
            match r {
                Ok(v) => CellValue {
                    value: v.value,
                    indicator: v.indicator,
                    nonclassical: v.nonclassical,
                    error: None,
                },
                Err(e) => CellValue::failed(&e),
            }
        })
        .collect()
}

fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    let pool = threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok());
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

/// Edge key: flat index of the lower node and the axis the edge runs along.
type EdgeKey = (usize, usize);

/// Evaluates every grid node and extracts the boundaries of every target.
/// Failures are recorded per node; the output depends only on `spec`.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult, CliError> {
    spec.validate()?;
    with_pool(|| scan_validated(spec))
}

fn scan_validated(spec: &ScanSpec) -> Result<ScanResult, CliError> {
    let cells: Vec<Cell> = (0..spec.len())
        .into_par_iter()
        .map(|flat| {
            let coords = spec.coords_of(flat);
            let state = spec.point(&coords).state();
            let values = evaluate_node(spec, &state);
            Cell { coords, values }
        })
        .collect();

    let boundaries = spec
        .targets
        .iter()
        .enumerate()
        .map(|(k, &target)| Boundary {
            target,
            polylines: extract_boundary(spec, &cells, k, target),
        })
        .collect();

    Ok(ScanResult {
        axes: spec.axes.clone(),
        targets: spec.targets.clone(),
        cells,
        boundaries,
    })
}

fn side(cells: &[Cell], flat: usize, k: usize) -> Option<bool> {
    let v = cells[flat].values[k].indicator;
    v.is_finite().then(|| is_negative(v))
}

fn extract_boundary(spec: &ScanSpec, cells: &[Cell], k: usize, target: Target) -> Vec<Vec<Crossing>> {
    let idx_of = |flat: usize| spec.grid_index(flat);
    let mut edges: Vec<EdgeKey> = Vec::new();
    for flat in 0..cells.len() {
        let idx = idx_of(flat);
        for (d, a) in spec.axes.iter().enumerate() {
            if idx[d] + 1 >= a.count {
                continue;
            }
            let next = flat + spec.stride(d);
            if let (Some(x), Some(y)) = (side(cells, flat, k), side(cells, next, k)) {
                if x != y {
                    edges.push((flat, d));
                }
            }
        }
    }

    let refined: Vec<(EdgeKey, Option<Crossing>)> = edges
        .into_par_iter()
        .map(|key| (key, refine_edge(spec, cells, target, key)))
        .collect();
    let crossings: BTreeMap<EdgeKey, Crossing> = refined
        .into_iter()
        .filter_map(|(key, c)| c.map(|c| (key, c)))
        .collect();

    let active = spec.axes.iter().filter(|a| a.count > 1).count();
    if spec.axes.len() == 2 && active == 2 {
        march_squares(spec, cells, k, target, crossings)
    } else {
        crossings.into_values().map(|c| vec![c]).collect()
    }
}

fn refine_edge(spec: &ScanSpec, cells: &[Cell], target: Target, (flat, d): EdgeKey) -> Option<Crossing> {
    let base = cells[flat].coords.clone();
    let a = base[d];
    let b = cells[flat + spec.stride(d)].coords[d];
    let f = |x: f64| {
        let mut c = base.clone();
        c[d] = x;
        spec.indicator_at(target, &c)
    };
    let root = roots::bisect(f, a, b, spec.boundary_tol, spec.max_iter).ok()?;
    let (fa, fb) = (f(root.lo), f(root.hi));
    if !(fa.is_finite() && fb.is_finite()) || is_negative(fa) == is_negative(fb) {
        return None;
    }
    let mut coords = base.clone();
    coords[d] = root.x;
    Some(Crossing {
        residual: f(root.x),
        coords,
        axis: d,
        bracket: (root.lo, root.hi),
        bracket_indicator: (fa, fb),
    })
}

fn march_squares(
    spec: &ScanSpec,
    cells: &[Cell],
    k: usize,
    target: Target,
    crossings: BTreeMap<EdgeKey, Crossing>,
) -> Vec<Vec<Crossing>> {
    let (n0, n1) = (spec.axes[0].count, spec.axes[1].count);
    let mut adj: BTreeMap<EdgeKey, Vec<EdgeKey>> = crossings.keys().map(|&key| (key, Vec::new())).collect();
    let mut link = |a: EdgeKey, b: EdgeKey| {
        adj.get_mut(&a).expect("crossing").push(b);
        adj.get_mut(&b).expect("crossing").push(a);
    };

    for j in 0..n1 - 1 {
        for i in 0..n0 - 1 {
            let f00 = i + n0 * j;
            let (f10, f01) = (f00 + 1, f00 + n0);
            let f11 = f01 + 1;
            let corners = [f00, f10, f11, f01].map(|f| side(cells, f, k));
            if corners.iter().any(Option::is_none) {
                continue;
            }
            // counter-clockwise: bottom, right, top, left
            let sides = [(f00, 0), (f10, 1), (f01, 0), (f00, 1)];
            let present: Vec<EdgeKey> = sides.iter().copied().filter(|key| crossings.contains_key(key)).collect();
            match present.len() {
                2 => link(present[0], present[1]),
                4 => {
                    // saddle: the centre decides which diagonal is connected
                    let c0 = &cells[f00].coords;
                    let c1 = &cells[f11].coords;
                    let centre = [spec.axes[0].midpoint(c0[0], c1[0]), spec.axes[1].midpoint(c0[1], c1[1])];
                    let v = spec.indicator_at(target, &centre);
                    let centre_neg = !v.is_finite() || is_negative(v);
                    if Some(centre_neg) == corners[0] {
                        link(sides[0], sides[1]);
                        link(sides[2], sides[3]);
                    } else {
                        link(sides[0], sides[3]);
                        link(sides[1], sides[2]);
                    }
                }
                _ => {}
            }
        }
    }

    let mut used: BTreeSet<EdgeKey> = BTreeSet::new();
    let mut chains: Vec<Vec<EdgeKey>> = Vec::new();
    let walk = |start: EdgeKey, used: &mut BTreeSet<EdgeKey>| {
        let mut line = vec![start];
        used.insert(start);
        let mut cur = start;
        while let Some(&next) = adj[&cur].iter().find(|n| !used.contains(n)) {
            used.insert(next);
            line.push(next);
            cur = next;
        }
        if line.len() > 2 && adj[&cur].contains(&start) {
            line.push(start);
        }
        line
    };
    // open chains start at an end, loops anywhere
    for (&key, nbrs) in &adj {
        if nbrs.len() <= 1 && !used.contains(&key) {
            chains.push(walk(key, &mut used));
        }
    }
    for &key in adj.keys() {
        if !used.contains(&key) {
            chains.push(walk(key, &mut used));
        }
    }

    chains
        .into_iter()
        .map(|chain| chain.iter().map(|key| crossings[key].clone()).collect())
        .collect()
}
