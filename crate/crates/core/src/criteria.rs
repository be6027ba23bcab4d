//! Global and local non-classicality criteria.
//!
//! Global criteria (`E`, `M`) compare moments or modified probabilities of
//! both modes; local ones (`R`) use a single mode. Every criterion comes in
//! an intensity-moment form (`W`) and a photon-number form (`p`), and a
//! negative value certifies non-classicality.
//!
//! Besides the general evaluators this module carries the closed forms for
//! noiseless twin beams and for their beam-splitter outputs, together with
//! the analytic boundaries derived from them.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::math;
use crate::moments::{Engine, Statistics};
use crate::roots;
use crate::state::TwoModeGaussianState;
use crate::{Error, Result};

/// Relative sign-verdict tolerance, scaled by the largest constituent term.
pub const VERDICT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    EW,
    Ep,
    MW,
    Mp,
    RW,
    Rp,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::EW, Family::Ep, Family::MW, Family::Mp, Family::RW, Family::Rp];

    pub fn name(self) -> &'static str {
        match self {
            Family::EW => "E_W",
            Family::Ep => "E_p",
            Family::MW => "M_W",
            Family::Mp => "M_p",
            Family::RW => "R_W",
            Family::Rp => "R_p",
        }
    }

    /// Whether the family is built from photon-number probabilities.
    pub fn uses_pnd(self) -> bool {
        matches!(self, Family::Ep | Family::Mp | Family::Rp)
    }

    pub fn is_local(self) -> bool {
        matches!(self, Family::RW | Family::Rp)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| *c != '_' && *c != '^').collect();
        match norm.as_str() {
            "EW" | "Ew" | "ew" => Ok(Family::EW),
            "Ep" | "EP" | "ep" => Ok(Family::Ep),
            "MW" | "Mw" | "mw" => Ok(Family::MW),
            "Mp" | "MP" | "mp" => Ok(Family::Mp),
            "RW" | "Rw" | "rw" => Ok(Family::RW),
            "Rp" | "RP" | "rp" => Ok(Family::Rp),
            _ => Err(Error::InvalidCriterion(format!("unknown family '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub fn index(self) -> u8 {
        match self {
            Mode::One => 1,
            Mode::Two => 2,
        }
    }

    pub fn from_index(j: u8) -> Result<Self> {
        match j {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            _ => Err(Error::InvalidCriterion(format!("mode must be 1 or 2, got {j}"))),
        }
    }
}

/// A criterion: family plus indices. `E` uses `(k1, k2)`, `R` uses `(k, l)`
/// and a mode, `M` has no indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CriterionId {
    family: Family,
    i: usize,
    j: usize,
    mode: Mode,
}

impl CriterionId {
    pub fn new(family: Family, i: usize, j: usize, mode: Mode) -> Result<Self> {
        match family {
            Family::RW | Family::Rp if j < 1 => Err(Error::InvalidCriterion(format!(
                "{family} needs l >= 1, got l = {j}"
            ))),
            Family::MW | Family::Mp => Ok(Self { family, i: 0, j: 0, mode: Mode::One }),
            Family::EW | Family::Ep => Ok(Self { family, i, j, mode: Mode::One }),
            _ => Ok(Self { family, i, j, mode }),
        }
    }

    pub fn e_w(k1: usize, k2: usize) -> Self {
        Self { family: Family::EW, i: k1, j: k2, mode: Mode::One }
    }

    pub fn e_p(k1: usize, k2: usize) -> Self {
        Self { family: Family::Ep, i: k1, j: k2, mode: Mode::One }
    }

    pub fn m_w() -> Self {
        Self { family: Family::MW, i: 0, j: 0, mode: Mode::One }
    }

    pub fn m_p() -> Self {
        Self { family: Family::Mp, i: 0, j: 0, mode: Mode::One }
    }

    /// Panics if `l == 0`.
    pub fn r_w(mode: Mode, k: usize, l: usize) -> Self {
        assert!(l >= 1, "R criteria need l >= 1");
        Self { family: Family::RW, i: k, j: l, mode }
    }

    /// Panics if `l == 0`.
    pub fn r_p(mode: Mode, k: usize, l: usize) -> Self {
        assert!(l >= 1, "R criteria need l >= 1");
        Self { family: Family::Rp, i: k, j: l, mode }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Highest total moment or photon-number order the criterion touches.
    pub fn required_order(&self) -> usize {
        match self.family {
            Family::EW | Family::Ep => self.i + self.j + 2,
            Family::MW | Family::Mp => 2,
            Family::RW | Family::Rp => (self.i + 1).max(self.j),
        }
    }

    /// The catalog studied by default: `E` for `(k1, k2)` in `{0,1,2}²`,
    /// both `M`, and `R` with `(k, l)` in `{(2,2), (4,4), (6,6)}` on both
    /// modes.
    pub fn default_catalog() -> alloc::vec::Vec<CriterionId> {
        let mut out = alloc::vec::Vec::new();
        for family in [Family::EW, Family::Ep] {
            for k1 in 0..=2 {
                for k2 in 0..=2 {
                    out.push(Self { family, i: k1, j: k2, mode: Mode::One });
                }
            }
        }
        out.push(Self::m_w());
        out.push(Self::m_p());
        for family in [Family::RW, Family::Rp] {
            for mode in [Mode::One, Mode::Two] {
                for k in [2, 4, 6] {
                    out.push(Self { family, i: k, j: k, mode });
                }
            }
        }
        out
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::EW | Family::Ep => write!(f, "{}({},{})", self.family, self.i, self.j),
            Family::MW | Family::Mp => write!(f, "{}", self.family),
            Family::RW | Family::Rp => {
                write!(f, "{}{}({},{})", self.family, self.mode.index(), self.i, self.j)
            }
        }
    }
}

/// Parses the [`Display`](fmt::Display) form, e.g. `E_p(0,2)`, `M_W`,
/// `R_p1(2,2)`. A missing R mode means mode 1.
impl FromStr for CriterionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidCriterion(format!("cannot parse criterion '{s}'"));
        let (head, args) = match s.find('(') {
            Some(p) => {
                let rest = s[p + 1..].strip_suffix(')').ok_or_else(bad)?;
                (&s[..p], Some(rest))
            }
            None => (s, None),
        };
        let (fam_str, mode) = match head.chars().last() {
            Some(c @ ('1' | '2')) => (&head[..head.len() - 1], Mode::from_index(c as u8 - b'0')?),
            _ => (head, Mode::One),
        };
        let family: Family = fam_str.parse()?;
        let (i, j) = match args {
            Some(a) => {
                let mut it = a.split(',').map(|x| x.trim().parse::<usize>());
                let i = it.next().ok_or_else(bad)?.map_err(|_| bad())?;
                let j = it.next().ok_or_else(bad)?.map_err(|_| bad())?;
                if it.next().is_some() {
                    return Err(bad());
                }
                (i, j)
            }
            None if matches!(family, Family::MW | Family::Mp) => (0, 0),
            None => return Err(bad()),
        };
        Self::new(family, i, j, mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionResult {
    pub id: CriterionId,
    pub value: f64,
    pub nonclassical: bool,
    /// Absolute threshold used for the verdict.
    pub tol: f64,
    pub max_order_used: usize,
}

impl CriterionResult {
    fn new(id: CriterionId, value: f64, scale: f64) -> Self {
        let tol = VERDICT_RTOL * scale;
        Self {
            id,
            value,
            nonclassical: value < -tol,
            tol,
            max_order_used: id.required_order(),
        }
    }
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

/// Evaluates `id` from precomputed statistics.
pub fn evaluate_with(stats: &Statistics, id: CriterionId) -> Result<CriterionResult> {
    let (i, j) = (id.i, id.j);
    let (value, scale) = match id.family {
        Family::EW => e_form(|a, b| stats.moment(a, b), i, j)?,
        Family::Ep => e_form(|a, b| stats.modified_pnd(a, b), i, j)?,
        Family::MW => m_form(|a, b| stats.moment(a, b))?,
        Family::Mp => m_form(|a, b| stats.modified_pnd(a, b))?,
        Family::RW => {
            let m = id.mode.index();
            r_form(|n| stats.marginal_moment(m, n), i, j)?
        }
        Family::Rp => {
            let m = id.mode.index();
            r_form(|n| stats.marginal_modified_pnd(m, n), i, j)?
        }
    };
    Ok(CriterionResult::new(id, value, scale))
}

fn e_form(mut f: impl FnMut(usize, usize) -> Result<f64>, k1: usize, k2: usize) -> Result<(f64, f64)> {
    let a = f(k1 + 2, k2)?;
    let b = f(k1, k2 + 2)?;
    let c = 2.0 * f(k1 + 1, k2 + 1)?;
    Ok((a + b - c, max_abs(&[a, b, c])))
}

fn m_form(mut f: impl FnMut(usize, usize) -> Result<f64>) -> Result<(f64, f64)> {
    let a = f(2, 0)? * f(0, 2)?;
    let c = f(1, 1)?;
    let b = c * c;
    Ok((a - b, max_abs(&[a, b])))
}

fn r_form(mut f: impl FnMut(usize) -> Result<f64>, k: usize, l: usize) -> Result<(f64, f64)> {
    let a = f(k + 1)? * f(l - 1)?;
    let b = f(k)? * f(l)?;
    Ok((a - b, max_abs(&[a, b])))
}

/// Evaluates `id` on `state` with an engine sized to the criterion.
pub fn evaluate(state: &TwoModeGaussianState, id: CriterionId) -> Result<CriterionResult> {
    evaluate_with_engine(&Engine::default(), state, id)
}

/// Like [`evaluate`], but honours the order limit of `engine`.
pub fn evaluate_with_engine(engine: &Engine, state: &TwoModeGaussianState, id: CriterionId) -> Result<CriterionResult> {
    let order = id.required_order();
    if order > engine.max_order() {
        return Err(Error::OrderExceeded {
            requested: order,
            max: engine.max_order(),
        });
    }
    let stats = Statistics::new(state, order)?;
    evaluate_with(&stats, id)
}

pub fn eval_e_w(state: &TwoModeGaussianState, k1: usize, k2: usize) -> Result<CriterionResult> {
    evaluate(state, CriterionId::e_w(k1, k2))
}

pub fn eval_e_p(state: &TwoModeGaussianState, k1: usize, k2: usize) -> Result<CriterionResult> {
    evaluate(state, CriterionId::e_p(k1, k2))
}

pub fn eval_m_w(state: &TwoModeGaussianState) -> Result<CriterionResult> {
    evaluate(state, CriterionId::m_w())
}

pub fn eval_m_p(state: &TwoModeGaussianState) -> Result<CriterionResult> {
    evaluate(state, CriterionId::m_p())
}

pub fn eval_r_w(state: &TwoModeGaussianState, mode: Mode, k: usize, l: usize) -> Result<CriterionResult> {
    evaluate(state, CriterionId::new(Family::RW, k, l, mode)?)
}

pub fn eval_r_p(state: &TwoModeGaussianState, mode: Mode, k: usize, l: usize) -> Result<CriterionResult> {
    evaluate(state, CriterionId::new(Family::Rp, k, l, mode)?)
}

/// Closed forms for a noiseless twin beam with `bp` pairs. `None` for
/// criteria without one.
pub fn closed_form_noiseless(id: CriterionId, bp: f64) -> Option<f64> {
    let r = bp / (bp + 1.0);
    let b2 = bp * bp;
    let b3 = b2 * bp;
    let v = match (id.family, id.i, id.j) {
        (Family::EW, 0, 0) => -2.0 * bp,
        (Family::EW, 1, 1) => -12.0 * b3 - 8.0 * b2,
        (Family::EW, 2, 2) => -240.0 * b3 * b2 - 288.0 * b2 * b2 - 72.0 * b3,
        (Family::EW, 0, 1) | (Family::EW, 1, 0) => -4.0 * b2,
        (Family::EW, 0, 2) | (Family::EW, 2, 0) => -12.0 * b3 + 4.0 * b2,
        (Family::MW, _, _) => -4.0 * b3 - b2,
        (Family::Ep, 0, 0) => -2.0 * r,
        (Family::Ep, 1, 1) => -8.0 * r * r,
        (Family::Ep, 2, 2) => -72.0 * r * r * r,
        (Family::Ep, 0, 1) | (Family::Ep, 1, 0) => 0.0,
        (Family::Ep, 0, 2) | (Family::Ep, 2, 0) => 4.0 * r * r,
        (Family::Mp, _, _) => -r * r,
        _ => return None,
    };
    Some(v)
}

/// Polynomial in `x = TR` multiplying the `bp`-dependent factor of the
/// beam-splitter-output closed forms; `(poly, power, prefactor)` with value
/// `poly(x) * prefactor * (bp / (bp + 1))^power`.
fn bs_output_parts(id: CriterionId, x: f64) -> Option<(f64, i32, f64)> {
    let x2 = x * x;
    let x3 = x2 * x;
    Some(match (id.family, id.i, id.j) {
        (Family::Ep, 0, 0) => (-(1.0 - 8.0 * x), 1, 2.0),
        (Family::Ep, 1, 1) => (-(72.0 * x2 - 21.0 * x + 1.0), 2, 8.0),
        (Family::Ep, 2, 2) => (-(-800.0 * x3 + 340.0 * x2 - 40.0 * x + 1.0), 3, 72.0),
        (Family::Ep, 0, 2) | (Family::Ep, 2, 0) => (144.0 * x2 - 30.0 * x + 1.0, 2, 4.0),
        (Family::Mp, _, _) => (-(1.0 - 8.0 * x), 2, 1.0),
        _ => return None,
    })
}

/// Closed forms for the beam-splitter output of a noiseless twin beam.
/// `None` for criteria without one.
pub fn closed_form_bs_output(id: CriterionId, bp: f64, t: f64) -> Option<f64> {
    let x = t * (1.0 - t);
    let (poly, power, pre) = bs_output_parts(id, x)?;
    Some(poly * pre * math::powi(bp / (bp + 1.0), power))
}

/// The `T`-dependent factor alone; its sign is the sign of the criterion for
/// every `bp > 0`.
pub fn bs_output_sign_polynomial(id: CriterionId, t: f64) -> Option<f64> {
    bs_output_parts(id, t * (1.0 - t)).map(|(poly, _, _)| poly)
}

/// `T >= 1/2` with `T (1 - T) = x`, for `0 <= x <= 1/4`.
pub fn transmissivity_from_tr(x: f64) -> f64 {
    0.5 * (1.0 + math::sqrt((1.0 - 4.0 * x).max(0.0)))
}

/// Sign-change points of a beam-splitter closed form on `T ∈ [1/2, 1]`,
/// found by grid scan and bisection.
pub fn bs_output_sign_changes(id: CriterionId, samples: usize, tol: f64) -> alloc::vec::Vec<f64> {
    roots::sign_changes(
        |t| bs_output_sign_polynomial(id, t).unwrap_or(f64::NAN),
        0.5,
        1.0,
        samples,
        tol,
    )
    .into_iter()
    .map(|r| r.x)
    .collect()
}

/// Largest `bp` for which `R^p_{2,2}` of the beam-splitter output of a
/// noiseless twin beam is negative, at transmissivity `t`.
///
/// `None` means no upper limit: at `t = 1/2` the criterion is negative for
/// every `bp > 0`.
pub fn boundary_r22p(t: f64) -> Option<f64> {
    let x = t * (1.0 - t);
    let a = 1.0 - 4.0 * x;
    if a <= 0.0 {
        return None;
    }
    let s33 = math::sqrt(33.0);
    let rad = 4.0 * x * (4.0 * x - (7.0 - s33)) + 1.0;
    // rationalised so that neither T -> 1 nor T -> 1/2 cancels
    Some(2.0 * x * (s33 - 5.0) / (a * (math::sqrt(rad) + a)))
}

/// Noise level `bs = bi` below which `R^p_{2,2}` detects local
/// non-classicality of the beam-splitter output of a twin beam with `bp`
/// pairs. Clamped at zero where no noise is tolerated.
pub fn boundary_noise_balanced_r22p(bp: f64, t: f64) -> f64 {
    let x = t * (1.0 - t);
    let pairs = bp * (bp + 1.0);
    let y = x * pairs;
    let c = math::sqrt(math::sqrt(33.0) - 5.0);
    let rad = 16.0 * y + 4.0 * c * math::sqrt(y) + 1.0;
    let lead = 2.0 * bp + 1.0;
    // rad - lead² without the O(bp²) cancellation
    let diff = 4.0 * pairs * (4.0 * x - 1.0) + 4.0 * c * math::sqrt(y);
    let v = diff / (2.0 * (math::sqrt(rad) + lead));
    v.max(0.0)
}

/// Noise level below which a noisy twin beam stays entangled: balanced noise
/// `bs = bi` or single-mode noise (`bi = 0`).
pub fn entanglement_boundary_twin_beam(bp: f64, balanced: bool) -> f64 {
    if balanced {
        let s = math::sqrt(bp * (bp + 1.0));
        if s + bp == 0.0 {
            0.0
        } else {
            bp / (s + bp)
        }
    } else {
        1.0
    }
}

/// Exact `T` endpoints of the photon-number criteria sign changes on
/// `[1/2, 1]` for noiseless beam-splitter outputs, ascending.
pub fn table_endpoints(id: CriterionId) -> Option<alloc::vec::Vec<f64>> {
    let s2 = math::sqrt(2.0);
    let t = |x: f64| transmissivity_from_tr(x);
    let v = match (id.family, id.i, id.j) {
        (Family::Ep, 0, 0) | (Family::Mp, _, _) => alloc::vec![(1.0 + 1.0 / s2) / 2.0],
        (Family::Ep, 1, 1) => {
            let d = math::sqrt(153.0);
            let mut v = alloc::vec![t((21.0 + d) / 144.0), t((21.0 - d) / 144.0)];
            v.sort_by(f64::total_cmp);
            v
        }
        (Family::Ep, 0, 2) | (Family::Ep, 2, 0) => alloc::vec![t(1.0 / 6.0), t(1.0 / 24.0)],
        (Family::Ep, 2, 2) => {
            let poly = |x: f64| -800.0 * x * x * x + 340.0 * x * x - 40.0 * x + 1.0;
            let mut v: alloc::vec::Vec<f64> = roots::sign_changes(poly, 0.0, 0.25, 400, 1e-15)
                .into_iter()
                .map(|r| t(r.x))
                .collect();
            v.sort_by(f64::total_cmp);
            v
        }
        _ => return None,
    };
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{beam_splitter, twin_beam, BeamSplitterParams, TwinBeamParams};

    fn tb(bp: f64) -> TwoModeGaussianState {
        twin_beam(TwinBeamParams::noiseless(bp).unwrap())
    }

    fn bs_out(bp: f64, t: f64) -> TwoModeGaussianState {
        beam_splitter(&tb(bp), BeamSplitterParams::with_transmissivity(t).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn ids_round_trip() {
        for id in CriterionId::default_catalog() {
            let s = id.to_string();
            assert_eq!(s.parse::<CriterionId>().unwrap(), id, "{s}");
        }
        assert_eq!("E_W(0,2)".parse::<CriterionId>().unwrap(), CriterionId::e_w(0, 2));
        assert_eq!("Rp(2,2)".parse::<CriterionId>().unwrap(), CriterionId::r_p(Mode::One, 2, 2));
        assert!("R_p(2,0)".parse::<CriterionId>().is_err());
        assert!("X(1,1)".parse::<CriterionId>().is_err());
        assert!("E_p".parse::<CriterionId>().is_err());
    }

    #[test]
    fn required_orders() {
        assert_eq!(CriterionId::e_w(2, 2).required_order(), 6);
        assert_eq!(CriterionId::m_p().required_order(), 2);
        assert_eq!(CriterionId::r_p(Mode::Two, 6, 6).required_order(), 7);
    }

    #[test]
    fn twin_beam_values() {
        let s = tb(1.0);
        assert!(close(eval_e_w(&s, 0, 0).unwrap().value, -2.0, 1e-13));
        assert!(close(eval_e_w(&s, 1, 1).unwrap().value, -20.0, 1e-13));
        assert!(close(eval_e_p(&s, 0, 0).unwrap().value, -1.0, 1e-13));
        assert!(eval_e_p(&s, 0, 1).unwrap().value.abs() < 1e-13);
        assert!(close(eval_m_w(&s).unwrap().value, -5.0, 1e-13));
        assert!(close(eval_m_p(&s).unwrap().value, -0.25, 1e-13));
        let r = eval_e_w(&tb(1.0 / 3.0), 0, 2).unwrap();
        assert!(r.value.abs() < 1e-14 && !r.nonclassical);
        assert!(eval_e_p(&s, 0, 0).unwrap().nonclassical);
    }

    #[test]
    fn vacuum_is_neutral() {
        let v = TwoModeGaussianState::vacuum();
        for id in [CriterionId::m_w(), CriterionId::m_p(), CriterionId::r_w(Mode::One, 2, 2)] {
            let r = evaluate(&v, id).unwrap();
            assert_eq!(r.value, 0.0);
            assert!(!r.nonclassical);
        }
    }

    #[test]
    fn thermal_r_is_classical() {
        let s = twin_beam(TwinBeamParams::new(0.0, 1.0, 0.0).unwrap());
        let r = eval_r_w(&s, Mode::One, 2, 2).unwrap();
        assert!(close(r.value, 2.0, 1e-13));
        assert!(!r.nonclassical);
    }

    #[test]
    fn balanced_output() {
        let s = bs_out(1.0, 0.5);
        assert!(close(eval_e_p(&s, 0, 0).unwrap().value, 1.0, 1e-12));
        assert!(close(eval_e_p(&s, 1, 1).unwrap().value, -0.5, 1e-12));
        assert!(close(eval_m_p(&s).unwrap().value, 0.25, 1e-12));
        assert!(eval_r_p(&bs_out(0.1, 0.5), Mode::One, 2, 2).unwrap().nonclassical);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_noiseless(CriterionId::e_w(2, 2), 1.0), Some(-600.0));
        assert_eq!(closed_form_noiseless(CriterionId::e_p(2, 2), 1.0), Some(-9.0));
        assert_eq!(closed_form_noiseless(CriterionId::e_p(0, 2), 1.0), Some(1.0));
        assert_eq!(closed_form_noiseless(CriterionId::r_p(Mode::One, 2, 2), 1.0), None);
        let e11 = closed_form_bs_output(CriterionId::e_p(1, 1), 1.0, 0.5).unwrap();
        assert!(close(e11, -0.5, 1e-15));
        assert!(close(closed_form_bs_output(CriterionId::m_p(), 1.0, 0.5).unwrap(), 0.25, 1e-15));
        assert!(close(closed_form_bs_output(CriterionId::e_p(0, 2), 1.0, 1.0).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn closed_forms_match_engine() {
        for &bp in &[0.01, 0.3, 1.0, 4.0] {
            for &t in &[0.5, 0.62, 0.8, 0.97, 1.0] {
                let s = bs_out(bp, t);
                for id in [CriterionId::e_p(0, 0), CriterionId::e_p(1, 1), CriterionId::e_p(2, 2), CriterionId::e_p(0, 2), CriterionId::m_p()] {
                    let e = evaluate(&s, id).unwrap().value;
                    let c = closed_form_bs_output(id, bp, t).unwrap();
                    assert!((e - c).abs() <= 1e-9 * c.abs().max(1e-3), "{id} bp={bp} t={t}: {e} vs {c}");
                }
            }
        }
    }

    #[test]
    fn table_endpoints_match_bisection() {
        for id in [CriterionId::e_p(0, 0), CriterionId::e_p(1, 1), CriterionId::e_p(2, 2), CriterionId::e_p(0, 2)] {
            let exact = table_endpoints(id).unwrap();
            let found = bs_output_sign_changes(id, 500, 1e-12);
            assert_eq!(exact.len(), found.len(), "{id}");
            for (a, b) in exact.iter().zip(&found) {
                assert!((a - b).abs() < 1e-9, "{id}: {a} vs {b}");
            }
        }
        let e22 = table_endpoints(CriterionId::e_p(2, 2)).unwrap();
        for (a, b) in e22.iter().zip([0.624, 0.806, 0.965]) {
            assert!((a - b).abs() < 1e-3);
        }
        assert!((table_endpoints(CriterionId::e_p(0, 0)).unwrap()[0] - 0.85355).abs() < 1e-5);
    }

    #[test]
    fn r22p_boundary_values() {
        assert_eq!(boundary_r22p(1.0), Some(0.0));
        assert_eq!(boundary_r22p(0.5), None);
        let b = boundary_r22p(0.6).unwrap();
        assert!(b.is_finite() && b > 0.0);
        // symmetric in T <-> R
        assert!(close(boundary_r22p(0.3).unwrap(), boundary_r22p(0.7).unwrap(), 1e-14));
    }

    #[test]
    fn noise_boundary_values() {
        assert_eq!(boundary_noise_balanced_r22p(0.0, 0.3), 0.0);
        assert!((boundary_noise_balanced_r22p(1.0, 0.5) - 0.191197388694926).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let t = 0.5 + 0.05 * k as f64;
            let v = boundary_noise_balanced_r22p(1.0, t);
            assert!(v <= last + 1e-15);
            last = v;
        }
    }

    #[test]
    fn entanglement_boundaries() {
        assert!(close(entanglement_boundary_twin_beam(1.0, true), 2f64.sqrt() - 1.0, 1e-15));
        assert!((entanglement_boundary_twin_beam(1e8, true) - 0.5).abs() < 1e-8);
        assert_eq!(entanglement_boundary_twin_beam(0.0, true), 0.0);
        assert_eq!(entanglement_boundary_twin_beam(3.0, false), 1.0);
    }
}
