//! Local non-classicality quantifiers and negativity.

use crate::math;
use crate::state::TwoModeGaussianState;
use crate::{Error, Result};

/// Absolute tolerance behind the yes/no verdicts of [`classify`].
pub const ZERO_TOL: f64 = 1e-10;

/// `-B_j² + |C_j|²`; positive values mean mode `j` is squeezed below the
/// vacuum level in some quadrature.
pub fn local_quantifier(state: &TwoModeGaussianState, mode: u8) -> f64 {
    let b = state.b(mode);
    let c = state.c(mode).norm();
    (c - b) * (c + b)
}

fn check_physical(state: &TwoModeGaussianState) -> Result<()> {
    if state.is_physical() {
        Ok(())
    } else {
        Err(Error::Unphysical {
            nu_min: state.symplectic_eigenvalues().0,
        })
    }
}

/// Gaussian negativity `max(0, (1 / (2 ν̃−) - 1) / 2)`, where `ν̃−` is the
/// smaller symplectic eigenvalue of the partially transposed symmetric
/// covariance (vacuum `ν = 1/2`).
pub fn negativity(state: &TwoModeGaussianState) -> Result<f64> {
    check_physical(state)?;
    let (nu, _) = state.partial_transpose_eigenvalues();
    if nu >= 0.5 {
        return Ok(0.0);
    }
    Ok((0.5 - nu) / (2.0 * nu))
}

/// `(1 / (2 ν̃−) - 1) / 2` without the clamp at zero: positive exactly when
/// the state is entangled, and smooth across the separability boundary.
pub fn negativity_margin(state: &TwoModeGaussianState) -> Result<f64> {
    check_physical(state)?;
    let (nu, _) = state.partial_transpose_eigenvalues();
    Ok((0.5 - nu) / (2.0 * nu))
}

/// Logarithmic negativity `max(0, -ln 2ν̃−)`.
pub fn log_negativity(state: &TwoModeGaussianState) -> Result<f64> {
    check_physical(state)?;
    let (nu, _) = state.partial_transpose_eigenvalues();
    Ok((-math::ln(2.0 * nu)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonclassicalityReport {
    pub i_ncl_1: f64,
    pub i_ncl_2: f64,
    pub negativity: f64,
    pub entangled: bool,
    pub locally_nonclassical: (bool, bool),
}

pub fn classify(state: &TwoModeGaussianState) -> Result<NonclassicalityReport> {
    let negativity = negativity(state)?;
    let i1 = local_quantifier(state, 1);
    let i2 = local_quantifier(state, 2);
    Ok(NonclassicalityReport {
        i_ncl_1: i1,
        i_ncl_2: i2,
        negativity,
        entangled: negativity > ZERO_TOL,
        locally_nonclassical: (i1 > ZERO_TOL, i2 > ZERO_TOL),
    })
}
