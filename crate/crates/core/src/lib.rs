//! Two-mode Gaussian light: twin beams, beam splitters and detection loss,
//! together with the photon-number statistics and non-classicality criteria
//! built on top of them.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of immutable values, so it can be driven from many threads at
//! once by the std companion crate.
//!
//! Layout:
//!
//! * [`state`]: Gaussian state data model and the physical maps acting on it.
//! * [`series`]: truncated bivariate Taylor series used for high-order
//!   differentiation of the generating function.
//! * [`moments`]: intensity moments and photon-number distributions.
//! * [`criteria`]: global and local non-classicality criteria, closed-form
//!   reference values and analytic boundaries.
//! * [`quantifiers`]: local non-classicality quantifiers and negativity.
//! * [`oracle`]: brute-force Fock-space routes used to validate the engine.
//! * [`roots`]: bracketing and bisection.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod criteria;
mod error;
pub(crate) mod math;
pub mod moments;
pub mod oracle;
pub mod quantifiers;
pub mod roots;
pub mod series;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use criteria::{CriterionId, CriterionResult, Family, Mode};
pub use moments::{Engine, KMatrix, PhotonNumberDistribution, Statistics};
pub use quantifiers::NonclassicalityReport;
pub use series::BivariateSeries;
pub use state::{BeamSplitterParams, CovarianceMatrixN, TwinBeamParams, TwoModeGaussianState};
