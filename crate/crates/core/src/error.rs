use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state is not physical: smallest symplectic eigenvalue {nu_min} < 1/2")]
    Unphysical { nu_min: f64 },

    #[error("derivative order {requested} exceeds the configured maximum {max}")]
    OrderExceeded { requested: usize, max: usize },

    #[error("generating function is not positive at the expansion point (Q = {value})")]
    NonPositiveGenerator { value: f64 },

    #[error("vacuum probability vanishes, modified elements are undefined")]
    VanishingVacuum,

    #[error("photon-number distribution truncation failed: tail mass {tail_mass} at n_max = {n_max}")]
    Truncation { tail_mass: f64, n_max: usize },

    #[error("bracket [{lo}, {hi}] does not contain a sign change")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("invalid criterion: {0}")]
    InvalidCriterion(String),
}
