use std::fmt;

use serde::Serialize;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorClass {
    Usage,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    #[serde(rename = "error")]
    pub class: ErrorClass,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(kind: &str, message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Usage,
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    pub fn numerical(kind: &str, message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Numerical,
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class {
            ErrorClass::Usage => EXIT_USAGE,
            ErrorClass::Numerical => EXIT_NUMERICAL,
        }
    }

    /// One-line JSON record for the diagnostic stream.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error record serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

/// Short machine-readable tag for a core error.
pub fn core_kind(e: &twinbeam_core::Error) -> &'static str {
    use twinbeam_core::Error as E;
    match e {
        E::InvalidParameter { .. } => "invalid_parameter",
        E::Unphysical { .. } => "unphysical",
        E::OrderExceeded { .. } => "order_exceeded",
        E::NonPositiveGenerator { .. } => "non_positive_generator",
        E::VanishingVacuum => "vanishing_vacuum",
        E::Truncation { .. } => "truncation",
        E::NoSignChange { .. } => "no_sign_change",
        E::InvalidCriterion(_) => "invalid_criterion",
    }
}

impl From<twinbeam_core::Error> for CliError {
    fn from(e: twinbeam_core::Error) -> Self {
        use twinbeam_core::Error as E;
        let kind = core_kind(&e);
        match e {
            // bad input from the caller
            E::InvalidParameter { .. } | E::Unphysical { .. } | E::InvalidCriterion(_) => {
                CliError::usage(kind, e.to_string())
            }
            _ => CliError::numerical(kind, e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage("io", e.to_string())
    }
}
