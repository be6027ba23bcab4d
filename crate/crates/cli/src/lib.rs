//! Parameter scans, boundary extraction and output formats on top of
//! `twinbeam-core`; the `twinbeam` binary is a thin front end over this.

pub mod config;
pub mod error;
pub mod output;
pub mod params;
pub mod scan;
pub mod selftest;
pub mod target;

pub use error::CliError;
pub use params::{AxisName, NoiseMode, PointParams};
pub use scan::{run_scan, Axis, ScanResult, ScanSpec, Spacing};
pub use target::Target;
