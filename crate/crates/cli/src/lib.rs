//! Command-line pipeline: configuration handling and the stages that turn a
//! run config into JSON, CSV and SVG artifacts.

pub mod config;
pub mod pipeline;

pub use config::{CocycleMode, RunConfig, TwistAmount};
pub use pipeline::{run, CertificateFailure, Stage, StageResult};
