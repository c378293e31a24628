//! Scenario files, sweeps, result storage and figure data.

mod figures;
mod scenario;
mod store;
mod sweep;

pub use figures::{figure, FigureMode, FigureName};
pub use scenario::{
    DspSection, Engine, LinkSection, Scenario, SimulationSection, SweepSection, TrxSection,
};
pub use store::{load, persist, result_path, SCHEMA_VERSION};
pub use sweep::{parabolic_peak, run_scenario, Row, RowEngine, RunOptions, SweepResult};

use std::path::PathBuf;

use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::dsp::DspError;
use crate::fiber::FiberError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("no result file at {0}")]
    NotFound(PathBuf),
    #[error("schema version {found} in {path}, expected {expected}")]
    VersionMismatch { path: PathBuf, found: String, expected: u32 },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Fiber(#[from] FiberError),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> ExperimentError {
    let path = path.into();
    move |source| ExperimentError::Io { path, source }
}
