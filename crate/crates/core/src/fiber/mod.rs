//! Split-step propagation of the Manakov equation over amplified spans.
//!
//! Lengths are metres inside the module; parameters keep their datasheet
//! units (dB/km, ps/(nm·km), 1/(W·km)).

mod chain;
mod link;
mod ssf;

pub use chain::{run_edc_chain, run_split_nlc_chain, ChainConfig, ChainOutput, TxNoisePlacement};
pub use link::{
    band_edge_fraction, compensate_dispersion, edfa, propagate_link, virtual_link, LinkTrace, SpanRecord,
    DEFAULT_EDGE_THRESHOLD,
};
pub use ssf::{ssf_span, step_lengths};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::DspError;
use crate::units;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiberError {
    #[error("{fraction:.2e} of the signal energy sits at the band edge (limit {threshold:.1e}); raise the sample rate")]
    SampleRateUnderrun { fraction: f64, threshold: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Dsp(#[from] DspError),
}

pub type Result<T> = std::result::Result<T, FiberError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberParams {
    pub alpha_db_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub gamma_per_w_km: f64,
    pub length_km: f64,
}

impl FiberParams {
    /// Standard single-mode fibre, 80 km spans.
    pub fn reference() -> Self {
        Self { alpha_db_km: 0.2, dispersion_ps_nm_km: 17.0, gamma_per_w_km: 1.2, length_km: 80.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_db_km >= 0.0) || !(self.length_km > 0.0) || !self.gamma_per_w_km.is_finite() {
            return Err(FiberError::InvalidParameter(format!("{self:?}")));
        }
        Ok(())
    }

    pub fn span_loss_db(&self) -> f64 {
        self.alpha_db_km * self.length_km
    }

    pub(crate) fn alpha(&self) -> f64 {
        units::alpha_db_km_to_linear(self.alpha_db_km)
    }

    pub(crate) fn beta2(&self) -> f64 {
        units::dispersion_to_beta2(self.dispersion_ps_nm_km)
    }

    pub(crate) fn gamma(&self) -> f64 {
        self.gamma_per_w_km * 1e-3
    }

    pub(crate) fn length(&self) -> f64 {
        self.length_km * 1e3
    }
}

/// Lumped amplifier after each span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmpParams {
    /// `None` restores the span loss exactly.
    pub gain_db: Option<f64>,
    /// `None` for a noiseless amplifier.
    pub noise_figure_db: Option<f64>,
}

impl AmpParams {
    pub fn reference() -> Self {
        Self { gain_db: None, noise_figure_db: Some(4.0) }
    }

    pub fn noiseless() -> Self {
        Self { gain_db: None, noise_figure_db: None }
    }

    pub fn gain_db(&self, fiber: &FiberParams) -> f64 {
        self.gain_db.unwrap_or_else(|| fiber.span_loss_db())
    }

    /// ASE power spectral density over both polarizations, W/Hz.
    pub fn ase_psd(&self, fiber: &FiberParams) -> f64 {
        match self.noise_figure_db {
            Some(nf) => units::ase_power(self.gain_db(fiber), nf, 1.0),
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepDistribution {
    Logarithmic,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsfConfig {
    pub steps_per_span: u32,
    pub step_distribution: StepDistribution,
    pub direction: Direction,
}

impl SsfConfig {
    pub const DEFAULT_STEPS: u32 = 100;
    /// Step count of the long-running exact mode.
    pub const EXACT_STEPS: u32 = 800;

    pub fn new(steps_per_span: u32) -> Self {
        Self { steps_per_span, step_distribution: StepDistribution::Logarithmic, direction: Direction::Forward }
    }

    pub fn inverse(self) -> Self {
        Self { direction: Direction::Inverse, ..self }
    }

    pub fn forward(self) -> Self {
        Self { direction: Direction::Forward, ..self }
    }
}

impl Default for SsfConfig {
    fn default() -> Self {
        Self::new(Self::DEFAULT_STEPS)
    }
}
