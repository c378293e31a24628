//! Closed-form SNR model for nonlinearity compensation split between
//! transmitter and receiver, in the presence of transceiver (TRX) noise and
//! amplifier (ASE) noise.
//!
//! The received SNR of every scheme reduces to the rational form
//!
//! ```text
//! SNR(P) = P / (a·P + b + c·P² + d·P³)
//! ```
//!
//! with `a = κ` (linear TRX noise), `b = N·P_ASE` (linear ASE), `c` the
//! signal–ASE beating and `d` the signal–TRX beating plus, for EDC only, the
//! signal–signal interference. [`SnrProfile`] holds those four coefficients;
//! the rest of the module builds profiles for the different schemes and
//! searches them.

mod model;
mod optimize;
mod reach;
mod regime;
mod split;

pub use model::{
    snr_edc, snr_nlc, xi_ase, xi_ase_dbp, xi_trx, LinkParams, NlcPlan, Scheme, SnrModel,
    SnrProfile, TrxParams,
};
pub use optimize::{
    optimal_launch_power, optimal_split_bruteforce, optimal_split_bruteforce_with, snr_at_optimum,
    snr_at_optimum_with, split_sweep, LaunchPowerSearch, Optimum,
};
pub use reach::{max_reach, Reach, ReachConfig};
pub use regime::{
    classify_regime, required_snr_trx_for_crossover, snr_edc_ideal, DistanceScaling, Regime,
    RegimeConfig, RegimeReport,
};
pub use split::{
    optimal_split_trx_closed, reach_gain_ase, reach_gain_trx, reach_gain_trx_vs_dpc, xi_ase_opt,
    xi_trx_opt, ReachGainFormula,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("SNR profile is not unimodal over the power grid ({maxima} local maxima)")]
    NotUnimodal { maxima: usize },
    #[error("optimum launch power outside the searchable range (edge at {edge_dbm:.1} dBm)")]
    OptimumOutOfRange { edge_dbm: f64 },
    #[error("target SNR {target_db:.3} dB is not reachable; best at one span is {best_db:.3} dB")]
    TargetUnreachable { target_db: f64, best_db: f64 },
}

pub type Result<T> = std::result::Result<T, AnalyticError>;
