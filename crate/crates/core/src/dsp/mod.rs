//! Transmitter and receiver signal processing.
//!
//! Symbols are unit average power; waveforms carry the field in √W so that
//! `|x|² + |y|²` is instantaneous optical power.

mod frame;
mod metrics;
mod mi;
mod noise;
mod qam;
pub mod spectral;
mod wdm;

pub use frame::{generate_frame, generate_frame_stream, SymbolFrame};
pub use metrics::{evm_db, normalize_to, snr_estimate, snr_estimate_per_pol};
pub use mi::{mi_awgn, mi_monte_carlo, mi_monte_carlo_with, MiEstimate, DEFAULT_MI_SAMPLES};
pub use noise::{add_awgn, add_trx_noise, add_trx_noise_at, band_noise, NoiseSide};
pub use qam::{qam_constellation, Constellation};
pub use wdm::{matched_filter_demux, shape_and_mux, SampledWaveform};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("unsupported QAM order {0}; expected 4, 16, 64 or 256")]
    UnsupportedOrder(usize),
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("aggregate bandwidth {bandwidth:.3e} Hz does not fit the sample rate {sample_rate:.3e} Hz")]
    BandwidthExceeded { bandwidth: f64, sample_rate: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("channel {index} does not exist ({count} channels)")]
    NoSuchChannel { index: usize, count: usize },
}

pub type Result<T> = std::result::Result<T, DspError>;

pub use num_complex::Complex64;
