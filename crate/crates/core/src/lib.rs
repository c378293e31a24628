//! Split digital nonlinearity compensation with transceiver noise.
//!
//! * [`analytic`]: closed-form SNR model, split optimizers, reach and regime
//!   analysis.
//! * [`dsp`]: QAM, Nyquist WDM multiplexing, noise injection, SNR and MI
//!   estimation.
//! * [`fiber`]: split-step Manakov propagation, EDFAs, virtual links and the
//!   full transmitter-to-receiver chain.
//! * [`experiments`]: scenarios, sweeps, CSV persistence and figure data.

pub mod analytic;
pub mod cli;
pub mod dsp;
pub mod experiments;
pub mod fiber;
pub mod rng;
pub mod units;
