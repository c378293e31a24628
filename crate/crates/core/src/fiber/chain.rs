use serde::{Deserialize, Serialize};

use super::link::{compensate_dispersion, propagate_link, virtual_link, LinkTrace};
use super::{AmpParams, FiberError, FiberParams, Result, SsfConfig};
use crate::analytic::{NlcPlan, TrxParams};
use crate::dsp::{
    add_trx_noise_at, generate_frame_stream, matched_filter_demux, normalize_to, qam_constellation, shape_and_mux,
    NoiseSide, SampledWaveform, SymbolFrame,
};

/// Where transmitter noise enters relative to the pre-compensation stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxNoisePlacement {
    /// Noise is added to the pre-distorted field and sees the whole physical link.
    #[default]
    AfterPrecompensation,
    BeforePrecompensation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub fiber: FiberParams,
    pub amp: AmpParams,
    pub ssf: SsfConfig,
    pub num_channels: usize,
    pub spacing_hz: f64,
    pub symbol_rate: f64,
    pub oversampling: f64,
    pub n_symbols: usize,
    pub qam_order: usize,
    pub num_spans: u32,
    pub power_per_channel_w: f64,
    pub trx: TrxParams,
    pub tx_noise: TxNoisePlacement,
    pub seed: u64,
    /// Also return the dispersion-compensated output; honoured only for
    /// plans without pre-compensation.
    pub edc_reference: bool,
}

impl ChainConfig {
    /// Reference link at reduced step count and 2^14 symbols.
    pub fn reference(num_spans: u32, power_per_channel_w: f64, trx: TrxParams) -> Self {
        Self {
            fiber: FiberParams::reference(),
            amp: AmpParams::reference(),
            ssf: SsfConfig::default(),
            num_channels: 3,
            spacing_hz: 32e9,
            symbol_rate: 32e9,
            oversampling: 3.0,
            n_symbols: 1 << 14,
            qam_order: 256,
            num_spans,
            power_per_channel_w,
            trx,
            tx_noise: TxNoisePlacement::default(),
            seed: 1,
            edc_reference: false,
        }
    }

    pub fn measured_channel(&self) -> usize {
        self.num_channels / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub tx: SymbolFrame,
    /// After split compensation, matched filter and scalar normalization.
    pub rx: SymbolFrame,
    pub rx_edc: Option<SymbolFrame>,
    pub trace: LinkTrace,
}

fn receive(w: &SampledWaveform, tx: &SymbolFrame, ch: usize) -> Result<SymbolFrame> {
    Ok(normalize_to(tx, &matched_filter_demux(w, ch)?)?)
}

struct Transmitted {
    tx: SymbolFrame,
    received: SampledWaveform,
    trace: LinkTrace,
}

fn transmit(cfg: &ChainConfig, x: u32) -> Result<Transmitted> {
    let n = cfg.num_spans;
    if x > n {
        return Err(FiberError::InvalidParameter(format!("split {x} exceeds {n} spans")));
    }
    if cfg.num_channels == 0 || !(cfg.power_per_channel_w > 0.0) {
        return Err(FiberError::InvalidParameter("need at least one channel and positive power".into()));
    }
    let c = qam_constellation(cfg.qam_order)?;
    let mut frames: Vec<SymbolFrame> = (0..cfg.num_channels)
        .map(|i| generate_frame_stream(cfg.seed, i as u64, cfg.n_symbols, &c, cfg.symbol_rate))
        .collect();
    let mut w = shape_and_mux(&frames, cfg.spacing_hz, cfg.oversampling)?;
    // Unit-power symbols give 2 per channel over both polarizations.
    w.scale((cfg.power_per_channel_w / 2.0).sqrt());
    let p = cfg.power_per_channel_w;
    let inv = cfg.ssf.inverse();
    let launched = match cfg.tx_noise {
        TxNoisePlacement::AfterPrecompensation => {
            let pre = virtual_link(&w, x, &cfg.fiber, &cfg.amp, &inv)?;
            add_trx_noise_at(&pre, p, &cfg.trx, NoiseSide::Tx, cfg.seed)
        }
        TxNoisePlacement::BeforePrecompensation => {
            let noisy = add_trx_noise_at(&w, p, &cfg.trx, NoiseSide::Tx, cfg.seed);
            virtual_link(&noisy, x, &cfg.fiber, &cfg.amp, &inv)?
        }
    };
    let (received, trace) = propagate_link(&launched, &cfg.fiber, &cfg.amp, &cfg.ssf.forward(), n, cfg.seed)?;
    let received = add_trx_noise_at(&received, p, &cfg.trx, NoiseSide::Rx, cfg.seed);
    Ok(Transmitted { tx: frames.swap_remove(cfg.measured_channel()), received, trace })
}

/// Full transmission chain with `plan.x_tx_spans` spans pre-compensated and
/// the rest back-propagated.
///
/// Receiver noise is added before back-propagation, as it would be by the
/// receiver front end, so it passes through the receiver's virtual spans.
pub fn run_split_nlc_chain(cfg: &ChainConfig, plan: NlcPlan) -> Result<ChainOutput> {
    let x = plan.x_tx_spans;
    let Transmitted { tx, received, trace } = transmit(cfg, x)?;
    let ch = cfg.measured_channel();
    let rx_edc = if cfg.edc_reference && x == 0 {
        Some(receive(&compensate_dispersion(&received, &cfg.fiber, cfg.num_spans), &tx, ch)?)
    } else {
        None
    };
    let compensated = virtual_link(&received, cfg.num_spans - x, &cfg.fiber, &cfg.amp, &cfg.ssf.inverse())?;
    let rx = receive(&compensated, &tx, ch)?;
    Ok(ChainOutput { tx, rx, rx_edc, trace })
}

/// Chain with dispersion compensation only; `rx_edc` repeats `rx`.
pub fn run_edc_chain(cfg: &ChainConfig) -> Result<ChainOutput> {
    let Transmitted { tx, received, trace } = transmit(cfg, 0)?;
    let rx = receive(&compensate_dispersion(&received, &cfg.fiber, cfg.num_spans), &tx, cfg.measured_channel())?;
    Ok(ChainOutput { tx, rx: rx.clone(), rx_edc: Some(rx), trace })
}
