use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::frame::SymbolFrame;
use super::spectral::{bin_frequency, ifft};
use super::wdm::SampledWaveform;
use crate::analytic::TrxParams;
use crate::rng::{stream, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseSide {
    Tx,
    Rx,
}

/// Circular Gaussian sample with `E|z|² = variance`.
pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Gaussian noise of one-sided density `psd` (W/Hz) confined to `bands`,
/// as `len` time samples.
///
/// A bin belongs to `[lo, hi)` when its frequency lies in
/// `[lo − Δf/2, hi − Δf/2)`; this matches the bins a brick-wall demux reads.
pub fn band_noise<R: Rng>(len: usize, sample_rate: f64, bands: &[(f64, f64)], psd: f64, rng: &mut R) -> Vec<Complex64> {
    let df = sample_rate / len as f64;
    let variance = psd * sample_rate * len as f64;
    let mut spectrum = vec![Complex64::default(); len];
    for (k, bin) in spectrum.iter_mut().enumerate() {
        let f = bin_frequency(k, len, sample_rate) + 0.5 * df;
        if bands.iter().any(|&(lo, hi)| f >= lo && f < hi) {
            *bin = complex_gaussian(rng, variance);
        }
    }
    ifft(&mut spectrum);
    spectrum
}

/// Adds the TX or RX share of transceiver noise, scaled to the measured
/// per-channel power of `w`.
pub fn add_trx_noise(w: &SampledWaveform, trx: &TrxParams, side: NoiseSide, seed: u64) -> SampledWaveform {
    add_trx_noise_at(w, w.channel_power(), trx, side, seed)
}

/// As [`add_trx_noise`] with the reference channel power given explicitly.
///
/// Noise fills each channel's band so the post-matched-filter SNR equals
/// the side's ceiling.
pub fn add_trx_noise_at(
    w: &SampledWaveform,
    channel_power: f64,
    trx: &TrxParams,
    side: NoiseSide,
    seed: u64,
) -> SampledWaveform {
    let (snr, tag) = match side {
        NoiseSide::Tx => (trx.snr_tx(), Tag::TxNoise),
        NoiseSide::Rx => (trx.snr_rx(), Tag::RxNoise),
    };
    let mut out = w.clone();
    if !snr.is_finite() {
        return out;
    }
    let psd = channel_power / (2.0 * snr * w.symbol_rate);
    let bands = w.channel_bands();
    for (pol, field) in [&mut out.pol_x, &mut out.pol_y].into_iter().enumerate() {
        let mut rng = stream(seed, tag, pol as u64);
        let noise = band_noise(field.len(), w.sample_rate, &bands, psd, &mut rng);
        for (v, n) in field.iter_mut().zip(noise) {
            *v += n;
        }
    }
    out
}

/// Symbol-level AWGN at `snr` relative to the frame's mean power.
pub fn add_awgn(frame: &SymbolFrame, snr: f64, seed: u64) -> SymbolFrame {
    if !snr.is_finite() {
        return frame.clone();
    }
    let variance = frame.mean_power() / snr;
    let noisy = |pol: &[Complex64], idx: u64| -> Vec<Complex64> {
        let mut rng = stream(seed, Tag::Awgn, idx);
        pol.iter().map(|s| s + complex_gaussian(&mut rng, variance)).collect()
    };
    SymbolFrame { pol_x: noisy(&frame.pol_x, 0), pol_y: noisy(&frame.pol_y, 1), symbol_rate: frame.symbol_rate }
}
