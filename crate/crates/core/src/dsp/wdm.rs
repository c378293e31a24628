//! Nyquist WDM multiplexing on a periodic block.
//!
//! Zero roll-off pulses are realized as ideal brick walls on the FFT grid of
//! the whole block, so the sinc interpolation is exact and channels occupy
//! disjoint sets of bins.

use num_complex::Complex64;

use super::frame::SymbolFrame;
use super::spectral::{fft, ifft, wrap_bin};
use super::{DspError, Result};

/// Dual-polarization complex baseband field, √W.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    pub pol_x: Vec<Complex64>,
    pub pol_y: Vec<Complex64>,
    pub sample_rate: f64,
    pub symbol_rate: f64,
    /// Channel offsets from the carrier, Hz.
    pub center_frequencies: Vec<f64>,
}

impl SampledWaveform {
    pub fn len(&self) -> usize {
        self.pol_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pol_x.is_empty()
    }

    pub fn num_channels(&self) -> usize {
        self.center_frequencies.len()
    }

    pub fn n_symbols(&self) -> usize {
        (self.len() as f64 * self.symbol_rate / self.sample_rate).round() as usize
    }

    /// Mean `|x|² + |y|²`, W.
    pub fn total_power(&self) -> f64 {
        let s: f64 = self.pol_x.iter().chain(&self.pol_y).map(|c| c.norm_sqr()).sum();
        s / self.len() as f64
    }

    pub fn channel_power(&self) -> f64 {
        self.total_power() / self.num_channels().max(1) as f64
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.pol_x.iter_mut().chain(self.pol_y.iter_mut()) {
            *v *= factor;
        }
    }

    /// `[lo, hi)` frequency bands occupied by the channels.
    pub fn channel_bands(&self) -> Vec<(f64, f64)> {
        let half = 0.5 * self.symbol_rate;
        self.center_frequencies.iter().map(|&fc| (fc - half, fc + half)).collect()
    }

    /// Bin offset of channel `index`'s center on the block grid.
    fn center_bin(&self, index: usize) -> i64 {
        let n_sym = self.n_symbols() as f64;
        (self.center_frequencies[index] * n_sym / self.symbol_rate).round() as i64
    }
}

/// Signed frequency index of bin `j` in an `n`-point FFT, in `[−n/2, n/2)`.
fn signed_bin(j: usize, n: usize) -> i64 {
    if j >= n.div_ceil(2) {
        j as i64 - n as i64
    } else {
        j as i64
    }
}

/// Sinc-shapes every channel, places it at its grid slot and sums.
///
/// The sample rate is `oversampling × channels × spacing`. Channel `c` of
/// `C` sits at `(c − (C−1)/2)·spacing`. A channel's power (mean `|x|²+|y|²`)
/// is the sum of its two polarizations' symbol powers.
pub fn shape_and_mux(frames: &[SymbolFrame], spacing: f64, oversampling: f64) -> Result<SampledWaveform> {
    let first = frames.first().ok_or_else(|| DspError::FrameMismatch("no channels".into()))?;
    let n_sym = first.len();
    let rs = first.symbol_rate;
    if n_sym == 0 {
        return Err(DspError::FrameMismatch("empty frame".into()));
    }
    for f in frames {
        if f.len() != n_sym || f.pol_y.len() != n_sym || f.symbol_rate != rs {
            return Err(DspError::FrameMismatch("channels differ in length or symbol rate".into()));
        }
    }
    if spacing < rs {
        return Err(DspError::InvalidGrid(format!("spacing {spacing:.3e} Hz below symbol rate {rs:.3e} Hz")));
    }
    let n_ch = frames.len();
    let sample_rate = oversampling * n_ch as f64 * spacing;
    let bandwidth = (n_ch as f64 - 1.0) * spacing + rs;
    if bandwidth > sample_rate * (1.0 + 1e-12) {
        return Err(DspError::BandwidthExceeded { bandwidth, sample_rate });
    }
    let sps_f = sample_rate / rs;
    let sps = sps_f.round() as usize;
    if (sps_f - sps as f64).abs() > 1e-9 {
        return Err(DspError::InvalidGrid(format!("{sps_f} samples per symbol is not an integer")));
    }
    let centers: Vec<f64> = (0..n_ch).map(|c| (c as f64 - (n_ch as f64 - 1.0) / 2.0) * spacing).collect();
    let mut offsets = Vec::with_capacity(n_ch);
    for &fc in &centers {
        let b = fc * n_sym as f64 / rs;
        if (b - b.round()).abs() > 1e-6 {
            return Err(DspError::InvalidGrid(format!("channel at {fc:.3e} Hz is off the block grid")));
        }
        offsets.push(b.round() as i64);
    }
    let m = n_sym * sps;
    let gain = (m as f64) / (n_sym as f64);
    let mux = |pick: fn(&SymbolFrame) -> &Vec<Complex64>| -> Vec<Complex64> {
        let mut spectrum = vec![Complex64::default(); m];
        let mut buf = Vec::with_capacity(n_sym);
        for (frame, &off) in frames.iter().zip(&offsets) {
            buf.clear();
            buf.extend_from_slice(pick(frame));
            fft(&mut buf);
            for (j, s) in buf.iter().enumerate() {
                spectrum[wrap_bin(off + signed_bin(j, n_sym), m)] += s * gain;
            }
        }
        ifft(&mut spectrum);
        spectrum
    };
    Ok(SampledWaveform {
        pol_x: mux(|f| &f.pol_x),
        pol_y: mux(|f| &f.pol_y),
        sample_rate,
        symbol_rate: rs,
        center_frequencies: centers,
    })
}

/// Brick-wall matched filter for one channel, sampled at the symbol instants.
///
/// The output is in the waveform's amplitude units; see
/// [`normalize_to`](super::normalize_to) for the scalar alignment against
/// the transmitted frame.
pub fn matched_filter_demux(w: &SampledWaveform, channel_index: usize) -> Result<SymbolFrame> {
    if channel_index >= w.num_channels() {
        return Err(DspError::NoSuchChannel { index: channel_index, count: w.num_channels() });
    }
    let n_sym = w.n_symbols();
    let m = w.len();
    let off = w.center_bin(channel_index);
    let scale = n_sym as f64 / m as f64;
    let demux = |pol: &[Complex64]| -> Vec<Complex64> {
        let mut spectrum = pol.to_vec();
        fft(&mut spectrum);
        let mut out: Vec<Complex64> = (0..n_sym)
            .map(|j| spectrum[wrap_bin(off + signed_bin(j, n_sym), m)] * scale)
            .collect();
        ifft(&mut out);
        out
    };
    Ok(SymbolFrame { pol_x: demux(&w.pol_x), pol_y: demux(&w.pol_y), symbol_rate: w.symbol_rate })
}
