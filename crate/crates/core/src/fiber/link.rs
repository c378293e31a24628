use super::ssf::{step_lengths, Propagator};
use super::{AmpParams, Direction, FiberError, FiberParams, Result, SsfConfig};
use crate::dsp::spectral::{bin_frequency, fft};
use crate::dsp::{band_noise, SampledWaveform};
use crate::rng::{stream, Tag};
use crate::units::from_db;

/// Largest tolerated energy fraction in the outer tenth of the band.
pub const DEFAULT_EDGE_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanRecord {
    pub pre_amp_power: f64,
    pub post_amp_power: f64,
    pub ase_power: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinkTrace {
    pub spans: Vec<SpanRecord>,
}

impl LinkTrace {
    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }
}

/// Energy fraction at `|f| ≥ 0.45·fs`.
pub fn band_edge_fraction(w: &SampledWaveform) -> f64 {
    let n = w.len();
    let edge = 0.45 * w.sample_rate;
    let mut total = 0.0;
    let mut outer = 0.0;
    for pol in [&w.pol_x, &w.pol_y] {
        let mut s = pol.clone();
        fft(&mut s);
        for (k, v) in s.iter().enumerate() {
            let e = v.norm_sqr();
            total += e;
            if bin_frequency(k, n, w.sample_rate).abs() >= edge {
                outer += e;
            }
        }
    }
    if total > 0.0 {
        outer / total
    } else {
        0.0
    }
}

pub(crate) fn check_band_edge(w: &SampledWaveform, threshold: f64) -> Result<()> {
    let fraction = band_edge_fraction(w);
    if fraction > threshold {
        return Err(FiberError::SampleRateUnderrun { fraction, threshold });
    }
    Ok(())
}

/// Amplifies by the amp gain and adds ASE over the occupied channel bands.
/// Returns the amplified field and the injected noise power.
pub fn edfa(w: &SampledWaveform, amp: &AmpParams, fiber: &FiberParams, seed: u64, span_index: u64) -> (SampledWaveform, f64) {
    let mut out = w.clone();
    out.scale(from_db(amp.gain_db(fiber)).sqrt());
    let psd = amp.ase_psd(fiber);
    if psd == 0.0 {
        return (out, 0.0);
    }
    let bands = out.channel_bands();
    let mut injected = 0.0;
    for (pol, field) in [&mut out.pol_x, &mut out.pol_y].into_iter().enumerate() {
        let mut rng = stream(seed, Tag::Ase, 2 * span_index + pol as u64);
        let noise = band_noise(field.len(), w.sample_rate, &bands, 0.5 * psd, &mut rng);
        for (v, n) in field.iter_mut().zip(noise) {
            injected += n.norm_sqr();
            *v += n;
        }
    }
    (out, injected / w.len() as f64)
}

/// `num_spans` × (fibre span, amplifier).
pub fn propagate_link(
    w: &SampledWaveform,
    fiber: &FiberParams,
    amp: &AmpParams,
    cfg: &SsfConfig,
    num_spans: u32,
    seed: u64,
) -> Result<(SampledWaveform, LinkTrace)> {
    fiber.validate()?;
    let steps = step_lengths(fiber, cfg);
    let mut prop = Propagator::new(w, fiber);
    let mut cur = w.clone();
    let mut trace = LinkTrace::default();
    for span in 0..num_spans {
        prop.span(&mut cur, fiber, &steps, Direction::Forward);
        check_band_edge(&cur, DEFAULT_EDGE_THRESHOLD)?;
        let pre_amp_power = cur.total_power();
        let (amplified, ase_power) = edfa(&cur, amp, fiber, seed, u64::from(span));
        cur = amplified;
        trace.spans.push(SpanRecord { pre_amp_power, post_amp_power: cur.total_power(), ase_power });
    }
    Ok((cur, trace))
}

/// Noiseless inverted link: each virtual span removes the amplifier gain
/// and then runs the fibre backwards, so the loss turns into gain.
pub fn virtual_link(
    w: &SampledWaveform,
    spans: u32,
    fiber: &FiberParams,
    amp: &AmpParams,
    cfg: &SsfConfig,
) -> Result<SampledWaveform> {
    fiber.validate()?;
    let mut cur = w.clone();
    if spans == 0 {
        return Ok(cur);
    }
    let steps = step_lengths(fiber, cfg);
    let mut prop = Propagator::new(w, fiber);
    let inv_gain = from_db(-amp.gain_db(fiber)).sqrt();
    for _ in 0..spans {
        cur.scale(inv_gain);
        prop.span(&mut cur, fiber, &steps, Direction::Inverse);
        check_band_edge(&cur, DEFAULT_EDGE_THRESHOLD)?;
    }
    Ok(cur)
}

/// Undoes the accumulated dispersion of `spans` spans.
pub fn compensate_dispersion(w: &SampledWaveform, fiber: &FiberParams, spans: u32) -> SampledWaveform {
    let mut out = w.clone();
    if spans > 0 {
        Propagator::new(w, fiber).linear(&mut out, -f64::from(spans) * fiber.length(), false);
    }
    out
}
