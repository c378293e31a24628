use num_complex::Complex64;

use super::{Direction, FiberParams, FiberError, Result, SsfConfig, StepDistribution};
use crate::dsp::spectral::{fft, ifft_unnormalized};
use crate::dsp::SampledWaveform;

/// Step lengths of one span, metres, in propagation order.
///
/// Logarithmic boundaries sit at `z_k = −ln(1 − (k/K)(1 − e^{−αL}))/α`,
/// which gives every step the same effective length.
pub fn step_lengths(fiber: &FiberParams, cfg: &SsfConfig) -> Vec<f64> {
    let k = cfg.steps_per_span.max(1) as usize;
    let l = fiber.length();
    let a = fiber.alpha();
    match cfg.step_distribution {
        StepDistribution::Logarithmic if a > 0.0 => {
            let span = 1.0 - (-a * l).exp();
            let z = |i: usize| -(1.0 - i as f64 / k as f64 * span).ln() / a;
            (0..k).map(|i| z(i + 1) - z(i)).collect()
        }
        _ => vec![l / k as f64; k],
    }
}

/// `e^{iφ}`; a short Taylor series is exact to rounding for the small
/// per-step Kerr phases and much cheaper than `sin_cos`.
#[inline]
fn cis(phi: f64) -> Complex64 {
    if phi.abs() < 0.1 {
        let p2 = phi * phi;
        let c = 1.0 - p2 / 2.0 * (1.0 - p2 / 12.0 * (1.0 - p2 / 30.0 * (1.0 - p2 / 56.0 * (1.0 - p2 / 90.0))));
        let s = phi * (1.0 - p2 / 6.0 * (1.0 - p2 / 20.0 * (1.0 - p2 / 42.0 * (1.0 - p2 / 72.0 * (1.0 - p2 / 110.0)))));
        Complex64::new(c, s)
    } else {
        let (s, c) = phi.sin_cos();
        Complex64::new(c, s)
    }
}

/// Bins between exact re-evaluations of the chirp recurrence.
const CHIRP_BLOCK: usize = 64;

pub(crate) struct Propagator {
    len: usize,
    /// Squared angular bin spacing, (2π·fs/n)².
    d_omega2: f64,
    half_beta2: f64,
    half_alpha: f64,
    alpha: f64,
    nl_coeff: f64,
    phase: Vec<Complex64>,
    half_phase: Vec<Complex64>,
}

#[inline]
fn cis_any(phi: f64) -> Complex64 {
    let (s, c) = phi.sin_cos();
    Complex64::new(c, s)
}

impl Propagator {
    pub(crate) fn new(w: &SampledWaveform, fiber: &FiberParams) -> Self {
        let d_omega = 2.0 * std::f64::consts::PI * w.sample_rate / w.len() as f64;
        Self {
            len: w.len(),
            d_omega2: d_omega * d_omega,
            half_beta2: 0.5 * fiber.beta2(),
            half_alpha: 0.5 * fiber.alpha(),
            alpha: fiber.alpha(),
            nl_coeff: 8.0 / 9.0 * fiber.gamma(),
            phase: Vec::new(),
            half_phase: Vec::new(),
        }
    }

    /// Fills `phase` with `amp·e^{i·c·ω_k²}` in FFT bin order. The phase is
    /// quadratic in |k|, so it is built by recurrence on the non-negative
    /// bins and mirrored.
    fn fill_phase(&mut self, c: f64, amp: f64) {
        let n = self.len;
        let half = n / 2;
        let a = c * self.d_omega2;
        self.half_phase.clear();
        let q = cis(2.0 * a);
        for start in (0..=half).step_by(CHIRP_BLOCK) {
            let k0 = start as f64;
            let mut ph = cis_any(a * k0 * k0) * amp;
            let mut r = cis_any(a * (2.0 * k0 + 1.0));
            for _ in start..(start + CHIRP_BLOCK).min(half + 1) {
                self.half_phase.push(ph);
                ph *= r;
                r *= q;
            }
        }
        let positive = n.div_ceil(2);
        self.phase.clear();
        self.phase.extend((0..n).map(|j| self.half_phase[if j < positive { j } else { n - j }]));
    }

    /// Dispersion and loss over `h` metres; negative `h` undoes them.
    pub(crate) fn linear(&mut self, w: &mut SampledWaveform, h: f64, with_loss: bool) {
        let m = w.len();
        let amp = if with_loss { (-self.half_alpha * h).exp() } else { 1.0 } / m as f64;
        self.fill_phase(self.half_beta2 * h, amp);
        for pol in [&mut w.pol_x, &mut w.pol_y] {
            fft(pol);
            for (v, h) in pol.iter_mut().zip(&self.phase) {
                *v *= h;
            }
            ifft_unnormalized(pol);
        }
    }

    /// Kerr rotation for a step of `h` metres centred on the current point;
    /// `sign = −1` inverts it.
    fn nonlinear(&mut self, w: &mut SampledWaveform, h: f64, sign: f64) {
        let h_eff = if self.alpha > 0.0 { 2.0 * (self.alpha * h / 2.0).sinh() / self.alpha } else { h };
        let k = sign * self.nl_coeff * h_eff;
        for (x, y) in w.pol_x.iter_mut().zip(w.pol_y.iter_mut()) {
            let r = cis(k * (x.norm_sqr() + y.norm_sqr()));
            *x *= r;
            *y *= r;
        }
    }

    pub(crate) fn span(&mut self, w: &mut SampledWaveform, fiber: &FiberParams, steps: &[f64], direction: Direction) {
        if self.nl_coeff == 0.0 {
            let l = fiber.length();
            match direction {
                Direction::Forward => self.linear(w, l, true),
                Direction::Inverse => self.linear(w, -l, true),
            }
            return;
        }
        let k = steps.len();
        match direction {
            Direction::Forward => {
                self.linear(w, 0.5 * steps[0], true);
                for i in 0..k {
                    self.nonlinear(w, steps[i], 1.0);
                    let next = if i + 1 < k { 0.5 * (steps[i] + steps[i + 1]) } else { 0.5 * steps[i] };
                    self.linear(w, next, true);
                }
            }
            Direction::Inverse => {
                self.linear(w, -0.5 * steps[k - 1], true);
                for i in (0..k).rev() {
                    self.nonlinear(w, steps[i], -1.0);
                    let prev = if i > 0 { 0.5 * (steps[i] + steps[i - 1]) } else { 0.5 * steps[i] };
                    self.linear(w, -prev, true);
                }
            }
        }
    }
}

/// One fibre span with the symmetric split-step scheme.
///
/// The inverse direction applies the exact inverse of every forward
/// operator in reverse order, so inverse∘forward is the identity up to
/// rounding for any step count.
pub fn ssf_span(w: &SampledWaveform, fiber: &FiberParams, cfg: &SsfConfig) -> Result<SampledWaveform> {
    fiber.validate()?;
    if cfg.steps_per_span == 0 {
        return Err(FiberError::InvalidParameter("steps_per_span must be at least 1".into()));
    }
    let mut out = w.clone();
    let steps = step_lengths(fiber, cfg);
    Propagator::new(w, fiber).span(&mut out, fiber, &steps, cfg.direction);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{evm_db, generate_frame_stream, matched_filter_demux, qam_constellation, shape_and_mux};

    fn waveform(power_w: f64) -> (Vec<crate::dsp::SymbolFrame>, SampledWaveform) {
        let c = qam_constellation(16).unwrap();
        let frames: Vec<_> = (0..3).map(|i| generate_frame_stream(1, i, 256, &c, 32e9)).collect();
        let mut w = shape_and_mux(&frames, 32e9, 3.0).unwrap();
        w.scale((power_w / w.channel_power()).sqrt());
        (frames, w)
    }

    #[test]
    fn chirp_recurrence_matches_direct_phase() {
        let (_, w) = waveform(1e-3);
        let mut p = Propagator::new(&w, &FiberParams::reference());
        let c = p.half_beta2 * 4e3;
        p.fill_phase(c, 0.5);
        let omega = crate::dsp::spectral::angular_frequencies(w.len(), w.sample_rate);
        for (ph, o) in p.phase.iter().zip(&omega) {
            let (s, co) = (c * o * o).sin_cos();
            assert!((ph - Complex64::new(co, s) * 0.5).norm() < 1e-12);
        }
    }

    #[test]
    fn small_angle_cis_is_exact_to_rounding() {
        for i in -200..=200 {
            let phi = f64::from(i) * 5e-4;
            let (s, c) = phi.sin_cos();
            assert!((cis(phi) - Complex64::new(c, s)).norm() < 2e-16);
        }
    }

    #[test]
    fn log_steps_cover_the_span_with_equal_effective_length() {
        let f = FiberParams::reference();
        let h = step_lengths(&f, &SsfConfig::new(50));
        assert!((h.iter().sum::<f64>() - 80e3).abs() < 1e-6);
        assert!(h[0] < h[49]);
        let a = f.alpha();
        let mut z = 0.0;
        let eff: Vec<f64> = h
            .iter()
            .map(|&d| {
                let e = ((-a * z).exp() - (-a * (z + d)).exp()) / a;
                z += d;
                e
            })
            .collect();
        for e in &eff {
            assert!((e / eff[0] - 1.0).abs() < 1e-9);
        }
        let u = step_lengths(&f, &SsfConfig { step_distribution: StepDistribution::Uniform, ..SsfConfig::new(4) });
        assert_eq!(u, vec![20e3; 4]);
    }

    #[test]
    fn linear_round_trip() {
        let f = FiberParams { gamma_per_w_km: 0.0, ..FiberParams::reference() };
        let (_, w) = waveform(1e-3);
        let cfg = SsfConfig::new(10);
        let back = ssf_span(&ssf_span(&w, &f, &cfg).unwrap(), &f, &cfg.inverse()).unwrap();
        let err: f64 = w.pol_x.iter().zip(&back.pol_x).map(|(a, b)| (a - b).norm_sqr()).sum();
        let ref_: f64 = w.pol_x.iter().map(|a| a.norm_sqr()).sum();
        assert!((err / ref_).sqrt() < 1e-9);
    }

    #[test]
    fn constant_envelope_spm_phase() {
        let f = FiberParams { alpha_db_km: 0.0, dispersion_ps_nm_km: 0.0, gamma_per_w_km: 1.3, length_km: 10.0 };
        let p = 0.02;
        let n = 64;
        let w = SampledWaveform {
            pol_x: vec![Complex64::new((p / 2.0f64).sqrt(), 0.0); n],
            pol_y: vec![Complex64::new((p / 2.0f64).sqrt(), 0.0); n],
            sample_rate: 64e9,
            symbol_rate: 32e9,
            center_frequencies: vec![0.0],
        };
        let out = ssf_span(&w, &f, &SsfConfig::new(7)).unwrap();
        let expected = 8.0 / 9.0 * 1.3e-3 * 10e3 * p;
        for v in &out.pol_x {
            assert!((v.arg() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn nonlinear_round_trip_at_high_power() {
        let f = FiberParams::reference();
        let (frames, w) = waveform(2e-3);
        let cfg = SsfConfig::new(20);
        let fwd = ssf_span(&w, &f, &cfg).unwrap();
        let back = ssf_span(&fwd, &f, &cfg.inverse()).unwrap();
        let rx = matched_filter_demux(&back, 1).unwrap();
        let rx = crate::dsp::normalize_to(&frames[1], &rx).unwrap();
        assert!(evm_db(&frames[1], &rx).unwrap() < -100.0);
        // The forward span alone leaves heavy ISI.
        let raw = crate::dsp::normalize_to(&frames[1], &matched_filter_demux(&fwd, 1).unwrap()).unwrap();
        assert!(evm_db(&frames[1], &raw).unwrap() > -3.0);
    }
}
