//! Mutual information under a memoryless circular Gaussian channel law.

use num_complex::Complex64;
use rand::seq::index;

use super::frame::SymbolFrame;
use super::noise::add_awgn;
use super::qam::Constellation;
use super::{DspError, Result};
use crate::rng::{stream, Tag};

pub const DEFAULT_MI_SAMPLES: usize = 1 << 14;

/// MI per polarization, bits/symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    /// Mean over the two polarizations.
    pub mi: f64,
    pub per_pol: [f64; 2],
    pub std_error: f64,
    /// Symbols used per polarization.
    pub samples_used: usize,
}

impl MiEstimate {
    /// Sum over both polarizations.
    pub fn dual_pol(&self) -> f64 {
        self.per_pol[0] + self.per_pol[1]
    }
}

pub fn mi_monte_carlo(tx: &SymbolFrame, rx: &SymbolFrame, constellation: &Constellation, seed: u64) -> Result<MiEstimate> {
    mi_monte_carlo_with(tx, rx, constellation, seed, DEFAULT_MI_SAMPLES)
}

/// Uses at most `max_samples` symbols per polarization, drawn without
/// replacement when the frame is longer.
pub fn mi_monte_carlo_with(
    tx: &SymbolFrame,
    rx: &SymbolFrame,
    constellation: &Constellation,
    seed: u64,
    max_samples: usize,
) -> Result<MiEstimate> {
    if tx.len() != rx.len() || tx.is_empty() || max_samples == 0 {
        return Err(DspError::FrameMismatch(format!("{} vs {} symbols", tx.len(), rx.len())));
    }
    let n = tx.len();
    let used = n.min(max_samples);
    let picks: Vec<usize> = if used == n {
        (0..n).collect()
    } else {
        let mut rng = stream(seed, Tag::MiSubsample, 0);
        let mut v = index::sample(&mut rng, n, used).into_vec();
        v.sort_unstable();
        v
    };
    let mut per_pol = [0.0; 2];
    let mut var_of_mean = 0.0;
    for (p, (t, r)) in [(&tx.pol_x, &rx.pol_x), (&tx.pol_y, &rx.pol_y)].into_iter().enumerate() {
        let (mean, var) = pol_mi(t, r, &picks, constellation.points());
        per_pol[p] = mean;
        var_of_mean += var / used as f64;
    }
    Ok(MiEstimate {
        mi: 0.5 * (per_pol[0] + per_pol[1]),
        per_pol,
        std_error: 0.5 * var_of_mean.sqrt(),
        samples_used: used,
    })
}

/// Sample mean and variance of `log2 p(y|x)/p(y)`.
fn pol_mi(tx: &[Complex64], rx: &[Complex64], picks: &[usize], points: &[Complex64]) -> (f64, f64) {
    let log2m = (points.len() as f64).log2();
    let sigma2 = tx.iter().zip(rx).map(|(t, r)| (t - r).norm_sqr()).sum::<f64>() / tx.len() as f64;
    if sigma2 == 0.0 {
        return (log2m, 0.0);
    }
    let inv = 1.0 / sigma2;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut exps = vec![0.0; points.len()];
    for &i in picks {
        let y = rx[i];
        let own = (y - tx[i]).norm_sqr() * inv;
        let mut max = f64::NEG_INFINITY;
        for (e, x) in exps.iter_mut().zip(points) {
            *e = own - (y - x).norm_sqr() * inv;
            max = max.max(*e);
        }
        let lse = max + exps.iter().map(|e| (e - max).exp()).sum::<f64>().ln();
        let v = log2m - lse / std::f64::consts::LN_2;
        sum += v;
        sum_sq += v * v;
    }
    let k = picks.len() as f64;
    let mean = sum / k;
    let var = if picks.len() > 1 { ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0) } else { 0.0 };
    (mean, var)
}

/// MI of `constellation` at symbol-level AWGN `snr`, from a fresh frame of
/// `samples` symbols per polarization.
pub fn mi_awgn(constellation: &Constellation, snr: f64, samples: usize, seed: u64) -> MiEstimate {
    let tx = super::generate_frame(seed, samples, constellation, 1.0);
    let rx = add_awgn(&tx, snr, seed);
    mi_monte_carlo_with(&tx, &rx, constellation, seed, samples).expect("frames built with matching lengths")
}
