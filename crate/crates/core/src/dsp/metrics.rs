use num_complex::Complex64;

use super::frame::SymbolFrame;
use super::{DspError, Result};
use crate::units::db;

fn check(tx: &SymbolFrame, rx: &SymbolFrame) -> Result<()> {
    if tx.len() != rx.len() || tx.pol_y.len() != rx.pol_y.len() || tx.is_empty() {
        return Err(DspError::FrameMismatch(format!("{} vs {} symbols", tx.len(), rx.len())));
    }
    Ok(())
}

/// Removes one complex gain, estimated by regressing `rx` on `tx` over both
/// polarizations.
pub fn normalize_to(tx: &SymbolFrame, rx: &SymbolFrame) -> Result<SymbolFrame> {
    check(tx, rx)?;
    let mut cross = Complex64::default();
    let mut energy = 0.0;
    for (t, r) in tx.pol_x.iter().zip(&rx.pol_x).chain(tx.pol_y.iter().zip(&rx.pol_y)) {
        cross += t.conj() * r;
        energy += t.norm_sqr();
    }
    let g = cross / energy;
    let inv = if g.norm_sqr() > 0.0 { 1.0 / g } else { Complex64::new(0.0, 0.0) };
    Ok(SymbolFrame {
        pol_x: rx.pol_x.iter().map(|r| r * inv).collect(),
        pol_y: rx.pol_y.iter().map(|r| r * inv).collect(),
        symbol_rate: rx.symbol_rate,
    })
}

fn ratio(tx: &[Complex64], rx: &[Complex64]) -> (f64, f64) {
    tx.iter().zip(rx).fold((0.0, 0.0), |(s, e), (t, r)| (s + t.norm_sqr(), e + (t - r).norm_sqr()))
}

/// `E[|X|²] / E[|X−Y|²]` pooled over both polarizations; `+∞` when the
/// error vanishes.
pub fn snr_estimate(tx: &SymbolFrame, rx: &SymbolFrame) -> Result<f64> {
    check(tx, rx)?;
    let (sx, ex) = ratio(&tx.pol_x, &rx.pol_x);
    let (sy, ey) = ratio(&tx.pol_y, &rx.pol_y);
    let err = ex + ey;
    Ok(if err == 0.0 { f64::INFINITY } else { (sx + sy) / err })
}

pub fn snr_estimate_per_pol(tx: &SymbolFrame, rx: &SymbolFrame) -> Result<[f64; 2]> {
    check(tx, rx)?;
    let f = |(s, e): (f64, f64)| if e == 0.0 { f64::INFINITY } else { s / e };
    Ok([f(ratio(&tx.pol_x, &rx.pol_x)), f(ratio(&tx.pol_y, &rx.pol_y))])
}

/// Error vector magnitude, dB (`−SNR[dB]`).
pub fn evm_db(tx: &SymbolFrame, rx: &SymbolFrame) -> Result<f64> {
    Ok(-db(snr_estimate(tx, rx)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{add_awgn, generate_frame, qam_constellation};
    use crate::units::from_db;

    fn frame(n: usize) -> SymbolFrame {
        generate_frame(1, n, &qam_constellation(64).unwrap(), 32e9)
    }

    #[test]
    fn identical_frames_are_infinite() {
        let f = frame(100);
        assert_eq!(snr_estimate(&f, &f).unwrap(), f64::INFINITY);
    }

    #[test]
    fn zero_rx_is_zero_db() {
        let f = generate_frame(1, 4096, &qam_constellation(4).unwrap(), 32e9);
        let zero = SymbolFrame { pol_x: vec![Complex64::default(); 4096], pol_y: vec![Complex64::default(); 4096], symbol_rate: 32e9 };
        assert!(db(snr_estimate(&f, &zero).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn known_awgn_level() {
        let f = frame(1 << 16);
        let rx = add_awgn(&f, from_db(20.0), 4);
        let s = db(snr_estimate(&f, &rx).unwrap());
        assert!((s - 20.0).abs() < 0.1, "{s}");
    }

    #[test]
    fn estimator_consistency() {
        // Relative std of the noise-energy estimate is 1/sqrt(2n) symbols.
        for (n, seed) in [(1usize << 12, 10u64), (1 << 16, 11)] {
            for level_db in [5.0, 15.0, 25.0] {
                let f = frame(n);
                let rx = add_awgn(&f, from_db(level_db), seed);
                let s = snr_estimate(&f, &rx).unwrap();
                let rel_std = 1.0 / ((2 * n) as f64).sqrt();
                let expected = from_db(level_db);
                assert!((s / expected - 1.0).abs() < 3.0 * rel_std * 1.5, "n={n} {level_db} dB: {s} vs {expected}");
            }
        }
    }

    #[test]
    fn normalization_removes_complex_gain() {
        let f = frame(1000);
        let g = Complex64::from_polar(0.37, 1.1);
        let rx = SymbolFrame {
            pol_x: f.pol_x.iter().map(|s| s * g).collect(),
            pol_y: f.pol_y.iter().map(|s| s * g).collect(),
            symbol_rate: f.symbol_rate,
        };
        let n = normalize_to(&f, &rx).unwrap();
        assert!(evm_db(&f, &n).unwrap() < -250.0);
    }

    #[test]
    fn mismatched_lengths() {
        assert!(snr_estimate(&frame(10), &frame(11)).is_err());
    }
}
