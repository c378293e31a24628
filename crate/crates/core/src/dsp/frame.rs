use num_complex::Complex64;
use rand::Rng;

use super::qam::Constellation;
use crate::rng::{stream, Tag};

/// Dual-polarization symbol sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub pol_x: Vec<Complex64>,
    pub pol_y: Vec<Complex64>,
    pub symbol_rate: f64,
}

impl SymbolFrame {
    pub fn len(&self) -> usize {
        self.pol_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pol_x.is_empty()
    }

    pub fn pols(&self) -> [&[Complex64]; 2] {
        [&self.pol_x, &self.pol_y]
    }

    /// Mean `|s|²` over both polarizations.
    pub fn mean_power(&self) -> f64 {
        let s: f64 = self.pol_x.iter().chain(&self.pol_y).map(|c| c.norm_sqr()).sum();
        s / (2 * self.len()) as f64
    }
}

/// Uniform i.i.d. symbols from `constellation`.
pub fn generate_frame(seed: u64, n_symbols: usize, constellation: &Constellation, symbol_rate: f64) -> SymbolFrame {
    generate_frame_stream(seed, 0, n_symbols, constellation, symbol_rate)
}

/// As [`generate_frame`] on an independent stream, e.g. one per WDM channel.
pub fn generate_frame_stream(
    seed: u64,
    stream_index: u64,
    n_symbols: usize,
    constellation: &Constellation,
    symbol_rate: f64,
) -> SymbolFrame {
    assert!(n_symbols >= 1, "a frame needs at least one symbol");
    let points = constellation.points();
    let m = points.len();
    let draw = |pol: u64| -> Vec<Complex64> {
        let mut rng = stream(seed, Tag::Symbols, 2 * stream_index + pol);
        (0..n_symbols).map(|_| points[rng.random_range(0..m)]).collect()
    };
    let pol_x = draw(0);
    let pol_y = draw(1);
    SymbolFrame { pol_x, pol_y, symbol_rate }
}
