use num_complex::Complex64;

use super::{DspError, Result};

/// Square QAM with unit average power and Gray-coded axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> f64 {
        (self.order as f64).log2()
    }
}

fn gray_to_binary(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

/// Unit-power square QAM. Point `k` carries the Gray-coded in-phase index in
/// its high bits and the quadrature index in its low bits.
pub fn qam_constellation(m: usize) -> Result<Constellation> {
    if !matches!(m, 4 | 16 | 64 | 256) {
        return Err(DspError::UnsupportedOrder(m));
    }
    let side = (m as f64).sqrt().round() as usize;
    let bits = side.trailing_zeros();
    let scale = (2.0 * (m as f64 - 1.0) / 3.0).sqrt();
    let level = |idx: usize| (2.0 * gray_to_binary(idx) as f64 - (side as f64 - 1.0)) / scale;
    let points = (0..m)
        .map(|k| Complex64::new(level(k >> bits), level(k & (side - 1))))
        .collect();
    Ok(Constellation { order: m, points })
}
