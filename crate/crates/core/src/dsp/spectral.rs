//! FFT helpers with a per-thread plan cache.
//!
//! Forward transforms are unnormalized; [`ifft`] divides by the length so
//! that `ifft(fft(x)) = x`.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, Vec<Complex64>)> = RefCell::new((FftPlanner::new(), Vec::new()));
}

fn run(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|cell| {
        let (planner, scratch) = &mut *cell.borrow_mut();
        let plan = if inverse { planner.plan_fft_inverse(buf.len()) } else { planner.plan_fft_forward(buf.len()) };
        let need = plan.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex64::default());
        }
        plan.process_with_scratch(buf, &mut scratch[..need]);
    });
}

pub fn fft(buf: &mut [Complex64]) {
    run(buf, false);
}

pub fn ifft(buf: &mut [Complex64]) {
    run(buf, true);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Inverse transform without the `1/N` factor.
pub fn ifft_unnormalized(buf: &mut [Complex64]) {
    run(buf, true);
}

/// Frequency of FFT bin `k` for an `n`-point transform at `sample_rate`, in
/// `[−fs/2, fs/2)`.
#[inline]
pub fn bin_frequency(k: usize, n: usize, sample_rate: f64) -> f64 {
    let k = if k >= n.div_ceil(2) { k as f64 - n as f64 } else { k as f64 };
    k * sample_rate / n as f64
}

/// Bin index holding frequency offset `bins` (may be negative).
#[inline]
pub fn wrap_bin(bins: i64, n: usize) -> usize {
    bins.rem_euclid(n as i64) as usize
}

/// Angular frequency of every bin.
pub fn angular_frequencies(n: usize, sample_rate: f64) -> Vec<f64> {
    (0..n).map(|k| 2.0 * std::f64::consts::PI * bin_frequency(k, n, sample_rate)).collect()
}
