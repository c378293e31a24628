//! Closed-form optimal splits and reach gains in the two beating regimes.

use super::model::{power_sum, NlcPlan};
use super::{AnalyticError, Result};

fn check_kappa(kappa_r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&kappa_r) {
        Ok(())
    } else {
        Err(AnalyticError::Domain(format!("kappa_r must lie in [0, 1], got {kappa_r}")))
    }
}

/// `ln S` with `S = (1−κ_R)^(−1/ε) + κ_R^(−1/ε)`, evaluated without overflow.
fn ln_s(kappa_r: f64, epsilon: f64) -> f64 {
    let a = -(1.0 - kappa_r).ln() / epsilon;
    let b = -kappa_r.ln() / epsilon;
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Coefficient `c` in `ξ_TRX,opt = c·N^(1+ε)`, i.e. `S^(−ε)`; the ε = 0
/// limit is `min(κ_R, 1−κ_R)`, except exactly at κ_R = 1/2 where it is 1/2.
fn xi_trx_opt_coefficient(kappa_r: f64, epsilon: f64) -> f64 {
    if kappa_r == 0.0 || kappa_r == 1.0 {
        return 0.0;
    }
    if epsilon == 0.0 {
        return kappa_r.min(1.0 - kappa_r);
    }
    (-epsilon * ln_s(kappa_r, epsilon)).exp()
}

/// Optimal split when only TRX beating matters: nearest integer of
/// `N / (1 + ((1−κ_R)/κ_R)^(1/ε))`. For ε = 0 the limit picks DBP, the
/// midpoint, or DPC depending on which side injects less noise, and
/// κ_R ∈ {0, 1} put the whole virtual link on the noiseless side.
pub fn optimal_split_trx_closed(num_spans: u32, kappa_r: f64, epsilon: f64) -> Result<NlcPlan> {
    check_kappa(kappa_r)?;
    if epsilon < 0.0 {
        return Err(AnalyticError::Domain(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let n = num_spans;
    let x = if kappa_r == 0.0 {
        0
    } else if kappa_r == 1.0 {
        n
    } else if epsilon == 0.0 {
        match kappa_r.partial_cmp(&0.5).unwrap() {
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => (f64::from(n) / 2.0).round() as u32,
            std::cmp::Ordering::Greater => n,
        }
    } else {
        let log_ratio = ((1.0 - kappa_r) / kappa_r).ln() / epsilon;
        // 1 / (1 + e^r) computed stably for large |r|.
        let frac = if log_ratio > 0.0 {
            let e = (-log_ratio).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + log_ratio.exp())
        };
        (f64::from(n) * frac).round() as u32
    };
    Ok(NlcPlan { x_tx_spans: x.min(n) })
}

/// Optimal TRX beating accumulation factor
/// `S / S^(1+ε) · N^(1+ε)`, `S = (1−κ_R)^(−1/ε) + κ_R^(−1/ε)`.
pub fn xi_trx_opt(num_spans: u32, kappa_r: f64, epsilon: f64) -> Result<f64> {
    check_kappa(kappa_r)?;
    Ok(xi_trx_opt_coefficient(kappa_r, epsilon) * f64::from(num_spans).powf(1.0 + epsilon))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReachGainFormula {
    /// Exact expression for any ε > 0.
    #[default]
    Exact,
    /// Small-coherence limit.
    SmallCoherence,
}

/// Reach gain of the optimal split over DBP when TRX beating dominates.
///
/// For the gain over DPC use [`reach_gain_trx_vs_dpc`].
pub fn reach_gain_trx(kappa_r: f64, epsilon: f64, formula: ReachGainFormula) -> Result<f64> {
    check_kappa(kappa_r)?;
    let exponent = 1.0 / (3.0 + epsilon);
    match formula {
        ReachGainFormula::SmallCoherence => {
            if kappa_r <= 0.5 {
                Ok(1.0)
            } else if kappa_r == 1.0 {
                Ok(f64::INFINITY)
            } else {
                Ok((kappa_r / (1.0 - kappa_r)).powf(exponent))
            }
        }
        ReachGainFormula::Exact => {
            if kappa_r == 0.0 {
                return Ok(1.0);
            }
            let c = xi_trx_opt_coefficient(kappa_r, epsilon);
            if c == 0.0 {
                return Ok(f64::INFINITY);
            }
            // {κ_R·S^(1+ε)/S}^(1/(3+ε)) = (κ_R / S^(−ε))^(1/(3+ε)).
            Ok((kappa_r / c).powf(exponent))
        }
    }
}

/// Reach gain over DPC: the DBP formula with κ_R replaced by 1−κ_R.
pub fn reach_gain_trx_vs_dpc(kappa_r: f64, epsilon: f64, formula: ReachGainFormula) -> Result<f64> {
    check_kappa(kappa_r)?;
    reach_gain_trx(1.0 - kappa_r, epsilon, formula)
}

/// Optimal ASE beating accumulation factor, obtained at X = ⌈N/2⌉.
pub fn xi_ase_opt(num_spans: u32, epsilon: f64) -> Result<f64> {
    if num_spans < 2 {
        return Err(AnalyticError::Domain(format!("need N >= 2, got {num_spans}")));
    }
    let n = num_spans;
    if n % 2 == 0 {
        let half = f64::from(n / 2);
        Ok(half.powf(1.0 + epsilon) + 2.0 * power_sum(n / 2 - 1, epsilon))
    } else {
        super::model::xi_ase(n, n.div_ceil(2), epsilon)
    }
}

/// Reach gain of the optimal split over DBP when ASE beating dominates,
/// `2^((1+ε)/(3+ε))`.
pub fn reach_gain_ase(epsilon: f64) -> Result<f64> {
    if epsilon < 0.0 {
        return Err(AnalyticError::Domain(format!("epsilon must be >= 0, got {epsilon}")));
    }
    Ok(2f64.powf((1.0 + epsilon) / (3.0 + epsilon)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{xi_ase, xi_trx};
    use approx::assert_relative_eq;

    #[test]
    fn balanced_noise_splits_in_the_middle() {
        for eps in [0.01, 0.108, 0.5] {
            for n in [4, 10, 33] {
                let plan = optimal_split_trx_closed(n, 0.5, eps).unwrap();
                assert_eq!(plan.x_tx_spans, (f64::from(n) / 2.0).round() as u32);
            }
        }
    }

    #[test]
    fn small_coherence_limits() {
        assert_eq!(optimal_split_trx_closed(12, 0.8, 0.0).unwrap().x_tx_spans, 12);
        assert_eq!(optimal_split_trx_closed(12, 0.8, 1e-4).unwrap().x_tx_spans, 12);
        assert_eq!(optimal_split_trx_closed(12, 0.2, 1e-4).unwrap().x_tx_spans, 0);
        assert_eq!(optimal_split_trx_closed(12, 0.5, 0.0).unwrap().x_tx_spans, 6);
    }

    #[test]
    fn degenerate_kappa_puts_link_on_quiet_side() {
        assert_eq!(optimal_split_trx_closed(9, 0.0, 0.1).unwrap().x_tx_spans, 0);
        assert_eq!(optimal_split_trx_closed(9, 1.0, 0.1).unwrap().x_tx_spans, 9);
        assert_eq!(xi_trx_opt(9, 1.0, 0.1).unwrap(), 0.0);
        assert!(optimal_split_trx_closed(9, 1.2, 0.1).is_err());
    }

    #[test]
    fn xi_trx_opt_limits() {
        let n = 40;
        let eps = 1e-9;
        let nf = f64::from(n).powf(1.0 + eps);
        assert_relative_eq!(xi_trx_opt(n, 0.5, eps).unwrap(), nf / 2f64.powf(1.0 + eps), max_relative = 1e-6);
        assert_relative_eq!(xi_trx_opt(n, 0.8, 1e-3).unwrap(), 0.2 * f64::from(n).powf(1.001), max_relative = 1e-6);
        assert_relative_eq!(xi_trx_opt(n, 0.8, 0.0).unwrap(), 0.2 * f64::from(n), max_relative = 1e-12);
    }

    #[test]
    fn xi_trx_opt_matches_substitution() {
        // Continuous optimum substituted back into ξ_TRX; integer rounding
        // of X can only raise the value.
        for (kr, eps) in [(0.6, 0.108), (0.8, 0.3), (0.3, 0.2)] {
            let n = 100;
            let opt = xi_trx_opt(n, kr, eps).unwrap();
            let x = optimal_split_trx_closed(n, kr, eps).unwrap().x_tx_spans;
            let at_x = xi_trx(n, x, kr, eps).unwrap();
            assert!(at_x >= opt * (1.0 - 1e-12));
            assert!((at_x - opt) / opt < 0.01, "{kr} {eps}: {at_x} vs {opt}");
        }
    }

    #[test]
    fn reach_gain_examples() {
        assert_relative_eq!(reach_gain_trx(0.5, 1e-6, ReachGainFormula::SmallCoherence).unwrap(), 1.0);
        let g = reach_gain_trx(0.8, 0.108, ReachGainFormula::SmallCoherence).unwrap();
        assert!((g - 1.56).abs() < 0.01, "{g}");
        let exact = reach_gain_trx(0.8, 0.108, ReachGainFormula::Exact).unwrap();
        assert!((exact - g).abs() / g < 0.02);
        assert_relative_eq!(reach_gain_trx_vs_dpc(0.2, 0.108, ReachGainFormula::Exact).unwrap(), exact);
        assert_eq!(reach_gain_trx(0.3, 0.108, ReachGainFormula::SmallCoherence).unwrap(), 1.0);
    }

    #[test]
    fn exact_and_small_coherence_agree_where_coherence_is_low() {
        for &kr in &[0.7, 0.75, 0.8, 0.9, 0.95] {
            for i in 1..=10 {
                let eps = 0.01 * f64::from(i);
                let e = reach_gain_trx(kr, eps, ReachGainFormula::Exact).unwrap();
                let a = reach_gain_trx(kr, eps, ReachGainFormula::SmallCoherence).unwrap();
                assert!((e - a).abs() / e < 0.01, "{kr} {eps}: {e} vs {a}");
            }
        }
    }

    #[test]
    fn ase_regime() {
        assert_relative_eq!(xi_ase_opt(2, 0.0).unwrap(), 1.0);
        assert_relative_eq!(xi_ase_opt(10, 0.0).unwrap(), 25.0);
        assert_relative_eq!(reach_gain_ase(0.0).unwrap(), 2f64.cbrt(), max_relative = 1e-15);
        assert!((reach_gain_ase(0.0).unwrap() - 1.26).abs() < 0.005);
        assert_relative_eq!(reach_gain_ase(1.0).unwrap(), 2f64.sqrt(), max_relative = 1e-15);
        assert!((reach_gain_ase(0.108).unwrap() - 1.28).abs() < 0.005);
        assert!(xi_ase_opt(1, 0.1).is_err());
    }

    #[test]
    fn xi_ase_opt_is_the_minimum_over_splits() {
        for eps in [0.0, 0.108, 0.3] {
            for n in 2..=300u32 {
                let brute = (0..=n).map(|x| xi_ase(n, x, eps).unwrap()).fold(f64::INFINITY, f64::min);
                let opt = xi_ase_opt(n, eps).unwrap();
                assert_relative_eq!(opt, brute, max_relative = 1e-12);
            }
        }
    }
}
