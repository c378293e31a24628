//! Regime classification: which of the two signal–noise beatings dominates.

use super::model::{xi_ase, xi_trx, LinkParams, Scheme, TrxParams};
use super::optimize::snr_at_optimum;
use super::{AnalyticError, Result};
use crate::units::{db, from_db};

/// SNR at optimum power with dispersion compensation only and no TRX noise,
/// `(27/4 · P_ASE² · η · N^(3+ε))^(−1/3)`.
pub fn snr_edc_ideal(link: &LinkParams) -> f64 {
    snr_edc_ideal_at(f64::from(link.num_spans), link)
}

fn snr_edc_ideal_at(n: f64, link: &LinkParams) -> f64 {
    1.0 / (27.0 / 4.0 * link.p_ase * link.p_ase * link.eta * n.powf(3.0 + link.epsilon)).cbrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    TrxDominated,
    AseDominated,
    Mixed,
}

/// How regime distances are extrapolated from the crossover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceScaling {
    /// `SNR_EDC,ideal` falls 10 dB per decade of distance (ε ≪ 1).
    #[default]
    SmallCoherence,
    /// The exact `10·(3+ε)/3` dB per decade.
    Exact,
}

impl DistanceScaling {
    fn db_per_decade(&self, epsilon: f64) -> f64 {
        match self {
            DistanceScaling::SmallCoherence => 10.0,
            DistanceScaling::Exact => 10.0 * (3.0 + epsilon) / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeConfig {
    /// Margin standing in for "much larger than", dB.
    pub threshold_db: f64,
    pub scaling: DistanceScaling,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        Self { threshold_db: 10.0, scaling: DistanceScaling::SmallCoherence }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Slack of the TRX-regime inequality; positive when it holds.
    pub trx_margin_db: f64,
    /// Slack of the ASE-regime inequality; positive when it holds.
    pub ase_margin_db: f64,
    /// Smallest span count at which ASE beating catches up with TRX beating.
    pub crossover_spans: u32,
    /// The same crossover before integer rounding.
    pub crossover_continuous: f64,
    /// Span count at which ASE beating leads by `threshold_db`.
    pub ase_dominance_spans: f64,
    pub snr_edc_ideal_db: f64,
}

/// `(2/3)·(SNR_TRX / min[1−κ_R, κ_R])[dB] − 6.5 dB`.
fn trx_regime_bound_db(trx: &TrxParams) -> f64 {
    let m = trx.kappa_r.min(1.0 - trx.kappa_r);
    2.0 / 3.0 * db(trx.snr_trx / m) - 6.5
}

/// `(2/3)·(SNR_TRX / max[1−κ_R, κ_R])[dB] − 9.5 dB`.
fn ase_regime_bound_db(trx: &TrxParams) -> f64 {
    let m = trx.kappa_r.max(1.0 - trx.kappa_r);
    2.0 / 3.0 * db(trx.snr_trx / m) - 9.5
}

fn degenerate(trx: &TrxParams) -> bool {
    trx.kappa_r == 0.0 || trx.kappa_r == 1.0
}

/// TRX beating over ASE beating at the best split and its optimum power, dB.
fn direct_beating_ratio_db(link: &LinkParams, trx: &TrxParams) -> Result<f64> {
    let opt = match snr_at_optimum(link, trx, Scheme::OptimalSplit) {
        Ok(opt) => opt,
        // No beating at all on the quiet side, so SNR grows without bound.
        Err(AnalyticError::OptimumOutOfRange { .. }) => return Ok(f64::NEG_INFINITY),
        Err(e) => return Err(e),
    };
    let plan = opt.plan.expect("split search yields a plan");
    let n = link.num_spans;
    let trx_beat = trx.kappa() * xi_trx(n, plan.x_tx_spans, trx.kappa_r, link.epsilon)? * opt.power_w;
    let ase_beat = xi_ase(n, plan.x_tx_spans, link.epsilon)? * link.p_ase;
    Ok(db(trx_beat / ase_beat))
}

pub fn classify_regime(link: &LinkParams, trx: &TrxParams, cfg: &RegimeConfig) -> Result<RegimeReport> {
    link.validate()?;
    trx.validate()?;
    let lhs = db(snr_edc_ideal(link));
    let report = if degenerate(trx) {
        // The min-form bound is singular; compare the beating terms directly.
        let ratio = direct_beating_ratio_db(link, trx)?;
        let mut crossover = 1;
        for n in 1..=link.num_spans.max(1) {
            if direct_beating_ratio_db(&link.with_spans(n), trx)? <= 0.0 {
                crossover = n;
                break;
            }
            crossover = n + 1;
        }
        RegimeReport {
            regime: Regime::Mixed,
            trx_margin_db: ratio,
            ase_margin_db: -ratio,
            crossover_spans: crossover,
            crossover_continuous: f64::from(crossover),
            ase_dominance_spans: f64::NAN,
            snr_edc_ideal_db: lhs,
        }
    } else {
        let rhs13 = trx_regime_bound_db(trx);
        let rhs18 = ase_regime_bound_db(trx);
        // lhs(N) = lhs(1) − 10·(3+ε)/3·log10 N; solve lhs(N) = rhs13.
        let lhs1 = db(snr_edc_ideal_at(1.0, link));
        let exact_slope = 10.0 * (3.0 + link.epsilon) / 3.0;
        let crossover_continuous = 10f64.powf((lhs1 - rhs13) / exact_slope);
        let crossover_spans = (crossover_continuous.ceil() as u32).max(1);
        let slope = cfg.scaling.db_per_decade(link.epsilon);
        let ase_dominance_spans = crossover_continuous * 10f64.powf(cfg.threshold_db / slope);
        RegimeReport {
            regime: Regime::Mixed,
            trx_margin_db: lhs - rhs13,
            ase_margin_db: rhs18 - lhs,
            crossover_spans,
            crossover_continuous,
            ase_dominance_spans,
            snr_edc_ideal_db: lhs,
        }
    };
    let regime = if report.trx_margin_db >= cfg.threshold_db {
        Regime::TrxDominated
    } else if report.ase_margin_db >= cfg.threshold_db {
        Regime::AseDominated
    } else {
        Regime::Mixed
    };
    Ok(RegimeReport { regime, ..report })
}

/// Transceiver SNR (linear) that moves the beating crossover to `target_spans`.
///
/// With [`DistanceScaling::Exact`] this solves the TRX-regime bound at
/// `target_spans` directly; with [`DistanceScaling::SmallCoherence`] it
/// extrapolates from the current crossover at 10 dB per decade, i.e. 15 dB
/// of transceiver SNR per decade.
pub fn required_snr_trx_for_crossover(
    link: &LinkParams,
    trx: &TrxParams,
    target_spans: f64,
    scaling: DistanceScaling,
) -> Result<f64> {
    if !(target_spans > 0.0) {
        return Err(AnalyticError::Domain(format!("target span count must be positive, got {target_spans}")));
    }
    if degenerate(trx) {
        return Err(AnalyticError::Domain("crossover bound is singular for kappa_r in {0, 1}".into()));
    }
    let report = classify_regime(link, trx, &RegimeConfig { threshold_db: 0.0, scaling })?;
    let m_db = db(trx.kappa_r.min(1.0 - trx.kappa_r));
    let lhs_target = match scaling {
        DistanceScaling::Exact => db(snr_edc_ideal_at(target_spans, link)),
        DistanceScaling::SmallCoherence => {
            let rhs13 = trx_regime_bound_db(trx);
            rhs13 + 10.0 * (report.crossover_continuous / target_spans).log10()
        }
    };
    // (2/3)·(SNR_TRX[dB] − min[dB]) − 6.5 = lhs_target.
    Ok(from_db(1.5 * (lhs_target + 6.5) + m_db))
}
