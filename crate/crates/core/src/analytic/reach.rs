//! Maximum reach at a target SNR.

use super::model::{LinkParams, Scheme, SnrModel, TrxParams};
use super::optimize::{snr_at_optimum_with, LaunchPowerSearch};
use super::{AnalyticError, Result};
use crate::units::db;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachConfig {
    /// Search cap on the span count.
    pub n_max: u32,
    pub model: SnrModel,
}

impl Default for ReachConfig {
    fn default() -> Self {
        Self { n_max: 2000, model: SnrModel::Full }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reach {
    /// Largest integer span count meeting the target.
    pub spans: u32,
    /// Crossing point interpolated linearly in SNR[dB] between integer span counts.
    pub continuous: f64,
    /// The cap was hit before the SNR fell below target.
    pub saturated: bool,
}

pub fn max_reach(
    link_template: &LinkParams,
    trx: &TrxParams,
    scheme: Scheme,
    target_snr: f64,
    cfg: &ReachConfig,
) -> Result<Reach> {
    if !(target_snr >= 0.0) {
        return Err(AnalyticError::Domain(format!("target SNR must be non-negative, got {target_snr}")));
    }
    let search = LaunchPowerSearch::default();
    let at = |n: u32| snr_at_optimum_with(&link_template.with_spans(n), trx, scheme, cfg.model, &search).map(|o| o.snr);
    let target_db = db(target_snr);
    let mut prev = at(1)?;
    if prev < target_snr {
        return Err(AnalyticError::TargetUnreachable { target_db, best_db: db(prev) });
    }
    for n in 2..=cfg.n_max {
        let cur = at(n)?;
        if cur < target_snr {
            let (a, b) = (db(prev), db(cur));
            let frac = if a > b { (a - target_db) / (a - b) } else { 0.0 };
            return Ok(Reach { spans: n - 1, continuous: f64::from(n - 1) + frac, saturated: false });
        }
        prev = cur;
    }
    Ok(Reach { spans: cfg.n_max, continuous: f64::from(cfg.n_max), saturated: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::snr_at_optimum;

    #[test]
    fn tiny_target_saturates_at_cap() {
        let link = LinkParams::reference(1);
        let trx = TrxParams::from_db(26.0, 0.5).unwrap();
        let r = max_reach(&link, &trx, Scheme::Dbp, 1e-6, &ReachConfig { n_max: 50, ..Default::default() }).unwrap();
        assert!(r.saturated);
        assert_eq!(r.spans, 50);
    }

    #[test]
    fn unreachable_target_reports_best() {
        let link = LinkParams::reference(1);
        let trx = TrxParams::from_db(26.0, 0.5).unwrap();
        let err = max_reach(&link, &trx, Scheme::Dbp, 1e4, &ReachConfig::default()).unwrap_err();
        match err {
            AnalyticError::TargetUnreachable { best_db, .. } => assert!(best_db < 26.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reach_at_own_snr_is_own_span_count() {
        let link = LinkParams::reference(1);
        let trx = TrxParams::from_db(26.0, 0.5).unwrap();
        let target = snr_at_optimum(&link.with_spans(12), &trx, Scheme::Dbp).unwrap().snr;
        let r = max_reach(&link, &trx, Scheme::Dbp, target, &ReachConfig::default()).unwrap();
        assert_eq!(r.spans, 12);
        assert!(r.continuous >= 12.0 && r.continuous < 12.01);
    }

    #[test]
    fn reach_is_monotone_in_target() {
        let link = LinkParams::reference(1);
        let trx = TrxParams::from_db(26.0, 0.8).unwrap();
        let mut last = u32::MAX;
        for t_db in [14.0, 16.0, 18.0, 20.0, 22.0] {
            let r = max_reach(&link, &trx, Scheme::Dpc, crate::units::from_db(t_db), &ReachConfig::default()).unwrap();
            assert!(r.spans <= last);
            last = r.spans;
        }
    }

    #[test]
    fn split_gain_at_72_spans() {
        let link = LinkParams::reference(72);
        let trx = TrxParams::from_db(26.0, 0.5).unwrap();
        let target = snr_at_optimum(&link, &trx, Scheme::Dbp).unwrap().snr;
        let r = max_reach(&link, &trx, Scheme::OptimalSplit, target, &ReachConfig { n_max: 200, ..Default::default() }).unwrap();
        let gain = r.continuous / 72.0;
        assert!((gain - 1.22).abs() < 0.02, "{gain}");
    }
}
