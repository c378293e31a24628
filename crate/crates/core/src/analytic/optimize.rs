//! Launch-power optimization and exhaustive split search.

use super::model::{LinkParams, NlcPlan, Scheme, SnrModel, SnrProfile, TrxParams};
use super::{AnalyticError, Result};
use crate::units::{dbm_to_watt, watt_to_dbm};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Coarse log-spaced grid followed by golden-section refinement in dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchPowerSearch {
    pub min_dbm: f64,
    pub max_dbm: f64,
    pub step_db: f64,
    /// Refinement stops once the bracket is narrower than this, dB.
    pub tolerance_db: f64,
    /// How far the grid may be widened when the maximum sits on an edge, dB.
    pub max_extension_db: f64,
}

impl Default for LaunchPowerSearch {
    fn default() -> Self {
        Self { min_dbm: -20.0, max_dbm: 10.0, step_db: 0.1, tolerance_db: 1e-4, max_extension_db: 40.0 }
    }
}

impl LaunchPowerSearch {
    /// Maximizes `f` over launch power in watts; returns `(P_opt, f(P_opt))`.
    pub fn maximize(&self, f: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
        let g = |dbm: f64| f(dbm_to_watt(dbm));
        let (mut lo, mut hi) = (self.min_dbm, self.max_dbm);
        loop {
            let steps = ((hi - lo) / self.step_db).round() as usize;
            let grid: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * self.step_db).collect();
            let values: Vec<f64> = grid.iter().map(|&p| g(p)).collect();
            let (best, _) = values
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            let maxima = count_local_maxima(&values);
            if maxima > 1 {
                return Err(AnalyticError::NotUnimodal { maxima });
            }
            if best == 0 || best == steps {
                let edge = grid[best];
                let widened = (self.min_dbm - lo).max(hi - self.max_dbm);
                if widened >= self.max_extension_db {
                    return Err(AnalyticError::OptimumOutOfRange { edge_dbm: edge });
                }
                if best == 0 {
                    lo -= 10.0;
                } else {
                    hi += 10.0;
                }
                continue;
            }
            let (a, b) = golden_section(&g, grid[best - 1], grid[best + 1], self.tolerance_db);
            let p = 0.5 * (a + b);
            let pw = dbm_to_watt(p);
            return Ok((pw, f(pw)));
        }
    }
}

fn count_local_maxima(values: &[f64]) -> usize {
    if values.len() < 3 {
        return 1;
    }
    // Interior strict maxima; plateaus of equal values are treated as one.
    let mut count = 0;
    let mut rising = values[1] > values[0];
    for w in values.windows(2).skip(1) {
        if w[1] > w[0] {
            rising = true;
        } else if w[1] < w[0] {
            if rising {
                count += 1;
            }
            rising = false;
        }
    }
    count.max(1)
}

/// Bracket `[a, b]` around the maximum of a unimodal `g`.
fn golden_section(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while (b - a).abs() > tol {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - GOLDEN * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + GOLDEN * (b - a);
            gd = g(d);
        }
    }
    (a, b)
}

/// A scheme evaluated at its optimum launch power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub power_w: f64,
    pub snr: f64,
    /// The split used; `None` for EDC.
    pub plan: Option<NlcPlan>,
}

impl Optimum {
    pub fn power_dbm(&self) -> f64 {
        watt_to_dbm(self.power_w)
    }
}

fn profile_for(link: &LinkParams, trx: &TrxParams, plan: Option<NlcPlan>, model: SnrModel) -> Result<SnrProfile> {
    match plan {
        Some(plan) => SnrProfile::nlc(link, trx, plan, model),
        None => SnrProfile::edc(link, trx, model),
    }
}

fn optimum_of(link: &LinkParams, trx: &TrxParams, plan: Option<NlcPlan>, model: SnrModel, search: &LaunchPowerSearch) -> Result<Optimum> {
    let profile = profile_for(link, trx, plan, model)?;
    optimum_of_profile(&profile, plan, search)
}

fn optimum_of_profile(profile: &SnrProfile, plan: Option<NlcPlan>, search: &LaunchPowerSearch) -> Result<Optimum> {
    let (power_w, snr) = search.maximize(|p| profile.snr(p))?;
    Ok(Optimum { power_w, snr, plan })
}

/// Per-split profiles for an N-span link; ξ_ASE comes from one prefix sum.
fn split_profiles(link: &LinkParams, trx: &TrxParams, model: SnrModel) -> impl Iterator<Item = (NlcPlan, SnrProfile)> {
    let n = link.num_spans;
    let e = 1.0 + link.epsilon;
    let mut prefix = Vec::with_capacity(n as usize + 1);
    prefix.push(0.0);
    for i in 1..=n {
        prefix.push(prefix[i as usize - 1] + f64::from(i).powf(e));
    }
    let kappa = trx.kappa();
    let trx = *trx;
    let (eta, p_ase) = (link.eta, link.p_ase);
    (0..=n).map(move |x| {
        let xt = (1.0 - trx.kappa_r) * f64::from(x).powf(e) + trx.kappa_r * f64::from(n - x).powf(e);
        let xa = prefix[x.saturating_sub(1) as usize] + prefix[(n - x) as usize];
        let profile = SnrProfile::from_factors_continuous(f64::from(n), eta, p_ase, kappa, xt, xa, 0.0, model);
        (NlcPlan { x_tx_spans: x }, profile)
    })
}

/// Launch power maximizing the scheme's SNR under the full model.
pub fn optimal_launch_power(link: &LinkParams, trx: &TrxParams, scheme: Scheme) -> Result<f64> {
    Ok(snr_at_optimum(link, trx, scheme)?.power_w)
}

pub fn snr_at_optimum(link: &LinkParams, trx: &TrxParams, scheme: Scheme) -> Result<Optimum> {
    snr_at_optimum_with(link, trx, scheme, SnrModel::Full, &LaunchPowerSearch::default())
}

pub fn snr_at_optimum_with(
    link: &LinkParams,
    trx: &TrxParams,
    scheme: Scheme,
    model: SnrModel,
    search: &LaunchPowerSearch,
) -> Result<Optimum> {
    link.validate()?;
    trx.validate()?;
    match scheme {
        Scheme::Edc => optimum_of(link, trx, None, model, search),
        Scheme::OptimalSplit => best_split(link, trx, model, search),
        fixed => optimum_of(link, trx, fixed.fixed_plan(link.num_spans), model, search),
    }
}

/// Optimum for every X in `0..=N`, in order of X.
pub fn split_sweep(link: &LinkParams, trx: &TrxParams, model: SnrModel, search: &LaunchPowerSearch) -> Result<Vec<Optimum>> {
    link.validate()?;
    trx.validate()?;
    split_profiles(link, trx, model)
        .map(|(plan, profile)| optimum_of_profile(&profile, Some(plan), search))
        .collect()
}

fn best_split(link: &LinkParams, trx: &TrxParams, model: SnrModel, search: &LaunchPowerSearch) -> Result<Optimum> {
    let mut best: Option<Optimum> = None;
    for (plan, profile) in split_profiles(link, trx, model) {
        let candidate = optimum_of_profile(&profile, Some(plan), search)?;
        // Ties go to the smaller X.
        let better = match &best {
            None => true,
            Some(b) => candidate.snr > b.snr * (1.0 + 1e-12),
        };
        if better {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least X = 0 is evaluated"))
}

/// Integer split with the highest optimum-power SNR under the full model.
pub fn optimal_split_bruteforce(link: &LinkParams, trx: &TrxParams) -> Result<NlcPlan> {
    optimal_split_bruteforce_with(link, trx, SnrModel::Full)
}

pub fn optimal_split_bruteforce_with(link: &LinkParams, trx: &TrxParams, model: SnrModel) -> Result<NlcPlan> {
    let opt = snr_at_optimum_with(link, trx, Scheme::OptimalSplit, model, &LaunchPowerSearch::default())?;
    Ok(opt.plan.expect("split search always yields a plan"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{snr_edc_ideal, xi_ase, xi_trx};
    use crate::units::db;
    use approx::assert_relative_eq;

    fn power_close_db(a: f64, b: f64, tol_db: f64) {
        let d = (db(a) - db(b)).abs();
        assert!(d < tol_db, "{a} vs {b}: {d} dB apart");
    }

    #[test]
    fn ase_regime_closed_form_optimum() {
        // κ = 0 with ASE beating only: P_opt = sqrt(N / (3η ξ_ASE)).
        let link = LinkParams::reference(25);
        let trx = TrxParams::noiseless(0.5);
        let plan = NlcPlan::half(25);
        let opt = snr_at_optimum_with(&link, &trx, Scheme::HalfSplit, SnrModel::AseBeating, &LaunchPowerSearch::default()).unwrap();
        let xa = xi_ase(25, plan.x_tx_spans, link.epsilon).unwrap();
        let expected = (25.0 / (3.0 * link.eta * xa)).sqrt();
        power_close_db(opt.power_w, expected, 0.01);
    }

    #[test]
    fn edc_closed_form_optimum() {
        for n in [1, 10, 100] {
            let link = LinkParams::reference(n);
            let trx = TrxParams::noiseless(0.5);
            let nf = f64::from(n);
            // Signal-signal term only.
            let profile = SnrProfile { linear: 0.0, ase: nf * link.p_ase, quadratic: 0.0, cubic: link.eta * nf.powf(1.0 + link.epsilon) };
            let (p, snr) = LaunchPowerSearch::default().maximize(|p| profile.snr(p)).unwrap();
            let expected = (nf * link.p_ase / (2.0 * link.eta * nf.powf(1.0 + link.epsilon))).cbrt();
            power_close_db(p, expected, 0.01);
            assert!((db(snr) - db(snr_edc_ideal(&link))).abs() < 0.01);
            let _ = trx;
        }
    }

    #[test]
    fn trx_regime_closed_form_optimum() {
        let link = LinkParams::reference(12);
        let trx = TrxParams::from_db(26.0, 0.8).unwrap();
        let plan = NlcPlan { x_tx_spans: 7 };
        let profile = SnrProfile::nlc(&link, &trx, plan, SnrModel::TrxBeating).unwrap();
        let (p, _) = LaunchPowerSearch::default().maximize(|p| profile.snr(p)).unwrap();
        let xt = xi_trx(12, 7, 0.8, link.epsilon).unwrap();
        let expected = (12.0 * link.p_ase / (6.0 * link.eta * trx.kappa() * xt)).cbrt();
        power_close_db(p, expected, 0.01);
    }

    #[test]
    fn argmax_ignores_linear_trx_term() {
        let trx = TrxParams::from_db(26.0, 0.8).unwrap();
        for n in [3, 17, 60] {
            let link = LinkParams::reference(n);
            for plan in [NlcPlan::dbp(), NlcPlan::half(n), NlcPlan::dpc(n)] {
                let full = SnrProfile::nlc(&link, &trx, plan, SnrModel::Full).unwrap();
                let (p1, _) = LaunchPowerSearch::default().maximize(|p| full.snr(p)).unwrap();
                let bare = full.without_linear();
                let (p2, _) = LaunchPowerSearch::default().maximize(|p| bare.snr(p)).unwrap();
                power_close_db(p1, p2, 0.01);
            }
        }
    }

    #[test]
    fn trx_noise_strictly_lowers_optimum() {
        let link = LinkParams::reference(20);
        for scheme in [Scheme::Edc, Scheme::Dbp, Scheme::HalfSplit, Scheme::OptimalSplit] {
            let clean = snr_at_optimum(&link, &TrxParams::noiseless(0.5), scheme).unwrap();
            let noisy = snr_at_optimum(&link, &TrxParams::from_db(26.0, 0.5).unwrap(), scheme).unwrap();
            assert!(noisy.snr < clean.snr, "{scheme:?}");
        }
    }

    #[test]
    fn scheme_ordering_at_34_spans() {
        let link = LinkParams::reference(34);
        let trx = TrxParams::from_db(26.0, 0.5).unwrap();
        let split = snr_at_optimum(&link, &trx, Scheme::HalfSplit).unwrap().snr;
        let dbp = snr_at_optimum(&link, &trx, Scheme::Dbp).unwrap().snr;
        let edc = snr_at_optimum(&link, &trx, Scheme::Edc).unwrap().snr;
        assert!(split >= dbp && dbp >= edc, "{split} {dbp} {edc}");
    }

    #[test]
    fn symmetric_trx_split_prefers_middle_without_ase_beating() {
        let trx = TrxParams::from_db(26.0, 0.5).unwrap();
        for n in [8, 20, 41] {
            let link = LinkParams::reference(n);
            let plan = optimal_split_bruteforce_with(&link, &trx, SnrModel::TrxBeating).unwrap();
            assert!((i64::from(plan.x_tx_spans) - i64::from(n) / 2).abs() <= 1, "{n}: {plan:?}");
        }
    }

    #[test]
    fn dpc_is_optimal_in_trx_regime_for_receiver_heavy_noise() {
        let trx = TrxParams::from_db(26.0, 0.8).unwrap();
        for n in [2, 5, 8] {
            let link = LinkParams::reference(n);
            assert_eq!(optimal_split_bruteforce(&link, &trx).unwrap(), NlcPlan::dpc(n));
        }
    }

    #[test]
    fn split_ratio_at_34_spans() {
        let link = LinkParams::reference(34);
        let trx = TrxParams::from_db(26.0, 0.8).unwrap();
        let plan = optimal_split_bruteforce(&link, &trx).unwrap();
        let ratio = f64::from(plan.x_tx_spans) / 34.0;
        assert!((ratio - 0.73).abs() <= 0.03, "{ratio}");
    }

    #[test]
    fn brute_force_ties_go_to_smaller_x() {
        // ε = 0, κ_R = 1/2 and no ASE beating: ξ_TRX = N/2 for every X.
        let link = LinkParams::new(6, 80.0, 400.0, 0.0, 4e-7).unwrap();
        let trx = TrxParams::from_db(26.0, 0.5).unwrap();
        let plan = optimal_split_bruteforce_with(&link, &trx, SnrModel::TrxBeating).unwrap();
        assert_eq!(plan, NlcPlan::dbp());
    }

    #[test]
    fn monotone_profile_is_out_of_range() {
        let link = LinkParams::new(6, 80.0, 1e-30, 0.0, 4e-7).unwrap();
        let trx = TrxParams::noiseless(0.5);
        let profile = SnrProfile::nlc(&link, &trx, NlcPlan::dbp(), SnrModel::Full).unwrap();
        let res = LaunchPowerSearch::default().maximize(|p| profile.snr(p));
        assert!(matches!(res, Err(AnalyticError::OptimumOutOfRange { .. })));
    }

    #[test]
    fn grid_widens_when_optimum_is_off_grid() {
        // Optimum near +15 dBm.
        let p_target: f64 = dbm_to_watt(15.0);
        let profile = SnrProfile { linear: 0.0, ase: 2.0 * p_target.powi(3), quadratic: 0.0, cubic: 1.0 };
        let (p, _) = LaunchPowerSearch::default().maximize(|p| profile.snr(p)).unwrap();
        assert!((watt_to_dbm(p) - 15.0).abs() < 0.01);
    }

    #[test]
    fn bimodal_profile_is_reported() {
        let f = |p: f64| {
            let x = watt_to_dbm(p);
            (-(x + 10.0).powi(2)).exp() + (-(x - 5.0).powi(2)).exp()
        };
        assert!(matches!(LaunchPowerSearch::default().maximize(f), Err(AnalyticError::NotUnimodal { maxima: 2 })));
    }

    #[test]
    fn sweep_covers_every_split() {
        let link = LinkParams::reference(9);
        let trx = TrxParams::from_db(26.0, 0.5).unwrap();
        let sweep = split_sweep(&link, &trx, SnrModel::Full, &LaunchPowerSearch::default()).unwrap();
        assert_eq!(sweep.len(), 10);
        let best = snr_at_optimum(&link, &trx, Scheme::OptimalSplit).unwrap();
        let max = sweep.iter().map(|o| o.snr).fold(0.0, f64::max);
        assert_relative_eq!(best.snr, max, max_relative = 1e-9);
    }
}
