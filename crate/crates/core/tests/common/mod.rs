//! Property checks shared by the randomized suite and the acceptance run.
#![allow(dead_code)]

use splitnlc::analytic::*;
use splitnlc::dsp::{
    add_awgn, generate_frame, matched_filter_demux, mi_awgn, qam_constellation, shape_and_mux, snr_estimate,
    generate_frame_stream,
};
use splitnlc::fiber::{run_split_nlc_chain, AmpParams, ChainConfig, SsfConfig};
use splitnlc::units::{db, dbm_to_watt, from_db};

pub type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn reference_trx(kappa_r: f64) -> TrxParams {
    TrxParams::from_db(26.0, kappa_r).unwrap()
}

/// Swapping the noise shares and mirroring the split leaves the
/// TRX-beating SNR unchanged; with ASE beating it holds where ξ_ASE is
/// mirror-symmetric, i.e. at X = N/2.
pub fn symmetry(n: u32, x: u32, kappa_r: f64, p_dbm: f64) -> Check {
    let link = LinkParams::reference(n);
    let p = dbm_to_watt(p_dbm);
    let a = SnrProfile::nlc(&link, &reference_trx(kappa_r), NlcPlan { x_tx_spans: x }, SnrModel::TrxBeating).unwrap();
    let b = SnrProfile::nlc(&link, &reference_trx(1.0 - kappa_r), NlcPlan { x_tx_spans: n - x }, SnrModel::TrxBeating).unwrap();
    ensure!((a.snr(p) / b.snr(p) - 1.0).abs() < 1e-12, "N={n} X={x} κ_R={kappa_r}: {} vs {}", a.snr(p), b.snr(p));
    if n % 2 == 0 {
        let h = n / 2;
        let a = snr_nlc(p, &link, &reference_trx(kappa_r), NlcPlan { x_tx_spans: h }).unwrap();
        let b = snr_nlc(p, &link, &reference_trx(1.0 - kappa_r), NlcPlan { x_tx_spans: h }).unwrap();
        ensure!((a / b - 1.0).abs() < 1e-12, "full model at N/2: {a} vs {b}");
    }
    Ok(())
}

/// Closed-form split against brute force on the TRX-beating model.
pub fn closed_form_split(n: u32, kappa_r: f64, epsilon: f64) -> Check {
    let link = LinkParams { epsilon, ..LinkParams::reference(n) };
    let trx = reference_trx(kappa_r);
    let closed = optimal_split_trx_closed(n, kappa_r, epsilon).unwrap().x_tx_spans;
    let brute = optimal_split_bruteforce_with(&link, &trx, SnrModel::TrxBeating).unwrap().x_tx_spans;
    ensure!(closed.abs_diff(brute) <= 1, "N={n} κ_R={kappa_r} ε={epsilon}: closed {closed}, brute {brute}");
    Ok(())
}

pub fn xi_ase_opt_is_min(n: u32, epsilon: f64) -> Check {
    let min = (0..=n).map(|x| xi_ase(n, x, epsilon).unwrap()).fold(f64::INFINITY, f64::min);
    let opt = xi_ase_opt(n, epsilon).unwrap();
    ensure!((opt / min - 1.0).abs() < 1e-12, "N={n}: {opt} vs {min}");
    Ok(())
}

/// The exact reach gain is the continuous span ratio at equal optimum SNR
/// of the TRX-beating model.
pub fn reach_gain_is_equal_snr_ratio(kappa_r: f64, epsilon: f64, n: u32) -> Check {
    let g = reach_gain_trx(kappa_r, epsilon, ReachGainFormula::Exact).unwrap();
    ensure!(g >= 1.0, "gain {g} below 1");
    let link = LinkParams { epsilon, ..LinkParams::reference(n) };
    let trx = reference_trx(kappa_r);
    let search = LaunchPowerSearch::default();
    let best = |profile: SnrProfile| search.maximize(|p| profile.snr(p)).unwrap().1;
    let target = best(SnrProfile::nlc(&link, &trx, NlcPlan::dbp(), SnrModel::TrxBeating).unwrap());
    let at = |m: f64| {
        let xi = xi_trx_opt(1, kappa_r, epsilon).unwrap() * m.powf(1.0 + epsilon);
        best(SnrProfile::from_factors_continuous(m, link.eta, link.p_ase, trx.kappa(), xi, 0.0, 0.0, SnrModel::TrxBeating))
    };
    let (mut lo, mut hi) = (f64::from(n), f64::from(n) * 10.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ratio = lo / f64::from(n);
    ensure!((ratio / g - 1.0).abs() < 0.005, "κ_R={kappa_r} ε={epsilon}: ratio {ratio} vs formula {g}");
    Ok(())
}

/// The linear TRX term scales SNR but does not move its argmax.
pub fn argmax_invariance(n: u32, kappa_r: f64, scheme: Scheme) -> Check {
    let link = LinkParams::reference(n);
    let trx = reference_trx(kappa_r);
    let search = LaunchPowerSearch::default();
    let plan = match scheme.fixed_plan(n) {
        Some(p) => Some(p),
        None if scheme == Scheme::Edc => None,
        None => snr_at_optimum(&link, &trx, scheme).unwrap().plan,
    };
    let profile = match plan {
        Some(p) => SnrProfile::nlc(&link, &trx, p, SnrModel::Full).unwrap(),
        None => SnrProfile::edc(&link, &trx, SnrModel::Full).unwrap(),
    };
    let with = search.maximize(|p| profile.snr(p)).unwrap().0;
    let without = search.maximize(|p| profile.without_linear().snr(p)).unwrap().0;
    ensure!(db(with / without).abs() < 0.01, "{scheme:?} N={n}: {} vs {} dB", db(with), db(without));
    Ok(())
}

pub fn monotone_in_spans(scheme: Scheme, kappa_r: f64, n_max: u32) -> Check {
    let trx = reference_trx(kappa_r);
    let mut prev = f64::INFINITY;
    for n in 1..=n_max {
        let s = snr_at_optimum(&LinkParams::reference(n), &trx, scheme).unwrap().snr;
        ensure!(s <= prev * (1.0 + 1e-12), "{scheme:?}: SNR rises from N={} to {n}", n - 1);
        prev = s;
    }
    Ok(())
}

/// Closed-form ideal EDC SNR against numerical optimization.
pub fn edc_ideal_matches_optimizer(n: u32) -> Check {
    let link = LinkParams::reference(n);
    let nf = f64::from(n);
    let profile = SnrProfile { linear: 0.0, ase: nf * link.p_ase, quadratic: 0.0, cubic: link.eta * nf.powf(1.0 + link.epsilon) };
    let (_, best) = LaunchPowerSearch::default().maximize(|p| profile.snr(p)).unwrap();
    let closed = snr_edc_ideal(&link);
    ensure!((db(best) - db(closed)).abs() < 0.01, "N={n}: {} vs {}", db(best), db(closed));
    Ok(())
}

pub fn crossover_between_bounds(kappa_r: f64) -> Check {
    let trx = reference_trx(kappa_r);
    let r = classify_regime(&LinkParams::reference(58), &trx, &RegimeConfig { threshold_db: 0.0, ..Default::default() }).unwrap();
    let gap = r.trx_margin_db + r.ase_margin_db;
    let m = kappa_r.min(1.0 - kappa_r);
    let mx = kappa_r.max(1.0 - kappa_r);
    let expected = 2.0 / 3.0 * (db(1.0 / mx) - db(1.0 / m)) - 3.0;
    ensure!((gap - expected).abs() < 1e-9, "bound gap {gap} vs {expected}");
    let at = |n: f64| {
        let l = LinkParams::reference(n.round() as u32);
        classify_regime(&l, &trx, &RegimeConfig::default()).unwrap()
    };
    let c = r.crossover_continuous;
    ensure!(at(c).trx_margin_db.abs() < 0.2, "TRX margin at the crossover should vanish");
    ensure!(at(c).ase_margin_db <= 0.0, "crossover beyond the ASE bound");
    Ok(())
}

/// MI is nondecreasing in SNR up to two standard errors and obeys its upper bounds.
pub fn mi_monotone_and_bounded(order: usize, samples: usize, seed: u64) -> Check {
    let c = qam_constellation(order).unwrap();
    let log2m = (order as f64).log2();
    let mut prev: Option<(f64, f64)> = None;
    let mut violations = 0;
    for s_db in (0..=30).step_by(2) {
        let snr = from_db(f64::from(s_db));
        let e = mi_awgn(&c, snr, samples, seed + u64::from(s_db as u32));
        ensure!(e.mi <= log2m.min((1.0 + snr).log2()) + 3.0 * e.std_error + 1e-12, "{s_db} dB: MI {} above bound", e.mi);
        if let Some((m, se)) = prev {
            if e.mi < m - 2.0 * (se * se + e.std_error * e.std_error).sqrt() {
                violations += 1;
            }
        }
        prev = Some((e.mi, e.std_error));
    }
    ensure!(violations <= 2, "{violations} monotonicity violations");
    Ok(())
}

/// Symbol-level SNR estimate within three statistical standard deviations.
pub fn estimator_consistency(n: usize, level_db: f64, seed: u64) -> Check {
    let f = generate_frame(seed, n, &qam_constellation(64).unwrap(), 32e9);
    let rx = add_awgn(&f, from_db(level_db), seed);
    let s = snr_estimate(&f, &rx).unwrap();
    let rel_std = 1.0 / ((2 * n) as f64).sqrt();
    ensure!((s / from_db(level_db) - 1.0).abs() < 3.0 * rel_std, "n={n} {level_db} dB: {}", db(s));
    Ok(())
}

pub fn mux_unitarity(n_ch: usize, n_sym: usize, seed: u64) -> Check {
    let c = qam_constellation(16).unwrap();
    let frames: Vec<_> = (0..n_ch).map(|i| generate_frame_stream(seed, i as u64, n_sym, &c, 32e9)).collect();
    let w = shape_and_mux(&frames, 32e9, 3.0).unwrap();
    let sum: f64 = frames.iter().map(|f| 2.0 * f.mean_power()).sum();
    ensure!((w.total_power() / sum - 1.0).abs() < 1e-10, "power {} vs {sum}", w.total_power());
    for (i, f) in frames.iter().enumerate() {
        let rx = matched_filter_demux(&w, i).unwrap();
        let err: f64 = f.pol_x.iter().zip(&rx.pol_x).map(|(a, b)| (a - b).norm_sqr()).sum();
        ensure!(err < 1e-18 * n_sym as f64, "channel {i} differs by {err}");
    }
    Ok(())
}

/// Balanced noise with noiseless amplifiers: X and N−X give statistically
/// equal simulated SNR.
pub fn chain_split_symmetry(n: u32, x: u32) -> Check {
    let mut cfg = ChainConfig::reference(n, dbm_to_watt(6.0), reference_trx(0.5));
    cfg.amp = AmpParams::noiseless();
    cfg.n_symbols = 1 << 12;
    cfg.ssf = SsfConfig::new(20);
    let snr = |x: u32| {
        let out = run_split_nlc_chain(&cfg, NlcPlan { x_tx_spans: x }).unwrap();
        db(snr_estimate(&out.tx, &out.rx).unwrap())
    };
    let (a, b) = (snr(x), snr(n - x));
    // Each estimate has a relative spread of 1/sqrt(2·symbols).
    let sigma_db = 10.0 / std::f64::consts::LN_10 * (2.0 / (2.0 * cfg.n_symbols as f64)).sqrt();
    ensure!((a - b).abs() < std::f64::consts::SQRT_2 * sigma_db, "X={x}: {a:.3} dB vs N−X: {b:.3} dB");
    Ok(())
}

pub fn chain_seed_determinism() -> Check {
    let mut cfg = ChainConfig::reference(2, dbm_to_watt(3.0), reference_trx(0.8));
    cfg.n_symbols = 256;
    cfg.ssf = SsfConfig::new(4);
    let a = run_split_nlc_chain(&cfg, NlcPlan { x_tx_spans: 1 }).unwrap();
    let b = run_split_nlc_chain(&cfg, NlcPlan { x_tx_spans: 1 }).unwrap();
    ensure!(a.rx == b.rx, "rx frames differ between identical runs");
    Ok(())
}
