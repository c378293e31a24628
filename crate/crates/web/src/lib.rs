//! Browser bindings for the analytic model. Every export returns a JSON
//! string so the page needs no generated type glue beyond `wasm-bindgen`.

use serde::Serialize;
use splitnlc::analytic::{
    reach_gain_trx, snr_at_optimum, LinkParams, ReachGainFormula, Scheme, TrxParams,
};
use splitnlc::units::db;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Curve {
    label: String,
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Serialize)]
struct Plot {
    x_label: &'static str,
    y_label: &'static str,
    curves: Vec<Curve>,
}

fn to_json(plot: &Plot) -> String {
    serde_json::to_string(plot).expect("plain numbers serialize")
}

fn error_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

fn trx(snr_trx_db: f64, kappa_r: f64) -> Result<TrxParams, String> {
    TrxParams::from_db(snr_trx_db, kappa_r).map_err(|e| e.to_string())
}

/// Optimum-power SNR against span count for EDC, DBP, DPC and the best split.
#[wasm_bindgen]
pub fn snr_vs_spans(kappa_r: f64, snr_trx_db: f64, n_max: u32) -> String {
    let trx = match trx(snr_trx_db, kappa_r) {
        Ok(t) => t,
        Err(e) => return error_json(e),
    };
    let n_max = n_max.clamp(1, 500);
    let mut curves = Vec::new();
    for scheme in [Scheme::Edc, Scheme::Dbp, Scheme::Dpc, Scheme::OptimalSplit] {
        let mut curve = Curve { label: scheme.name(), x: Vec::new(), y: Vec::new() };
        for n in 1..=n_max {
            if let Ok(opt) = snr_at_optimum(&LinkParams::reference(n), &trx, scheme) {
                curve.x.push(f64::from(n));
                curve.y.push(db(opt.snr));
            }
        }
        curves.push(curve);
    }
    to_json(&Plot { x_label: "spans", y_label: "SNR [dB]", curves })
}

/// SNR gain over DBP as the compensation moves from receiver to transmitter.
#[wasm_bindgen]
pub fn gain_vs_split(kappa_r: f64, snr_trx_db: f64, spans: u32) -> String {
    let trx = match trx(snr_trx_db, kappa_r) {
        Ok(t) => t,
        Err(e) => return error_json(e),
    };
    let n = spans.clamp(1, 500);
    let link = LinkParams::reference(n);
    let dbp = match snr_at_optimum(&link, &trx, Scheme::Dbp) {
        Ok(o) => o.snr,
        Err(e) => return error_json(e),
    };
    let mut curve = Curve { label: format!("N = {n}"), x: Vec::new(), y: Vec::new() };
    for x in 0..=n {
        if let Ok(o) = snr_at_optimum(&link, &trx, Scheme::Split(x)) {
            curve.x.push(f64::from(x) / f64::from(n));
            curve.y.push(db(o.snr / dbp));
        }
    }
    to_json(&Plot { x_label: "X / N", y_label: "gain over DBP [dB]", curves: vec![curve] })
}

/// Reach gain of the best split over DBP against the coherence factor.
#[wasm_bindgen]
pub fn reach_gain_curve(kappa_r: f64) -> String {
    let mut curve = Curve { label: format!("κ_R = {kappa_r:.2}"), x: Vec::new(), y: Vec::new() };
    for i in 0..100 {
        let eps = 10f64.powf(-2.0 + 2.0 * f64::from(i) / 99.0);
        match reach_gain_trx(kappa_r, eps, ReachGainFormula::Exact) {
            Ok(g) => {
                curve.x.push(eps);
                curve.y.push(g);
            }
            Err(e) => return error_json(e),
        }
    }
    to_json(&Plot { x_label: "ε", y_label: "reach gain", curves: vec![curve] })
}
