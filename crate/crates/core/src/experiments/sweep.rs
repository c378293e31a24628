use std::time::Instant;

use rayon::prelude::*;

use super::scenario::Scenario;
use super::{ExperimentError, Result};
use crate::analytic::{snr_at_optimum, NlcPlan, Scheme, SnrModel, SnrProfile};
use crate::dsp::{mi_awgn, mi_monte_carlo_with, qam_constellation, snr_estimate, Constellation};
use crate::fiber::{run_edc_chain, run_split_nlc_chain};
use crate::units::{db, dbm_to_watt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowEngine {
    /// Model at a grid power.
    Analytic,
    /// Model at its optimum power.
    AnalyticOpt,
    Simulation,
    /// Parabolic peak of the simulated grid.
    SimulationOpt,
}

impl RowEngine {
    pub fn as_str(self) -> &'static str {
        match self {
            RowEngine::Analytic => "analytic",
            RowEngine::AnalyticOpt => "analytic_opt",
            RowEngine::Simulation => "simulation",
            RowEngine::SimulationOpt => "simulation_opt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [RowEngine::Analytic, RowEngine::AnalyticOpt, RowEngine::Simulation, RowEngine::SimulationOpt]
            .into_iter()
            .find(|e| e.as_str() == s)
    }
}

/// One result line. Missing quantities are NaN.
#[derive(Debug, Clone)]
pub struct Row {
    pub scenario_id: String,
    pub engine: RowEngine,
    pub scheme: String,
    pub n: u32,
    pub x: u32,
    pub p_dbm: f64,
    pub snr_db: f64,
    pub mi_bits: f64,
    pub std_err: f64,
    pub runtime_s: f64,
}

/// NaN fields compare equal to NaN.
impl PartialEq for Row {
    fn eq(&self, o: &Self) -> bool {
        let same = |a: f64, b: f64| a == b || (a.is_nan() && b.is_nan());
        self.scenario_id == o.scenario_id
            && self.engine == o.engine
            && self.scheme == o.scheme
            && (self.n, self.x) == (o.n, o.x)
            && same(self.p_dbm, o.p_dbm)
            && same(self.snr_db, o.snr_db)
            && same(self.mi_bits, o.mi_bits)
            && same(self.std_err, o.std_err)
            && same(self.runtime_s, o.runtime_s)
    }
}

impl Row {
    /// Rounds every float to its stored precision, so a row survives a
    /// save/load cycle unchanged.
    pub fn canonical(mut self) -> Self {
        let r = |v: f64, digits: i32| {
            if v.is_finite() {
                let s = 10f64.powi(digits);
                (v * s).round() / s
            } else {
                v
            }
        };
        self.p_dbm = r(self.p_dbm, 4);
        self.snr_db = r(self.snr_db, 6);
        self.mi_bits = r(self.mi_bits, 6);
        self.std_err = r(self.std_err, 6);
        self.runtime_s = r(self.runtime_s, 3);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub scenario_id: String,
    pub scenario_hash: String,
    pub seed: u64,
    pub rows: Vec<Row>,
    /// Failed grid points, one message each; the matching rows carry NaN.
    pub errors: Vec<String>,
}

impl SweepResult {
    pub fn rows_for<'a>(&'a self, engine: RowEngine, scheme: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.engine == engine && r.scheme == scheme)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker count; machine parallelism when unset.
    pub threads: Option<usize>,
    /// Record wall-clock time per row. Off by default so that output is
    /// reproducible byte for byte.
    pub timing: bool,
}

/// Vertex of the parabola through the grid maximum and its neighbours.
///
/// `points` must be sorted by abscissa. At an edge the three outermost
/// points are used; a non-concave fit falls back to the best point.
pub fn parabolic_peak(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let best = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.1.is_finite())
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
    if points.len() < 3 {
        return Some(*best.1);
    }
    let i = best.0.clamp(1, points.len() - 2);
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    let (x2, y2) = points[i + 1];
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a < 0.0) {
        return Some(*best.1);
    }
    let b = d01 - a * (x0 + x1);
    let c = y0 - a * x0 * x0 - b * x0;
    let xv = -b / (2.0 * a);
    Some((xv, a * xv * xv + b * xv + c))
}

struct Ctx<'a> {
    s: &'a Scenario,
    constellation: Constellation,
    timing: bool,
}

impl Ctx<'_> {
    fn row(&self, engine: RowEngine, scheme: Scheme, n: u32, x: u32, p_dbm: f64, snr_db: f64) -> Row {
        Row {
            scenario_id: self.s.id.clone(),
            engine,
            scheme: scheme.name(),
            n,
            x,
            p_dbm,
            snr_db,
            mi_bits: f64::NAN,
            std_err: f64::NAN,
            runtime_s: 0.0,
        }
    }

    fn finish(&self, mut row: Row, started: Instant) -> Row {
        if self.timing {
            row.runtime_s = started.elapsed().as_secs_f64();
        }
        row.canonical()
    }

    fn with_awgn_mi(&self, mut row: Row) -> Row {
        if self.s.sweep.mi && row.snr_db.is_finite() {
            let est = mi_awgn(&self.constellation, 10f64.powf(row.snr_db / 10.0), self.s.dsp.mi_samples, self.s.seed);
            row.mi_bits = est.mi;
            row.std_err = est.std_error;
        }
        row
    }
}

/// Plan used for a scheme; EDC reports X = 0.
fn plan_for(scheme: Scheme, n: u32, opt_plan: Option<NlcPlan>) -> NlcPlan {
    scheme.fixed_plan(n).or(opt_plan).unwrap_or(NlcPlan::dbp())
}

fn analytic_rows(ctx: &Ctx, n: u32, scheme: Scheme, errors: &mut Vec<String>) -> Vec<Row> {
    let started = Instant::now();
    let link = ctx.s.link_params(n);
    let trx = match ctx.s.trx_params() {
        Ok(t) => t,
        Err(e) => {
            errors.push(format!("analytic {} N={n}: {e}", scheme.name()));
            return Vec::new();
        }
    };
    let opt = match snr_at_optimum(&link, &trx, scheme) {
        Ok(o) => o,
        Err(e) => {
            errors.push(format!("analytic {} N={n}: {e}", scheme.name()));
            return vec![ctx.row(RowEngine::AnalyticOpt, scheme, n, 0, f64::NAN, f64::NAN)];
        }
    };
    let plan = plan_for(scheme, n, opt.plan);
    let mut rows = Vec::new();
    if let Some(grid) = ctx.s.power_grid() {
        let profile = match scheme {
            Scheme::Edc => SnrProfile::edc(&link, &trx, SnrModel::Full),
            _ => SnrProfile::nlc(&link, &trx, plan, SnrModel::Full),
        };
        if let Ok(profile) = profile {
            for p in grid {
                let r = ctx.row(RowEngine::Analytic, scheme, n, plan.x_tx_spans, p, db(profile.snr(dbm_to_watt(p))));
                rows.push(ctx.finish(ctx.with_awgn_mi(r), started));
            }
        }
    }
    let r = ctx.row(RowEngine::AnalyticOpt, scheme, n, plan.x_tx_spans, opt.power_dbm(), db(opt.snr));
    rows.push(ctx.finish(ctx.with_awgn_mi(r), started));
    rows
}

/// Simulated SNR (dB) and MI at one launch power.
fn simulate_point(ctx: &Ctx, n: u32, scheme: Scheme, plan: NlcPlan, p_dbm: f64) -> Result<(f64, f64, f64)> {
    let cfg = ctx.s.chain_config(n, p_dbm)?;
    let out = match scheme {
        Scheme::Edc => run_edc_chain(&cfg)?,
        _ => run_split_nlc_chain(&cfg, plan)?,
    };
    let snr = db(snr_estimate(&out.tx, &out.rx)?);
    if ctx.s.sweep.mi {
        let est = mi_monte_carlo_with(&out.tx, &out.rx, &ctx.constellation, ctx.s.seed, ctx.s.dsp.mi_samples)?;
        Ok((snr, est.mi, est.std_error))
    } else {
        Ok((snr, f64::NAN, f64::NAN))
    }
}

const MAX_GRID_EXTENSIONS: usize = 8;

fn simulation_rows(ctx: &Ctx, n: u32, scheme: Scheme, errors: &mut Vec<String>) -> Vec<Row> {
    let label = format!("simulation {} N={n}", scheme.name());
    let opt = match ctx.s.trx_params().map_err(ExperimentError::from).and_then(|trx| {
        snr_at_optimum(&ctx.s.link_params(n), &trx, scheme).map_err(ExperimentError::from)
    }) {
        Ok(o) => o,
        Err(e) => {
            errors.push(format!("{label}: {e}"));
            return Vec::new();
        }
    };
    let plan = plan_for(scheme, n, opt.plan);
    let p0 = opt.power_dbm();
    let mut points: Vec<(f64, Row)> = Vec::new();
    let run = |p: f64, errors: &mut Vec<String>| -> Row {
        let started = Instant::now();
        let mut row = ctx.row(RowEngine::Simulation, scheme, n, plan.x_tx_spans, p, f64::NAN);
        match simulate_point(ctx, n, scheme, plan, p) {
            Ok((snr, mi, se)) => {
                row.snr_db = snr;
                row.mi_bits = mi;
                row.std_err = se;
            }
            Err(e) => errors.push(format!("{label} P={p:.2} dBm: {e}")),
        }
        ctx.finish(row, started)
    };
    match ctx.s.power_grid() {
        Some(grid) => {
            let (lo, hi) = (grid[0], grid[grid.len() - 1]);
            if lo > p0 - 3.0 || hi < p0 + 3.0 {
                errors.push(format!("{label}: grid [{lo:.2}, {hi:.2}] dBm does not cover the model optimum {p0:.2} ± 3 dB"));
            }
            for p in grid {
                let r = run(p, errors);
                points.push((p, r));
            }
        }
        None => {
            let step = ctx.s.sweep.adaptive_step_db;
            let mut k_lo = -1i32;
            let mut k_hi = 1i32;
            for k in k_lo..=k_hi {
                let p = p0 + f64::from(k) * step;
                let r = run(p, errors);
                points.push((p, r));
            }
            for _ in 0..MAX_GRID_EXTENSIONS {
                let best = points
                    .iter()
                    .enumerate()
                    .filter(|(_, (_, r))| r.snr_db.is_finite())
                    .max_by(|a, b| a.1 .1.snr_db.total_cmp(&b.1 .1.snr_db))
                    .map(|(i, _)| i);
                let k = match best {
                    Some(0) => {
                        k_lo -= 1;
                        k_lo
                    }
                    Some(i) if i == points.len() - 1 => {
                        k_hi += 1;
                        k_hi
                    }
                    _ => break,
                };
                let p = p0 + f64::from(k) * step;
                let r = run(p, errors);
                if k < 0 {
                    points.insert(0, (p, r));
                } else {
                    points.push((p, r));
                }
            }
        }
    }
    let curve: Vec<(f64, f64)> = points.iter().map(|(p, r)| (*p, r.snr_db)).collect();
    let mut rows: Vec<Row> = points.into_iter().map(|(_, r)| r).collect();
    if let Some((p, snr)) = parabolic_peak(&curve) {
        rows.push(ctx.row(RowEngine::SimulationOpt, scheme, n, plan.x_tx_spans, p, snr).canonical());
    }
    rows
}

/// Runs every (span count, scheme) pair of the scenario on the requested
/// engines. Rows come out ordered by span count, scheme, engine and power,
/// independent of scheduling.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<SweepResult> {
    s.validate()?;
    let schemes = s.schemes()?;
    let ctx = Ctx { s, constellation: qam_constellation(s.dsp.qam_order)?, timing: opts.timing };
    let mut tasks = Vec::new();
    for &n in &s.sweep.spans {
        for &scheme in &schemes {
            if s.engine.analytic() {
                tasks.push((n, scheme, false));
            }
            if s.engine.simulation() {
                tasks.push((n, scheme, true));
            }
        }
    }
    let work = || -> Vec<(Vec<Row>, Vec<String>)> {
        tasks
            .par_iter()
            .map(|&(n, scheme, sim)| {
                let mut errors = Vec::new();
                let rows = if sim {
                    simulation_rows(&ctx, n, scheme, &mut errors)
                } else {
                    analytic_rows(&ctx, n, scheme, &mut errors)
                };
                (rows, errors)
            })
            .collect()
    };
    let results = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| ExperimentError::Scenario(format!("worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (r, e) in results {
        rows.extend(r);
        errors.extend(e);
    }
    Ok(SweepResult { scenario_id: s.id.clone(), scenario_hash: s.hash(), seed: s.seed, rows, errors })
}
