//! Curve data and gnuplot scripts for the published figures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::scenario::{Engine, Scenario};
use super::store::persist;
use super::sweep::{run_scenario, RowEngine, RunOptions, SweepResult};
use super::{io_err, ExperimentError, Result};
use crate::analytic::{reach_gain_trx, split_sweep, LaunchPowerSearch, ReachGainFormula, SnrModel};
use crate::units::db;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureName {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
}

impl FigureName {
    pub const ALL: [FigureName; 5] = [Self::Fig2, Self::Fig3, Self::Fig4a, Self::Fig4b, Self::Fig5];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4a => "fig4a",
            Self::Fig4b => "fig4b",
            Self::Fig5 => "fig5",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FigureMode {
    #[default]
    Analytic,
    /// Adds simulated markers at up to 40 spans.
    Both,
}

const FIG2_KAPPAS: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95];
const FIG4B_SPANS: [u32; 3] = [16, 34, 120];
const SIM_SPANS: [u32; 4] = [5, 10, 20, 40];
const SIM_MAX_SPANS: u32 = 40;

struct Curve {
    name: String,
    title: String,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

fn write_curve(dir: &Path, fig: FigureName, c: &Curve) -> Result<PathBuf> {
    let mut out = String::new();
    let _ = writeln!(out, "# figure: {}", fig.as_str());
    let _ = writeln!(out, "# curve: {}", c.title);
    let _ = writeln!(out, "# engine: {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "{}", c.columns.join(","));
    for r in &c.rows {
        let cells: Vec<String> = r.iter().map(|v| if v.is_finite() { format!("{v:.6}") } else { format!("{v}") }).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    let path = dir.join(format!("{}.csv", c.name));
    std::fs::write(&path, out).map_err(io_err(&path))?;
    Ok(path)
}

fn write_script(dir: &Path, fig: FigureName, xlabel: &str, ylabel: &str, curves: &[Curve], ycol: usize, logx: bool) -> Result<PathBuf> {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile commentschars '#'");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output '{}.png'", fig.as_str());
    let _ = writeln!(s, "set xlabel '{xlabel}'");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    let _ = writeln!(s, "set grid");
    if logx {
        let _ = writeln!(s, "set logscale x");
    }
    let plots: Vec<String> = curves
        .iter()
        .map(|c| format!("'{}.csv' using 1:{ycol} with lines title '{}'", c.name, c.title))
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    let path = dir.join(format!("{}.gp", fig.as_str()));
    std::fs::write(&path, s).map_err(io_err(&path))?;
    Ok(path)
}

fn spans_or_default(base: &Scenario) -> Vec<u32> {
    if base.sweep.spans.is_empty() {
        (1..=120).collect()
    } else {
        base.sweep.spans.clone()
    }
}

fn analytic_variant(base: &Scenario, id: &str, kappa_r: f64, schemes: &[&str]) -> Scenario {
    let mut s = base.clone();
    s.id = id.into();
    s.engine = Engine::Analytic;
    s.trx.kappa_r = kappa_r;
    s.sweep.spans = spans_or_default(base);
    s.sweep.schemes = schemes.iter().map(|x| x.to_string()).collect();
    s.sweep.power_dbm_min = None;
    s.sweep.power_dbm_max = None;
    s.sweep.power_dbm_step = None;
    s
}

fn scheme_curves(result: &SweepResult, prefix: &str, label: &str, schemes: &[&str], with_mi: bool) -> Vec<Curve> {
    schemes
        .iter()
        .map(|&scheme| {
            let rows = result
                .rows_for(RowEngine::AnalyticOpt, scheme)
                .map(|r| {
                    let mut v = vec![f64::from(r.n), f64::from(r.x), r.p_dbm, r.snr_db];
                    if with_mi {
                        v.extend([r.mi_bits, 2.0 * r.mi_bits, r.std_err]);
                    }
                    v
                })
                .collect();
            let mut columns = vec!["N", "X", "P_dBm", "SNR_dB"];
            if with_mi {
                columns.extend(["MI_bits", "MI_dual_pol_bits", "std_err"]);
            }
            Curve { name: format!("{prefix}_{scheme}"), title: format!("{label} {scheme}"), columns, rows }
        })
        .collect()
}

fn simulated_markers(base: &Scenario, id: &str, kappa_r: f64, schemes: &[&str], dir: &Path, opts: &RunOptions) -> Result<PathBuf> {
    let mut s = analytic_variant(base, id, kappa_r, schemes);
    s.engine = Engine::Simulation;
    s.sweep.spans = SIM_SPANS.iter().copied().filter(|&n| n <= SIM_MAX_SPANS).collect();
    persist(&run_scenario(&s, opts)?, dir)
}

/// Writes the figure's curve CSVs and a gnuplot script into `dir` and
/// returns their paths. Span sweeps use the scenario's span list when set,
/// otherwise 1 to 120.
pub fn figure(name: FigureName, mode: FigureMode, base: &Scenario, dir: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut paths = Vec::new();
    let emit = |curves: Vec<Curve>, xlabel: &str, ylabel: &str, ycol: usize, logx: bool, paths: &mut Vec<PathBuf>| -> Result<()> {
        for c in &curves {
            paths.push(write_curve(dir, name, c)?);
        }
        paths.push(write_script(dir, name, xlabel, ylabel, &curves, ycol, logx)?);
        Ok(())
    };
    match name {
        FigureName::Fig2 => {
            let eps: Vec<f64> = (0..100).map(|i| 10f64.powf(-2.0 + 2.0 * f64::from(i) / 99.0)).collect();
            let mut curves = Vec::new();
            for k in FIG2_KAPPAS {
                let mut rows = Vec::new();
                for &e in &eps {
                    rows.push(vec![
                        e,
                        reach_gain_trx(k, e, ReachGainFormula::Exact)?,
                        reach_gain_trx(k, e, ReachGainFormula::SmallCoherence)?,
                    ]);
                }
                curves.push(Curve {
                    name: format!("fig2_kappa_r_{k:.2}"),
                    title: format!("kappa_R = {k:.2}"),
                    columns: vec!["epsilon", "gain_exact", "gain_small_coherence"],
                    rows,
                });
            }
            emit(curves, "coherence factor", "reach gain over DBP", 2, true, &mut paths)?;
        }
        FigureName::Fig3 => {
            let schemes = ["edc", "dbp", "dpc", "half"];
            let mut curves = Vec::new();
            for (tag, snr) in [("trx", base.trx.snr_trx_db), ("notrx", f64::INFINITY)] {
                let mut s = analytic_variant(base, &format!("fig3_{tag}"), 0.5, &schemes);
                s.trx.snr_trx_db = snr;
                curves.extend(scheme_curves(&run_scenario(&s, opts)?, &format!("fig3_{tag}"), tag, &schemes, false));
            }
            emit(curves, "spans", "SNR at optimum power [dB]", 4, false, &mut paths)?;
            if mode == FigureMode::Both {
                paths.push(simulated_markers(base, "fig3_sim", 0.5, &schemes, dir, opts)?);
            }
        }
        FigureName::Fig4a => {
            let schemes = ["edc", "dbp", "dpc", "half", "optimal"];
            let s = analytic_variant(base, "fig4a", 0.8, &schemes);
            let curves = scheme_curves(&run_scenario(&s, opts)?, "fig4a", "kappa_R 0.8", &schemes, false);
            emit(curves, "spans", "SNR at optimum power [dB]", 4, false, &mut paths)?;
            if mode == FigureMode::Both {
                paths.push(simulated_markers(base, "fig4a_sim", 0.8, &schemes[..4], dir, opts)?);
            }
        }
        FigureName::Fig4b => {
            let mut trx_base = base.clone();
            trx_base.trx.kappa_r = 0.8;
            let trx = trx_base.trx_params()?;
            let mut curves = Vec::new();
            for n in FIG4B_SPANS {
                let sweep = split_sweep(&base.link_params(n), &trx, SnrModel::Full, &LaunchPowerSearch::default())?;
                let dbp = sweep[0].snr;
                let rows = sweep
                    .iter()
                    .map(|o| {
                        let x = o.plan.map_or(0, |p| p.x_tx_spans);
                        vec![f64::from(x) / f64::from(n), f64::from(x), db(o.snr / dbp), db(o.snr)]
                    })
                    .collect();
                curves.push(Curve {
                    name: format!("fig4b_n{n}"),
                    title: format!("N = {n}"),
                    columns: vec!["X_over_N", "X", "gain_dB", "SNR_dB"],
                    rows,
                });
            }
            emit(curves, "split ratio X/N", "SNR gain over DBP [dB]", 3, false, &mut paths)?;
        }
        FigureName::Fig5 => {
            let schemes = ["edc", "dbp", "dpc", "half", "optimal"];
            let mut s = analytic_variant(base, "fig5", 0.8, &schemes);
            s.sweep.mi = true;
            let curves = scheme_curves(&run_scenario(&s, opts)?, "fig5", "kappa_R 0.8", &schemes, true);
            emit(curves, "spans", "MI per polarization [bit/symbol]", 5, false, &mut paths)?;
        }
    }
    if paths.is_empty() {
        return Err(ExperimentError::Scenario(format!("{} produced no output", name.as_str())));
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read_csv(path: &Path) -> Vec<Vec<f64>> {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    }

    #[test]
    fn fig4b_peaks() {
        let dir = tempfile::tempdir().unwrap();
        let paths = figure(FigureName::Fig4b, FigureMode::Analytic, &Scenario::reference(), dir.path(), &RunOptions::default()).unwrap();
        assert_eq!(paths.len(), 4);
        let peak = |n: u32| {
            let rows = read_csv(&dir.path().join(format!("fig4b_n{n}.csv")));
            rows.into_iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap()
        };
        let p34 = peak(34);
        assert!((p34[0] - 0.73).abs() < 0.03, "{p34:?}");
        assert!((peak(16)[2] - 0.74).abs() < 0.05);
    }

    #[test]
    fn fig2_half_is_flat_and_files_are_reproducible() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let s = Scenario::reference();
        let pa = figure(FigureName::Fig2, FigureMode::Analytic, &s, a.path(), &RunOptions::default()).unwrap();
        figure(FigureName::Fig2, FigureMode::Analytic, &s, b.path(), &RunOptions::default()).unwrap();
        for p in &pa {
            let name = p.file_name().unwrap();
            assert_eq!(std::fs::read(p).unwrap(), std::fs::read(b.path().join(name)).unwrap());
        }
        let half = read_csv(&a.path().join("fig2_kappa_r_0.50.csv"));
        assert!(half.iter().all(|r| r[2] == 1.0));
        // Balanced noise: the exact gain is 2^(ε/(3+ε)), which tends to 1.
        assert!((half[0][1] - 2f64.powf(0.01 / 3.01)).abs() < 1e-6);
    }

    #[test]
    fn span_figures_use_the_scenario_span_list() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Scenario::reference();
        s.sweep.spans = vec![10, 34];
        s.dsp.mi_samples = 1024;
        for f in [FigureName::Fig3, FigureName::Fig4a, FigureName::Fig5] {
            let paths = figure(f, FigureMode::Analytic, &s, dir.path(), &RunOptions::default()).unwrap();
            for p in paths.iter().filter(|p| p.extension().unwrap() == "csv") {
                assert_eq!(read_csv(p).len(), 2, "{p:?}");
            }
        }
        assert!(FigureName::parse("fig9").is_none());
    }
}
