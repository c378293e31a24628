//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
//! Commands that write files print only the artifact paths on stdout;
//! query commands print their answer on stdout unless `--out` is given.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{
    classify_regime, max_reach, optimal_split_bruteforce, optimal_split_trx_closed, reach_gain_ase, reach_gain_trx,
    reach_gain_trx_vs_dpc, required_snr_trx_for_crossover, snr_at_optimum, DistanceScaling, ReachConfig,
    ReachGainFormula, RegimeConfig, Scheme, SnrModel, SnrProfile,
};
use crate::experiments::{
    figure, persist, run_scenario, Engine, ExperimentError, FigureMode, FigureName, RunOptions, Scenario,
};
use crate::units::{db, dbm_to_watt};

#[derive(Debug, Parser)]
#[command(name = "splitnlc", version, about = "Split nonlinearity compensation with transceiver noise")]
pub struct Cli {
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form model queries
    #[command(subcommand)]
    Analytic(AnalyticCmd),
    /// Run a scenario through the split-step simulator (and optionally the model)
    Simulate(SimulateArgs),
    /// Write curve data and a gnuplot script for one figure
    Figure(FigureArgs),
    /// Beating-regime classification and crossover distance
    Regime(RegimeArgs),
    /// Maximum reach of a scheme at the SNR a reference scheme achieves
    Reach(ReachArgs),
}

#[derive(Debug, Args, Clone)]
struct ScenarioArgs {
    /// Scenario file (TOML); the built-in reference system when omitted
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Override a scenario key, e.g. `trx.kappa_r=0.8` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Receiver share of transceiver noise, 0–1
    #[arg(long)]
    kappa_r: Option<f64>,
    /// Transceiver back-to-back SNR, dB
    #[arg(long)]
    snr_trx_db: Option<f64>,
    /// Coherence factor ε
    #[arg(long)]
    epsilon: Option<f64>,
    /// Random seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormulaArg {
    Exact,
    SmallCoherence,
}

impl From<FormulaArg> for ReachGainFormula {
    fn from(f: FormulaArg) -> Self {
        match f {
            FormulaArg::Exact => ReachGainFormula::Exact,
            FormulaArg::SmallCoherence => ReachGainFormula::SmallCoherence,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Full,
    TrxBeating,
    AseBeating,
}

impl From<ModelArg> for SnrModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Full => SnrModel::Full,
            ModelArg::TrxBeating => SnrModel::TrxBeating,
            ModelArg::AseBeating => SnrModel::AseBeating,
        }
    }
}

#[derive(Debug, Subcommand)]
enum AnalyticCmd {
    /// SNR of a scheme at a given launch power
    Snr {
        #[command(flatten)]
        sc: ScenarioArgs,
        /// Number of spans
        #[arg(long)]
        spans: u32,
        /// edc, dbp, dpc, half, optimal or split<X>
        #[arg(long, default_value = "dbp")]
        scheme: String,
        /// Launch power per channel, dBm
        #[arg(long)]
        power_dbm: f64,
    },
    /// Optimum launch power and SNR of a scheme
    Optimum {
        #[command(flatten)]
        sc: ScenarioArgs,
        /// Number of spans
        #[arg(long)]
        spans: u32,
        /// edc, dbp, dpc, half, optimal or split<X>
        #[arg(long, default_value = "optimal")]
        scheme: String,
    },
    /// Optimal split: closed form (TRX-beating regime) and exhaustive search
    Split {
        #[command(flatten)]
        sc: ScenarioArgs,
        /// Number of spans
        #[arg(long)]
        spans: u32,
    },
    /// Reach gain of the optimal split in the TRX-beating regime
    ReachGain {
        /// Receiver share of transceiver noise, 0–1
        #[arg(long)]
        kappa_r: f64,
        /// Coherence factor ε
        #[arg(long, default_value_t = 0.108)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = FormulaArg::SmallCoherence)]
        formula: FormulaArg,
        /// Compare against DPC instead of DBP
        #[arg(long)]
        versus_dpc: bool,
    },
    /// Reach gain of the balanced split in the ASE-beating regime
    AseGain {
        /// Coherence factor ε
        #[arg(long, default_value_t = 0.108)]
        epsilon: f64,
    },
    /// Model sweep of a scenario, written as CSV
    Sweep {
        #[command(flatten)]
        sc: ScenarioArgs,
        /// Output directory
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    sc: ScenarioArgs,
    /// Engine override; simulation by default
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Output directory
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Record wall-clock seconds per row (output is then not reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Analytic,
    Simulation,
    Both,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// fig2, fig3, fig4a, fig4b or fig5
    name: String,
    #[command(flatten)]
    sc: ScenarioArgs,
    /// `both` adds simulated markers (long-running)
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    mode: ModeArg,
    /// Output directory
    #[arg(long, default_value = "figures")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Analytic,
    Both,
}

#[derive(Debug, Args)]
struct RegimeArgs {
    #[command(flatten)]
    sc: ScenarioArgs,
    /// Regime threshold, dB
    #[arg(long, default_value_t = 10.0)]
    threshold_db: f64,
    /// Use the exact distance slope instead of 10 dB per decade
    #[arg(long)]
    exact_scaling: bool,
    /// Also report the TRX SNR (dB) that moves the crossover to this many spans
    #[arg(long)]
    target_crossover: Option<f64>,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReachArgs {
    #[command(flatten)]
    sc: ScenarioArgs,
    /// Span count at which the reference scheme sets the target SNR
    #[arg(long)]
    from_spans: u32,
    /// Reference scheme
    #[arg(long, default_value = "dbp")]
    reference: String,
    /// Scheme whose reach is searched
    #[arg(long, default_value = "optimal")]
    scheme: String,
    #[arg(long, value_enum, default_value_t = ModelArg::Full)]
    model: ModelArg,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Scenario(_) | ExperimentError::Parse { .. } => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<crate::analytic::AnalyticError> for CliError {
    fn from(e: crate::analytic::AnalyticError) -> Self {
        match e {
            crate::analytic::AnalyticError::Domain(m) => CliError::Usage(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn scheme(s: &str) -> CliResult<Scheme> {
    Scheme::parse(s).ok_or_else(|| CliError::Usage(format!("unknown scheme {s:?}")))
}

impl ScenarioArgs {
    /// Flags beat `--set`, which beats the file, which beats defaults.
    fn resolve(&self) -> CliResult<Scenario> {
        let mut overrides = Vec::new();
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            overrides.push((k.trim().to_string(), v.trim().to_string()));
        }
        let flag = |k: &str, v: Option<String>, o: &mut Vec<(String, String)>| {
            if let Some(v) = v {
                o.push((k.to_string(), v));
            }
        };
        flag("trx.kappa_r", self.kappa_r.map(|v| format!("{v:?}")), &mut overrides);
        flag("trx.snr_trx_db", self.snr_trx_db.map(|v| format!("{v:?}")), &mut overrides);
        flag("link.epsilon", self.epsilon.map(|v| format!("{v:?}")), &mut overrides);
        flag("seed", self.seed.map(|v| v.to_string()), &mut overrides);
        let loaded = match &self.scenario {
            Some(p) => Scenario::load(p, &overrides),
            None => Scenario::from_toml(&Scenario::reference().to_toml(), &overrides),
        };
        // Anything wrong with the scenario itself is a usage error; I/O is not.
        let config = |e: ExperimentError| match e {
            ExperimentError::Io { .. } => CliError::from(e),
            other => CliError::Usage(other.to_string()),
        };
        let s = loaded.map_err(config)?;
        s.validate().map_err(config)?;
        Ok(s)
    }
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(p, text).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
            writeln!(stdout, "{}", p.display()).map_err(|e| CliError::Runtime(e.to_string()))
        }
        None => write!(stdout, "{text}").map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn print_paths(paths: &[PathBuf], stdout: &mut dyn Write) -> CliResult<()> {
    for p in paths {
        writeln!(stdout, "{}", p.display()).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn run_analytic(cmd: AnalyticCmd, opts: RunOptions, stdout: &mut dyn Write) -> CliResult<()> {
    match cmd {
        AnalyticCmd::Snr { sc, spans, scheme: name, power_dbm } => {
            let s = sc.resolve()?;
            let (link, trx, sch) = (s.link_params(spans), s.trx_params()?, scheme(&name)?);
            let profile = match sch {
                Scheme::Edc => SnrProfile::edc(&link, &trx, SnrModel::Full)?,
                other => {
                    let plan = match other.fixed_plan(spans) {
                        Some(p) => p,
                        None => snr_at_optimum(&link, &trx, other)?.plan.expect("optimal split has a plan"),
                    };
                    SnrProfile::nlc(&link, &trx, plan, SnrModel::Full)?
                }
            };
            emit(&format!("{:.4}\n", db(profile.snr(dbm_to_watt(power_dbm)))), None, stdout)
        }
        AnalyticCmd::Optimum { sc, spans, scheme: name } => {
            let s = sc.resolve()?;
            let o = snr_at_optimum(&s.link_params(spans), &s.trx_params()?, scheme(&name)?)?;
            let x = o.plan.map_or(0, |p| p.x_tx_spans);
            emit(&format!("P_opt_dBm {:.4}\nSNR_dB {:.4}\nX {x}\n", o.power_dbm(), db(o.snr)), None, stdout)
        }
        AnalyticCmd::Split { sc, spans } => {
            let s = sc.resolve()?;
            let trx = s.trx_params()?;
            let closed = optimal_split_trx_closed(spans, trx.kappa_r, s.link.epsilon)?;
            let brute = optimal_split_bruteforce(&s.link_params(spans), &trx)?;
            emit(&format!("closed_form_X {}\nsearch_X {}\n", closed.x_tx_spans, brute.x_tx_spans), None, stdout)
        }
        AnalyticCmd::ReachGain { kappa_r, epsilon, formula, versus_dpc } => {
            let g = if versus_dpc {
                reach_gain_trx_vs_dpc(kappa_r, epsilon, formula.into())?
            } else {
                reach_gain_trx(kappa_r, epsilon, formula.into())?
            };
            emit(&format!("{g:.4}\n"), None, stdout)
        }
        AnalyticCmd::AseGain { epsilon } => emit(&format!("{:.4}\n", reach_gain_ase(epsilon)?), None, stdout),
        AnalyticCmd::Sweep { sc, out } => {
            let mut s = sc.resolve()?;
            s.engine = Engine::Analytic;
            let r = run_scenario(&s, &opts)?;
            report_errors(&r.errors);
            print_paths(&[persist(&r, &out)?], stdout)
        }
    }
}

fn report_errors(errors: &[String]) {
    for e in errors {
        eprintln!("warning: {e}");
    }
}

fn run_regime(a: RegimeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let s = a.sc.resolve()?;
    let trx = s.trx_params()?;
    let scaling = if a.exact_scaling { DistanceScaling::Exact } else { DistanceScaling::SmallCoherence };
    let cfg = RegimeConfig { threshold_db: a.threshold_db, scaling };
    let spans = if s.sweep.spans.is_empty() { vec![1] } else { s.sweep.spans.clone() };
    let head = classify_regime(&s.link_params(spans[0]), &trx, &cfg)?;
    let mut text = String::new();
    text.push_str(&format!("kappa_r {}\nsnr_trx_db {:.2}\n", trx.kappa_r, db(trx.snr_trx)));
    text.push_str(&format!("crossover_spans {}\ncrossover_continuous {:.2}\n", head.crossover_spans, head.crossover_continuous));
    text.push_str(&format!("ase_dominance_spans {:.1}\n", head.ase_dominance_spans));
    if let Some(t) = a.target_crossover {
        let snr = required_snr_trx_for_crossover(&s.link_params(spans[0]), &trx, t, scaling)?;
        text.push_str(&format!("required_snr_trx_db {:.2}\n", db(snr)));
    }
    text.push_str("N,regime,trx_margin_db,ase_margin_db,snr_edc_ideal_db\n");
    for n in spans {
        let r = classify_regime(&s.link_params(n), &trx, &cfg)?;
        let name = match r.regime {
            crate::analytic::Regime::TrxDominated => "trx",
            crate::analytic::Regime::AseDominated => "ase",
            crate::analytic::Regime::Mixed => "mixed",
        };
        text.push_str(&format!("{n},{name},{:.3},{:.3},{:.3}\n", r.trx_margin_db, r.ase_margin_db, r.snr_edc_ideal_db));
    }
    emit(&text, a.out.as_deref(), stdout)
}

fn run_reach(a: ReachArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let s = a.sc.resolve()?;
    let trx = s.trx_params()?;
    let model: SnrModel = a.model.into();
    let reference = scheme(&a.reference)?;
    let target = crate::analytic::snr_at_optimum_with(
        &s.link_params(a.from_spans),
        &trx,
        reference,
        model,
        &Default::default(),
    )?;
    let r = max_reach(&s.link_params(1), &trx, scheme(&a.scheme)?, target.snr, &ReachConfig { model, ..Default::default() })?;
    let text = format!(
        "target_snr_db {:.4}\nreach_spans {}\nreach_continuous {:.3}\nreach_rounded {}\nsaturated {}\n",
        db(target.snr),
        r.spans,
        r.continuous,
        r.continuous.round(),
        r.saturated
    );
    emit(&text, a.out.as_deref(), stdout)
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let opts = RunOptions { threads: cli.threads, timing: false };
    match cli.command {
        Command::Analytic(cmd) => run_analytic(cmd, opts, stdout),
        Command::Simulate(a) => {
            let mut s = a.sc.resolve()?;
            s.engine = match a.engine {
                Some(EngineArg::Analytic) => Engine::Analytic,
                Some(EngineArg::Both) => Engine::Both,
                Some(EngineArg::Simulation) | None => Engine::Simulation,
            };
            s.validate()?;
            eprintln!("running scenario {} ({} span counts)", s.id, s.sweep.spans.len());
            let r = run_scenario(&s, &RunOptions { timing: a.timing, ..opts })?;
            report_errors(&r.errors);
            print_paths(&[persist(&r, &a.out)?], stdout)
        }
        Command::Figure(a) => {
            let name = FigureName::parse(&a.name).ok_or_else(|| CliError::Usage(format!("unknown figure {:?}", a.name)))?;
            let s = a.sc.resolve()?;
            let mode = match a.mode {
                ModeArg::Analytic => FigureMode::Analytic,
                ModeArg::Both => FigureMode::Both,
            };
            let paths = figure(name, mode, &s, &a.out, &opts)?;
            print_paths(&paths, stdout)
        }
        Command::Regime(a) => run_regime(a, stdout),
        Command::Reach(a) => run_reach(a, stdout),
    }
}

/// Runs the CLI on `args` and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            1
        }
        Err(CliError::Runtime(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
    }
}
