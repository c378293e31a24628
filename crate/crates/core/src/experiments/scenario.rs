use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{io_err, ExperimentError, Result};
use crate::analytic::{LinkParams, Scheme, TrxParams};
use crate::fiber::{AmpParams, ChainConfig, FiberParams, SsfConfig, StepDistribution, TxNoisePlacement};
use crate::units::{ase_power, dbm_to_watt, from_db};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Analytic,
    Simulation,
    Both,
}

impl Engine {
    pub fn analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }

    pub fn simulation(self) -> bool {
        matches!(self, Engine::Simulation | Engine::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    pub span_length_km: f64,
    pub alpha_db_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub gamma_per_w_km: f64,
    pub noise_figure_db: f64,
    /// dB(1/W²).
    pub eta_db: f64,
    pub epsilon: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            span_length_km: 80.0,
            alpha_db_km: 0.2,
            dispersion_ps_nm_km: 17.0,
            gamma_per_w_km: 1.2,
            noise_figure_db: 4.0,
            eta_db: 26.2,
            epsilon: 0.108,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrxSection {
    /// `inf` for a noiseless transceiver.
    pub snr_trx_db: f64,
    pub kappa_r: f64,
}

impl Default for TrxSection {
    fn default() -> Self {
        Self { snr_trx_db: 26.0, kappa_r: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DspSection {
    pub num_channels: usize,
    pub symbol_rate_gbaud: f64,
    pub spacing_ghz: f64,
    pub oversampling: f64,
    pub n_symbols: usize,
    pub qam_order: usize,
    pub mi_samples: usize,
}

impl Default for DspSection {
    fn default() -> Self {
        Self {
            num_channels: 3,
            symbol_rate_gbaud: 32.0,
            spacing_ghz: 32.0,
            oversampling: 3.0,
            n_symbols: 1 << 14,
            qam_order: 256,
            mi_samples: crate::dsp::DEFAULT_MI_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub steps_per_span: u32,
    pub step_distribution: StepDistribution,
    pub tx_noise: TxNoisePlacement,
    pub noiseless_amplifiers: bool,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            steps_per_span: SsfConfig::DEFAULT_STEPS,
            step_distribution: StepDistribution::Logarithmic,
            tx_noise: TxNoisePlacement::default(),
            noiseless_amplifiers: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub spans: Vec<u32>,
    /// `edc`, `dbp`, `dpc`, `half`, `optimal` or `split<X>`.
    pub schemes: Vec<String>,
    /// Explicit launch-power grid; the adaptive search runs when unset.
    pub power_dbm_min: Option<f64>,
    pub power_dbm_max: Option<f64>,
    pub power_dbm_step: Option<f64>,
    pub adaptive_step_db: f64,
    pub mi: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            spans: Vec::new(),
            schemes: vec!["edc".into(), "dbp".into()],
            power_dbm_min: None,
            power_dbm_max: None,
            power_dbm_step: None,
            adaptive_step_db: 0.5,
            mi: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub id: String,
    pub engine: Engine,
    pub seed: u64,
    pub link: LinkSection,
    pub trx: TrxSection,
    pub dsp: DspSection,
    pub simulation: SimulationSection,
    pub sweep: SweepSection,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            id: "scenario".into(),
            engine: Engine::default(),
            seed: 1,
            link: LinkSection::default(),
            trx: TrxSection::default(),
            dsp: DspSection::default(),
            simulation: SimulationSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

/// Parses a `key=value` override value as a TOML literal, falling back to
/// a bare string.
fn override_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key just written"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn apply_override(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| ExperimentError::Scenario(format!("empty key in override {key:?}")))?;
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| ExperimentError::Scenario(format!("{p:?} in {key:?} is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl Scenario {
    /// reference system; all spans from 1 to 120, analytic engine.
    pub fn reference() -> Self {
        Self {
            id: "reference".into(),
            sweep: SweepSection { spans: (1..=120).collect(), ..SweepSection::default() },
            ..Self::default()
        }
    }

    /// Parses TOML text, then applies dotted `key=value` overrides.
    pub fn from_toml(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ExperimentError::Scenario(e.to_string()))?;
        for (k, v) in overrides {
            apply_override(&mut table, k, override_value(v))?;
        }
        let s: Scenario = table.try_into().map_err(|e: toml::de::Error| ExperimentError::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ExperimentError::Scenario(m));
        if self.id.is_empty() || !self.id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return bad(format!("id {:?} must be non-empty and filename-safe", self.id));
        }
        self.schemes()?;
        self.trx_params()?;
        let l = &self.link;
        if !(l.span_length_km > 0.0) || !(0.0..1.0).contains(&l.epsilon) {
            return bad("span_length_km must be positive and epsilon in [0, 1)".into());
        }
        match (self.sweep.power_dbm_min, self.sweep.power_dbm_max, self.sweep.power_dbm_step) {
            (None, None, None) => {}
            (Some(lo), Some(hi), Some(step)) if hi >= lo && step > 0.0 => {}
            _ => return bad("power_dbm_min/max/step must be given together with max ≥ min and step > 0".into()),
        }
        if !(self.sweep.adaptive_step_db > 0.0) {
            return bad("adaptive_step_db must be positive".into());
        }
        if self.engine.simulation() && (self.simulation.steps_per_span == 0 || self.dsp.n_symbols == 0) {
            return bad("steps_per_span and n_symbols must be positive".into());
        }
        Ok(())
    }

    pub fn schemes(&self) -> Result<Vec<Scheme>> {
        self.sweep
            .schemes
            .iter()
            .map(|s| Scheme::parse(s).ok_or_else(|| ExperimentError::Scenario(format!("unknown scheme {s:?}"))))
            .collect()
    }

    pub fn symbol_rate(&self) -> f64 {
        self.dsp.symbol_rate_gbaud * 1e9
    }

    /// ASE power per amplifier in one channel's bandwidth.
    pub fn p_ase(&self) -> f64 {
        ase_power(self.link.span_length_km * self.link.alpha_db_km, self.link.noise_figure_db, self.symbol_rate())
    }

    pub fn link_params(&self, num_spans: u32) -> LinkParams {
        LinkParams {
            num_spans,
            span_length_km: self.link.span_length_km,
            eta: from_db(self.link.eta_db),
            epsilon: self.link.epsilon,
            p_ase: self.p_ase(),
        }
    }

    pub fn trx_params(&self) -> Result<TrxParams> {
        let snr = if self.trx.snr_trx_db.is_infinite() { f64::INFINITY } else { from_db(self.trx.snr_trx_db) };
        Ok(TrxParams::new(snr, self.trx.kappa_r)?)
    }

    pub fn fiber(&self) -> FiberParams {
        FiberParams {
            alpha_db_km: self.link.alpha_db_km,
            dispersion_ps_nm_km: self.link.dispersion_ps_nm_km,
            gamma_per_w_km: self.link.gamma_per_w_km,
            length_km: self.link.span_length_km,
        }
    }

    pub fn amp(&self) -> AmpParams {
        AmpParams {
            gain_db: None,
            noise_figure_db: (!self.simulation.noiseless_amplifiers).then_some(self.link.noise_figure_db),
        }
    }

    pub fn chain_config(&self, num_spans: u32, power_dbm: f64) -> Result<ChainConfig> {
        Ok(ChainConfig {
            fiber: self.fiber(),
            amp: self.amp(),
            ssf: SsfConfig {
                step_distribution: self.simulation.step_distribution,
                ..SsfConfig::new(self.simulation.steps_per_span)
            },
            num_channels: self.dsp.num_channels,
            spacing_hz: self.dsp.spacing_ghz * 1e9,
            symbol_rate: self.symbol_rate(),
            oversampling: self.dsp.oversampling,
            n_symbols: self.dsp.n_symbols,
            qam_order: self.dsp.qam_order,
            num_spans,
            power_per_channel_w: dbm_to_watt(power_dbm),
            trx: self.trx_params()?,
            tx_noise: self.simulation.tx_noise,
            seed: self.seed,
            edc_reference: false,
        })
    }

    /// Explicit launch-power grid, dBm.
    pub fn power_grid(&self) -> Option<Vec<f64>> {
        let (lo, hi, step) = (self.sweep.power_dbm_min?, self.sweep.power_dbm_max?, self.sweep.power_dbm_step?);
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        Some((0..=n).map(|i| lo + i as f64 * step).collect())
    }
}
