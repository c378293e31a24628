use serde::{Deserialize, Serialize};

use super::{AnalyticError, Result};
use crate::units;

/// Physical link as seen by the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub num_spans: u32,
    pub span_length_km: f64,
    /// Nonlinear interference coefficient of one span, 1/W².
    pub eta: f64,
    /// Coherence factor.
    pub epsilon: f64,
    /// ASE power per amplifier in the reference bandwidth, W.
    pub p_ase: f64,
}

impl LinkParams {
    pub fn new(num_spans: u32, span_length_km: f64, eta: f64, epsilon: f64, p_ase: f64) -> Result<Self> {
        let link = Self { num_spans, span_length_km, eta, epsilon, p_ase };
        link.validate()?;
        Ok(link)
    }

    /// 80 km SSMF spans with EDFAs, η = 26.2 dB(1/W²), ε = 0.108, NF 4 dB,
    /// 32 GHz reference bandwidth.
    pub fn reference(num_spans: u32) -> Self {
        let span_length_km = 80.0;
        let gain_db = 0.2 * span_length_km;
        Self {
            num_spans,
            span_length_km,
            eta: units::from_db(26.2),
            epsilon: 0.108,
            p_ase: units::ase_power(gain_db, 4.0, 32e9),
        }
    }

    pub fn with_spans(&self, num_spans: u32) -> Self {
        Self { num_spans, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_spans < 1 {
            return Err(AnalyticError::Domain("num_spans must be >= 1".into()));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(AnalyticError::Domain(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.p_ase > 0.0 && self.p_ase.is_finite()) {
            return Err(AnalyticError::Domain(format!("p_ase must be positive, got {}", self.p_ase)));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(AnalyticError::Domain(format!("epsilon must lie in [0, 1), got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Transceiver noise: back-to-back SNR and the share injected at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrxParams {
    /// Linear; `f64::INFINITY` for a noiseless transceiver.
    pub snr_trx: f64,
    pub kappa_r: f64,
}

impl TrxParams {
    pub fn new(snr_trx: f64, kappa_r: f64) -> Result<Self> {
        let trx = Self { snr_trx, kappa_r };
        trx.validate()?;
        Ok(trx)
    }

    pub fn from_db(snr_trx_db: f64, kappa_r: f64) -> Result<Self> {
        Self::new(units::from_db(snr_trx_db), kappa_r)
    }

    pub fn noiseless(kappa_r: f64) -> Self {
        Self { snr_trx: f64::INFINITY, kappa_r }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.snr_trx > 0.0) {
            return Err(AnalyticError::Domain(format!("snr_trx must be positive, got {}", self.snr_trx)));
        }
        if !(0.0..=1.0).contains(&self.kappa_r) {
            return Err(AnalyticError::Domain(format!("kappa_r must lie in [0, 1], got {}", self.kappa_r)));
        }
        Ok(())
    }

    /// κ = 1/SNR_TRX.
    pub fn kappa(&self) -> f64 {
        1.0 / self.snr_trx
    }

    /// SNR ceiling set by the transmitter alone; infinite when κ_R = 1.
    pub fn snr_tx(&self) -> f64 {
        self.snr_trx / (1.0 - self.kappa_r)
    }

    /// SNR ceiling set by the receiver alone; infinite when κ_R = 0.
    pub fn snr_rx(&self) -> f64 {
        self.snr_trx / self.kappa_r
    }
}

/// Number of spans compensated at the transmitter; the receiver takes the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NlcPlan {
    pub x_tx_spans: u32,
}

impl NlcPlan {
    pub fn new(x_tx_spans: u32, num_spans: u32) -> Result<Self> {
        if x_tx_spans > num_spans {
            return Err(AnalyticError::Domain(format!(
                "split X = {x_tx_spans} exceeds span count N = {num_spans}"
            )));
        }
        Ok(Self { x_tx_spans })
    }

    pub fn dbp() -> Self {
        Self { x_tx_spans: 0 }
    }

    pub fn dpc(num_spans: u32) -> Self {
        Self { x_tx_spans: num_spans }
    }

    /// ⌈N/2⌉ spans at the transmitter.
    pub fn half(num_spans: u32) -> Self {
        Self { x_tx_spans: num_spans.div_ceil(2) }
    }

    pub fn rx_spans(&self, num_spans: u32) -> u32 {
        num_spans - self.x_tx_spans
    }
}

/// Compensation scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Electronic dispersion compensation only.
    Edc,
    Dbp,
    Dpc,
    /// X = ⌈N/2⌉.
    HalfSplit,
    /// Fixed X.
    Split(u32),
    /// Best integer X found by exhaustive search.
    OptimalSplit,
}

impl Scheme {
    /// The plan for an N-span link, if it does not need a search.
    pub fn fixed_plan(&self, num_spans: u32) -> Option<NlcPlan> {
        match *self {
            Scheme::Edc | Scheme::OptimalSplit => None,
            Scheme::Dbp => Some(NlcPlan::dbp()),
            Scheme::Dpc => Some(NlcPlan::dpc(num_spans)),
            Scheme::HalfSplit => Some(NlcPlan::half(num_spans)),
            Scheme::Split(x) => Some(NlcPlan { x_tx_spans: x.min(num_spans) }),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Scheme::Edc => "edc".into(),
            Scheme::Dbp => "dbp".into(),
            Scheme::Dpc => "dpc".into(),
            Scheme::HalfSplit => "half".into(),
            Scheme::Split(x) => format!("split{x}"),
            Scheme::OptimalSplit => "optimal".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "edc" => Scheme::Edc,
            "dbp" => Scheme::Dbp,
            "dpc" => Scheme::Dpc,
            "half" | "half-split" => Scheme::HalfSplit,
            "optimal" | "optimal-split" => Scheme::OptimalSplit,
            other => Scheme::Split(other.strip_prefix("split")?.parse().ok()?),
        })
    }
}

/// Which terms of the general expression are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrModel {
    /// All terms.
    #[default]
    Full,
    /// Signal–ASE beating dropped.
    TrxBeating,
    /// Signal–TRX beating and the linear TRX term dropped.
    AseBeating,
}

/// `Σ_{i=1}^{n} i^(1+ε)`; zero for `n = 0`.
pub(crate) fn power_sum(n: u32, epsilon: f64) -> f64 {
    let e = 1.0 + epsilon;
    (1..=n).map(|i| f64::from(i).powf(e)).sum()
}

/// TRX beating accumulation factor `(1−κ_R)·X^(1+ε) + κ_R·(N−X)^(1+ε)`.
pub fn xi_trx(num_spans: u32, x: u32, kappa_r: f64, epsilon: f64) -> Result<f64> {
    if x > num_spans {
        return Err(AnalyticError::Domain(format!("X = {x} outside [0, {num_spans}]")));
    }
    let e = 1.0 + epsilon;
    Ok((1.0 - kappa_r) * f64::from(x).powf(e) + kappa_r * f64::from(num_spans - x).powf(e))
}

/// ASE beating accumulation factor `Σ_{i=1}^{X−1} i^(1+ε) + Σ_{i=1}^{N−X} i^(1+ε)`.
pub fn xi_ase(num_spans: u32, x: u32, epsilon: f64) -> Result<f64> {
    if x > num_spans {
        return Err(AnalyticError::Domain(format!("X = {x} outside [0, {num_spans}]")));
    }
    Ok(power_sum(x.saturating_sub(1), epsilon) + power_sum(num_spans - x, epsilon))
}

/// ξ_ASE for DBP, `Σ_{i=1}^{N} i^(1+ε)`.
pub fn xi_ase_dbp(num_spans: u32, epsilon: f64) -> f64 {
    power_sum(num_spans, epsilon)
}

/// Coefficients of `SNR(P) = P / (linear·P + ase + quadratic·P² + cubic·P³)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrProfile {
    pub linear: f64,
    pub ase: f64,
    pub quadratic: f64,
    pub cubic: f64,
}

impl SnrProfile {
    /// Nonlinearity compensation with split `plan`.
    pub fn nlc(link: &LinkParams, trx: &TrxParams, plan: NlcPlan, model: SnrModel) -> Result<Self> {
        let n = link.num_spans;
        let x = plan.x_tx_spans;
        let kappa = trx.kappa();
        let xt = xi_trx(n, x, trx.kappa_r, link.epsilon)?;
        let xa = xi_ase(n, x, link.epsilon)?;
        Ok(Self::from_factors(link, kappa, xt, xa, 0.0, model))
    }

    /// Dispersion compensation only; the X = 0 beating factors plus the
    /// signal–signal term `η·N^(1+ε)·P³`.
    pub fn edc(link: &LinkParams, trx: &TrxParams, model: SnrModel) -> Result<Self> {
        let n = link.num_spans;
        let xt = xi_trx(n, 0, trx.kappa_r, link.epsilon)?;
        let xa = xi_ase_dbp(n, link.epsilon);
        let ss = link.eta * f64::from(n).powf(1.0 + link.epsilon);
        Ok(Self::from_factors(link, trx.kappa(), xt, xa, ss, model))
    }

    /// Profile from explicit accumulation factors. `n` may be fractional,
    /// which the continuous-reach relations need.
    pub fn from_factors_continuous(
        n: f64,
        eta: f64,
        p_ase: f64,
        kappa: f64,
        xi_trx: f64,
        xi_ase: f64,
        signal_signal: f64,
        model: SnrModel,
    ) -> Self {
        let (kappa_lin, kappa_beat, ase_beat) = match model {
            SnrModel::Full => (kappa, kappa, xi_ase),
            SnrModel::TrxBeating => (kappa, kappa, 0.0),
            SnrModel::AseBeating => (0.0, 0.0, xi_ase),
        };
        Self {
            linear: kappa_lin,
            ase: n * p_ase,
            quadratic: 3.0 * eta * ase_beat * p_ase,
            cubic: 3.0 * eta * kappa_beat * xi_trx + signal_signal,
        }
    }

    fn from_factors(link: &LinkParams, kappa: f64, xt: f64, xa: f64, ss: f64, model: SnrModel) -> Self {
        Self::from_factors_continuous(f64::from(link.num_spans), link.eta, link.p_ase, kappa, xt, xa, ss, model)
    }

    pub fn snr(&self, p: f64) -> f64 {
        p / (self.linear * p + self.ase + self.quadratic * p * p + self.cubic * p * p * p)
    }

    /// Same profile without the linear TRX term.
    pub fn without_linear(&self) -> Self {
        Self { linear: 0.0, ..*self }
    }
}

/// Received SNR after nonlinearity compensation split according to `plan`.
pub fn snr_nlc(p: f64, link: &LinkParams, trx: &TrxParams, plan: NlcPlan) -> Result<f64> {
    Ok(SnrProfile::nlc(link, trx, plan, SnrModel::Full)?.snr(p))
}

/// Received SNR with dispersion compensation only.
pub fn snr_edc(p: f64, link: &LinkParams, trx: &TrxParams) -> Result<f64> {
    Ok(SnrProfile::edc(link, trx, SnrModel::Full)?.snr(p))
}
