//! Analytic lower bounds and high-SNR asymptotes of the outage probability
//! of the primary satellite stream and the secondary IoT stream.
//!
//! The engine writes every conditional link distribution as an [`ExpPoly`]
//! in the received power, substitutes x = T·u with u = 1 + W_c, and takes
//! the expectation over the interference with an [`ExpectationKernel`].
//! Case 1 (integer Nakagami parameters) uses finite distribution forms and
//! the hypergeometric kernel; Case 2 uses positive confluent series and the
//! Tricomi-U kernel.

mod asymptotic;
pub mod expoly;
mod iot;
pub mod kernel;
mod links;
pub mod partition;
mod satellite;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{OstnError, Result};
use crate::fading::{is_integer, NakagamiParams, SeriesMode, SrParams};
use crate::interference::{InterferenceConfig, PowerCondition};

pub use asymptotic::{diversity_order, iot_op_asymptotic, sat_op_asymptotic, Asymptote};
pub use expoly::{Atom, ExpPoly, SeriesControl, SeriesReport};
pub use iot::{iot_op_bound, iot_op_bound_via, iot_selected_cdf, iot_selected_cdf_via};
pub use kernel::{ExpectationKernel, KernelMode};
pub use partition::PartitionSet;
pub use satellite::{sat_op_bound, sat_op_bound_via};

/// Parameter regime: all of m_cb, m_cd, m_t integer, or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Case1,
    Case2,
}

impl Case {
    pub fn detect(m_cb: f64, m_cd: f64, m_t: f64) -> Self {
        if is_integer(m_cb) && is_integer(m_cd) && is_integer(m_t) {
            Case::Case1
        } else {
            Case::Case2
        }
    }

    pub fn kernel_mode(self) -> KernelMode {
        match self {
            Case::Case1 => KernelMode::Closed,
            Case::Case2 => KernelMode::Series,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Case1 => "case1",
            Case::Case2 => "case2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Network {
    Satellite,
    Iot,
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Network::Satellite => "satellite",
            Network::Iot => "iot",
        })
    }
}

/// Series truncation knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncations {
    /// Terms of the non-integer SR series for the A→C link and the
    /// satellite interferers. `None` grows the series until the dropped
    /// mass is negligible.
    pub sr_terms: Option<usize>,
    /// Longest positive incomplete-gamma series allowed.
    pub series_cap: usize,
    /// Relative tail at which a series is cut.
    pub series_tol: f64,
}

impl Default for Truncations {
    fn default() -> Self {
        let c = SeriesControl::default();
        Self { sr_terms: None, series_cap: c.cap, series_tol: c.tol }
    }
}

impl Truncations {
    pub fn control(&self) -> SeriesControl {
        SeriesControl { cap: self.series_cap, tol: self.series_tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageContext {
    pub k_relays: usize,
    pub mu: f64,
    pub rate_p: f64,
    pub rate_s: f64,
    /// Transmit SNR η of the A→C and C→B/C→D links, linear.
    pub eta: f64,
    pub sat_link: SrParams,
    pub sat_mode: SeriesMode,
    pub cb_link: NakagamiParams,
    pub cd_link: NakagamiParams,
    pub interf: InterferenceConfig,
    pub case: Case,
    pub truncations: Truncations,
}

/// Threshold 2^(2R) - 1 for a two-slot relay at rate R.
pub fn threshold(rate: f64) -> f64 {
    (2.0 * rate).exp2() - 1.0
}

impl OutageContext {
    pub fn gamma_p(&self) -> f64 {
        threshold(self.rate_p)
    }

    pub fn gamma_s(&self) -> f64 {
        threshold(self.rate_s)
    }

    /// μ' = μ/(1-μ).
    pub fn mu_prime(&self) -> f64 {
        self.mu / (1.0 - self.mu)
    }

    /// γ̃_p = γ_p/(μ - (1-μ)γ_p), defined when γ_p < μ'.
    pub fn gamma_tilde_p(&self) -> Option<f64> {
        let g = self.gamma_p();
        if g >= self.mu_prime() {
            None
        } else {
            Some(g / (self.mu - (1.0 - self.mu) * g))
        }
    }

    /// γ̃_s = μ'γ_s - 1.
    pub fn gamma_tilde_s(&self) -> f64 {
        self.mu_prime() * self.gamma_s() - 1.0
    }

    pub fn condition(&self) -> PowerCondition {
        self.interf.condition
    }

    pub fn has_interference(&self) -> bool {
        self.interf.ms + self.interf.mt_count > 0
    }

    /// Checks ranges and that `case` agrees with the Nakagami parameters.
    pub fn validate(&self) -> Result<()> {
        if self.k_relays == 0 {
            return Err(OstnError::Validation("need at least one relay".into()));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(OstnError::Validation(format!(
                "power split must lie in (0, 1), got {}",
                self.mu
            )));
        }
        for (name, v) in [("rate_p", self.rate_p), ("rate_s", self.rate_s), ("eta", self.eta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(OstnError::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        self.sat_link.validate()?;
        if self.sat_mode == SeriesMode::Int && !is_integer(self.sat_link.m) {
            return Err(OstnError::Mode(format!("integer SR series with m_ac = {}", self.sat_link.m)));
        }
        self.cb_link.validate()?;
        self.cd_link.validate()?;
        self.interf.validate()?;
        let detected = Case::detect(self.cb_link.m, self.cd_link.m, self.interf.nak.m);
        if self.case == Case::Case1 && detected == Case::Case2 {
            return Err(OstnError::Mode(format!(
                "case 1 needs integer m_cb, m_cd, m_t, got {}, {}, {}",
                self.cb_link.m, self.cd_link.m, self.interf.nak.m
            )));
        }
        if self.case == Case::Case2 && detected == Case::Case1 {
            return Err(OstnError::Mode(
                "case 2 needs a non-integer among m_cb, m_cd, m_t".into(),
            ));
        }
        if let Some(0) = self.truncations.sr_terms {
            return Err(OstnError::Validation("sr_terms must be positive".into()));
        }
        if self.truncations.series_cap == 0 || !(self.truncations.series_tol > 0.0) {
            return Err(OstnError::Validation("series cap and tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Same context at another SNR.
    pub fn with_eta(&self, eta: f64) -> Self {
        Self { eta, ..self.clone() }
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..self.clone() }
    }

    /// Re-derives the case and the SR series modes from the fading
    /// parameters, after any of them has been edited.
    pub fn with_detected_modes(mut self) -> Self {
        self.sat_mode = SeriesMode::detect(self.sat_link.m);
        self.interf.sr_mode = SeriesMode::detect(self.interf.sr.m);
        self.case = Case::detect(self.cb_link.m, self.cd_link.m, self.interf.nak.m);
        self
    }
}

/// Which expression produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// γ_p ≥ μ': the primary stream is always in outage.
    SatHardOutage,
    SatBound(Case),
    /// γ_s < 1/μ': only the direct C→D term contributes.
    IotDirectOnly(Case),
    IotFull(Case),
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::SatHardOutage => write!(f, "sat-hard-outage"),
            Branch::SatBound(c) => write!(f, "sat-{c}"),
            Branch::IotDirectOnly(c) => write!(f, "iot-{c}-direct"),
            Branch::IotFull(c) => write!(f, "iot-{c}-full"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutagePoint {
    pub op_bound: f64,
    pub op_asymptotic: Option<f64>,
    pub diversity: f64,
    pub branch: Branch,
    /// The raw value left [0, 1] by more than rounding and was clamped.
    pub clamped: bool,
    pub series: SeriesReport,
    pub warnings: Vec<String>,
}

/// Values this far outside [0, 1] are treated as rounding.
const CLAMP_SLACK: f64 = 1e-12;

pub(crate) fn clamp_probability(v: f64) -> (f64, bool) {
    if v.is_nan() {
        return (v, true);
    }
    let c = v.clamp(0.0, 1.0);
    (c, (v - c).abs() > CLAMP_SLACK)
}

pub(crate) fn series_warnings(r: &SeriesReport) -> Vec<String> {
    let mut w = Vec::new();
    if r.capped {
        w.push(format!("series hit the {}-term cap", r.max_terms));
    }
    if r.worst_tail > 1e-6 {
        w.push(format!("series tail ratio {:.2e} above 1e-6", r.worst_tail));
    }
    w
}
