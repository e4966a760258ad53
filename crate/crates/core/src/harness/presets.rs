//! Named parameter sets for the standard scenarios and figure sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{OstnError, Result};
use crate::fading::{NakagamiParams, SeriesMode, SrParams};
use crate::interference::{InterferenceConfig, PowerCondition};
use crate::outage::{Case, OutageContext, Truncations};

/// Light shadowing on the A→C link.
pub const LIGHT_SHADOW: SrParams = SrParams { m: 5.0, b: 0.251, omega: 0.279 };
/// Heavy shadowing on the A→C link.
pub const HEAVY_SHADOW: SrParams = SrParams { m: 1.95, b: 0.063, omega: 0.0005 };
pub const INTERFERER_INT: SrParams = SrParams { m: 1.0, b: 0.063, omega: 0.0005 };
pub const INTERFERER_NINT: SrParams = SrParams { m: 0.95, b: 0.063, omega: 0.0005 };
/// Interferer power of 1 dB.
pub const INTERFERER_POWER: f64 = 1.258_925_411_794_167_2;
/// λ = -20 dB.
pub const SCALED_LAMBDA: f64 = 0.01;
pub const FIXED_MU: f64 = 0.75;
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MuMode {
    /// Use `ctx.mu` as given.
    Fixed,
    /// Solve for the smallest μ meeting the satellite QoS level at each SNR.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Integer SR, integer Nakagami.
    S1,
    /// Non-integer SR, integer Nakagami.
    S2,
    /// Integer SR, non-integer Nakagami.
    S3,
    /// Non-integer SR, non-integer Nakagami.
    S4,
}

impl Scenario {
    fn sr_links(self) -> (SrParams, SrParams) {
        match self {
            Scenario::S1 | Scenario::S3 => (LIGHT_SHADOW, INTERFERER_INT),
            Scenario::S2 | Scenario::S4 => (HEAVY_SHADOW, INTERFERER_NINT),
        }
    }

    fn m_t(self) -> f64 {
        match self {
            Scenario::S1 | Scenario::S2 => 2.0,
            Scenario::S3 | Scenario::S4 => 1.77,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub scenario: Scenario,
    pub ctx: OutageContext,
    pub mu_mode: MuMode,
    pub epsilon: f64,
}

/// Builds a context for `scenario` with `k` relays, relay-link shapes
/// `m_cb`, `m_cd` and `interferers` of each kind.
pub fn scenario_context(
    scenario: Scenario,
    k: usize,
    m_cb: f64,
    m_cd: f64,
    interferers: usize,
    condition: PowerCondition,
) -> OutageContext {
    let (sat_link, sr) = scenario.sr_links();
    OutageContext {
        k_relays: k,
        mu: FIXED_MU,
        rate_p: 0.5,
        rate_s: 0.5,
        eta: 1.0,
        sat_link,
        sat_mode: SeriesMode::Int,
        cb_link: NakagamiParams { m: m_cb, omega: 1.0 },
        cd_link: NakagamiParams { m: m_cd, omega: 1.0 },
        interf: InterferenceConfig {
            ms: interferers,
            mt_count: interferers,
            sr,
            sr_mode: SeriesMode::Int,
            nak: NakagamiParams { m: scenario.m_t(), omega: 0.1 },
            eta_s: INTERFERER_POWER,
            eta_t: INTERFERER_POWER,
            condition,
            lambda: SCALED_LAMBDA,
        },
        case: Case::Case1,
        truncations: Truncations::default(),
    }
    .with_detected_modes()
}

struct Row {
    name: &'static str,
    description: &'static str,
    scenario: Scenario,
    k: usize,
    m_cb: f64,
    m_cd: f64,
    condition: PowerCondition,
    mu_mode: MuMode,
    gamma_s: f64,
}

const A: PowerCondition = PowerCondition::Fixed;
const B: PowerCondition = PowerCondition::Scaled;

#[rustfmt::skip]
const CATALOG: &[Row] = &[
    Row { name: "s1", description: "scenario 1: integer SR and Nakagami, fixed interferers", scenario: Scenario::S1, k: 2, m_cb: 2.0, m_cd: 2.0, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "s2", description: "scenario 2: heavy non-integer SR, integer Nakagami", scenario: Scenario::S2, k: 2, m_cb: 2.0, m_cd: 2.0, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "s3", description: "scenario 3: integer SR, non-integer Nakagami", scenario: Scenario::S3, k: 2, m_cb: 1.77, m_cd: 1.77, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "s4", description: "scenario 4: non-integer SR and Nakagami", scenario: Scenario::S4, k: 2, m_cb: 1.77, m_cd: 1.77, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig1-s1-K1-m1", description: "satellite, case 1, single relay, Rayleigh relay links", scenario: Scenario::S1, k: 1, m_cb: 1.0, m_cd: 1.0, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig1-s1-K2-m2", description: "satellite, case 1, two relays", scenario: Scenario::S1, k: 2, m_cb: 2.0, m_cd: 2.0, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig1-s2-K2-m2", description: "satellite, case 1, heavy shadowing", scenario: Scenario::S2, k: 2, m_cb: 2.0, m_cd: 2.0, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig2-s3-K2-m0.6", description: "satellite, case 2, m_cb below one", scenario: Scenario::S3, k: 2, m_cb: 0.6, m_cd: 1.77, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig2-s4-K2-m1.77", description: "satellite, case 2, heavy shadowing", scenario: Scenario::S4, k: 2, m_cb: 1.77, m_cd: 1.77, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig3-s1-K2-m2", description: "IoT, case 1, gamma_s = 1", scenario: Scenario::S1, k: 2, m_cb: 2.0, m_cd: 2.0, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig3-s2-K2-m2-gs0.3", description: "IoT, case 1, gamma_s = 0.3 (direct link only)", scenario: Scenario::S2, k: 2, m_cb: 2.0, m_cd: 2.0, condition: A, mu_mode: MuMode::Fixed, gamma_s: 0.3 },
    Row { name: "fig4-s3-K2-m1.77", description: "IoT, case 2, m_cb = m_cd = 1.77", scenario: Scenario::S3, k: 2, m_cb: 1.77, m_cd: 1.77, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig4-s3-K2-m0.6", description: "IoT, case 2, m_cb = 0.6, m_cd = 1.77", scenario: Scenario::S3, k: 2, m_cb: 0.6, m_cd: 1.77, condition: A, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig5-s1-K2-m2-b", description: "satellite, case 1, interferers scale with SNR", scenario: Scenario::S1, k: 2, m_cb: 2.0, m_cd: 2.0, condition: B, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig6-s3-K2-m0.6-b", description: "satellite, case 2, interferers scale with SNR", scenario: Scenario::S3, k: 2, m_cb: 0.6, m_cd: 1.77, condition: B, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig7-s2-K2-m2-b", description: "IoT, case 1, interferers scale with SNR", scenario: Scenario::S2, k: 2, m_cb: 2.0, m_cd: 2.0, condition: B, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig8-s4-K2-m1.77-b", description: "IoT, case 2, interferers scale with SNR", scenario: Scenario::S4, k: 2, m_cb: 1.77, m_cd: 1.77, condition: B, mu_mode: MuMode::Fixed, gamma_s: 1.0 },
    Row { name: "fig9-adaptive", description: "IoT, case 1, adaptive power split", scenario: Scenario::S1, k: 2, m_cb: 2.0, m_cd: 2.0, condition: A, mu_mode: MuMode::Adaptive, gamma_s: 1.0 },
    Row { name: "fig10-adaptive", description: "IoT, case 2, adaptive power split", scenario: Scenario::S3, k: 2, m_cb: 1.77, m_cd: 1.77, condition: A, mu_mode: MuMode::Adaptive, gamma_s: 1.0 },
    Row { name: "fig11-adaptive-b", description: "IoT, case 1, adaptive power split, scaled interferers", scenario: Scenario::S1, k: 1, m_cb: 1.0, m_cd: 1.0, condition: B, mu_mode: MuMode::Adaptive, gamma_s: 1.0 },
    Row { name: "fig12-adaptive-b", description: "IoT, case 2, adaptive power split, scaled interferers", scenario: Scenario::S3, k: 1, m_cb: 0.6, m_cd: 0.6, condition: B, mu_mode: MuMode::Adaptive, gamma_s: 1.0 },
];

fn build(r: &Row) -> Preset {
    let interferers = match r.mu_mode {
        MuMode::Fixed => 2,
        MuMode::Adaptive => 1,
    };
    let mut ctx = scenario_context(r.scenario, r.k, r.m_cb, r.m_cd, interferers, r.condition);
    ctx.rate_s = rate_for_threshold(r.gamma_s);
    Preset {
        name: r.name.to_string(),
        description: r.description.to_string(),
        scenario: r.scenario,
        ctx,
        mu_mode: r.mu_mode,
        epsilon: DEFAULT_EPSILON,
    }
}

/// Inverse of [`crate::outage::threshold`].
pub fn rate_for_threshold(gamma: f64) -> f64 {
    0.5 * (1.0 + gamma).log2()
}

pub fn list_presets() -> Vec<Preset> {
    CATALOG.iter().map(build).collect()
}

pub fn preset(name: &str) -> Result<Preset> {
    CATALOG
        .iter()
        .find(|r| r.name == name)
        .map(build)
        .ok_or_else(|| OstnError::UnknownPreset(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outage::threshold;

    #[test]
    fn catalog_is_valid_and_named_uniquely() {
        let all = list_presets();
        assert!(all.len() >= 12);
        let mut names: Vec<_> = all.iter().map(|p| p.name.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), all.len());
        for p in &all {
            p.ctx.validate().unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn scenario_parameters() {
        let s1 = preset("s1").unwrap().ctx;
        assert_eq!((s1.sat_link.m, s1.interf.sr.m, s1.interf.nak.m), (5.0, 1.0, 2.0));
        assert_eq!(s1.case, Case::Case1);
        let s4 = preset("s4").unwrap().ctx;
        assert_eq!((s4.sat_link.m, s4.interf.sr.m, s4.interf.nak.m), (1.95, 0.95, 1.77));
        assert_eq!(s4.case, Case::Case2);
        assert_eq!(s4.sat_mode, SeriesMode::Nint);
    }

    #[test]
    fn constants() {
        assert!((INTERFERER_POWER - 10f64.powf(0.1)).abs() < 1e-15);
        assert!((threshold(rate_for_threshold(0.3)) - 0.3).abs() < 1e-14);
        assert_eq!(rate_for_threshold(1.0), 0.5);
    }

    #[test]
    fn unknown_name() {
        assert_eq!(preset("nope").unwrap_err(), OstnError::UnknownPreset("nope".into()));
    }
}
