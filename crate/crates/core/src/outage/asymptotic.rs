//! High-SNR asymptotes. Near zero the A→C gain has cdf ≈ α x and the
//! Nakagami gains ≈ (m x/Ω)^m/Γ(m+1), so each bound collapses to a power
//! of the threshold times one moment of u/η (fixed interferer powers) or
//! of λ W̃ (interferer powers scaling with η), where W̃ is W_c at unit
//! interferer SNR.

use serde::{Deserialize, Serialize};

use crate::error::{OstnError, Result};
use crate::fading::is_integer;
use crate::interference::{default_truncation, PowerCondition, WcMixture};
use crate::specfun::ln_gamma;

use super::kernel::{ExpectationKernel, KernelMode};
use super::links::{ac_coeffs, interference_mixture};
use super::{Case, Network, OutageContext};

/// Which small-argument regime of the C→B link fixed the asymptote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoteRegime {
    /// m_cb > 1: the A→C link dominates.
    AcDominated,
    /// m_cb = 1 (Case 1 only): both links contribute at first order.
    Balanced,
    /// m_cb < 1: the C→B link dominates.
    CbDominated,
    /// γ_s < 1/μ': only the direct C→D term remains.
    DirectOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptote {
    pub value: f64,
    pub diversity: f64,
    pub regime: AsymptoteRegime,
}

/// Fixed interferer powers, or no interferers at all.
fn fixed_powers(ctx: &OutageContext) -> bool {
    ctx.condition() == PowerCondition::Fixed || !ctx.has_interference()
}

/// ln E[(u/η)^d] for fixed interferer powers, ln λ^d E[W̃^d] otherwise.
fn ln_moment(ctx: &OutageContext, d: f64) -> Result<f64> {
    if fixed_powers(ctx) {
        let mut k = ExpectationKernel::new(interference_mixture(ctx)?, KernelMode::Series);
        return Ok(k.ln_moment_exp(d, 0.0)? - d * ctx.eta.ln());
    }
    let mut unit = ctx.interf.clone();
    unit.condition = PowerCondition::Fixed;
    unit.eta_s = 1.0;
    unit.eta_t = 1.0;
    let n = ctx.truncations.sr_terms.unwrap_or_else(|| default_truncation(&unit.sr));
    let k = ExpectationKernel::new(WcMixture::new(&unit, n)?, KernelMode::Series);
    Ok(k.ln_raw_moment(d)? + d * ctx.interf.lambda.ln())
}

fn regime(ctx: &OutageContext) -> Result<AsymptoteRegime> {
    let m = ctx.cb_link.m;
    if is_integer(m) && m.round() == 1.0 {
        if ctx.case == Case::Case2 {
            return Err(OstnError::Branch("m_cb = 1 has no case-2 asymptote; use case 1".into()));
        }
        Ok(AsymptoteRegime::Balanced)
    } else if m > 1.0 {
        Ok(AsymptoteRegime::AcDominated)
    } else {
        Ok(AsymptoteRegime::CbDominated)
    }
}

pub fn sat_op_asymptotic(ctx: &OutageContext) -> Result<Asymptote> {
    ctx.validate()?;
    let gt = ctx
        .gamma_tilde_p()
        .ok_or_else(|| OstnError::Branch("γ_p ≥ μ': the outage probability is identically 1".into()))?;
    let alpha = ac_coeffs(ctx)?.alpha;
    let k = ctx.k_relays as f64;
    let (m, om) = (ctx.cb_link.m, ctx.cb_link.omega);
    let reg = regime(ctx)?;
    let (ln_pref, d) = match reg {
        AsymptoteRegime::AcDominated => (k * (alpha * gt).ln(), k),
        AsymptoteRegime::Balanced => (k * ((alpha + 1.0 / om) * gt).ln(), k),
        _ => (-k * ln_gamma(m + 1.0)? + m * k * (m * gt / om).ln(), m * k),
    };
    Ok(Asymptote {
        value: (ln_pref + ln_moment(ctx, d)?).exp(),
        diversity: diversity_order(ctx, Network::Satellite),
        regime: reg,
    })
}

pub fn iot_op_asymptotic(ctx: &OutageContext) -> Result<Asymptote> {
    ctx.validate()?;
    let (m_cd, om_cd) = (ctx.cd_link.m, ctx.cd_link.omega);
    let gs = ctx.gamma_s();
    let direct = (m_cd * (m_cd * gs / (om_cd * (1.0 - ctx.mu))).ln() - ln_gamma(m_cd + 1.0)?
        + ln_moment(ctx, m_cd)?)
        .exp();
    let gt = ctx.gamma_tilde_s();
    let diversity = diversity_order(ctx, Network::Iot);
    if gt < 0.0 {
        return Ok(Asymptote { value: direct, diversity, regime: AsymptoteRegime::DirectOnly });
    }
    let alpha = ac_coeffs(ctx)?.alpha;
    let k = ctx.k_relays as f64;
    let (m, om) = (ctx.cb_link.m, ctx.cb_link.omega);
    let reg = regime(ctx)?;
    let (ln_pref, d) = match reg {
        AsymptoteRegime::AcDominated => (k * (alpha * gt).ln(), k),
        AsymptoteRegime::Balanced => ((k - 1.0) * (1.0 / (alpha * om)).ln_1p() + k * (alpha * gt).ln(), k),
        _ => {
            let d = m * (k - 1.0) + 1.0;
            let per_relay = m * m.ln() - ln_gamma(m + 1.0)? - m * om.ln();
            ((k / d).ln() + alpha.ln() + d * gt.ln() + (k - 1.0) * per_relay, d)
        }
    };
    let selected = if gt == 0.0 { 0.0 } else { (ln_pref + ln_moment(ctx, d)?).exp() };
    Ok(Asymptote { value: direct + selected, diversity, regime: reg })
}

/// Diversity order from the parameter table alone.
pub fn diversity_order(ctx: &OutageContext, network: Network) -> f64 {
    if !fixed_powers(ctx) {
        return 0.0;
    }
    let k = ctx.k_relays as f64;
    let m_cb = ctx.cb_link.m;
    let sel = match ctx.case {
        Case::Case2 if m_cb < 1.0 => match network {
            Network::Satellite => m_cb * k,
            Network::Iot => m_cb * (k - 1.0) + 1.0,
        },
        _ => k,
    };
    match network {
        Network::Satellite => sel,
        Network::Iot if ctx.gamma_tilde_s() < 0.0 => ctx.cd_link.m,
        Network::Iot => sel.min(ctx.cd_link.m),
    }
}
