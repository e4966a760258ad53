//! Aggregate interference: W_s (SR-faded satellite interferers), W_t
//! (Nakagami-faded terrestrial interferers) and their sum W_c.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{domain, OstnError, Result};
use crate::fading::{NakagamiParams, NakagamiSampler, SeriesMode, SrParams, SrSampler, SrUnifiedCoeffs};
use crate::specfun::{beta_fn, ln_beta, ln_gamma, ln_kummer_1f1, EvalPolicy};

/// Largest multi-index enumeration accepted by [`ws_coeffs`].
pub const MAX_MULTI_INDICES: u128 = 1_000_000;

/// How interferer powers relate to the main-link SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum PowerCondition {
    /// Interferer powers fixed, independent of the main SNR.
    Fixed,
    /// Interferer powers scale as λη with the main SNR.
    Scaled,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InterferenceConfig {
    /// Number of satellite (SR-faded) interferers.
    pub ms: usize,
    /// Number of terrestrial (Nakagami-faded) interferers.
    pub mt_count: usize,
    pub sr: SrParams,
    pub sr_mode: SeriesMode,
    pub nak: NakagamiParams,
    pub eta_s: f64,
    pub eta_t: f64,
    pub condition: PowerCondition,
    /// Scaling λ, used only under [`PowerCondition::Scaled`].
    pub lambda: f64,
}

impl InterferenceConfig {
    pub fn validate(&self) -> Result<()> {
        self.sr.validate()?;
        self.nak.validate()?;
        if self.sr_mode == SeriesMode::Int && !crate::fading::is_integer(self.sr.m) {
            return Err(OstnError::Mode(format!(
                "interferer series marked integer but m_s = {}",
                self.sr.m
            )));
        }
        for (name, v) in [("eta_s", self.eta_s), ("eta_t", self.eta_t)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(OstnError::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        if self.condition == PowerCondition::Scaled && !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(OstnError::Validation(format!("lambda must be positive, got {}", self.lambda)));
        }
        Ok(())
    }

    /// Resolves interferer powers at main SNR `eta`.
    pub fn at_snr(&self, eta: f64) -> Self {
        match self.condition {
            PowerCondition::Fixed => self.clone(),
            PowerCondition::Scaled => Self { eta_s: self.lambda * eta, eta_t: self.lambda * eta, ..self.clone() },
        }
    }

    /// Shape m_t M_t of W_t.
    pub fn wt_shape(&self) -> f64 {
        self.nak.m * self.mt_count as f64
    }

    /// Rate m_t/(Ω_t η_t) of W_t.
    pub fn wt_rate(&self) -> f64 {
        self.nak.rate(self.eta_t)
    }

    /// E[W_c] = M_s η_s (2b_s + Ω_s) + M_t η_t Ω_t.
    pub fn mean(&self) -> f64 {
        self.ms as f64 * self.eta_s * self.sr.mean_power() + self.mt_count as f64 * self.eta_t * self.nak.omega
    }
}

/// One term of the multi-index expansion of the W_s density.
#[derive(Debug, Clone, PartialEq)]
pub struct WsTerm {
    pub index: Vec<usize>,
    pub xi: f64,
    /// Λ = Σ i + M_s.
    pub shape: usize,
}

/// Multi-index expansion of the W_s density:
/// f(w) = Σ Ξ/η_s^Λ w^(Λ-1) e^(-Θ w).
#[derive(Debug, Clone, PartialEq)]
pub struct WsCoeffs {
    pub terms: Vec<WsTerm>,
    pub eta_s: f64,
    pub beta_nu: f64,
    /// Θ = β_ν/η_s.
    pub theta: f64,
    /// Θ̃ = Θ - m_t/(Ω_t η_t).
    pub theta_tilde: f64,
    /// ρ = 1 - β_ν Ω_t/m_t.
    pub rho: f64,
}

/// Enumerates every multi-index in [0, ϖ]^{M_s} and its Ξ weight.
pub fn ws_coeffs(cfg: &InterferenceConfig, truncation: usize) -> Result<WsCoeffs> {
    cfg.validate()?;
    if cfg.ms == 0 {
        return domain("W_s is identically zero when there are no satellite interferers");
    }
    let c = crate::fading::sr_coeffs(&cfg.sr, cfg.sr_mode, truncation)?;
    let per = c.len();
    let needed = (per as u128).checked_pow(cfg.ms as u32).unwrap_or(u128::MAX);
    if needed > MAX_MULTI_INDICES {
        return Err(OstnError::Capacity {
            what: format!("W_s multi-index enumeration with M_s = {}", cfg.ms),
            needed,
            cap: MAX_MULTI_INDICES,
        });
    }
    let ms = cfg.ms;
    let ln_alpha = c.alpha.ln();
    let mut terms = Vec::with_capacity(needed as usize);
    let mut index = vec![0usize; ms];
    loop {
        if index.iter().all(|&i| c.zeta[i] > 0.0) {
            let mut ln_xi = ms as f64 * ln_alpha;
            for &i in &index {
                ln_xi += c.zeta[i].ln();
            }
            let mut partial = 0usize;
            for j in 1..ms {
                partial += index[j - 1];
                ln_xi += ln_beta((partial + j) as f64, (index[j] + 1) as f64)?;
            }
            terms.push(WsTerm {
                index: index.clone(),
                xi: ln_xi.exp(),
                shape: index.iter().sum::<usize>() + ms,
            });
        }
        // odometer
        let mut k = 0;
        loop {
            if k == ms {
                let theta = c.beta_nu / cfg.eta_s;
                return Ok(WsCoeffs {
                    terms,
                    eta_s: cfg.eta_s,
                    beta_nu: c.beta_nu,
                    theta,
                    theta_tilde: theta - cfg.wt_rate(),
                    rho: 1.0 - c.beta_nu * cfg.nak.omega / cfg.nak.m,
                });
            }
            index[k] += 1;
            if index[k] < per {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

impl WsCoeffs {
    /// Writes W_s as a mixture of Gamma(Λ, Θ) laws: weight Ξ Γ(Λ)/β_ν^Λ per Λ.
    pub fn gamma_mixture(&self) -> Vec<(usize, f64)> {
        let mut by_shape: BTreeMap<usize, f64> = BTreeMap::new();
        for t in &self.terms {
            let lambda = t.shape as f64;
            let w = (t.xi.ln() + ln_gamma(lambda).unwrap_or(0.0) - lambda * self.beta_nu.ln()).exp();
            *by_shape.entry(t.shape).or_insert(0.0) += w;
        }
        by_shape.into_iter().collect()
    }
}

fn check_w(w: f64) -> Result<()> {
    if !(w >= 0.0) {
        return domain(format!("interference density needs w >= 0, got {w}"));
    }
    Ok(())
}

pub fn ws_pdf(coeffs: &WsCoeffs, w: f64) -> Result<f64> {
    check_w(w)?;
    if w == 0.0 {
        return Ok(coeffs.terms.iter().filter(|t| t.shape == 1).map(|t| t.xi / coeffs.eta_s).sum());
    }
    let (lw, le) = (w.ln(), coeffs.eta_s.ln());
    Ok(coeffs
        .terms
        .iter()
        .map(|t| {
            let l = t.shape as f64;
            (t.xi.ln() - l * le + (l - 1.0) * lw - coeffs.theta * w).exp()
        })
        .sum())
}

/// Gamma density of W_t with shape m_t M_t and rate m_t/(Ω_t η_t).
pub fn wt_pdf(cfg: &InterferenceConfig, w: f64) -> Result<f64> {
    check_w(w)?;
    if cfg.mt_count == 0 {
        return domain("W_t is identically zero when there are no terrestrial interferers");
    }
    let (k, r) = (cfg.wt_shape(), cfg.wt_rate());
    if w == 0.0 {
        return Ok(if k < 1.0 { f64::INFINITY } else if k == 1.0 { r } else { 0.0 });
    }
    Ok((k * r.ln() + (k - 1.0) * w.ln() - r * w - ln_gamma(k)?).exp())
}

/// Density of W_c = W_s + W_t in the closed confluent form; falls back to
/// the single-class densities when one class is absent.
pub fn wc_pdf(cfg: &InterferenceConfig, coeffs: Option<&WsCoeffs>, w: f64) -> Result<f64> {
    check_w(w)?;
    match (cfg.ms, cfg.mt_count) {
        (0, 0) => domain("W_c is identically zero"),
        (0, _) => wt_pdf(cfg, w),
        (_, 0) => ws_pdf(coeffs.ok_or_else(|| missing_coeffs())?, w),
        _ => {
            let coeffs = coeffs.ok_or_else(missing_coeffs)?;
            if w == 0.0 {
                return Ok(0.0);
            }
            let (k, r) = (cfg.wt_shape(), cfg.wt_rate());
            let policy = EvalPolicy::default().with_max_terms(5000);
            let mut total = 0.0;
            for t in &coeffs.terms {
                let l = t.shape as f64;
                let tau0 = l + k;
                let ln_conf = if coeffs.theta_tilde.abs() < 1e-12 {
                    0.0
                } else {
                    ln_kummer_1f1(l, tau0, -coeffs.theta_tilde * w, policy)?
                };
                let ln_front = t.xi.ln() - l * coeffs.eta_s.ln() + k * r.ln() + beta_fn(k, l)?.ln()
                    - ln_gamma(k)?
                    + (tau0 - 1.0) * w.ln()
                    - r * w;
                total += (ln_front + ln_conf).exp();
            }
            Ok(total)
        }
    }
}

fn missing_coeffs() -> OstnError {
    OstnError::Domain("W_s coefficients required when satellite interferers are present".into())
}

/// One component of W_c written as X + Y with X ~ Gamma(a1, r1) and
/// Y ~ Gamma(a2, r2), with r2 ≥ r1 whenever both are present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPair {
    pub weight: f64,
    pub a1: f64,
    pub r1: f64,
    pub a2: f64,
    pub r2: f64,
}

impl GammaPair {
    pub fn total_shape(&self) -> f64 {
        self.a1 + self.a2
    }
}

/// W_c as a finite mixture of two-gamma sums, the form the expectation
/// kernels work on.
#[derive(Debug, Clone, PartialEq)]
pub struct WcMixture {
    pub parts: Vec<GammaPair>,
    /// Probability mass dropped by truncating the interferer series.
    pub dropped_mass: f64,
}

/// Components below this weight are dropped from the mixture.
const MIXTURE_FLOOR: f64 = 1e-300;

impl WcMixture {
    pub fn new(cfg: &InterferenceConfig, truncation: usize) -> Result<Self> {
        cfg.validate()?;
        let kt = cfg.wt_shape();
        let ct = cfg.wt_rate();
        if cfg.ms == 0 {
            let parts = if cfg.mt_count == 0 {
                vec![]
            } else {
                vec![GammaPair { weight: 1.0, a1: 0.0, r1: ct, a2: kt, r2: ct }]
            };
            return Ok(Self { parts, dropped_mass: 0.0 });
        }
        let ws = ws_coeffs(cfg, truncation)?;
        let mixture = ws.gamma_mixture();
        let mass: f64 = mixture.iter().map(|(_, w)| w).sum();
        let parts = mixture
            .into_iter()
            .filter(|(_, w)| *w > MIXTURE_FLOOR)
            .map(|(shape, weight)| {
                let (ls, th) = (shape as f64, ws.theta);
                if cfg.mt_count == 0 {
                    GammaPair { weight, a1: 0.0, r1: th, a2: ls, r2: th }
                } else if ct >= th {
                    GammaPair { weight, a1: ls, r1: th, a2: kt, r2: ct }
                } else {
                    GammaPair { weight, a1: kt, r1: ct, a2: ls, r2: th }
                }
            })
            .collect();
        Ok(Self { parts, dropped_mass: (1.0 - mass).max(0.0) })
    }

    /// True when W_c ≡ 0.
    pub fn is_degenerate(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.parts.iter().map(|p| p.weight * (p.a1 / p.r1 + p.a2 / p.r2)).sum()
    }

    /// A point w with P(W_c > w) below `tail`, from a Chernoff bound.
    pub fn tail_bound(&self, tail: f64) -> f64 {
        if self.parts.is_empty() {
            return 0.0;
        }
        let rate = self.parts.iter().map(|p| p.r1.min(p.r2)).fold(f64::INFINITY, f64::min);
        let theta = 0.5 * rate;
        let ln_mgf = self
            .parts
            .iter()
            .map(|p| {
                p.weight
                    * ((1.0 - theta / p.r1).powf(-p.a1) * (1.0 - theta / p.r2).powf(-p.a2))
            })
            .sum::<f64>()
            .ln();
        ((ln_mgf - tail.ln()) / theta).max(0.0)
    }

    /// Density of W_c evaluated from the mixture, used as a cross-check of
    /// [`wc_pdf`].
    pub fn pdf(&self, w: f64) -> Result<f64> {
        check_w(w)?;
        let policy = EvalPolicy::default().with_max_terms(5000);
        let mut total = 0.0;
        for p in &self.parts {
            let tau0 = p.a1 + p.a2;
            if w == 0.0 {
                if tau0 < 1.0 {
                    return Ok(f64::INFINITY);
                }
                if tau0 == 1.0 {
                    total += p.weight * p.r2.powf(p.a2) * p.r1.powf(p.a1);
                }
                continue;
            }
            let ln_conf = if p.a1 == 0.0 { 0.0 } else { ln_kummer_1f1(p.a1, tau0, (p.r2 - p.r1) * w, policy)? };
            let ln = p.weight.ln() + p.a1 * p.r1.ln() + p.a2 * p.r2.ln() - ln_gamma(tau0)?
                + (tau0 - 1.0) * w.ln()
                - p.r2 * w;
            total += (ln + ln_conf).exp();
        }
        Ok(total)
    }
}

/// Draws W_c as the sum of individual interferer gains.
#[derive(Debug, Clone)]
pub struct WcSampler {
    ms: usize,
    mt: usize,
    sr: SrSampler,
    nak: NakagamiSampler,
}

impl WcSampler {
    pub fn new(cfg: &InterferenceConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            ms: cfg.ms,
            mt: cfg.mt_count,
            sr: SrSampler::new(&cfg.sr, cfg.eta_s)?,
            nak: NakagamiSampler::new(&cfg.nak, cfg.eta_t)?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut w = 0.0;
        for _ in 0..self.ms {
            w += self.sr.sample(rng);
        }
        for _ in 0..self.mt {
            w += self.nak.sample(rng);
        }
        w
    }
}

/// One W_c draw; build a [`WcSampler`] when drawing repeatedly.
pub fn sample_wc<R: Rng + ?Sized>(cfg: &InterferenceConfig, rng: &mut R) -> Result<f64> {
    Ok(WcSampler::new(cfg)?.sample(rng))
}

/// The sample sizes used when a coefficient expansion is checked against a
/// longer one.
pub fn default_truncation(sr: &SrParams) -> usize {
    if crate::fading::is_integer(sr.m) {
        sr.m.round() as usize
    } else {
        crate::fading::DEFAULT_SR_TERMS
    }
}

/// Convenience for tests and examples: unified coefficients of the interferer link.
pub fn interferer_coeffs(cfg: &InterferenceConfig, truncation: usize) -> Result<SrUnifiedCoeffs> {
    crate::fading::sr_coeffs(&cfg.sr, cfg.sr_mode, truncation)
}
