//! Shadowed-Rician and Nakagami-m power-gain statistics and samplers.
//!
//! Shadowed-Rician (SR) gains use the unified series form
//! f(x) = α Σ_κ ζ(κ)/η^(κ+1) x^κ e^(-β_ν x/η), which is a finite sum when the
//! severity m is an integer and a truncated infinite sum otherwise.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{domain, OstnError, Result};
use crate::specfun::{gamma_p, ln_gamma, pochhammer};

/// Tolerance used to decide whether a severity parameter is an integer.
pub const INTEGER_TOL: f64 = 1e-9;

/// Default cut for non-integer SR series.
pub const DEFAULT_SR_TERMS: usize = 50;

pub fn is_integer(m: f64) -> bool {
    (m - m.round()).abs() <= INTEGER_TOL && m.round() >= 1.0
}

/// Whether an SR series is the finite integer-m form or the infinite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SeriesMode {
    Int,
    Nint,
}

impl SeriesMode {
    /// Integer m uses the finite form; anything else the infinite one.
    pub fn detect(m: f64) -> Self {
        if is_integer(m) {
            SeriesMode::Int
        } else {
            SeriesMode::Nint
        }
    }
}

/// Shadowed-Rician parameters: severity `m`, half multipath power `b`, LOS power `omega`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SrParams {
    pub m: f64,
    pub b: f64,
    pub omega: f64,
}

impl SrParams {
    pub fn new(m: f64, b: f64, omega: f64) -> Result<Self> {
        let p = Self { m, b, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return domain(format!("SR severity m must be positive, got {}", self.m));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return domain(format!("SR multipath power b must be positive, got {}", self.b));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return domain(format!("SR LOS power must be nonnegative, got {}", self.omega));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        let two_b = 2.0 * self.b;
        (two_b * self.m / (two_b * self.m + self.omega)).powf(self.m) / two_b
    }

    pub fn beta(&self) -> f64 {
        1.0 / (2.0 * self.b)
    }

    pub fn delta(&self) -> f64 {
        let two_b = 2.0 * self.b;
        self.omega / (two_b * (two_b * self.m + self.omega))
    }

    /// E[|h|²] = 2b + Ω.
    pub fn mean_power(&self) -> f64 {
        2.0 * self.b + self.omega
    }
}

/// Nakagami-m parameters: severity `m` and average power `omega`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NakagamiParams {
    pub m: f64,
    pub omega: f64,
}

impl NakagamiParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        let p = Self { m, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return domain(format!("Nakagami severity must be positive, got {}", self.m));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return domain(format!("Nakagami power must be positive, got {}", self.omega));
        }
        Ok(())
    }

    /// Rate m/(Ωη) of the gamma-distributed gain at SNR `eta`.
    pub fn rate(&self, eta: f64) -> f64 {
        self.m / (self.omega * eta)
    }
}

/// Coefficients of the unified SR series.
#[derive(Debug, Clone, PartialEq)]
pub struct SrUnifiedCoeffs {
    pub kind: SeriesMode,
    /// Highest index of the series: `Some(m-1)` for integer m, `None` when infinite.
    pub varpi: Option<usize>,
    pub zeta: Vec<f64>,
    pub beta_nu: f64,
    pub alpha: f64,
    /// Number of terms kept (equals `zeta.len()`).
    pub truncation: usize,
}

/// Builds the unified SR coefficients. `truncation` is the number of terms kept
/// for the non-integer series and is ignored for integer m.
pub fn sr_coeffs(p: &SrParams, mode: SeriesMode, truncation: usize) -> Result<SrUnifiedCoeffs> {
    p.validate()?;
    let (alpha, beta, delta) = (p.alpha(), p.beta(), p.delta());
    match mode {
        SeriesMode::Int => {
            if !is_integer(p.m) {
                return Err(OstnError::Mode(format!(
                    "integer series requested for non-integer m = {}",
                    p.m
                )));
            }
            let m = p.m.round() as usize;
            let mut zeta = Vec::with_capacity(m);
            for k in 0..m {
                let fact = (ln_gamma(k as f64 + 1.0)?).exp();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                zeta.push(sign * pochhammer(1.0 - m as f64, k) * delta.powi(k as i32) / (fact * fact));
            }
            Ok(SrUnifiedCoeffs {
                kind: mode,
                varpi: Some(m - 1),
                zeta,
                beta_nu: beta - delta,
                alpha,
                truncation: m,
            })
        }
        SeriesMode::Nint => {
            if truncation == 0 {
                return domain("SR series truncation must be at least one term");
            }
            let mut zeta = Vec::with_capacity(truncation);
            let mut z = 1.0;
            for k in 0..truncation {
                if k > 0 {
                    let kf = k as f64;
                    z *= (p.m + kf - 1.0) * delta / (kf * kf);
                }
                zeta.push(z);
            }
            Ok(SrUnifiedCoeffs {
                kind: mode,
                varpi: None,
                zeta,
                beta_nu: beta,
                alpha,
                truncation,
            })
        }
    }
}

/// Non-integer series grown until the last term's probability mass is below
/// `rel_tol` of the accumulated mass (capped at `max_terms`).
pub fn sr_coeffs_adaptive(p: &SrParams, rel_tol: f64, max_terms: usize) -> Result<SrUnifiedCoeffs> {
    let mut n = 8usize.min(max_terms);
    loop {
        let c = sr_coeffs(p, SeriesMode::Nint, n)?;
        let w = c.mixture_weights();
        let mass: f64 = w.iter().sum();
        let last = *w.last().expect("at least one term");
        if last <= rel_tol * mass || n >= max_terms {
            return Ok(c);
        }
        n = (2 * n).min(max_terms);
    }
}

impl SrUnifiedCoeffs {
    /// Picks the integer form when m is an integer and the truncated series otherwise.
    pub fn auto(p: &SrParams, truncation: usize) -> Result<Self> {
        sr_coeffs(p, SeriesMode::detect(p.m), truncation)
    }

    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    /// Weights π_κ = α ζ(κ) κ! / β_ν^(κ+1); the gain is the π-mixture of
    /// Gamma(κ+1, rate β_ν/η) variables.
    pub fn mixture_weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.zeta.len());
        let mut fact_over_pow = 1.0 / self.beta_nu;
        for (k, z) in self.zeta.iter().enumerate() {
            if k > 0 {
                fact_over_pow *= k as f64 / self.beta_nu;
            }
            out.push(self.alpha * z * fact_over_pow);
        }
        out
    }

    /// Coefficients A_m of the survival function
    /// F̄(x) = α Σ_m A_m x^m e^(-Θx), Θ = β_ν/η.
    pub fn survival_coeffs(&self, eta: f64) -> Vec<f64> {
        let theta = self.beta_nu / eta;
        let n = self.zeta.len();
        // A_m = Σ_{κ≥m} ζ(κ)/η^(κ+1) κ!/m! Θ^-(κ+1-m) = Σ_{κ≥m} π_κ/α · Θ^m/m!
        let weights = self.mixture_weights();
        let mut tail = vec![0.0; n + 1];
        for k in (0..n).rev() {
            tail[k] = tail[k + 1] + weights[k] / self.alpha;
        }
        let mut scale = 1.0;
        (0..n)
            .map(|m| {
                if m > 0 {
                    scale *= theta / m as f64;
                }
                tail[m] * scale
            })
            .collect()
    }
}

fn check_x(x: f64, what: &str) -> Result<()> {
    if !(x >= 0.0) {
        return domain(format!("{what} needs a nonnegative argument, got {x}"));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return domain(format!("SNR must be positive and finite, got {eta}"));
    }
    Ok(())
}

/// Density of the SR power gain Λ = η|h|².
pub fn sr_gain_pdf(c: &SrUnifiedCoeffs, eta: f64, x: f64) -> Result<f64> {
    check_x(x, "SR pdf")?;
    check_eta(eta)?;
    let theta = c.beta_nu / eta;
    let mut sum = 0.0;
    let mut xp = 1.0 / eta;
    for (k, z) in c.zeta.iter().enumerate() {
        if k > 0 {
            xp *= x / eta;
        }
        sum += z * xp;
    }
    Ok(c.alpha * sum * (-theta * x).exp())
}

/// Distribution function of the SR power gain, as the Gamma mixture
/// Σ π_κ P(κ+1, Θx).
pub fn sr_gain_cdf(c: &SrUnifiedCoeffs, eta: f64, x: f64) -> Result<f64> {
    check_x(x, "SR cdf")?;
    check_eta(eta)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let theta = c.beta_nu / eta;
    let mut total = 0.0;
    for (k, w) in c.mixture_weights().iter().enumerate() {
        total += w * gamma_p(k as f64 + 1.0, theta * x)?;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Density of the Nakagami power gain: Gamma(m, scale Ωη/m).
pub fn nakagami_gain_pdf(p: &NakagamiParams, eta: f64, x: f64) -> Result<f64> {
    check_x(x, "Nakagami pdf")?;
    check_eta(eta)?;
    let r = p.rate(eta);
    if x == 0.0 {
        return Ok(match p.m {
            m if m < 1.0 => f64::INFINITY,
            m if m == 1.0 => r,
            _ => 0.0,
        });
    }
    let ln = p.m * r.ln() + (p.m - 1.0) * x.ln() - r * x - ln_gamma(p.m)?;
    Ok(ln.exp())
}

pub fn nakagami_gain_cdf(p: &NakagamiParams, eta: f64, x: f64) -> Result<f64> {
    check_x(x, "Nakagami cdf")?;
    check_eta(eta)?;
    gamma_p(p.m, p.rate(eta) * x)
}

/// Prebuilt sampler for η|h|² with SR-faded h.
///
/// h = ξe^(iφ) + z with ξ² ~ Gamma(m, Ω/m) and z circularly symmetric complex
/// Gaussian with per-component variance b. Because z is circularly symmetric
/// the phase φ does not change the distribution of |h|², so it is not drawn.
#[derive(Debug, Clone)]
pub struct SrSampler {
    los: Option<Gamma<f64>>,
    sigma: f64,
    eta: f64,
}

impl SrSampler {
    pub fn new(p: &SrParams, eta: f64) -> Result<Self> {
        p.validate()?;
        check_eta(eta)?;
        let los = if p.omega > 0.0 {
            Some(Gamma::new(p.m, p.omega / p.m).map_err(|e| OstnError::Domain(e.to_string()))?)
        } else {
            None
        };
        Ok(Self { los, sigma: p.b.sqrt(), eta })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let xi = self.los.as_ref().map_or(0.0, |g| g.sample(rng).sqrt());
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let re = xi + self.sigma * re;
        let im = self.sigma * im;
        self.eta * (re * re + im * im)
    }
}

/// Prebuilt sampler for the Nakagami power gain.
#[derive(Debug, Clone)]
pub struct NakagamiSampler {
    dist: Gamma<f64>,
}

impl NakagamiSampler {
    pub fn new(p: &NakagamiParams, eta: f64) -> Result<Self> {
        p.validate()?;
        check_eta(eta)?;
        let dist = Gamma::new(p.m, 1.0 / p.rate(eta)).map_err(|e| OstnError::Domain(e.to_string()))?;
        Ok(Self { dist })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.dist.sample(rng)
    }
}

/// One SR gain draw; build an [`SrSampler`] when drawing repeatedly.
pub fn sample_sr_gain<R: Rng + ?Sized>(p: &SrParams, eta: f64, rng: &mut R) -> Result<f64> {
    Ok(SrSampler::new(p, eta)?.sample(rng))
}

/// One Nakagami gain draw; build a [`NakagamiSampler`] when drawing repeatedly.
pub fn sample_nakagami_gain<R: Rng + ?Sized>(p: &NakagamiParams, eta: f64, rng: &mut R) -> Result<f64> {
    Ok(NakagamiSampler::new(p, eta)?.sample(rng))
}
