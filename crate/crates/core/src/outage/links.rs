//! Link distributions in the raw received power x, as [`ExpPoly`]s.

use crate::error::Result;
use crate::fading::{sr_coeffs, sr_coeffs_adaptive, SeriesMode, SrUnifiedCoeffs};
use crate::interference::{default_truncation, WcMixture};
use crate::specfun::{gamma_q, ln_gamma, LogValue};

use super::expoly::{Atom, ExpPoly, SeriesControl, SeriesReport};
use super::kernel::{ExpectationKernel, KernelMode};
use super::OutageContext;

/// P(W_c > tail point) used to size the series.
const U_TAIL: f64 = 1e-17;
/// Below this upper regularized gamma the cdf is taken as exactly 1.
const SATURATED: f64 = 1e-18;

pub(crate) fn ac_coeffs(ctx: &OutageContext) -> Result<SrUnifiedCoeffs> {
    match (ctx.sat_mode, ctx.truncations.sr_terms) {
        (SeriesMode::Int, _) => sr_coeffs(&ctx.sat_link, SeriesMode::Int, 0),
        (SeriesMode::Nint, Some(n)) => sr_coeffs(&ctx.sat_link, SeriesMode::Nint, n),
        (SeriesMode::Nint, None) => sr_coeffs_adaptive(&ctx.sat_link, 1e-17, 400),
    }
}

pub(crate) fn interference_mixture(ctx: &OutageContext) -> Result<WcMixture> {
    let cfg = ctx.interf.at_snr(ctx.eta);
    let n = ctx.truncations.sr_terms.unwrap_or_else(|| default_truncation(&cfg.sr));
    WcMixture::new(&cfg, n)
}

pub(crate) struct Engine {
    pub mode: KernelMode,
    ac: SrUnifiedCoeffs,
    eta: f64,
    pub kernel: ExpectationKernel,
    /// Upper end of the effective support of u.
    pub u_hi: f64,
    pub ctl: SeriesControl,
    pub report: SeriesReport,
}

impl Engine {
    pub fn new(ctx: &OutageContext, mode: KernelMode) -> Result<Self> {
        let mix = interference_mixture(ctx)?;
        let u_hi = 1.0 + mix.tail_bound(U_TAIL);
        Ok(Self {
            mode,
            ac: ac_coeffs(ctx)?,
            eta: ctx.eta,
            kernel: ExpectationKernel::new(mix, mode),
            u_hi,
            ctl: ctx.truncations.control(),
            report: SeriesReport::default(),
        })
    }

    fn theta(&self) -> f64 {
        self.ac.beta_nu / self.eta
    }

    /// Survival function of the A→C gain, α e^(-Θx) Σ A_m x^m.
    pub fn sf_ac(&self) -> ExpPoly {
        let th = self.theta();
        let la = self.ac.alpha.ln();
        ExpPoly::from_atoms(self.ac.survival_coeffs(self.eta).into_iter().enumerate().filter(|(_, a)| *a != 0.0).map(
            |(m, a)| Atom::new(LogValue::from_f64(a) * LogValue::from_ln(la), m as f64, th),
        ))
    }

    /// Density of the A→C gain, α e^(-Θx) Σ ζ_κ x^κ / η^(κ+1).
    pub fn pdf_ac(&self) -> ExpPoly {
        let th = self.theta();
        let (la, le) = (self.ac.alpha.ln(), self.eta.ln());
        ExpPoly::from_atoms(self.ac.zeta.iter().enumerate().filter(|(_, z)| **z != 0.0).map(|(k, z)| {
            Atom::new(LogValue::from_f64(*z) * LogValue::from_ln(la - (k as f64 + 1.0) * le), k as f64, th)
        }))
    }

    /// Distribution function of the A→C gain, accurate on [0, x_hi].
    /// The series engine uses the positive form
    /// e^(-Θx) Σ_n (Θx)^n/n! Σ_(κ<n) π_κ.
    pub fn cdf_ac(&mut self, x_hi: f64) -> ExpPoly {
        if self.mode == KernelMode::Closed {
            return self.sf_ac().one_minus();
        }
        let th = self.theta();
        let weights = self.ac.mixture_weights();
        let (n_terms, tail) = super::expoly::series_length(0.0, th * x_hi, self.ctl);
        let n_terms = n_terms.max(weights.len() + 1) + 1;
        self.note(n_terms, tail);
        let lth = th.ln();
        let mut cum = 0.0;
        let mut out = ExpPoly::zero();
        for n in 1..=n_terms {
            if let Some(w) = weights.get(n - 1) {
                cum += w;
            }
            let nf = n as f64;
            let lc = nf * lth - ln_gamma(nf + 1.0).unwrap_or(f64::INFINITY);
            out.push(Atom::new(LogValue::from_f64(cum) * LogValue::from_ln(lc), nf, th));
        }
        out
    }

    /// Nakagami gain with shape m and rate `rate` (= m/(Ωη)).
    pub fn pdf_nak(m: f64, rate: f64) -> ExpPoly {
        let lc = m * rate.ln() - ln_gamma(m).unwrap_or(f64::INFINITY);
        ExpPoly::from_atoms([Atom::new(LogValue::from_ln(lc), m - 1.0, rate)])
    }

    /// Survival function e^(-rx) Σ_(j<m) (rx)^j/j!, integer m.
    fn sf_nak_finite(m: f64, rate: f64) -> ExpPoly {
        let n = m.round() as usize;
        let lr = rate.ln();
        ExpPoly::from_atoms((0..n).map(|j| {
            let jf = j as f64;
            Atom::new(LogValue::from_ln(jf * lr - ln_gamma(jf + 1.0).unwrap_or(0.0)), jf, rate)
        }))
    }

    /// Distribution function of a Nakagami gain, accurate on [x_lo, x_hi].
    pub fn cdf_nak(&mut self, m: f64, rate: f64, x_lo: f64, x_hi: f64) -> ExpPoly {
        if self.mode == KernelMode::Closed {
            return Self::sf_nak_finite(m, rate).one_minus();
        }
        if x_lo > 0.0 && gamma_q(m, rate * x_lo).is_ok_and(|q| q < SATURATED) {
            return ExpPoly::one();
        }
        let (n_terms, tail) = super::expoly::series_length(m, rate * x_hi, self.ctl);
        self.note(n_terms, tail);
        let lr = rate.ln();
        ExpPoly::from_atoms((0..n_terms).map(|k| {
            let p = m + k as f64;
            Atom::new(LogValue::from_ln(p * lr - ln_gamma(p + 1.0).unwrap_or(f64::INFINITY)), p, rate)
        }))
    }

    pub fn sf_nak(&mut self, m: f64, rate: f64, x_lo: f64, x_hi: f64) -> ExpPoly {
        if self.mode == KernelMode::Closed {
            return Self::sf_nak_finite(m, rate);
        }
        self.cdf_nak(m, rate, x_lo, x_hi).one_minus()
    }

    /// P(min(A, B) ≤ x) for one relay, accurate on [x_lo, x_hi].
    pub fn cdf_min(&mut self, m_cb: f64, rate_cb: f64, x_lo: f64, x_hi: f64) -> ExpPoly {
        match self.mode {
            KernelMode::Closed => self.sf_ac().mul(&Self::sf_nak_finite(m_cb, rate_cb)).one_minus(),
            KernelMode::Series => {
                let fa = self.cdf_ac(x_hi);
                let fb = self.cdf_nak(m_cb, rate_cb, x_lo, x_hi);
                let both = fa.mul(&fb);
                let mut out = fa.plus(&fb);
                out.add_scaled(&both, LogValue::from_f64(-1.0));
                out
            }
        }
    }

    pub fn note(&mut self, terms: usize, tail: f64) {
        self.report.merge(SeriesReport { max_terms: terms, capped: terms >= self.ctl.cap, worst_tail: tail });
    }

    pub fn integral(&mut self, p: &ExpPoly, lo: f64, hi: f64) -> Result<ExpPoly> {
        let (out, rep) = p.integral(lo, hi, self.ctl)?;
        self.report.merge(rep);
        Ok(out)
    }
}
