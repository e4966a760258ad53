//! Self-checks run by `ostn validate`: each closed form against an
//! independent evaluation at a handful of points.

use serde::Serialize;

use crate::error::Result;
use crate::interference::{default_truncation, WcMixture};
use crate::montecarlo::simulate;
use crate::outage::{iot_op_bound, iot_op_bound_via, sat_op_bound, sat_op_bound_via, KernelMode, OutageContext};
use crate::specfun::quad::{integrate, QuadOptions};
use crate::specfun::{gamma_fn, gamma_p, gauss_2f1, kummer_1f1, EvalPolicy};

use super::presets::preset;
use super::sweep::db_to_linear;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn quad(f: impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    Ok(integrate(f, a, b, QuadOptions::default())?.value)
}

fn kummer_integral() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (a, b, z) in [(1.5, 3.2, 2.0), (2.0, 4.5, -3.0), (1.0, 2.5, 0.7)] {
        let norm = gamma_fn(b)? / (gamma_fn(a)? * gamma_fn(b - a)?);
        let want = norm * quad(|t| (z * t).exp() * t.powf(a - 1.0) * (1.0 - t).powf(b - a - 1.0), 0.0, 1.0)?;
        worst = worst.max(rel(kummer_1f1(a, b, z, EvalPolicy::default())?, want));
    }
    Ok((worst < 1e-9, format!("worst relative error {worst:.2e}")))
}

fn euler_integral() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (a, b, c, z) in [(0.8, 1.5, 3.0, -2.5), (1.2, 2.0, 3.5, 0.6), (2.5, 1.0, 2.0, -9.0)] {
        let norm = gamma_fn(c)? / (gamma_fn(b)? * gamma_fn(c - b)?);
        let want = norm
            * quad(|t| t.powf(b - 1.0) * (1.0 - t).powf(c - b - 1.0) * (1.0 - z * t).powf(-a), 0.0, 1.0)?;
        worst = worst.max(rel(gauss_2f1(a, b, c, z, EvalPolicy::default())?, want));
    }
    Ok((worst < 1e-9, format!("worst relative error {worst:.2e}")))
}

fn incomplete_gamma() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (a, x) in [(2.5, 3.0), (0.6, 0.2), (7.3, 4.0)] {
        let want = quad(|t| t.powf(a - 1.0) * (-t).exp(), 0.0, x)? / gamma_fn(a)?;
        worst = worst.max(rel(gamma_p(a, x)?, want));
    }
    Ok((worst < 1e-9, format!("worst relative error {worst:.2e}")))
}

fn interference_density(ctx: &OutageContext) -> Result<(bool, String)> {
    let mix = WcMixture::new(&ctx.interf.at_snr(ctx.eta), default_truncation(&ctx.interf.sr))?;
    let hi = mix.tail_bound(1e-14);
    let mut total = 0.0;
    let mut lo = 0.0;
    for cut in [1e-3, 0.1, hi / 4.0, hi] {
        total += quad(|w| mix.pdf(w).unwrap_or(f64::NAN), lo, cut)?;
        lo = cut;
    }
    Ok(((total - 1.0).abs() < 1e-5, format!("integral {total:.8}")))
}

fn engines_agree(ctx: &OutageContext) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for db in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let c = ctx.with_eta(db_to_linear(db));
        let s = rel(sat_op_bound_via(&c, KernelMode::Series)?.op_bound, sat_op_bound_via(&c, KernelMode::Closed)?.op_bound);
        let i = rel(iot_op_bound_via(&c, KernelMode::Series)?.op_bound, iot_op_bound_via(&c, KernelMode::Closed)?.op_bound);
        worst = worst.max(s).max(i);
    }
    Ok((worst < 1e-5, format!("worst relative gap {worst:.2e}")))
}

fn bound_vs_simulation(ctx: &OutageContext, trials: u64) -> Result<(bool, String)> {
    let sim = simulate(ctx, trials, 7)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, analytic, est) in [
        ("satellite", sat_op_bound(ctx)?.op_bound, sim.sat_bound),
        ("iot", iot_op_bound(ctx)?.op_bound, sim.iot_bound),
    ] {
        let sd = (analytic * (1.0 - analytic) / trials as f64).sqrt().max(est.stderr);
        let z = (est.p - analytic).abs() / sd.max(f64::MIN_POSITIVE);
        ok &= z <= 3.0;
        detail.push(format!("{name} {analytic:.4e} vs {:.4e} ({z:.2} sd)", est.p));
    }
    Ok((ok, detail.join("; ")))
}

fn hard_outage(ctx: &OutageContext) -> Result<(bool, String)> {
    let c = OutageContext { rate_p: 1.1, ..ctx.clone() };
    let op = sat_op_bound(&c)?.op_bound;
    let mc = simulate(&c, 100_000, 3)?.sat_exact.p;
    Ok((op == 1.0 && mc > 0.999, format!("analytic {op}, simulated {mc}")))
}

/// Runs every check; `trials` sizes the simulation comparison.
pub fn run_checks(trials: u64) -> Vec<Check> {
    let s1 = preset("s1").map(|p| p.ctx.with_eta(10.0));
    let s4 = preset("s4").map(|p| p.ctx.with_eta(10.0));
    let with = |ctx: &Result<OutageContext>, f: &dyn Fn(&OutageContext) -> Result<(bool, String)>| match ctx {
        Ok(c) => f(c),
        Err(e) => Err(e.clone()),
    };
    vec![
        check("1F1 against its integral representation", kummer_integral),
        check("2F1 against the Euler integral", euler_integral),
        check("regularised incomplete gamma against quadrature", incomplete_gamma),
        check("interference density integrates to one (s1)", || with(&s1, &interference_density)),
        check("interference density integrates to one (s4)", || with(&s4, &interference_density)),
        check("series and closed engines agree (s1)", || with(&s1, &engines_agree)),
        check("analytic bounds match simulation (s1, 10 dB)", || with(&s1, &|c| bound_vs_simulation(c, trials))),
        check("analytic bounds match simulation (s4, 10 dB)", || with(&s4, &|c| bound_vs_simulation(c, trials))),
        check("hard outage when the power split cannot carry the rate", || with(&s1, &hard_outage)),
    ]
}
