use crate::error::Result;

use super::asymptotic::{diversity_order, sat_op_asymptotic};
use super::kernel::KernelMode;
use super::links::Engine;
use super::{clamp_probability, series_warnings, Branch, Network, OutageContext, OutagePoint, SeriesReport};

/// Lower bound on the satellite outage probability,
/// E_u[(1 - F̄_ac(γ̃_p u) F̄_cb(γ̃_p u))^K], using the engine that matches
/// `ctx.case`.
pub fn sat_op_bound(ctx: &OutageContext) -> Result<OutagePoint> {
    sat_op_bound_via(ctx, ctx.case.kernel_mode())
}

/// As [`sat_op_bound`] with an explicit engine. The series engine accepts
/// integer parameters too, which is how the two engines are cross-checked.
pub fn sat_op_bound_via(ctx: &OutageContext, mode: KernelMode) -> Result<OutagePoint> {
    ctx.validate()?;
    let diversity = diversity_order(ctx, Network::Satellite);
    let Some(gt) = ctx.gamma_tilde_p() else {
        return Ok(OutagePoint {
            op_bound: 1.0,
            op_asymptotic: None,
            diversity,
            branch: Branch::SatHardOutage,
            clamped: false,
            series: SeriesReport::default(),
            warnings: vec![],
        });
    };
    let mut e = Engine::new(ctx, mode)?;
    let (lo, hi) = (gt, gt * e.u_hi);
    let rate_cb = ctx.cb_link.rate(ctx.eta);
    let f_min = e.cdf_min(ctx.cb_link.m, rate_cb, lo, hi);
    let integrand = f_min.pow(ctx.k_relays).rescale(gt);
    let raw = e.kernel.expect(&integrand)?;
    let (op, clamped) = clamp_probability(raw);
    Ok(OutagePoint {
        op_bound: op,
        op_asymptotic: sat_op_asymptotic(ctx).ok().map(|a| a.value),
        diversity,
        branch: Branch::SatBound(ctx.case),
        clamped,
        warnings: series_warnings(&e.report),
        series: e.report,
    })
}
