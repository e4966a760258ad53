use crate::error::{domain, Result};
use crate::specfun::LogValue;

use super::asymptotic::{diversity_order, iot_op_asymptotic};
use super::expoly::ExpPoly;
use super::kernel::KernelMode;
use super::links::Engine;
use super::{clamp_probability, series_warnings, Branch, Network, OutageContext, OutagePoint};

/// H(s) = P(A_(k*) ≤ s) for the relay picked by max_k min(A_k, B_k),
/// accurate for s ∈ [lo, hi]:
/// H(s) = K ∫₀^s f_A(y) [F̄_B(y) F_Z(y)^(K-1) + ∫₀^y f_B F_Z^(K-1)] dy.
fn selected_cdf_poly(e: &mut Engine, ctx: &OutageContext, lo: f64, hi: f64) -> Result<ExpPoly> {
    let k = ctx.k_relays;
    if k == 1 {
        return Ok(e.cdf_ac(hi));
    }
    let m_cb = ctx.cb_link.m;
    let rate_cb = ctx.cb_link.rate(ctx.eta);
    let fz = e.cdf_min(m_cb, rate_cb, 0.0, hi).pow(k - 1);
    let sf_cb = e.sf_nak(m_cb, rate_cb, 0.0, hi);
    let inner = e.integral(&Engine::pdf_nak(m_cb, rate_cb).mul(&fz), 0.0, hi)?;
    let bracket = sf_cb.mul(&fz).plus(&inner);
    let h = e.integral(&e.pdf_ac().mul(&bracket), lo, hi)?;
    Ok(h.scaled(LogValue::from_f64(k as f64)))
}

/// Conditional cdf of the selected relay's normalised first-hop gain
/// A_(k*)/(1+w), evaluated at x.
pub fn iot_selected_cdf(ctx: &OutageContext, x: f64, w: f64) -> Result<f64> {
    iot_selected_cdf_via(ctx, ctx.case.kernel_mode(), x, w)
}

pub fn iot_selected_cdf_via(ctx: &OutageContext, mode: KernelMode, x: f64, w: f64) -> Result<f64> {
    ctx.validate()?;
    if !(x >= 0.0 && w >= 0.0 && x.is_finite() && w.is_finite()) {
        return domain(format!("selected cdf needs finite x, w >= 0, got x={x}, w={w}"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let s = x * (1.0 + w);
    let mut e = Engine::new(ctx, mode)?;
    let h = selected_cdf_poly(&mut e, ctx, s, s)?;
    Ok(h.eval(s).clamp(0.0, 1.0))
}

/// Lower bound on the IoT outage probability,
/// E_u[F_X + (1 - F_X) H(γ̃_s u)] when γ_s ≥ 1/μ' and E_u[F_X] otherwise,
/// with F_X(u) the C→D gain cdf at the rate m_cd γ_s/(Ω_cd η (1-μ)).
pub fn iot_op_bound(ctx: &OutageContext) -> Result<OutagePoint> {
    iot_op_bound_via(ctx, ctx.case.kernel_mode())
}

pub fn iot_op_bound_via(ctx: &OutageContext, mode: KernelMode) -> Result<OutagePoint> {
    ctx.validate()?;
    let mut e = Engine::new(ctx, mode)?;
    let gs = ctx.gamma_s();
    let m_cd = ctx.cd_link.m;
    let a_cd = m_cd * gs / (ctx.cd_link.omega * ctx.eta * (1.0 - ctx.mu));
    let f_x = e.cdf_nak(m_cd, a_cd, 1.0, e.u_hi);
    let gt = ctx.gamma_tilde_s();
    let branch = if gt < 0.0 { Branch::IotDirectOnly(ctx.case) } else { Branch::IotFull(ctx.case) };
    let saturated = f_x.len() == 1 && f_x.atoms()[0].pow == 0.0 && f_x.atoms()[0].rate == 0.0;
    let integrand = if gt <= 0.0 || saturated {
        f_x
    } else {
        let u_hi = e.u_hi;
        let h = selected_cdf_poly(&mut e, ctx, gt, gt * u_hi)?.rescale(gt);
        let mut t = f_x.plus(&h);
        t.add_scaled(&f_x.mul(&h), LogValue::from_f64(-1.0));
        t
    };
    let raw = e.kernel.expect(&integrand)?;
    let (op, clamped) = clamp_probability(raw);
    Ok(OutagePoint {
        op_bound: op,
        op_asymptotic: iot_op_asymptotic(ctx).ok().map(|a| a.value),
        diversity: diversity_order(ctx, Network::Iot),
        branch,
        clamped,
        warnings: series_warnings(&e.report),
        series: e.report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::{nakagami_gain_pdf, sr_gain_cdf, sr_gain_pdf, NakagamiParams, SeriesMode, SrParams};
    use crate::outage::links::{ac_coeffs, interference_mixture};
    use crate::outage::tests::base_ctx;
    use crate::outage::{threshold, Case};
    use crate::specfun::gamma_p;
    use crate::specfun::quad::{integrate, QuadOptions};

    fn opts() -> QuadOptions {
        QuadOptions { rel_tol: 1e-11, abs_tol: 0.0, max_intervals: 4000 }
    }

    /// H(s) by nested quadrature of the order-statistic integrals.
    fn h_oracle(ctx: &OutageContext, s: f64) -> f64 {
        let c = ac_coeffs(ctx).unwrap();
        let cb = ctx.cb_link;
        let eta = ctx.eta;
        let k = ctx.k_relays as i32;
        let fz = |y: f64| {
            let fa = sr_gain_cdf(&c, eta, y).unwrap();
            let fb = gamma_p(cb.m, cb.rate(eta) * y).unwrap();
            fa + fb - fa * fb
        };
        let outer = |y: f64| {
            let sf_b = 1.0 - gamma_p(cb.m, cb.rate(eta) * y).unwrap();
            let inner = integrate(
                |t| nakagami_gain_pdf(&cb, eta, t).unwrap() * fz(t).powi(k - 1),
                0.0,
                y,
                opts(),
            )
            .unwrap()
            .value;
            sr_gain_pdf(&c, eta, y).unwrap() * (sf_b * fz(y).powi(k - 1) + inner)
        };
        k as f64 * integrate(outer, 0.0, s, opts()).unwrap().value
    }

    /// H on [0, s_max] by quadrature panel by panel, keeping the running
    /// inner integral ∫₀^y f_B F_Z^(K-1) at panel edges.
    struct HTable {
        edges: Vec<f64>,
        inner: Vec<f64>,
        outer: Vec<f64>,
        ctx: OutageContext,
    }

    impl HTable {
        fn new(ctx: &OutageContext, s_max: f64) -> Self {
            let mut edges = vec![0.0];
            let mut e = s_max * 1e-6;
            while e < s_max {
                edges.push(e);
                e *= 1.6;
            }
            edges.push(s_max);
            let mut t = HTable { edges: edges.clone(), inner: vec![0.0], outer: vec![0.0], ctx: ctx.clone() };
            for j in 1..edges.len() {
                let inner = t.inner[j - 1] + t.inner_from(j - 1, edges[j]);
                let outer = t.outer[j - 1] + t.outer_from(j - 1, edges[j]);
                t.inner.push(inner);
                t.outer.push(outer);
            }
            t
        }

        fn fz(&self, y: f64) -> f64 {
            let c = ac_coeffs(&self.ctx).unwrap();
            let fa = sr_gain_cdf(&c, self.ctx.eta, y).unwrap();
            let fb = gamma_p(self.ctx.cb_link.m, self.ctx.cb_link.rate(self.ctx.eta) * y).unwrap();
            fa + fb - fa * fb
        }

        fn inner_from(&self, j: usize, y: f64) -> f64 {
            let (cb, eta, k) = (self.ctx.cb_link, self.ctx.eta, self.ctx.k_relays as i32);
            integrate(|t| nakagami_gain_pdf(&cb, eta, t).unwrap() * self.fz(t).powi(k - 1), self.edges[j], y, opts())
                .unwrap()
                .value
        }

        fn outer_from(&self, j: usize, s: f64) -> f64 {
            let c = ac_coeffs(&self.ctx).unwrap();
            let (cb, eta, k) = (self.ctx.cb_link, self.ctx.eta, self.ctx.k_relays as i32);
            let f = |y: f64| {
                let sf_b = 1.0 - gamma_p(cb.m, cb.rate(eta) * y).unwrap();
                let inner = self.inner[j] + self.inner_from(j, y);
                sr_gain_pdf(&c, eta, y).unwrap() * (sf_b * self.fz(y).powi(k - 1) + inner)
            };
            integrate(f, self.edges[j], s, opts()).unwrap().value
        }

        fn h(&self, s: f64) -> f64 {
            let j = self.edges.partition_point(|&e| e <= s).saturating_sub(1);
            self.ctx.k_relays as f64 * (self.outer[j] + self.outer_from(j, s))
        }
    }

    fn bound_oracle(ctx: &OutageContext) -> f64 {
        let gs = ctx.gamma_s();
        let gt = ctx.gamma_tilde_s();
        let cd = ctx.cd_link;
        let a_cd = cd.m * gs / (cd.omega * ctx.eta * (1.0 - ctx.mu));
        let mix = interference_mixture(ctx).unwrap();
        let hi = mix.tail_bound(1e-14);
        let table = (gt > 0.0).then(|| HTable::new(ctx, gt * (1.0 + hi)));
        let g = |u: f64| {
            let fx = gamma_p(cd.m, a_cd * u).unwrap();
            match &table {
                None => fx,
                Some(t) => fx + (1.0 - fx) * t.h(gt * u),
            }
        };
        if mix.is_degenerate() {
            return g(1.0);
        }
        let mut total = 0.0;
        let mut lo = 0.0;
        let o = QuadOptions { rel_tol: 1e-9, ..opts() };
        for cut in [0.3, hi / 4.0, hi] {
            total += integrate(|w| mix.pdf(w).unwrap() * g(1.0 + w), lo, cut, o).unwrap().value;
            lo = cut;
        }
        total
    }

    fn case2_ctx() -> OutageContext {
        let mut ctx = base_ctx();
        ctx.case = Case::Case2;
        ctx.cb_link = NakagamiParams { m: 0.6, omega: 1.0 };
        ctx.cd_link = NakagamiParams { m: 1.77, omega: 1.0 };
        ctx.sat_link = SrParams { m: 1.95, b: 0.063, omega: 0.0005 };
        ctx.sat_mode = SeriesMode::Nint;
        ctx.interf.sr = SrParams { m: 0.95, b: 0.063, omega: 0.0005 };
        ctx.interf.sr_mode = SeriesMode::Nint;
        ctx.interf.nak.m = 1.77;
        ctx
    }

    #[test]
    fn selected_cdf_matches_nested_quadrature() {
        for ctx in [base_ctx(), case2_ctx()] {
            for (eta, k) in [(1.0, 2), (10.0, 3), (1000.0, 2)] {
                let c = OutageContext { k_relays: k, ..ctx.with_eta(eta) };
                for (x, w) in [(0.3, 0.0), (1.0, 0.5), (4.0, 2.0)] {
                    let got = iot_selected_cdf(&c, x, w).unwrap();
                    let want = h_oracle(&c, x * (1.0 + w));
                    assert!((got - want).abs() < 1e-9 * want.max(1e-12), "eta={eta} K={k} x={x}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn single_relay_selected_cdf_is_the_link_cdf() {
        let ctx = OutageContext { k_relays: 1, ..base_ctx().with_eta(5.0) };
        let c = ac_coeffs(&ctx).unwrap();
        let got = iot_selected_cdf(&ctx, 0.8, 1.5).unwrap();
        let want = sr_gain_cdf(&c, 5.0, 0.8 * 2.5).unwrap();
        assert!((got - want).abs() < 1e-13);
        assert_eq!(iot_selected_cdf(&ctx, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn bound_matches_quadrature() {
        for ctx in [base_ctx(), case2_ctx()] {
            for eta_db in [0.0, 15.0] {
                let c = ctx.with_eta(10f64.powf(eta_db / 10.0));
                let got = iot_op_bound(&c).unwrap().op_bound;
                let want = bound_oracle(&c);
                assert!((got - want).abs() < 1e-7 * want, "{:?} eta={eta_db}: {got} vs {want}", c.case);
            }
        }
    }

    #[test]
    fn below_threshold_keeps_direct_term_only() {
        // γ_s = 0.3 < 1/μ' = 1/3
        let rate_s = (1.3f64).log2() / 2.0;
        let ctx = OutageContext { rate_s, ..base_ctx().with_eta(10.0) };
        assert!((threshold(rate_s) - 0.3).abs() < 1e-12);
        let p = iot_op_bound(&ctx).unwrap();
        assert_eq!(p.branch, Branch::IotDirectOnly(Case::Case1));
        assert!((p.op_bound - bound_oracle(&ctx)).abs() < 1e-9);
    }

    #[test]
    fn branches_meet_at_threshold() {
        // γ_s = 1/μ' exactly and just above
        let base = base_ctx().with_eta(10.0);
        let rate_at = |g: f64| (1.0 + g).log2() / 2.0;
        let at = iot_op_bound(&OutageContext { rate_s: rate_at(1.0 / 3.0), ..base.clone() }).unwrap();
        let above = iot_op_bound(&OutageContext { rate_s: rate_at(1.0 / 3.0 + 1e-9), ..base }).unwrap();
        assert!((at.op_bound - above.op_bound).abs() < 1e-6);
    }

    #[test]
    fn mu_near_one_saturates() {
        for ctx in [base_ctx(), case2_ctx()] {
            let p = iot_op_bound(&ctx.with_mu(1.0 - 1e-9)).unwrap();
            assert!(p.op_bound > 0.999_999, "{}", p.op_bound);
        }
    }

    #[test]
    fn engines_agree_on_integer_parameters() {
        for eta_db in [0.0, 10.0, 20.0, 30.0, 40.0] {
            let ctx = base_ctx().with_eta(10f64.powf(eta_db / 10.0));
            let a = iot_op_bound_via(&ctx, KernelMode::Closed).unwrap().op_bound;
            let b = iot_op_bound_via(&ctx, KernelMode::Series).unwrap().op_bound;
            assert!((a - b).abs() < 1e-6 * b, "eta={eta_db}: {a} vs {b}");
        }
    }
}
