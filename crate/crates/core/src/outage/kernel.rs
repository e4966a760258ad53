//! Expectations E[u^p e^(-s u)] with u = 1 + W_c.
//!
//! For fixed s the base row n(q) = E[w^q (1+w)^c0 e^(-s w)] is computed
//! once, then raised to every integer power offset with the positive
//! recurrence n_(c+1)(q) = n_c(q) + n_c(q+1). The closed kernel evaluates
//! the base row through Gauss hypergeometric functions (integer powers
//! only); the series kernel through a Tricomi-U family and the confluent
//! series of the two-gamma density (any real power).

use std::collections::HashMap;

use crate::error::{domain, OstnError, Result};
use crate::interference::{GammaPair, WcMixture};
use crate::specfun::{gauss_2f1, laplace_u_family, ln_gamma, EvalPolicy, NeumaierSum};

use super::expoly::ExpPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum KernelMode {
    /// Integer powers, Gauss-hypergeometric base row.
    Closed,
    /// Real powers, Tricomi-U base row.
    Series,
}

const INT_SNAP: f64 = 1e-9;

/// Splits p into (fractional base, integer offset).
fn split_power(p: f64) -> (f64, usize) {
    let r = p.round();
    if (p - r).abs() < INT_SNAP {
        (0.0, r.max(0.0) as usize)
    } else {
        let f = p.floor();
        (p - f, f as usize)
    }
}

fn frac_key(c0: f64) -> i64 {
    (c0 * 1e9).round() as i64
}

fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[derive(Debug, Clone)]
pub struct ExpectationKernel {
    mix: WcMixture,
    mode: KernelMode,
    /// ln E[u^(c0+c) e^(-s u)] for c = 0..len, keyed by (s bits, c0 key).
    tables: HashMap<(u64, i64), Vec<f64>>,
}

impl ExpectationKernel {
    pub fn new(mix: WcMixture, mode: KernelMode) -> Self {
        Self { mix, mode, tables: HashMap::new() }
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn mixture(&self) -> &WcMixture {
        &self.mix
    }

    /// ln E[u^p e^(-s u)].
    pub fn ln_moment_exp(&mut self, p: f64, s: f64) -> Result<f64> {
        if !(p >= 0.0) || !(s >= 0.0) {
            return domain(format!("kernel needs p >= 0 and s >= 0, got p={p}, s={s}"));
        }
        let (c0, c) = split_power(p);
        self.ensure(s, c0, c)?;
        Ok(self.tables[&(s.to_bits(), frac_key(c0))][c])
    }

    /// E[poly(u)] for a polynomial in u.
    pub fn expect(&mut self, poly: &ExpPoly) -> Result<f64> {
        let mut need: HashMap<(u64, i64), (f64, f64, usize)> = HashMap::new();
        for a in poly.atoms() {
            if a.pow < 0.0 {
                return domain(format!("kernel needs nonnegative powers, got {}", a.pow));
            }
            let (c0, c) = split_power(a.pow);
            let e = need.entry((a.rate.to_bits(), frac_key(c0))).or_insert((a.rate, c0, 0));
            e.2 = e.2.max(c);
        }
        for (_, (s, c0, c)) in need {
            self.ensure(s, c0, c)?;
        }
        let mut logs = Vec::with_capacity(poly.len());
        for a in poly.atoms() {
            let (c0, c) = split_power(a.pow);
            let l = self.tables[&(a.rate.to_bits(), frac_key(c0))][c];
            logs.push((a.coef.sign, a.coef.ln_abs + l));
        }
        let top = logs.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let mut sum = NeumaierSum::new();
        for (sg, l) in logs {
            sum.add(sg * (l - top).exp());
        }
        Ok(sum.value() * top.exp())
    }

    fn ensure(&mut self, s: f64, c0: f64, c: usize) -> Result<()> {
        let k = (s.to_bits(), frac_key(c0));
        if self.tables.get(&k).is_some_and(|t| t.len() > c) {
            return Ok(());
        }
        let cmax = c.max(self.tables.get(&k).map_or(0, |t| 2 * t.len()));
        let table = self.build(s, c0, cmax)?;
        self.tables.insert(k, table);
        Ok(())
    }

    fn build(&self, s: f64, c0: f64, cmax: usize) -> Result<Vec<f64>> {
        if self.mix.is_degenerate() {
            return Ok(vec![-s; cmax + 1]);
        }
        let mut row = match self.mode {
            KernelMode::Closed => {
                if c0 != 0.0 {
                    return Err(OstnError::Mode(format!(
                        "closed-form kernel needs integer powers, got fractional part {c0}"
                    )));
                }
                self.base_row_closed(s, cmax)?
            }
            KernelMode::Series => self.base_row_series(s, c0, cmax)?,
        };
        let mut out = Vec::with_capacity(cmax + 1);
        out.push(row[0] - s);
        for _ in 1..=cmax {
            for q in 0..row.len() - 1 {
                row[q] = ln_add(row[q], row[q + 1]);
            }
            row.pop();
            out.push(row[0] - s);
        }
        Ok(out)
    }

    fn ln_prefactor(p: &GammaPair) -> Result<f64> {
        let mut l = p.weight.ln() - ln_gamma(p.total_shape())?;
        if p.a1 > 0.0 {
            l += p.a1 * p.r1.ln();
        }
        Ok(l + p.a2 * p.r2.ln())
    }

    /// ln E[w^q e^(-s w)] for q = 0..=qmax via
    /// Γ(τ0+q)/z^(τ0+q) ₂F₁(a1, τ0+q; τ0; (r2-r1)/z).
    fn base_row_closed(&self, s: f64, qmax: usize) -> Result<Vec<f64>> {
        let policy = EvalPolicy::default().with_max_terms(20_000);
        let mut row = vec![f64::NEG_INFINITY; qmax + 1];
        for part in &self.mix.parts {
            let pre = Self::ln_prefactor(part)?;
            let tau0 = part.total_shape();
            let z = s + part.r2;
            let x = (part.r2 - part.r1) / z;
            for (q, slot) in row.iter_mut().enumerate() {
                let b = tau0 + q as f64;
                let lf = if part.a1 == 0.0 || x == 0.0 {
                    0.0
                } else {
                    ln_2f1_positive(part.a1, b, tau0, x, policy)?
                };
                *slot = ln_add(*slot, pre + ln_gamma(b)? - b * z.ln() + lf);
            }
        }
        Ok(row)
    }

    /// ln E[w^q (1+w)^c0 e^(-s w)] for q = 0..=qmax via the confluent
    /// series of each mixture component and ∫ t^(a-1)(1+t)^c0 e^(-zt) dt.
    fn base_row_series(&self, s: f64, c0: f64, qmax: usize) -> Result<Vec<f64>> {
        let parts = &self.mix.parts;
        let z = s + parts[0].r2;
        if parts.iter().any(|p| p.r2.to_bits() != parts[0].r2.to_bits()) {
            return domain("series kernel needs a common dominant rate across components");
        }
        let a_min = parts.iter().map(|p| p.total_shape()).fold(f64::INFINITY, f64::min);
        let span = parts.iter().map(|p| (p.total_shape() - a_min).round() as usize).max().unwrap_or(0);
        let mut g_budget = 64usize;
        loop {
            let count = span + qmax + g_budget + 1;
            let lj = if c0 == 0.0 {
                (0..count)
                    .map(|n| {
                        let a = a_min + n as f64;
                        Ok(ln_gamma(a)? - a * z.ln())
                    })
                    .collect::<Result<Vec<_>>>()?
            } else {
                laplace_u_family(a_min, count, c0, z)?
            };
            match self.accumulate_series(&lj, a_min, z, qmax, g_budget)? {
                Some(row) => return Ok(row),
                None if g_budget < 1 << 14 => g_budget *= 2,
                None => {
                    return Err(OstnError::Truncation {
                        what: "confluent series of the interference density".into(),
                        terms: g_budget,
                        last_term: f64::NAN,
                    })
                }
            }
        }
    }

    /// Returns None when some component needs more than `g_budget` terms.
    fn accumulate_series(
        &self,
        lj: &[f64],
        a_min: f64,
        z: f64,
        qmax: usize,
        g_budget: usize,
    ) -> Result<Option<Vec<f64>>> {
        let mut row = vec![f64::NEG_INFINITY; qmax + 1];
        for part in &self.mix.parts {
            let pre = Self::ln_prefactor(part)?;
            let tau0 = part.total_shape();
            let off = (tau0 - a_min).round() as usize;
            let k = part.r2 - part.r1;
            if part.a1 == 0.0 || k == 0.0 {
                for (q, slot) in row.iter_mut().enumerate() {
                    *slot = ln_add(*slot, pre + lj[off + q]);
                }
                continue;
            }
            let lk = (k / z).ln() + z.ln();
            for (q, slot) in row.iter_mut().enumerate() {
                let mut acc = f64::NEG_INFINITY;
                let mut lh = 0.0; // ln h_g
                let mut small = 0;
                let mut converged = false;
                for g in 0..g_budget {
                    if g > 0 {
                        let gf = (g - 1) as f64;
                        lh += (part.a1 + gf).ln() + lk - (tau0 + gf).ln() - (gf + 1.0).ln();
                    }
                    let t = lh + lj[off + q + g];
                    acc = ln_add(acc, t);
                    if t < acc - 39.0 {
                        small += 1;
                        if small >= 3 {
                            converged = true;
                            break;
                        }
                    } else {
                        small = 0;
                    }
                }
                if !converged {
                    return Ok(None);
                }
                *slot = ln_add(*slot, pre + acc);
            }
        }
        Ok(Some(row))
    }

    /// ln E[W^x] for real x > -τ0 (raw interference moment, no offset).
    pub fn ln_raw_moment(&self, x: f64) -> Result<f64> {
        if self.mix.is_degenerate() {
            return if x == 0.0 { Ok(0.0) } else { Ok(f64::NEG_INFINITY) };
        }
        let policy = EvalPolicy::default().with_max_terms(20_000);
        let mut acc = f64::NEG_INFINITY;
        for part in &self.mix.parts {
            let tau0 = part.total_shape();
            let b = tau0 + x;
            if !(b > 0.0) {
                return domain(format!("moment order {x} too negative"));
            }
            let ratio = (part.r2 - part.r1) / part.r2;
            let lf = if part.a1 == 0.0 || ratio == 0.0 {
                0.0
            } else {
                ln_2f1_positive(part.a1, b, tau0, ratio, policy)?
            };
            acc = ln_add(acc, Self::ln_prefactor(part)? + ln_gamma(b)? - b * part.r2.ln() + lf);
        }
        Ok(acc)
    }
}

/// ln ₂F₁(a, b; c; x) for a, b, c > 0 and 0 ≤ x < 1, where every term is
/// positive. Falls back to a log-space series when the value overflows.
fn ln_2f1_positive(a: f64, b: f64, c: f64, x: f64, policy: EvalPolicy) -> Result<f64> {
    if let Ok(v) = gauss_2f1(a, b, c, x, policy) {
        if v.is_finite() && v > 0.0 {
            return Ok(v.ln());
        }
    }
    let lx = x.ln();
    let mut acc = 0.0f64;
    let mut lt = 0.0f64;
    let mut small = 0;
    for g in 0..policy.max_terms {
        let gf = g as f64;
        lt += (a + gf).ln() + (b + gf).ln() - (c + gf).ln() - (gf + 1.0).ln() + lx;
        acc = ln_add(acc, lt);
        if lt < acc - 39.0 {
            small += 1;
            if small >= 3 {
                return Ok(acc);
            }
        } else {
            small = 0;
        }
    }
    Err(OstnError::Truncation {
        what: format!("2F1({a}, {b}; {c}; {x}) in log space"),
        terms: policy.max_terms,
        last_term: lt.exp(),
    })
}

/// ln E[u^p e^(-s u)] by direct quadrature against the mixture density;
/// used to cross-check the kernels.
pub fn ln_moment_exp_quadrature(mix: &WcMixture, p: f64, s: f64) -> Result<f64> {
    use crate::specfun::quad::{integrate, QuadOptions};
    if mix.is_degenerate() {
        return Ok(-s);
    }
    let hi = mix.tail_bound(1e-18) * 2.0 + 1.0;
    let opts = QuadOptions { rel_tol: 1e-13, abs_tol: 0.0, max_intervals: 4000 };
    let mut total = 0.0;
    let mut lo = 0.0;
    for cut in [1e-3, 1e-1, 1.0, hi / 8.0, hi / 2.0, hi] {
        if cut <= lo {
            continue;
        }
        total += integrate(
            |w| mix.pdf(w).unwrap_or(0.0) * (p * (1.0 + w).ln() - s * w).exp(),
            lo,
            cut,
            opts,
        )?
        .value;
        lo = cut;
    }
    Ok(total.ln() - s)
}
