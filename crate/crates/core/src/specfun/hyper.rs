//! Confluent (₁F₁, U) and Gauss (₂F₁) hypergeometric functions.

use super::gamma::ln_gamma_unchecked;
use super::quad::{integrate_vec, QuadOptions};
use super::{EvalPolicy, StopRule};
use crate::error::{domain, OstnError, Result};

fn is_nonpositive_int(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

fn truncation(what: &str, terms: usize, last_term: f64) -> OstnError {
    OstnError::Truncation { what: what.to_string(), terms, last_term: last_term.abs() }
}

/// Sums a hypergeometric-type series whose term ratio is `ratio(k)`.
fn sum_series(what: &str, ratio: impl Fn(f64) -> f64, policy: EvalPolicy) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut stop = StopRule::default();
    for k in 0..policy.max_terms {
        let r = ratio(k as f64);
        term *= r;
        if term == 0.0 {
            return Ok(sum + comp);
        }
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        if !sum.is_finite() {
            return domain(format!("{what}: series overflowed"));
        }
        // Charge the term with its geometric tail so slowly converging
        // series are not cut early.
        let tail = if r.abs() < 1.0 { term / (1.0 - r.abs()) } else { term };
        if stop.done(tail, sum + comp, policy.rel_tol) {
            return Ok(sum + comp);
        }
    }
    Err(truncation(what, policy.max_terms, term))
}

/// Ascending series for ₁F₁(a; b; z) with no transformation.
pub fn kummer_1f1_series(a: f64, b: f64, z: f64, policy: EvalPolicy) -> Result<f64> {
    if is_nonpositive_int(b) {
        return domain(format!("1F1 undefined for b = {b}"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    sum_series("1F1", |k| (a + k) / (b + k) * z / (k + 1.0), policy)
}

/// ₁F₁(a; b; z); negative arguments go through Kummer's transformation,
/// or the algebraic asymptotic form once -z is large.
pub fn kummer_1f1(a: f64, b: f64, z: f64, policy: EvalPolicy) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return domain("1F1 needs finite arguments");
    }
    if z < 0.0 && !is_nonpositive_int(a) {
        if let Some(v) = kummer_1f1_large_negative(a, b, -z, policy) {
            return Ok(v);
        }
        if b > 0.0 && b - a > 0.0 {
            return Ok((z + ln_positive_1f1(b - a, b, -z, policy)?).exp());
        }
        Ok(z.exp() * kummer_1f1_series(b - a, b, -z, policy)?)
    } else {
        kummer_1f1_series(a, b, z, policy)
    }
}

/// ln ₁F₁(a; b; z) for b > a > 0, where the function is positive. Large
/// positive z goes through Kummer's transformation so the e^z growth is
/// kept in the logarithm.
pub fn ln_kummer_1f1(a: f64, b: f64, z: f64, policy: EvalPolicy) -> Result<f64> {
    if !(b > a && a > 0.0) {
        return domain(format!("ln 1F1 needs b > a > 0, got a = {a}, b = {b}"));
    }
    if z > 0.0 {
        match kummer_1f1_large_negative(b - a, b, z, policy) {
            Some(v) => Ok(z + v.ln()),
            None => ln_positive_1f1(a, b, z, policy),
        }
    } else if let Some(v) = kummer_1f1_large_negative(a, b, -z, policy) {
        Ok(v.ln())
    } else {
        Ok(z + ln_positive_1f1(b - a, b, -z, policy)?)
    }
}

/// ln ₁F₁(a; b; x) for a, b, x > 0, summed in log space so that the
/// series survives values past the f64 range.
fn ln_positive_1f1(a: f64, b: f64, x: f64, policy: EvalPolicy) -> Result<f64> {
    let ln_x = x.ln();
    let mut lt = 0.0f64;
    let mut acc = 0.0f64;
    for k in 0..policy.max_terms {
        let kf = k as f64;
        let r = (a + kf) / ((b + kf) * (kf + 1.0)) * x;
        lt += (a + kf).ln() - (b + kf).ln() - (kf + 1.0).ln() + ln_x;
        let hi = acc.max(lt);
        acc = hi + ((acc - hi).exp() + (lt - hi).exp()).ln();
        if r < 1.0 && lt - (1.0 - r).ln() < acc + policy.rel_tol.ln() {
            return Ok(acc);
        }
    }
    Err(truncation("1F1 in log space", policy.max_terms, lt.exp()))
}

/// Past this, -z counts as large for the asymptotic ₁F₁ form.
const KUMMER_ASYMPTOTIC_FROM: f64 = 60.0;

/// ₁F₁(a; b; -x) ≈ Γ(b)/Γ(b-a) x^(-a) Σ (a)_n (1+a-b)_n / n! x^(-n),
/// dropping the part of order e^(-x). `None` when x is not large enough
/// for the series to reach the tolerance.
fn kummer_1f1_large_negative(a: f64, b: f64, x: f64, policy: EvalPolicy) -> Option<f64> {
    if x < KUMMER_ASYMPTOTIC_FROM.max(4.0 * (a.abs() + b.abs())) || is_nonpositive_int(b - a) || is_nonpositive_int(b) {
        return None;
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 0..policy.max_terms {
        let nf = n as f64;
        let next = term * (a + nf) * (1.0 + a - b + nf) / ((nf + 1.0) * x);
        if next.abs() >= term.abs() && term != 0.0 {
            return None;
        }
        term = next;
        sum += term;
        if term.abs() <= policy.rel_tol * sum.abs() * 1e-2 {
            let (lg_b, sg_b) = ln_gamma_signed(b);
            let (lg_ba, sg_ba) = ln_gamma_signed(b - a);
            // the dropped part, relative to the kept one
            let (lg_a, _) = ln_gamma_signed(a);
            let dropped = -x + (2.0 * a - b) * x.ln() + lg_ba - lg_a;
            if dropped > policy.rel_tol.ln() - 5.0 {
                return None;
            }
            return Some(sg_b * sg_ba * (lg_b - lg_ba - a * x.ln()).exp() * sum);
        }
    }
    None
}

/// Ascending series for ₂F₁(a, b; c; z), |z| < 1 (any z if it terminates).
pub fn gauss_2f1_series(a: f64, b: f64, c: f64, z: f64, policy: EvalPolicy) -> Result<f64> {
    if is_nonpositive_int(c) {
        return domain(format!("2F1 undefined for c = {c}"));
    }
    let terminating = is_nonpositive_int(a) || is_nonpositive_int(b);
    if !terminating && z.abs() >= 1.0 {
        return domain(format!("2F1 series needs |z| < 1, got {z}"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let policy = if terminating {
        let degree = (-a.min(b)) as usize + 2;
        policy.with_max_terms(policy.max_terms.max(degree))
    } else {
        policy
    };
    sum_series("2F1", |k| (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z, policy)
}

/// (ln|Γ(x)|, sign Γ(x)) for x not a nonpositive integer.
fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (ln_gamma_unchecked(x), 1.0);
    }
    // Γ(x) Γ(1-x) = π / sin(πx)
    let s = (std::f64::consts::PI * x).sin();
    (std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma_unchecked(1.0 - x), s.signum())
}

/// Below this, large negative arguments use the 1/z connection formula.
const INVERSE_Z_BELOW: f64 = -10.0;

/// a - b closer than this to an integer makes the 1/z formula cancel.
// TODO: add the digamma limiting form so integer a - b also avoids the slow
// Pfaff series far out on the negative axis.
const INVERSE_Z_GAP: f64 = 1e-3;

fn inverse_z_usable(a: f64, b: f64, c: f64) -> bool {
    let d = a - b;
    (d - d.round()).abs() > INVERSE_Z_GAP
        && ![a, b, c - a, c - b].into_iter().any(is_nonpositive_int)
}

/// Relative rounding the 1/z expansion may amplify before Pfaff is used.
const INVERSE_Z_MAX_CONDITION: f64 = 1e4;

/// 2F1 for z < -1 as the two-term expansion in 1/z. `None` when the
/// terms cancel badly, which happens once |z| is not large next to the
/// parameters.
fn gauss_2f1_inverse_z(a: f64, b: f64, c: f64, z: f64, policy: EvalPolicy) -> Result<Option<f64>> {
    let lnz = (-z).ln();
    let (lc, sc) = ln_gamma_signed(c);
    // (value, sum of magnitudes)
    let term = |p: f64, q: f64| -> Result<(f64, f64)> {
        let (l1, s1) = ln_gamma_signed(q - p);
        let (l2, s2) = ln_gamma_signed(q);
        let (l3, s3) = ln_gamma_signed(c - p);
        let (p2, r) = (p - c + 1.0, p - q + 1.0);
        let series = gauss_2f1_series(p, p2, r, 1.0 / z, policy)?;
        let spread = sum_series("2F1 magnitude", |k| ((p + k) * (p2 + k) / ((r + k) * (k + 1.0) * z)).abs(), policy)?;
        let front = sc * s1 * s2 * s3 * (lc + l1 - l2 - l3 - p * lnz).exp();
        Ok((front * series, front.abs() * spread))
    };
    let (t1, m1) = term(a, b)?;
    let (t2, m2) = term(b, a)?;
    let v = t1 + t2;
    Ok(((m1 + m2) <= INVERSE_Z_MAX_CONDITION * v.abs()).then_some(v))
}

/// ₂F₁(a, b; c; z) for z < 1.
///
/// Negative z is mapped into (0, 1) by a Pfaff transformation, picking the
/// variant whose series terminates or has positive terms. Below z = -10 the
/// expansion in 1/z is used instead, unless a - b is nearly an integer or
/// the expansion cancels. On
/// [0, 1) a terminating Pfaff image is used when one exists.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64, policy: EvalPolicy) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return domain("2F1 needs finite arguments");
    }
    if is_nonpositive_int(c) {
        return domain(format!("2F1 undefined for c = {c}"));
    }
    if z >= 1.0 {
        return domain(format!("2F1 needs z < 1, got {z}"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let w = z / (z - 1.0);
    // (1-z)^(-a) 2F1(a, c-b; c; w)
    let pfaff_a = || Ok((1.0 - z).powf(-a) * gauss_2f1_series(a, c - b, c, w, policy)?);
    // (1-z)^(-b) 2F1(c-a, b; c; w)
    let pfaff_b = || Ok((1.0 - z).powf(-b) * gauss_2f1_series(c - a, b, c, w, policy)?);

    if is_nonpositive_int(a) || is_nonpositive_int(b) {
        if z > -1.0 {
            return gauss_2f1_series(a, b, c, z, policy);
        }
    }
    if is_nonpositive_int(c - b) {
        return pfaff_a();
    }
    if is_nonpositive_int(c - a) {
        return pfaff_b();
    }
    if z > 0.0 {
        return gauss_2f1_series(a, b, c, z, policy);
    }
    if z < INVERSE_Z_BELOW && inverse_z_usable(a, b, c) {
        if let Ok(Some(v)) = gauss_2f1_inverse_z(a, b, c, z, policy) {
            return Ok(v);
        }
    }
    if c - a > 0.0 && b > 0.0 {
        pfaff_b()
    } else {
        pfaff_a()
    }
}

/// Per-component description of t^(a-1) (1+t)^c e^(-zt) in x = ln t, where
/// the integrand becomes exp(a x + c ln(1+e^x) - z e^x).
struct LogLaplace {
    c: f64,
    z: f64,
}

impl LogLaplace {
    fn log_integrand(&self, a: f64, x: f64) -> f64 {
        let t = x.exp();
        a * x + self.c * t.ln_1p() - self.z * t
    }

    /// Location of the maximum in x and a width estimate there.
    fn peak(&self, a: f64) -> (f64, f64) {
        let (c, z) = (self.c, self.z);
        // z t^2 + (z - a - c) t - a = 0 has exactly one positive root.
        let p = z - a - c;
        let disc = (p * p + 4.0 * z * a).sqrt();
        let t = if p < 0.0 { (disc - p) / (2.0 * z) } else { 2.0 * a / (disc + p) };
        let curv = t * (c / ((1.0 + t) * (1.0 + t)) - z);
        let width = if curv < 0.0 { (-curv).sqrt().recip() } else { 1.0 };
        (t.ln(), width.clamp(1e-6, 1e6))
    }

    /// Steps away from the peak until the log integrand has dropped by `drop`.
    fn edge(&self, a: f64, x0: f64, width: f64, peak_val: f64, dir: f64, drop: f64) -> f64 {
        let mut step = width;
        let mut x = x0 + dir * step;
        for _ in 0..200 {
            if self.log_integrand(a, x) < peak_val - drop {
                return x;
            }
            step *= 2.0;
            x = x0 + dir * step;
        }
        x
    }
}

const LAPLACE_DROP: f64 = 60.0;

/// ln J_n for n = 0..count, J_n = ∫₀^∞ t^(a0+n-1) (1+t)^c e^(-zt) dt.
///
/// J_n = Γ(a0+n) U(a0+n, a0+n+c+1, z). Two members next to the point
/// where a + c + 1 crosses z come from quadrature; the rest follow from
/// z J(a+2) = a J(a) + (a+c+1-z) J(a+1), run forward above that point and
/// backward below it, so every step adds positive terms.
pub fn laplace_u_family(a0: f64, count: usize, c: f64, z: f64) -> Result<Vec<f64>> {
    if count <= 2 {
        return laplace_u_quadrature(a0, count, c, z);
    }
    if !(a0 > 0.0 && a0.is_finite()) {
        return domain(format!("Laplace integral needs a > 0, got {a0}"));
    }
    if !(z > 0.0 && z.is_finite()) {
        return domain(format!("Laplace integral needs z > 0, got {z}"));
    }
    // first index whose step coefficient a + c + 1 - z is nonnegative
    let pivot = ((z - c - 1.0 - a0).ceil().max(0.0) as usize).min(count - 2);
    let anchors = laplace_u_quadrature(a0 + pivot as f64, 2, c, z)?;
    let mut out = vec![0.0; count];
    out[pivot] = anchors[0];
    out[pivot + 1] = anchors[1];
    for n in pivot + 2..count {
        let a = a0 + (n - 2) as f64;
        let ratio = (out[n - 1] - out[n - 2]).exp();
        // J(a+2)/J(a+1) = (a / ratio + a + c + 1 - z) / z
        out[n] = out[n - 1] + ((a / ratio + (a + c + 1.0 - z)) / z).ln();
    }
    for n in (0..pivot).rev() {
        let a = a0 + n as f64;
        let ratio = (out[n + 2] - out[n + 1]).exp();
        // J(a)/J(a+1) = (z ratio - (a + c + 1 - z)) / a
        out[n] = out[n + 1] + ((z * ratio - (a + c + 1.0 - z)) / a).ln();
    }
    Ok(out)
}

/// The same family by one shared adaptive quadrature in ln t, each member
/// scaled by its own peak.
fn laplace_u_quadrature(a0: f64, count: usize, c: f64, z: f64) -> Result<Vec<f64>> {
    if !(a0 > 0.0 && a0.is_finite()) {
        return domain(format!("Laplace integral needs a > 0, got {a0}"));
    }
    if !(z > 0.0 && z.is_finite()) {
        return domain(format!("Laplace integral needs z > 0, got {z}"));
    }
    if !c.is_finite() {
        return domain("Laplace integral needs a finite exponent");
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let shape = LogLaplace { c, z };
    let mut peaks = Vec::with_capacity(count);
    let mut floors = Vec::with_capacity(count);
    let mut logs = Vec::with_capacity(count);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for n in 0..count {
        let a = a0 + n as f64;
        let (xp, width) = shape.peak(a);
        let lp = shape.log_integrand(a, xp);
        lo = lo.min(shape.edge(a, xp, width, lp, -1.0, LAPLACE_DROP));
        hi = hi.max(shape.edge(a, xp, width, lp, 1.0, LAPLACE_DROP));
        peaks.push(xp);
        floors.push(0.5 * width);
        logs.push(lp);
    }
    let mut cuts = vec![lo];
    cuts.extend(peaks.iter().copied().filter(|&x| x > lo && x < hi));
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let opts = QuadOptions { rel_tol: 1e-14, abs_tol: 1e-300, max_intervals: 4000 };
    let mut total = vec![0.0; count];
    for pair in cuts.windows(2) {
        let part = integrate_vec(
            |x, out| {
                let base = shape.log_integrand(a0, x);
                for (n, o) in out.iter_mut().enumerate() {
                    let v = base + n as f64 * x - logs[n];
                    *o = if v < -708.0 { 0.0 } else { v.exp() };
                }
            },
            &floors,
            pair[0],
            pair[1],
            opts,
        )?;
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    Ok(total.iter().zip(&logs).map(|(v, l)| v.ln() + l).collect())
}

/// ln ∫₀^∞ t^(a-1) (1+t)^c e^(-zt) dt = ln[Γ(a) U(a, a+c+1, z)].
pub fn ln_laplace_u(a: f64, c: f64, z: f64) -> Result<f64> {
    Ok(laplace_u_family(a, 1, c, z)?[0])
}

/// Tricomi's confluent hypergeometric function U(a, b; z), a > 0, z > 0.
pub fn tricomi_u(a: f64, b: f64, z: f64, _policy: EvalPolicy) -> Result<f64> {
    if !(a > 0.0) {
        return domain(format!("U(a, b; z) needs a > 0, got {a}"));
    }
    if !(z > 0.0) {
        return domain(format!("U(a, b; z) needs z > 0, got {z}"));
    }
    Ok((ln_laplace_u(a, b - a - 1.0, z)? - ln_gamma_unchecked(a)).exp())
}
