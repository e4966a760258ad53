//! Reference values computed without the library: double-exponential
//! quadrature in log space and plain power series.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

const MAX_LEVEL: u32 = 10;
const REL_TOL: f64 = 2e-14;

fn ln_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + xs.iter().map(|x| (x - hi).exp()).sum::<f64>().ln()
}

/// Trapezoid sums of `ln_node(u)` (log integrand times log Jacobian) on
/// halving steps until two levels agree.
fn de_sum(ln_node: impl Fn(f64) -> f64) -> f64 {
    let reach = 7.0;
    let mut h = 1.0;
    let mut nodes: Vec<f64> = Vec::new();
    let n0 = (reach / h) as i64;
    for k in -n0..=n0 {
        nodes.push(ln_node(k as f64 * h));
    }
    let mut prev = ln_sum_exp(&nodes) + h.ln();
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let n = (reach / h) as i64;
        for k in (-n..=n).filter(|k| k % 2 != 0) {
            nodes.push(ln_node(k as f64 * h));
        }
        let cur = ln_sum_exp(&nodes) + h.ln();
        let change = (cur - prev).abs();
        if level >= 4 && change < REL_TOL {
            return cur;
        }
        if level == MAX_LEVEL {
            panic!("oracle quadrature did not settle: last change {change:.1e}");
        }
        prev = cur;
    }
    unreachable!()
}

fn finite_or_neg_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// ln ∫₀¹ f, where `ln_f(t, 1 - t)` is the log of a positive integrand.
/// Both distances to the endpoints are passed exactly.
pub fn ln_int01(ln_f: impl Fn(f64, f64) -> f64) -> f64 {
    de_sum(|u| {
        let s = FRAC_PI_2 * u.sinh();
        // t = 1/(1 + e^{-2s}), 1 - t = 1/(1 + e^{2s})
        let ln_t = -(-2.0 * s).exp().ln_1p();
        let ln_1mt = -(2.0 * s).exp().ln_1p();
        let (t, omt) = (ln_t.exp(), ln_1mt.exp());
        if t == 0.0 || omt == 0.0 {
            return f64::NEG_INFINITY;
        }
        let ln_jac = (std::f64::consts::PI * u.cosh()).ln() + ln_t + ln_1mt;
        finite_or_neg_inf(ln_f(t, omt) + ln_jac)
    })
}

/// As [`ln_int01`], split at `t_star` so a sharp interior peak sits at an
/// endpoint of each piece.
pub fn ln_int01_split(ln_f: impl Fn(f64, f64) -> f64, t_star: f64) -> f64 {
    if !(t_star > 0.0 && t_star < 1.0) {
        return ln_int01(ln_f);
    }
    let left = ln_int01(|s, _| ln_f(t_star * s, 1.0 - t_star * s)) + t_star.ln();
    let w = 1.0 - t_star;
    let right = ln_int01(|s, oms| ln_f(t_star + w * s, w * oms)) + w.ln();
    ln_sum_exp(&[left, right])
}

/// Grid location of the largest value of `ln_f` on (0, 1).
fn argmax01(ln_f: impl Fn(f64, f64) -> f64) -> f64 {
    let n = 4096;
    (0..n)
        .map(|i| (i as f64 + 0.5) / n as f64)
        .map(|t| (t, ln_f(t, 1.0 - t)))
        .fold((0.5, f64::NEG_INFINITY), |best, (t, v)| if v > best.1 { (t, v) } else { best })
        .0
}

fn ln_int01_peaked(ln_f: impl Fn(f64, f64) -> f64 + Copy) -> f64 {
    ln_int01_split(ln_f, argmax01(ln_f))
}

/// ln ∫ₐᵇ f for a positive integrand given as `ln_f(t)`.
pub fn ln_int(ln_f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let w = b - a;
    ln_int01(|t, _| ln_f(a + w * t)) + w.ln()
}

/// ln ∫ₐ^∞ f for a positive integrand given as `ln_f(t)`.
pub fn ln_int_to_inf(ln_f: impl Fn(f64) -> f64, a: f64) -> f64 {
    de_sum(|u| {
        let ln_x = FRAC_PI_2 * u.sinh();
        let x = ln_x.exp();
        if x == 0.0 || !x.is_finite() {
            return f64::NEG_INFINITY;
        }
        let ln_jac = ln_x + (FRAC_PI_2 * u.cosh()).ln();
        finite_or_neg_inf(ln_f(a + x) + ln_jac)
    })
}

pub fn int(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    ln_int(|t| f(t).ln(), a, b).exp()
}

pub fn int_to_inf(f: impl Fn(f64) -> f64, a: f64) -> f64 {
    ln_int_to_inf(|t| f(t).ln(), a).exp()
}

pub fn ln_gamma(a: f64) -> f64 {
    let f = |t: f64| (a - 1.0) * t.ln() - t;
    let p = (a - 1.0).max(1.0);
    ln_sum_exp(&[ln_int(f, 0.0, p), ln_int_to_inf(f, p)])
}

fn ln_beta_weight(p: f64, q: f64, t: f64, omt: f64) -> f64 {
    (p - 1.0) * t.ln() + (q - 1.0) * omt.ln()
}

/// ₁F₁(a; b; z) from ∫₀¹ e^{zt} t^{a-1}(1-t)^{b-a-1} dt over the same
/// integral without e^{zt}. Needs b > a > 0.
pub fn kummer_1f1_integral(a: f64, b: f64, z: f64) -> f64 {
    assert!(b > a && a > 0.0);
    let num = ln_int01_peaked(|t, omt| z * t + ln_beta_weight(a, b - a, t, omt));
    let den = ln_int01_peaked(|t, omt| ln_beta_weight(a, b - a, t, omt));
    (num - den).exp()
}

/// ₁F₁(a; b; z) by direct summation; only for z ≥ 0, where every term is
/// positive.
pub fn kummer_1f1_long_series(a: f64, b: f64, z: f64) -> f64 {
    assert!(z >= 0.0 && a > 0.0 && b > 0.0);
    let (mut term, mut sum, mut comp) = (1.0f64, 1.0f64, 0.0f64);
    for n in 0..100_000 {
        let nf = n as f64;
        term *= (a + nf) * z / ((b + nf) * (nf + 1.0));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term < 1e-18 * sum && nf > z {
            return sum;
        }
    }
    panic!("long series for 1F1({a}; {b}; {z}) did not converge");
}

/// ₂F₁(a, b; c; z) from Euler's integral, c > b > 0, z < 1.
pub fn gauss_2f1_euler(a: f64, b: f64, c: f64, z: f64) -> f64 {
    assert!(c > b && b > 0.0 && z < 1.0);
    let num = ln_int01_peaked(|t, omt| ln_beta_weight(b, c - b, t, omt) - a * (-z * t).ln_1p());
    let den = ln_int01_peaked(|t, omt| ln_beta_weight(b, c - b, t, omt));
    (num - den).exp()
}

/// U(a, b; z) = Γ(a)⁻¹ ∫₀^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt.
pub fn tricomi_u_integral(a: f64, b: f64, z: f64) -> f64 {
    assert!(a > 0.0 && z > 0.0);
    let peak = {
        // rough location of the maximum, used to split the range
        let t = (a - 1.0).max(0.0) / z;
        if t > 0.0 { t } else { 1.0 / z }
    };
    let f = |t: f64| -z * t + (a - 1.0) * t.ln() + (b - a - 1.0) * t.ln_1p();
    let lo = ln_int(f, 0.0, peak);
    let hi = ln_int_to_inf(f, peak);
    (ln_sum_exp(&[lo, hi]) - ln_gamma(a)).exp()
}

/// (P(a, x), Q(a, x)) from the two pieces of the gamma integral.
pub fn incomplete_gamma_integral(a: f64, x: f64) -> (f64, f64) {
    let f = |t: f64| (a - 1.0) * t.ln() - t;
    let peak = a - 1.0;
    let lower = if peak > 0.0 && peak < x {
        ln_sum_exp(&[ln_int(f, 0.0, peak), ln_int(f, peak, x)])
    } else {
        ln_int(f, 0.0, x)
    };
    let upper = if peak > x {
        ln_sum_exp(&[ln_int(f, x, peak), ln_int_to_inf(f, peak)])
    } else {
        ln_int_to_inf(f, x)
    };
    let total = ln_sum_exp(&[lower, upper]);
    ((lower - total).exp(), (upper - total).exp())
}

/// Shadowed-Rician power-gain density at average SNR `eta`, written out
/// from its standard form with a long-series ₁F₁.
pub fn sr_pdf(m: f64, b: f64, omega: f64, eta: f64, x: f64) -> f64 {
    let alpha = (2.0 * b * m / (2.0 * b * m + omega)).powf(m) / (2.0 * b);
    let beta = 1.0 / (2.0 * b);
    let delta = omega / (2.0 * b * (2.0 * b * m + omega));
    alpha / eta * (-beta * x / eta).exp() * kummer_1f1_long_series(m, 1.0, delta * x / eta)
}

/// Gamma density with shape `k` and rate `r`.
pub fn gamma_pdf(k: f64, r: f64, x: f64) -> f64 {
    (k * r.ln() + (k - 1.0) * x.ln() - r * x - ln_gamma(k)).exp()
}

/// ∫₀^w f(t) g(w - t) dt.
pub fn convolve(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, w: f64) -> f64 {
    int(|t| f(t) * g(w - t), 0.0, w)
}

/// Two-sided Kolmogorov-Smirnov distance of `sorted` against `cdf`.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else {
        (got - want).abs() / want.abs()
    }
}

pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Least-squares slope of `ys` on `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
