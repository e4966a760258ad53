//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{domain, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
// Gauss weights for the odd Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-300, max_intervals: 2000 }
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrates `f` over [a, b] with bisection of the worst panel.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return domain("quadrature needs finite limits");
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_err: 0.0, evals: 0 });
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut panels = vec![(a, b, v, e)];
    let mut evals = 15;
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return domain("quadrature produced a non-finite value");
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) || panels.len() >= opts.max_intervals {
            return Ok(QuadResult { value: total, abs_err: err, evals });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("panel list is never empty");
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            return Ok(QuadResult { value: total, abs_err: err, evals });
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        evals += 30;
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

/// Vector-valued variant: `f` fills an output slice of length `floor.len()`
/// at each node and all components share the panel refinement. Component `i`
/// is converged once its error is below `rel_tol * max(|total_i|, floor[i])`;
/// `floor` lets callers say how large a component is expected to be, so
/// components that are negligible on [a, b] do not force refinement.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    floor: &[f64],
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<Vec<f64>> {
    let n = floor.len();
    if !(a.is_finite() && b.is_finite()) {
        return domain("quadrature needs finite limits");
    }
    if a == b || n == 0 {
        return Ok(vec![0.0; n]);
    }
    let mut lo_buf = vec![0.0; n];
    let mut hi_buf = vec![0.0; n];
    let mut eval = |lo: f64, hi: f64| -> Panel {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut k = vec![0.0; n];
        let mut g = vec![0.0; n];
        f(c, &mut lo_buf);
        for i in 0..n {
            k[i] = WGK[7] * lo_buf[i];
            g[i] = WG[3] * lo_buf[i];
        }
        for j in 0..7 {
            let dx = h * XGK[j];
            f(c - dx, &mut lo_buf);
            f(c + dx, &mut hi_buf);
            for i in 0..n {
                let v = lo_buf[i] + hi_buf[i];
                k[i] += WGK[j] * v;
                if j % 2 == 1 {
                    g[i] += WG[j / 2] * v;
                }
            }
        }
        let err = k.iter().zip(&g).map(|(k, g)| ((k - g) * h).abs()).collect();
        Panel { lo, hi, value: k.into_iter().map(|v| v * h).collect(), err }
    };
    let mut panels = vec![eval(a, b)];
    loop {
        let mut total = vec![0.0; n];
        let mut err = vec![0.0; n];
        for p in &panels {
            for i in 0..n {
                total[i] += p.value[i];
                err[i] += p.err[i];
            }
        }
        if total.iter().any(|t| !t.is_finite()) {
            return domain("vector quadrature produced a non-finite value");
        }
        let scale: Vec<f64> = (0..n)
            .map(|i| (opts.rel_tol * total[i].abs().max(floor[i])).max(opts.abs_tol))
            .collect();
        if (0..n).all(|i| err[i] <= scale[i]) || panels.len() >= opts.max_intervals {
            return Ok(total);
        }
        let score = |p: &Panel| (0..n).map(|i| p.err[i] / scale[i]).fold(0.0, f64::max);
        let idx = (0..panels.len())
            .max_by(|&x, &y| score(&panels[x]).total_cmp(&score(&panels[y])))
            .expect("panel list is never empty");
        let p = panels.swap_remove(idx);
        let mid = 0.5 * (p.lo + p.hi);
        if mid <= p.lo || mid >= p.hi {
            return Ok(total);
        }
        panels.push(eval(p.lo, mid));
        panels.push(eval(mid, p.hi));
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    value: Vec<f64>,
    err: Vec<f64>,
}
