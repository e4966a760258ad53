//! Monte Carlo estimates of the exact and bounded outage events, drawn
//! straight from the per-trial SINR expressions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fading::{NakagamiSampler, SrSampler};
use crate::interference::WcSampler;
use crate::outage::OutageContext;

/// Trials per shard. Shard boundaries depend only on the trial count, so
/// results do not depend on the number of worker threads.
pub const SHARD_TRIALS: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_counts(failures: u64, trials: u64) -> Self {
        let p = failures as f64 / trials as f64;
        Self { p, stderr: (p * (1.0 - p) / trials as f64).sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: u64,
    pub seed: u64,
    pub sat_exact: Estimate,
    pub sat_bound: Estimate,
    pub iot_exact: Estimate,
    pub iot_bound: Estimate,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    sat_exact: u64,
    sat_bound: u64,
    iot_exact: u64,
    iot_bound: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            sat_exact: self.sat_exact + o.sat_exact,
            sat_bound: self.sat_bound + o.sat_bound,
            iot_exact: self.iot_exact + o.iot_exact,
            iot_bound: self.iot_bound + o.iot_bound,
        }
    }
}

/// How the relay is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selection {
    /// Largest exact end-to-end SINR at the satellite receiver.
    ExactSinr,
    /// Largest min(Â, B̂), the rule the analytic bounds assume.
    MinBound,
}

/// Exact SINR at B through relay k: μÂB̂ / ((1-μ)ÂB̂ + Â + B̂ + 1).
pub fn sinr_at_b(mu: f64, a: f64, b: f64) -> f64 {
    mu * a * b / ((1.0 - mu) * a * b + a + b + 1.0)
}

/// Exact SINR of the IoT stream at D with perfect cancellation of the
/// primary part: (1-μ)Ĉ(Â+1) / (μĈ + Â + 1).
pub fn sinr_at_d(mu: f64, a: f64, c: f64) -> f64 {
    (1.0 - mu) * c * (a + 1.0) / (mu * c + a + 1.0)
}

struct Samplers {
    ac: SrSampler,
    cb: NakagamiSampler,
    cd: NakagamiSampler,
    wc: WcSampler,
}

impl Samplers {
    fn new(ctx: &OutageContext) -> Result<Self> {
        Ok(Self {
            ac: SrSampler::new(&ctx.sat_link, ctx.eta)?,
            cb: NakagamiSampler::new(&ctx.cb_link, ctx.eta)?,
            cd: NakagamiSampler::new(&ctx.cd_link, ctx.eta)?,
            wc: WcSampler::new(&ctx.interf.at_snr(ctx.eta))?,
        })
    }
}

fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

fn shards(trials: u64, size: u64) -> Vec<(u64, u64)> {
    let n = trials.div_ceil(size);
    (0..n).map(|i| (i, size.min(trials - i * size))).collect()
}

fn run_shard(ctx: &OutageContext, s: &Samplers, seed: u64, shard: u64, n: u64) -> Tally {
    let mut rng = shard_rng(seed, shard);
    let k = ctx.k_relays;
    let (mu, gp, gs) = (ctx.mu, ctx.gamma_p(), ctx.gamma_s());
    let gt_p = ctx.gamma_tilde_p();
    let mu_p = ctx.mu_prime();
    let mut t = Tally::default();
    let mut a_slot = vec![0.0f64; k];
    let mut c_slot = vec![0.0f64; k];
    for _ in 0..n {
        let u = 1.0 + s.wc.sample(&mut rng);
        let (mut best_sinr, mut best_k) = (f64::NEG_INFINITY, 0);
        let (mut best_min, mut bound_k) = (f64::NEG_INFINITY, 0);
        for j in 0..k {
            let a = s.ac.sample(&mut rng) / u;
            let b = s.cb.sample(&mut rng) / u;
            let c = s.cd.sample(&mut rng) / u;
            a_slot[j] = a;
            c_slot[j] = c;
            let sinr = sinr_at_b(mu, a, b);
            if sinr > best_sinr {
                best_sinr = sinr;
                best_k = j;
            }
            let m = a.min(b);
            if m > best_min {
                best_min = m;
                bound_k = j;
            }
        }
        if best_sinr < gp {
            t.sat_exact += 1;
        }
        if gt_p.is_none_or(|g| best_min < g) {
            t.sat_bound += 1;
        }
        if sinr_at_d(mu, a_slot[best_k], c_slot[best_k]) < gs {
            t.iot_exact += 1;
        }
        if (mu * c_slot[bound_k]).min(a_slot[bound_k] + 1.0) < mu_p * gs {
            t.iot_bound += 1;
        }
    }
    t
}

/// Estimates the four outage probabilities from `trials` independent
/// channel and interference draws. Deterministic in (ctx, trials, seed).
pub fn simulate(ctx: &OutageContext, trials: u64, seed: u64) -> Result<SimResult> {
    simulate_sharded(ctx, trials, seed, SHARD_TRIALS)
}

/// As [`simulate`] with `shard_trials` trials per random stream; a value
/// of at least `trials` runs everything on one stream.
pub fn simulate_sharded(ctx: &OutageContext, trials: u64, seed: u64, shard_trials: u64) -> Result<SimResult> {
    if trials == 0 {
        return domain("Monte Carlo needs at least one trial");
    }
    if shard_trials == 0 {
        return domain("shards need at least one trial");
    }
    ctx.validate()?;
    let s = Samplers::new(ctx)?;
    let total = shards(trials, shard_trials)
        .into_par_iter()
        .map(|(i, n)| run_shard(ctx, &s, seed, i, n))
        .reduce(Tally::default, |a, b| a + b);
    Ok(SimResult {
        trials,
        seed,
        sat_exact: Estimate::from_counts(total.sat_exact, trials),
        sat_bound: Estimate::from_counts(total.sat_bound, trials),
        iot_exact: Estimate::from_counts(total.iot_exact, trials),
        iot_bound: Estimate::from_counts(total.iot_bound, trials),
    })
}

/// Empirical cdf of the selected relay's normalised first-hop gain with the
/// interference pinned to W_c = w, evaluated on `x_grid`.
pub fn empirical_conditional_cdf(
    ctx: &OutageContext,
    w: f64,
    x_grid: &[f64],
    trials: u64,
    seed: u64,
    selection: Selection,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return domain("Monte Carlo needs at least one trial");
    }
    if !(w >= 0.0 && w.is_finite()) {
        return domain(format!("pinned interference must be finite and nonnegative, got {w}"));
    }
    ctx.validate()?;
    let s = Samplers::new(ctx)?;
    let u = 1.0 + w;
    let counts = shards(trials, SHARD_TRIALS)
        .into_par_iter()
        .map(|(shard, n)| {
            let mut rng = shard_rng(seed, shard);
            let mut c = vec![0u64; x_grid.len()];
            for _ in 0..n {
                let (mut best, mut pick) = (f64::NEG_INFINITY, 0.0);
                for _ in 0..ctx.k_relays {
                    let a = s.ac.sample(&mut rng) / u;
                    let b = s.cb.sample(&mut rng) / u;
                    let score = match selection {
                        Selection::ExactSinr => sinr_at_b(ctx.mu, a, b),
                        Selection::MinBound => a.min(b),
                    };
                    if score > best {
                        best = score;
                        pick = a;
                    }
                }
                for (slot, &x) in c.iter_mut().zip(x_grid) {
                    if pick <= x {
                        *slot += 1;
                    }
                }
            }
            c
        })
        .reduce(
            || vec![0u64; x_grid.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts.into_iter().map(|c| c as f64 / trials as f64).collect())
}
