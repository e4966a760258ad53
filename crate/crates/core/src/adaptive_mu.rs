//! Smallest power split μ that keeps the satellite outage bound under a QoS
//! level ε.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{OstnError, Result};
use crate::outage::{sat_op_bound, OutageContext};

/// Bisection stops once the bracket on μ is this narrow and the outage is
/// within `QosSpec::tol` of ε.
pub const MU_TOL: f64 = 1e-5;

/// Stand-in for μ → 1⁻.
pub const MU_CEILING: f64 = 1.0 - 1e-9;

const PRECHECK_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosSpec {
    pub epsilon: f64,
    pub tol: f64,
    pub mu_grid_floor: f64,
}

impl Default for QosSpec {
    fn default() -> Self {
        Self { epsilon: 0.1, tol: 1e-6, mu_grid_floor: 1e-3 }
    }
}

impl QosSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        let q = Self { epsilon, ..Self::default() };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(OstnError::Validation(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.tol > 0.0) || !(self.mu_grid_floor > 0.0 && self.mu_grid_floor < 1.0) {
            return Err(OstnError::Validation("tol and mu_grid_floor must be positive".into()));
        }
        Ok(())
    }
}

/// [γ_p/(1+γ_p), 1): below the lower end the satellite is always in outage.
pub fn feasible_mu_range(gamma_p: f64) -> Range<f64> {
    gamma_p / (1.0 + gamma_p)..1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMethod {
    Bisection,
    GridScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuSolution {
    pub mu: f64,
    /// Satellite outage bound at `mu`.
    pub op: f64,
    pub method: SearchMethod,
    pub evaluations: usize,
}

struct Probe<'a> {
    ctx: &'a OutageContext,
    evaluations: usize,
}

impl Probe<'_> {
    fn op(&mut self, mu: f64) -> Result<f64> {
        self.evaluations += 1;
        Ok(sat_op_bound(&self.ctx.with_mu(mu))?.op_bound)
    }
}

/// Smallest μ in the feasible range with `sat_op_bound ≤ ε`. The `mu`
/// field of `ctx` is ignored.
pub fn solve_mu(ctx: &OutageContext, qos: &QosSpec) -> Result<MuSolution> {
    qos.validate()?;
    ctx.with_mu(0.5).validate()?;
    let range = feasible_mu_range(ctx.gamma_p());
    let mut probe = Probe { ctx, evaluations: 0 };
    let eps = qos.epsilon;

    let op_top = probe.op(MU_CEILING)?;
    if op_top > eps {
        return Err(OstnError::Infeasible { op_at_one: op_top, epsilon: eps });
    }

    let lo = range.start;
    let span = MU_CEILING - lo;
    let grid: Vec<f64> = (0..PRECHECK_POINTS)
        .map(|i| lo + span * (i + 1) as f64 / PRECHECK_POINTS as f64)
        .collect();
    let mut ops = Vec::with_capacity(grid.len());
    for (i, &mu) in grid.iter().enumerate() {
        ops.push(if i + 1 == grid.len() { op_top } else { probe.op(mu)? });
    }
    let monotone = ops.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    if !monotone {
        return grid_scan(&mut probe, lo, qos);
    }

    let first = ops.iter().position(|&p| p <= eps).expect("last grid point is feasible");
    let (mut a, mut b) = (if first == 0 { lo } else { grid[first - 1] }, grid[first]);
    let mut op_b = ops[first];
    while (b - a > MU_TOL || eps - op_b > qos.tol) && b - a > 1e-14 {
        let mid = 0.5 * (a + b);
        let op = probe.op(mid)?;
        if op <= eps {
            b = mid;
            op_b = op;
        } else {
            a = mid;
        }
    }
    Ok(MuSolution { mu: b, op: op_b, method: SearchMethod::Bisection, evaluations: probe.evaluations })
}

fn grid_scan(probe: &mut Probe, lo: f64, qos: &QosSpec) -> Result<MuSolution> {
    let steps = ((MU_CEILING - lo) / qos.mu_grid_floor).ceil() as usize;
    for i in 1..=steps {
        let mu = (lo + i as f64 * qos.mu_grid_floor).min(MU_CEILING);
        let op = probe.op(mu)?;
        if op <= qos.epsilon {
            return Ok(MuSolution { mu, op, method: SearchMethod::GridScan, evaluations: probe.evaluations });
        }
    }
    unreachable!("the ceiling was checked feasible")
}
