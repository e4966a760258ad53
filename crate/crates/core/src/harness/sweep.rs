use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptive_mu::{solve_mu, QosSpec};
use crate::error::{OstnError, Result};
use crate::montecarlo::simulate;
use crate::outage::{iot_op_bound, sat_op_bound, Network, OutageContext, OutagePoint};

use super::presets::{preset, MuMode, DEFAULT_EPSILON};

pub const CSV_HEADER: [&str; 9] =
    ["snr_db", "network", "op_bound", "op_asymptotic", "op_mc_exact", "op_mc_bound", "stderr", "mu", "branch"];

/// Branch label of rows where no μ meets the satellite QoS level.
pub const QOS_INFEASIBLE: &str = "qos-infeasible";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outputs {
    pub analytic: bool,
    pub asymptotic: bool,
    pub montecarlo: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self { analytic: true, asymptotic: true, montecarlo: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Preset name, or a free label for inline contexts.
    pub name: String,
    pub ctx: OutageContext,
    pub snr_db: Vec<f64>,
    pub outputs: Outputs,
    pub trials: u64,
    pub seed: u64,
    pub mu_mode: MuMode,
    pub epsilon: f64,
}

impl SweepSpec {
    /// A preset with the 0..40 dB grid in 5 dB steps and 10^6 trials.
    pub fn from_preset(name: &str) -> Result<Self> {
        let p = preset(name)?;
        Ok(Self {
            name: p.name,
            ctx: p.ctx,
            snr_db: db_grid(0.0, 40.0, 5.0)?,
            outputs: Outputs::default(),
            trials: 1_000_000,
            seed: 1,
            mu_mode: p.mu_mode,
            epsilon: p.epsilon,
        })
    }

    pub fn inline(name: impl Into<String>, ctx: OutageContext) -> Self {
        Self {
            name: name.into(),
            ctx,
            snr_db: vec![0.0, 10.0, 20.0, 30.0, 40.0],
            outputs: Outputs::default(),
            trials: 1_000_000,
            seed: 1,
            mu_mode: MuMode::Fixed,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(OstnError::Validation("SNR grid is empty".into()));
        }
        if self.snr_db.iter().any(|x| !x.is_finite()) {
            return Err(OstnError::Validation("SNR grid has a non-finite value".into()));
        }
        if self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(OstnError::Validation("SNR grid must be strictly increasing".into()));
        }
        if self.outputs.montecarlo && self.trials == 0 {
            return Err(OstnError::Validation("Monte Carlo output needs trials >= 1".into()));
        }
        if self.mu_mode == MuMode::Adaptive {
            QosSpec::new(self.epsilon)?;
        }
        self.ctx.validate()
    }
}

/// start, start+step, ... up to stop inclusive (with a 1e-9 step slack).
pub fn db_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(OstnError::Validation(format!("bad SNR range {start}:{stop}:{step}")));
    }
    if stop < start {
        return Ok(vec![]);
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub snr_db: f64,
    pub network: Network,
    pub op_bound: Option<f64>,
    pub op_asymptotic: Option<f64>,
    pub op_mc_exact: Option<f64>,
    pub op_mc_bound: Option<f64>,
    /// Standard error of `op_mc_bound`.
    pub stderr: Option<f64>,
    pub mu: Option<f64>,
    pub branch: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageCurve {
    pub name: String,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<CurveRow>,
    pub warnings: Vec<String>,
}

struct PointOut {
    rows: [CurveRow; 2],
    warnings: Vec<String>,
}

fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn analytic_row(snr_db: f64, network: Network, p: Option<&OutagePoint>, spec: &SweepSpec, mu: Option<f64>) -> CurveRow {
    CurveRow {
        snr_db,
        network,
        op_bound: p.map(|p| p.op_bound),
        op_asymptotic: p.and_then(|p| p.op_asymptotic).filter(|_| spec.outputs.asymptotic),
        op_mc_exact: None,
        op_mc_bound: None,
        stderr: None,
        mu,
        branch: p.map_or_else(String::new, |p| p.branch.to_string()),
    }
}

fn run_point(spec: &SweepSpec, index: usize, snr_db: f64) -> Result<PointOut> {
    let mut ctx = spec.ctx.with_eta(db_to_linear(snr_db));
    let mut warnings = Vec::new();
    let mu = match spec.mu_mode {
        MuMode::Fixed => None,
        MuMode::Adaptive => {
            let qos = QosSpec::new(spec.epsilon)?;
            match solve_mu(&ctx, &qos) {
                Ok(s) => {
                    ctx.mu = s.mu;
                    Some(s.mu)
                }
                Err(OstnError::Infeasible { .. }) => {
                    let row = |network| CurveRow {
                        snr_db,
                        network,
                        op_bound: Some(1.0),
                        op_asymptotic: None,
                        op_mc_exact: None,
                        op_mc_bound: None,
                        stderr: None,
                        mu: None,
                        branch: QOS_INFEASIBLE.to_string(),
                    };
                    return Ok(PointOut { rows: [row(Network::Satellite), row(Network::Iot)], warnings });
                }
                Err(e) => return Err(e),
            }
        }
    };
    let shown_mu = mu.or(Some(ctx.mu));
    let (sat, iot) = if spec.outputs.analytic || spec.outputs.asymptotic {
        (Some(sat_op_bound(&ctx)?), Some(iot_op_bound(&ctx)?))
    } else {
        (None, None)
    };
    for (net, p) in [("satellite", &sat), ("iot", &iot)] {
        if let Some(p) = p {
            warnings.extend(p.warnings.iter().map(|w| format!("{snr_db} dB {net}: {w}")));
        }
    }
    let mut rows = [
        analytic_row(snr_db, Network::Satellite, sat.as_ref(), spec, shown_mu),
        analytic_row(snr_db, Network::Iot, iot.as_ref(), spec, shown_mu),
    ];
    if !spec.outputs.analytic {
        rows.iter_mut().for_each(|r| r.op_bound = None);
    }
    if spec.outputs.montecarlo {
        let sim = simulate(&ctx, spec.trials, point_seed(spec.seed, index))?;
        for (row, (exact, bound)) in rows.iter_mut().zip([(sim.sat_exact, sim.sat_bound), (sim.iot_exact, sim.iot_bound)]) {
            row.op_mc_exact = Some(exact.p);
            row.op_mc_bound = Some(bound.p);
            row.stderr = Some(bound.stderr);
        }
    }
    Ok(PointOut { rows, warnings })
}

/// Evaluates the requested outputs at every grid point. SNR points run in
/// parallel; rows come back satellite then IoT per point, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<OutageCurve> {
    spec.validate()?;
    let points: Vec<PointOut> = spec
        .snr_db
        .par_iter()
        .enumerate()
        .map(|(i, &db)| run_point(spec, i, db))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(points.len() * 2);
    let mut warnings = Vec::new();
    for p in points {
        rows.extend(p.rows);
        warnings.extend(p.warnings);
    }
    Ok(OutageCurve { name: spec.name.clone(), trials: spec.trials, seed: spec.seed, rows, warnings })
}

fn io_err(e: impl std::fmt::Display) -> OstnError {
    OstnError::Io(e.to_string())
}

pub fn write_csv<W: Write>(rows: &[CurveRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER).map_err(io_err)?;
    }
    for r in rows {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(io_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(OstnError::Validation(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(io_err)).collect()
}
