//! Flat `key = value` sweep files.
//!
//! ```text
//! # two-relay case 2 sweep, finer grid
//! preset = s3
//! k = 3
//! snr = 0:30:2.5
//! trials = 200000
//! ```
//!
//! `preset` (default `s1`) supplies every value; the other keys override
//! it. A file may name a parent file with `include = path`, resolved
//! relative to the including file; the including file's keys win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{OstnError, Result};
use crate::interference::PowerCondition;

use super::presets::MuMode;
use super::sweep::{db_grid, db_to_linear, Outputs, SweepSpec};

const MAX_INCLUDE_DEPTH: usize = 8;

/// Ordered key-value pairs from one or more files.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlatConfig {
    entries: BTreeMap<String, String>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| OstnError::Validation(format!("line {}: expected `key = value`", n + 1)))?;
            let key = k.trim().to_ascii_lowercase();
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(OstnError::Validation(format!("line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self { entries })
    }

    /// Reads `path`, following `include` chains.
    pub fn load(path: &Path) -> Result<Self> {
        Self::load_depth(path, 0)
    }

    fn load_depth(path: &Path, depth: usize) -> Result<Self> {
        if depth > MAX_INCLUDE_DEPTH {
            return Err(OstnError::Validation(format!("include chain deeper than {MAX_INCLUDE_DEPTH}")));
        }
        let text = std::fs::read_to_string(path).map_err(|e| OstnError::Io(format!("{}: {e}", path.display())))?;
        let mut own = Self::parse(&text)?;
        match own.entries.remove("include") {
            None => Ok(own),
            Some(parent) => {
                let base: PathBuf = path.parent().unwrap_or(Path::new(".")).join(parent);
                let mut merged = Self::load_depth(&base, depth + 1)?;
                merged.entries.extend(own.entries);
                Ok(merged)
            }
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_ascii_lowercase(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Resolves the preset and applies every other key on top of it.
    pub fn to_spec(&self) -> Result<SweepSpec> {
        let mut spec = SweepSpec::from_preset(self.get("preset").unwrap_or("s1"))?;
        for (k, v) in self.iter().filter(|(k, _)| *k != "preset") {
            apply(&mut spec, k, v)?;
        }
        spec.ctx = spec.ctx.clone().with_detected_modes();
        Ok(spec)
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| OstnError::Validation(format!("`{key}`: cannot parse `{v}`")))
}

/// Parses `start:stop:step` in dB.
pub fn parse_snr_range(v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [start, stop, step] => db_grid(num("snr", start)?, num("snr", stop)?, num("snr", step)?),
        [single] => Ok(vec![num("snr", single)?]),
        _ => Err(OstnError::Validation(format!("`snr`: expected start:stop:step, got `{v}`"))),
    }
}

pub fn parse_mu(v: &str) -> Result<(MuMode, Option<f64>)> {
    if v.eq_ignore_ascii_case("adaptive") {
        Ok((MuMode::Adaptive, None))
    } else {
        Ok((MuMode::Fixed, Some(num("mu", v)?)))
    }
}

fn parse_outputs(v: &str) -> Result<Outputs> {
    let mut o = Outputs { analytic: false, asymptotic: false, montecarlo: false };
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "analytic" => o.analytic = true,
            "asymptotic" => o.asymptotic = true,
            "montecarlo" | "mc" => o.montecarlo = true,
            other => return Err(OstnError::Validation(format!("`outputs`: unknown output `{other}`"))),
        }
    }
    Ok(o)
}

/// Applies one override. dB-valued keys end in `_db`.
pub fn apply(spec: &mut SweepSpec, key: &str, v: &str) -> Result<()> {
    let c = &mut spec.ctx;
    match key {
        "k" => c.k_relays = num(key, v)?,
        "mu" => {
            let (mode, value) = parse_mu(v)?;
            spec.mu_mode = mode;
            if let Some(mu) = value {
                c.mu = mu;
            }
        }
        "epsilon" => spec.epsilon = num(key, v)?,
        "rate_p" => c.rate_p = num(key, v)?,
        "rate_s" => c.rate_s = num(key, v)?,
        "m_ac" => c.sat_link.m = num(key, v)?,
        "b_ac" => c.sat_link.b = num(key, v)?,
        "omega_ac" => c.sat_link.omega = num(key, v)?,
        "m_cb" => c.cb_link.m = num(key, v)?,
        "omega_cb" => c.cb_link.omega = num(key, v)?,
        "m_cd" => c.cd_link.m = num(key, v)?,
        "omega_cd" => c.cd_link.omega = num(key, v)?,
        "ms" => c.interf.ms = num(key, v)?,
        "mt" => c.interf.mt_count = num(key, v)?,
        "m_s" => c.interf.sr.m = num(key, v)?,
        "b_s" => c.interf.sr.b = num(key, v)?,
        "omega_s" => c.interf.sr.omega = num(key, v)?,
        "m_t" => c.interf.nak.m = num(key, v)?,
        "omega_t" => c.interf.nak.omega = num(key, v)?,
        "eta_s_db" => c.interf.eta_s = db_to_linear(num(key, v)?),
        "eta_t_db" => c.interf.eta_t = db_to_linear(num(key, v)?),
        "lambda_db" => c.interf.lambda = db_to_linear(num(key, v)?),
        "condition" => {
            c.interf.condition = match v {
                "a" | "fixed" => PowerCondition::Fixed,
                "b" | "scaled" => PowerCondition::Scaled,
                _ => return Err(OstnError::Validation(format!("`condition`: expected a or b, got `{v}`"))),
            }
        }
        "sr_terms" => c.truncations.sr_terms = if v == "auto" { None } else { Some(num(key, v)?) },
        "series_cap" => c.truncations.series_cap = num(key, v)?,
        "series_tol" => c.truncations.series_tol = num(key, v)?,
        "snr" => spec.snr_db = parse_snr_range(v)?,
        "trials" => spec.trials = num(key, v)?,
        "seed" => spec.seed = num(key, v)?,
        "outputs" => spec.outputs = parse_outputs(v)?,
        "name" => spec.name = v.to_string(),
        _ => return Err(OstnError::Validation(format!("unknown key `{key}`"))),
    }
    Ok(())
}
