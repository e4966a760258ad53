//! Scalar special functions used by the closed-form outage expressions.
//!
//! Every series kernel takes an [`EvalPolicy`] carrying its stopping rule:
//! summation stops once two consecutive terms fall below
//! `rel_tol * |partial sum|`, and fails with [`OstnError::Truncation`] if
//! `max_terms` is reached first.

mod gamma;
mod hyper;
pub mod quad;
mod sum;

pub use gamma::{
    beta_fn, binomial, gamma_fn, gamma_p, gamma_q, ln_beta, ln_binomial, ln_gamma,
    lower_inc_gamma, pochhammer, upper_inc_gamma,
};
pub use hyper::{
    gauss_2f1, gauss_2f1_series, kummer_1f1, kummer_1f1_series, laplace_u_family, ln_kummer_1f1, ln_laplace_u,
    tricomi_u,
};
pub use sum::{LogValue, NeumaierSum};

use crate::error::{OstnError, Result};

/// Stopping rule for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPolicy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 500,
        }
    }
}

impl EvalPolicy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(OstnError::Domain(format!("rel_tol {rel_tol} not in (0, 1)")));
        }
        if max_terms == 0 {
            return Err(OstnError::Domain("max_terms must be >= 1".into()));
        }
        Ok(Self { rel_tol, max_terms })
    }

    /// Same tolerance, larger term budget.
    pub fn with_max_terms(self, max_terms: usize) -> Self {
        Self { max_terms, ..self }
    }
}

/// Tracks the "two consecutive small terms" stopping rule.
#[derive(Debug, Default)]
pub(crate) struct StopRule {
    small_run: u8,
}

impl StopRule {
    pub(crate) fn done(&mut self, term: f64, sum: f64, rel_tol: f64) -> bool {
        if term.abs() <= rel_tol * sum.abs() || term == 0.0 {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        self.small_run >= 2
    }
}
