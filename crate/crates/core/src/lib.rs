pub mod adaptive_mu;
pub mod error;
pub mod fading;
pub mod harness;
pub mod interference;
pub mod montecarlo;
pub mod outage;
pub mod specfun;

pub use error::{OstnError, Result};
