//! Sweep runner behind the `ostn` binary: presets, config files, CSV and
//! JSON output, and the self-check suite.

pub mod checks;
pub mod config;
pub mod presets;
pub mod sweep;

pub use checks::{run_checks, Check};
pub use config::{parse_mu, parse_snr_range, FlatConfig};
pub use presets::{list_presets, preset, scenario_context, MuMode, Preset, Scenario};
pub use sweep::{
    db_grid, db_to_linear, linear_to_db, read_csv, run_sweep, write_csv, CurveRow, OutageCurve, Outputs, SweepSpec,
    CSV_HEADER, QOS_INFEASIBLE,
};
