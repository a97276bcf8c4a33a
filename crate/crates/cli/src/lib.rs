//! Front end for the flux Pauli operator library: config parsing, epsilon
//! sweeps with CSV/JSON output, and the identity check suites.

pub mod checks;
pub mod config;
pub mod output;
pub mod sweep;

pub use config::{parse_config, ConfigError, RunConfig};
pub use sweep::{run_sweep, SweepResult, SweepRow};
