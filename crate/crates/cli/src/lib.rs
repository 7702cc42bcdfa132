//! Command-line front end for the cat-state Landau-Zener simulator:
//! single runs, parameter sweeps, figure data and closed-form tables.

pub mod analytic;
pub mod config;
pub mod error;
pub mod figure;
pub mod output;
pub mod scenario;
pub mod sweep;

pub use config::{Axis, InitialSection, ModelName, NMax, Observable, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use figure::{generate, FigureOptions, Manifest, FIGURE_IDS};
pub use scenario::{analytic_p_lz, run_scenario, RunOutput};
pub use sweep::{run_sweep, SweepRow, SweepSpec};
