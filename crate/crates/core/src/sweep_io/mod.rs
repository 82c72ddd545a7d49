//! Sweeps, configuration, export and the command line front end.

mod cli;
pub mod config;
pub mod export;
pub mod presets;
pub mod svg;
mod sweep;

pub use cli::cli_main;
pub use config::{load_config, parse_config, ConfigError, RunConfig};
pub use export::{export_spectrum, import_csv, import_json, Format, PointMeta, RunManifest};
pub use svg::{render_svg, PlotSeries, PlotStyle, SvgError};
pub use sweep::{
    frequency_sweep, frequency_sweep_timed, parameter_sweep, Axis, DeltaGrid, Reference, SweepError, SweepOptions,
    SweepPoint, SweepResult, SweepSpec, SweepTiming, SweepValues,
};
