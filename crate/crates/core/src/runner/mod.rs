//! JSON scenarios, figure presets, parameter sweeps and report comparison.

mod compare;
mod config;
mod preset;
mod run;
mod sweep;

pub use compare::{compare_reports, Comparison, ComparisonRow, DEFAULT_FIT_TOLERANCE};
pub use config::{
    lookup, mode_distribution, Caption, ModeConfig, ModelConfig, Outputs, ReservoirEntry, Resolved,
    ScenarioConfig, SweepAxis, SystemConfig, TimeGrid, TimeScale, Window,
};
pub use preset::{preset_configs, run_preset, Preset};
pub use run::{
    evaluate, format_float, read_curves, run_scenario, write_curves, write_report, Assignment,
    CaptionCheck, Curves, Run, RunReport, TimesSummary,
};
pub use sweep::{expand, run_sweep, run_sweep_to, worker_count, write_summary, SweepPoint, JOBS_ENV};
