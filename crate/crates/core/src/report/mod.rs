//! Per-storm reports, JSON persistence, SVG plots and the command
//! implementations behind the `hailchi` binary.

mod commands;
mod storm_report;
pub mod svg;

pub use commands::{
    analyze_storm, cmd_cluster, cmd_fetch, cmd_fit, cmd_report, cmd_simulate, load_events, ClusterFile, FitOptions,
    ReportSummary, RunConfig, StormAnalysis, DEFAULT_CONTOUR_LEVELS,
};
pub use storm_report::{format_penalty, load_report, save_report, BinormalSummary, StormReport, SummaryRow};
