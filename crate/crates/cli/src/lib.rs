//! Command-line front end: config files, presets, CSV and SVG output, self-checks.

pub mod app;
pub mod config;
pub mod plot;
pub mod preset;
pub mod report;
pub mod verify;

pub use app::run_cli;
