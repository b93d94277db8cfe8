//! File formats, configuration, wall-clock execution and the command-line
//! front end for `bri-core`.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod manifest;
pub mod output;
pub mod wallclock;
pub mod wire;
