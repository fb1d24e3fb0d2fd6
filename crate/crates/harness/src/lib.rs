//! Configuration, orchestration and artifacts around `wavetrace-core`.

pub mod config;
pub mod render;
pub mod report;
pub mod run;
pub mod suite;
pub mod sweep;
