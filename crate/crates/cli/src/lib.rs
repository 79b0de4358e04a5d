//! Command layer: configuration, pipeline orchestration, replay
//! verification and the corpus benchmark.

pub mod bench;
pub mod commands;
pub mod config;
pub mod metrics;
pub mod pipeline;
pub mod replay;
