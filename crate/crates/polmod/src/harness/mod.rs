//! Scenario configuration, Monte Carlo execution and result serialization.

pub mod config;
pub mod csv;
pub mod runner;
