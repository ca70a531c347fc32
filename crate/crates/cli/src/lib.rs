//! Scenario configuration, channel generation, and batch region tracing
//! behind the `swipt-re` binary.

pub mod config;
pub mod rayleigh;
pub mod runner;

pub use config::{ChannelSource, PhysicalUnits, ScenarioConfig};
pub use rayleigh::generate_rayleigh_channel;
pub use runner::{run_scenario, RunSummary};
