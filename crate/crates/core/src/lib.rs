//! Adaptive stress testing of an automated vehicle in a crosswalk scenario.
//!
//! The scenario, RSS, dissimilarity, trajectory and reward code is generic
//! over the floating point type; the search and experiment layers run in
//! `f64`. The aliases below fix the scalar for callers that don't care.

pub mod config;
pub mod dissim;
pub mod error;
pub mod harness;
pub mod rewards;
pub mod rss;
pub mod scalar;
pub mod scenario;
pub mod solver;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type AgentState = scenario::AgentState<f64>;
pub type EnvAction = scenario::EnvAction<f64>;
pub type SimState = scenario::SimState<f64>;
pub type ScenarioConfig = scenario::ScenarioConfig<f64>;
pub type Simulator = scenario::Simulator<f64>;
pub type Trajectory = trajectory::Trajectory<f64>;
pub type RssParams = rss::RssParams<f64>;
pub type RewardConfig = rewards::RewardConfig<f64>;
pub type FailureArchive = dissim::FailureArchive<f64>;
