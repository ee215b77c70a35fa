//! Search over pedestrian action sequences.

mod config;
mod episode;
mod mcts;
mod random;

pub use config::{ActionBounds, Algorithm, SearchConfig};
pub use episode::{rollout, ActionSampler, Episode, Problem};
pub use mcts::{iterate, mcts, rng_streams, widening_cap, NodeId, SearchNode, SearchTree};
pub use random::random_search;

use crate::dissim::FailureArchive;
use crate::error::Result;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Found,
    /// Budget exhausted without a single failure.
    NoFailures,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Best failures first.
    pub trajectories: Vec<Trajectory<f64>>,
    /// Episodes that ended in the success set of the active mode.
    pub failure_episodes: usize,
    pub episodes: usize,
    pub action_draws: u64,
    pub status: SearchStatus,
}

/// Runs the configured algorithm and returns the archived failures.
pub fn run_search(problem: &Problem, cfg: &SearchConfig, archive: FailureArchive<f64>) -> Result<SearchOutcome> {
    cfg.validate()?;
    match cfg.algo {
        Algorithm::Mcts => mcts(problem, cfg, archive).map(|(o, _)| o),
        Algorithm::Random => random_search(problem, cfg.budget, cfg.seed, cfg.bounds, archive),
    }
}
