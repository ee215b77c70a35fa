//! Uniform random search baseline.

use super::config::ActionBounds;
use super::episode::{rollout, ActionSampler, Episode, Problem};
use super::mcts::rng_streams;
use super::SearchOutcome;
use crate::dissim::FailureArchive;
use crate::error::Result;

/// `budget` independent random episodes; failures kept best-first in the
/// archive.
pub fn random_search(
    problem: &Problem,
    budget: usize,
    seed: u64,
    bounds: ActionBounds,
    mut archive: FailureArchive<f64>,
) -> Result<SearchOutcome> {
    let model = problem.reward.action_model(problem.n_peds())?;
    let (action_rng, _) = rng_streams(seed);
    let mut sampler = ActionSampler::new(action_rng, bounds);
    let mut failures = 0;
    for _ in 0..budget {
        let mut ep = Episode::start(problem, seed)?;
        rollout(&mut ep, problem, &model, problem.scenario.horizon, &mut sampler, &archive)?;
        if ep.is_success(problem) {
            failures += 1;
            if archive.admits(ep.total_reward()) {
                let (traj, sig) = ep.into_parts(problem)?;
                archive.insert(traj, sig)?;
            }
        }
    }
    Ok(SearchOutcome::new(archive, failures, budget, sampler.draws()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewards::{RewardConfig, RewardMode};
    use crate::rss::RssParams;
    use crate::scenario::ScenarioConfig;

    fn problem(mode: RewardMode) -> Problem {
        Problem::new(ScenarioConfig::one_car_one_ped(), mode, RewardConfig::default(), RssParams::default()).unwrap()
    }

    #[test]
    fn zero_budget_is_empty() {
        let out = random_search(&problem(RewardMode::Generic), 0, 1, ActionBounds::default(), FailureArchive::new(25))
            .unwrap();
        assert!(out.trajectories.is_empty());
        assert_eq!(out.episodes, 0);
    }

    #[test]
    fn deterministic_and_failures_only() {
        let p = problem(RewardMode::Generic);
        let a = random_search(&p, 300, 8, ActionBounds::default(), FailureArchive::new(25)).unwrap();
        let b = random_search(&p, 300, 8, ActionBounds::default(), FailureArchive::new(25)).unwrap();
        assert_eq!(a.trajectories, b.trajectories);
        assert!(a.trajectories.iter().all(|t| t.is_failure()));
        assert!(a
            .trajectories
            .windows(2)
            .all(|w| w[0].total_reward() >= w[1].total_reward()));
    }

    #[test]
    fn reward_mode_only_changes_rewards() {
        let draws: Vec<u64> = RewardMode::ALL
            .iter()
            .map(|m| {
                random_search(&problem(*m), 50, 2, ActionBounds::default(), FailureArchive::new(25))
                    .unwrap()
                    .action_draws
            })
            .collect();
        assert!(draws.windows(2).all(|w| w[0] == w[1]));
    }
}
