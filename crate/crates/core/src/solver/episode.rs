//! One search episode: simulator state, growing trajectory and the reward of
//! the active mode.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::ActionBounds;
use crate::dissim::{trajectory_signature, FailureArchive, RepresentativeSeq};
use crate::error::Result;
use crate::rewards::{
    action_vector, at_fault, generic_reward, rss_reward, td_reward, ActionModel, RewardConfig, RewardMode,
    StepContext,
};
use crate::rss::{classify_sut, improper_fraction, RssParams};
use crate::scenario::{initialize, is_terminal, step_detailed, EnvAction, ScenarioConfig, SimState};
use crate::trajectory::Trajectory;

/// Everything fixed across the episodes of one search.
#[derive(Debug, Clone)]
pub struct Problem {
    pub scenario: ScenarioConfig<f64>,
    pub mode: RewardMode,
    pub reward: RewardConfig<f64>,
    pub rss: RssParams<f64>,
}

impl Problem {
    pub fn new(
        scenario: ScenarioConfig<f64>,
        mode: RewardMode,
        reward: RewardConfig<f64>,
        rss: RssParams<f64>,
    ) -> Result<Self> {
        scenario.validate()?;
        reward.validate()?;
        rss.validate()?;
        Ok(Self {
            scenario,
            mode,
            reward,
            rss,
        })
    }

    pub fn n_peds(&self) -> usize {
        self.scenario.ped_inits.len()
    }
}

/// Draws pedestrian action tuples from its own stream, always six values
/// per pedestrian in field order.
#[derive(Debug, Clone)]
pub struct ActionSampler {
    rng: ChaCha8Rng,
    bounds: ActionBounds,
    draws: u64,
}

impl ActionSampler {
    pub fn new(rng: ChaCha8Rng, bounds: ActionBounds) -> Self {
        Self { rng, bounds, draws: 0 }
    }

    pub fn sample(&mut self, n_peds: usize) -> Vec<EnvAction<f64>> {
        self.draws += 1;
        (0..n_peds)
            .map(|_| {
                let mut acc = || uniform(&mut self.rng, self.bounds.accel);
                let (ax, ay) = (acc(), acc());
                let mut noise = || uniform(&mut self.rng, self.bounds.noise);
                EnvAction {
                    ax,
                    ay,
                    nvx: noise(),
                    nvy: noise(),
                    nx: noise(),
                    ny: noise(),
                }
            })
            .collect()
    }

    /// Number of action vectors drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

#[derive(Debug, Clone)]
pub struct Episode {
    state: SimState<f64>,
    traj: Trajectory<f64>,
    miss: f64,
    signature: Option<RepresentativeSeq<f64>>,
    f_imp: Option<f64>,
}

fn lead_miss(state: &SimState<f64>) -> f64 {
    let lead = &state.cars()[0];
    state
        .peds()
        .iter()
        .map(|p| lead.distance_to(p))
        .fold(f64::INFINITY, f64::min)
}

impl Episode {
    pub fn start(problem: &Problem, seed: u64) -> Result<Self> {
        let state = initialize(&problem.scenario, seed)?;
        let traj = Trajectory::from_sim(problem.scenario.dt, &state, false);
        let miss = lead_miss(&state);
        Ok(Self {
            state,
            traj,
            miss,
            signature: None,
            f_imp: None,
        })
    }

    pub fn depth(&self) -> usize {
        self.state.time_step
    }

    pub fn state(&self) -> &SimState<f64> {
        &self.state
    }

    pub fn trajectory(&self) -> &Trajectory<f64> {
        &self.traj
    }

    pub fn is_terminal(&self, problem: &Problem) -> bool {
        self.traj.is_failure() || is_terminal(&self.state, &problem.scenario)
    }

    /// Closest lead-car / pedestrian distance so far.
    pub fn miss_distance(&self) -> f64 {
        self.miss
    }

    /// Improper fraction of the lead car, once computed at termination in
    /// RSS mode.
    pub fn f_imp(&self) -> Option<f64> {
        self.f_imp
    }

    /// Whether the episode ended in the success set of the active mode.
    pub fn is_success(&self, problem: &Problem) -> bool {
        match problem.mode {
            RewardMode::Generic | RewardMode::Td => self.traj.is_failure(),
            RewardMode::Rss => self
                .f_imp
                .is_some_and(|f| at_fault(self.traj.is_failure(), f, &problem.reward)),
        }
    }

    pub fn total_reward(&self) -> f64 {
        self.traj.total_reward()
    }

    /// Advances one step and returns the reward earned.
    pub fn step(
        &mut self,
        problem: &Problem,
        model: &ActionModel<f64>,
        actions: Vec<EnvAction<f64>>,
        archive: &FailureArchive<f64>,
    ) -> Result<f64> {
        let rec = step_detailed(&self.state, &actions, &problem.scenario)?;
        self.miss = self.miss.min(lead_miss(&rec.state));
        let flat = action_vector(&actions);
        let ctx = StepContext {
            in_failure_set: rec.event,
            t: rec.state.time_step,
            horizon: problem.scenario.horizon,
            action: &flat,
            miss_distance: self.miss,
        };
        let cfg = &problem.reward;
        let ends = rec.event || rec.state.time_step >= problem.scenario.horizon;
        let provisional = match problem.mode {
            RewardMode::Generic | RewardMode::Rss => generic_reward(&ctx, cfg, model)?,
            RewardMode::Td if !rec.event => generic_reward(&ctx, cfg, model)?,
            RewardMode::Td => 0.0,
        };
        self.traj
            .push_step(actions, rec.applied, rec.state.agents.clone(), rec.event, provisional);
        self.state = rec.state;
        if rec.event {
            self.signature = Some(trajectory_signature(&self.traj, cfg.n_segments, cfg.dissim_source)?);
        }
        let reward = match problem.mode {
            RewardMode::Rss if ends => {
                let labels = classify_sut(&self.traj, 0, &problem.rss)?;
                self.f_imp = Some(improper_fraction::<f64>(&labels));
                rss_reward(&ctx, &labels, cfg, model)?
            }
            RewardMode::Td if rec.event => {
                let sig = self.signature.as_ref().expect("set on failure");
                td_reward(&ctx, sig, archive, cfg, model)?
            }
            _ => provisional,
        };
        if reward != provisional {
            self.traj.set_last_reward(reward);
        }
        Ok(reward)
    }

    /// Hands the finished trajectory over together with its signature.
    pub fn into_parts(self, problem: &Problem) -> Result<(Trajectory<f64>, RepresentativeSeq<f64>)> {
        let sig = match self.signature {
            Some(s) => s,
            None => trajectory_signature(&self.traj, problem.reward.n_segments, problem.reward.dissim_source)?,
        };
        Ok((self.traj, sig))
    }
}

/// Plays sampled actions until the episode terminates or reaches `max_depth`;
/// returns the reward accumulated by the appended steps.
pub fn rollout(
    episode: &mut Episode,
    problem: &Problem,
    model: &ActionModel<f64>,
    max_depth: usize,
    sampler: &mut ActionSampler,
    archive: &FailureArchive<f64>,
) -> Result<f64> {
    let mut ret = 0.0;
    while !episode.is_terminal(problem) && episode.depth() < max_depth {
        let actions = sampler.sample(problem.n_peds());
        ret += episode.step(problem, model, actions, archive)?;
    }
    Ok(ret)
}
