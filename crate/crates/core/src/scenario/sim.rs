//! Crosswalk simulator: IDM-driven cars, search-driven pedestrians.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use super::idm::idm_acceleration;
use super::types::{AgentId, AgentState, EnvAction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T> {
    pub time_step: usize,
    /// Cars first, then pedestrians.
    pub agents: Vec<AgentState<T>>,
    pub n_cars: usize,
    /// Seeded at initialization; carried along so forks of a state stay reproducible.
    rng_state: ChaCha8Rng,
}

impl<T: Scalar> SimState<T> {
    pub fn cars(&self) -> &[AgentState<T>] {
        &self.agents[..self.n_cars]
    }

    pub fn peds(&self) -> &[AgentState<T>] {
        &self.agents[self.n_cars..]
    }

    pub fn n_peds(&self) -> usize {
        self.agents.len() - self.n_cars
    }

    pub fn agent_ids(&self) -> Vec<AgentId> {
        (0..self.n_cars)
            .map(AgentId::car)
            .chain((0..self.n_peds()).map(AgentId::ped))
            .collect()
    }

    pub fn rng_state(&self) -> &ChaCha8Rng {
        &self.rng_state
    }
}

/// Which pair of agents put the state into the failure set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contact {
    CarCar { rear: usize, front: usize },
    /// Lead car against pedestrian `ped`.
    CarPed { ped: usize },
}

pub fn initialize<T: Scalar>(config: &ScenarioConfig<T>, seed: u64) -> Result<SimState<T>> {
    config.validate()?;
    let agents = config
        .car_inits
        .iter()
        .chain(config.ped_inits.iter())
        .copied()
        .collect();
    Ok(SimState {
        time_step: 0,
        agents,
        n_cars: config.car_inits.len(),
        rng_state: ChaCha8Rng::seed_from_u64(seed),
    })
}

/// The vehicles' view of pedestrian `ped`: the true state plus additive noise.
pub fn observe<T: Scalar>(state: &SimState<T>, noise: &EnvAction<T>, ped: usize) -> AgentState<T> {
    let truth = state.peds()[ped];
    AgentState {
        vx: truth.vx + noise.nvx,
        vy: truth.vy + noise.nvy,
        x: truth.x + noise.nx,
        y: truth.y + noise.ny,
    }
}

/// Nearest obstacle strictly ahead of car `ego` within its lane corridor.
fn lead_obstacle<T: Scalar>(
    state: &SimState<T>,
    observed_peds: &[AgentState<T>],
    ego: usize,
    config: &ScenarioConfig<T>,
) -> Option<AgentState<T>> {
    let me = state.agents[ego];
    state
        .cars()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != ego)
        .map(|(_, c)| *c)
        .chain(observed_peds.iter().copied())
        .filter(|o| o.x > me.x && (o.y - me.y).abs() < config.lane_halfwidth)
        .min_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(std::cmp::Ordering::Equal))
}

/// Result of one step, including the accelerations actually applied to each
/// agent (cars: IDM output after the no-reverse clamp; pedestrians: the commanded
/// acceleration).
#[derive(Debug, Clone)]
pub struct StepRecord<T> {
    pub state: SimState<T>,
    pub event: bool,
    pub applied: Vec<[T; 2]>,
}

pub fn step_detailed<T: Scalar>(
    state: &SimState<T>,
    actions: &[EnvAction<T>],
    config: &ScenarioConfig<T>,
) -> Result<StepRecord<T>> {
    if actions.len() != state.n_peds() {
        return Err(Error::Interface(format!(
            "expected {} pedestrian actions, got {}",
            state.n_peds(),
            actions.len()
        )));
    }
    if state.time_step >= config.horizon {
        return Err(Error::Interface(format!(
            "cannot step past the horizon ({})",
            config.horizon
        )));
    }
    let dt = config.dt;
    let observed: Vec<_> = actions
        .iter()
        .enumerate()
        .map(|(i, a)| observe(state, a, i))
        .collect();

    let mut next = state.clone();
    let mut applied = Vec::with_capacity(state.agents.len());
    for ego in 0..state.n_cars {
        let lead = lead_obstacle(state, &observed, ego, config);
        let cur = state.agents[ego];
        let accel = idm_acceleration(&cur, lead.as_ref(), &config.idm);
        let v_next = (cur.vx + accel * dt).max(T::zero());
        let car = &mut next.agents[ego];
        car.vx = v_next;
        car.vy = T::zero();
        car.x = cur.x + v_next * dt;
        applied.push([(v_next - cur.vx) / dt, T::zero()]);
    }
    let vmax = config.ped_speed_max;
    for (i, a) in actions.iter().enumerate() {
        let cur = state.peds()[i];
        let ped = &mut next.agents[state.n_cars + i];
        ped.vx = (cur.vx + a.ax * dt).max(-vmax).min(vmax);
        ped.vy = (cur.vy + a.ay * dt).max(-vmax).min(vmax);
        ped.x = cur.x + ped.vx * dt;
        ped.y = cur.y + ped.vy * dt;
        applied.push([a.ax, a.ay]);
    }
    next.time_step = state.time_step + 1;
    let event = in_critical_set(&next, config);
    Ok(StepRecord {
        state: next,
        event,
        applied,
    })
}

pub fn step<T: Scalar>(
    state: &SimState<T>,
    actions: &[EnvAction<T>],
    config: &ScenarioConfig<T>,
) -> Result<(SimState<T>, bool)> {
    step_detailed(state, actions, config).map(|r| (r.state, r.event))
}

/// Car/car contacts take precedence over car/pedestrian ones.
pub fn critical_contact<T: Scalar>(
    state: &SimState<T>,
    config: &ScenarioConfig<T>,
) -> Option<Contact> {
    contact_among(&state.agents, state.n_cars, config)
}

/// Contact test on a bare agent list (cars first).
pub fn contact_among<T: Scalar>(
    agents: &[AgentState<T>],
    n_cars: usize,
    config: &ScenarioConfig<T>,
) -> Option<Contact> {
    let (cars, peds) = agents.split_at(n_cars);
    for a in 0..cars.len() {
        for b in a + 1..cars.len() {
            if (cars[a].x - cars[b].x).abs() < config.thresholds.car_car {
                let (rear, front) = if cars[a].x <= cars[b].x { (a, b) } else { (b, a) };
                return Some(Contact::CarCar { rear, front });
            }
        }
    }
    let lead = cars[0];
    let thr = config.thresholds.car_ped;
    peds.iter()
        .position(|p| (p.x - lead.x).abs() < thr && (p.y - lead.y).abs() < thr)
        .map(|ped| Contact::CarPed { ped })
}

pub fn in_critical_set<T: Scalar>(state: &SimState<T>, config: &ScenarioConfig<T>) -> bool {
    critical_contact(state, config).is_some()
}

pub fn is_terminal<T: Scalar>(state: &SimState<T>, config: &ScenarioConfig<T>) -> bool {
    state.time_step >= config.horizon || in_critical_set(state, config)
}

/// Owning wrapper exposing the initialize / step / terminal-check interface.
#[derive(Debug, Clone)]
pub struct Simulator<T> {
    config: ScenarioConfig<T>,
    state: SimState<T>,
    seed: u64,
}

impl<T: Scalar> Simulator<T> {
    pub fn new(config: ScenarioConfig<T>, seed: u64) -> Result<Self> {
        let state = initialize(&config, seed)?;
        Ok(Self {
            config,
            state,
            seed,
        })
    }

    pub fn reset(&mut self) {
        self.state = initialize(&self.config, self.seed).expect("config validated at construction");
    }

    pub fn step(&mut self, actions: &[EnvAction<T>]) -> Result<StepRecord<T>> {
        let rec = step_detailed(&self.state, actions, &self.config)?;
        self.state = rec.state.clone();
        Ok(rec)
    }

    pub fn is_terminal(&self) -> bool {
        is_terminal(&self.state, &self.config)
    }

    pub fn state(&self) -> &SimState<T> {
        &self.state
    }

    pub fn config(&self) -> &ScenarioConfig<T> {
        &self.config
    }
}
