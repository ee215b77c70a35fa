//! Recorded episodes and their CSV representation.
//!
//! Export layout: an optional `# dt=<seconds>` comment, a header line, then
//! one row per (timestep, agent):
//!
//! ```text
//! # dt=0.1
//! t,agent_id,vx,vy,x,y,ax_applied,ay_applied,event_flag
//! 0,car0,11.1,0,-20,0,-0.31,0,0
//! ```
//!
//! `ax_applied`/`ay_applied` is the acceleration applied during the step
//! that starts at `t` (zero on the final row of a trajectory).

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scenario::{AgentId, AgentKind, AgentState, EnvAction, SimState};

pub const CSV_HEADER: &str = "t,agent_id,vx,vy,x,y,ax_applied,ay_applied,event_flag";

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    dt: T,
    agents: Vec<AgentId>,
    states: Vec<Vec<AgentState<T>>>,
    events: Vec<bool>,
    applied: Vec<Vec<[T; 2]>>,
    actions: Vec<Vec<EnvAction<T>>>,
    rewards: Vec<T>,
    total_reward: T,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(dt: T, agents: Vec<AgentId>, initial: Vec<AgentState<T>>, initial_event: bool) -> Self {
        assert_eq!(agents.len(), initial.len(), "one state per agent");
        Self {
            dt,
            agents,
            states: vec![initial],
            events: vec![initial_event],
            applied: Vec::new(),
            actions: Vec::new(),
            rewards: Vec::new(),
            total_reward: T::zero(),
        }
    }

    pub fn from_sim(dt: T, state: &SimState<T>, initial_event: bool) -> Self {
        Self::new(dt, state.agent_ids(), state.agents.clone(), initial_event)
    }

    /// Appends one simulation step and its reward.
    pub fn push_step(
        &mut self,
        actions: Vec<EnvAction<T>>,
        applied: Vec<[T; 2]>,
        next: Vec<AgentState<T>>,
        event: bool,
        reward: T,
    ) {
        assert_eq!(next.len(), self.agents.len(), "one state per agent");
        assert_eq!(applied.len(), self.agents.len(), "one acceleration per agent");
        self.actions.push(actions);
        self.applied.push(applied);
        self.states.push(next);
        self.events.push(event);
        self.rewards.push(reward);
        self.total_reward = self.total_reward + reward;
    }

    /// Replaces the reward of the most recent step.
    pub fn set_last_reward(&mut self, reward: T) {
        let last = self.rewards.last_mut().expect("no step recorded");
        self.total_reward = self.total_reward - *last + reward;
        *last = reward;
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn agent_index(&self, id: AgentId) -> Option<usize> {
        self.agents.iter().position(|a| *a == id)
    }

    pub fn n_cars(&self) -> usize {
        self.agents.iter().filter(|a| a.kind == AgentKind::Car).count()
    }

    /// Number of recorded states (steps + 1).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn states(&self) -> &[Vec<AgentState<T>>] {
        &self.states
    }

    pub fn state(&self, t: usize, agent: usize) -> &AgentState<T> {
        &self.states[t][agent]
    }

    pub fn last_state(&self) -> &[AgentState<T>] {
        self.states.last().expect("trajectory never empty")
    }

    pub fn events(&self) -> &[bool] {
        &self.events
    }

    pub fn actions(&self) -> &[Vec<EnvAction<T>>] {
        &self.actions
    }

    pub fn applied(&self) -> &[Vec<[T; 2]>] {
        &self.applied
    }

    pub fn rewards(&self) -> &[T] {
        &self.rewards
    }

    pub fn total_reward(&self) -> T {
        self.total_reward
    }

    /// First state flagged as being in the failure set.
    pub fn failure_step(&self) -> Option<usize> {
        self.events.iter().position(|e| *e)
    }

    pub fn is_failure(&self) -> bool {
        self.failure_step().is_some()
    }

    pub fn series(&self, agent: usize) -> impl Iterator<Item = &AgentState<T>> + '_ {
        self.states.iter().map(move |s| &s[agent])
    }

    /// Planar path `(x, y)` of one agent.
    pub fn path(&self, agent: usize) -> Vec<[T; 2]> {
        self.series(agent).map(|s| s.position()).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# dt={}", self.dt)?;
        writeln!(w, "{CSV_HEADER}")?;
        for (t, snapshot) in self.states.iter().enumerate() {
            for (a, s) in snapshot.iter().enumerate() {
                let [ax, ay] = self
                    .applied
                    .get(t)
                    .map(|row| row[a])
                    .unwrap_or([T::zero(), T::zero()]);
                writeln!(
                    w,
                    "{t},{},{},{},{},{},{ax},{ay},{}",
                    self.agents[a],
                    s.vx,
                    s.vy,
                    s.x,
                    s.y,
                    u8::from(self.events[t])
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses an export. Rewards and noise are not part of the format, so the
    /// result carries zero rewards and empty action lists. Missing `dt`
    /// comment defaults to 0.1 s.
    pub fn read_csv<R: BufRead>(r: R, label: &str) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse {
            file: label.to_string(),
            line,
            message,
        };
        let mut dt = 0.1f64;
        let mut header_seen = false;
        let mut agents: Vec<AgentId> = Vec::new();
        let mut rows: Vec<(usize, AgentId, AgentState<T>, [T; 2], bool)> = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::io(label, e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if let Some(v) = c.trim().strip_prefix("dt=") {
                    dt = v
                        .trim()
                        .parse()
                        .map_err(|_| perr(line_no, format!("bad dt `{v}`")))?;
                }
                continue;
            }
            if !header_seen {
                if line != CSV_HEADER {
                    return Err(perr(line_no, format!("expected header `{CSV_HEADER}`")));
                }
                header_seen = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(perr(line_no, format!("expected 9 fields, got {}", f.len())));
            }
            let t: usize = f[0]
                .parse()
                .map_err(|_| perr(line_no, format!("bad timestep `{}`", f[0])))?;
            let id: AgentId = f[1].parse().map_err(|e: String| perr(line_no, e))?;
            let num = |i: usize| -> Result<T> {
                f[i].parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| perr(line_no, format!("bad number `{}`", f[i])))
            };
            let state = AgentState::new(num(2)?, num(3)?, num(4)?, num(5)?);
            let event = match f[8] {
                "0" | "false" => false,
                "1" | "true" => true,
                other => return Err(perr(line_no, format!("bad event flag `{other}`"))),
            };
            if t == 0 {
                agents.push(id);
            }
            rows.push((t, id, state, [num(6)?, num(7)?], event));
        }
        if agents.is_empty() {
            return Err(perr(0, "trajectory has no rows".into()));
        }
        let n = agents.len();
        if rows.len() % n != 0 {
            return Err(perr(0, "rows do not form complete timesteps".into()));
        }
        let mut traj: Option<Self> = None;
        let mut pending_applied: Vec<[T; 2]> = Vec::new();
        for (t, chunk) in rows.chunks(n).enumerate() {
            let mut snapshot = Vec::with_capacity(n);
            let mut applied = Vec::with_capacity(n);
            let event = chunk[0].4;
            for (k, (rt, id, s, acc, ev)) in chunk.iter().enumerate() {
                if *rt != t || *id != agents[k] || *ev != event {
                    return Err(perr(0, format!("inconsistent rows at timestep {t}")));
                }
                snapshot.push(*s);
                applied.push(*acc);
            }
            match traj.as_mut() {
                None => traj = Some(Self::new(T::lit(dt), agents.clone(), snapshot, event)),
                Some(tr) => {
                    let prev = std::mem::take(&mut pending_applied);
                    tr.push_step(Vec::new(), prev, snapshot, event, T::zero());
                }
            }
            pending_applied = applied;
        }
        Ok(traj.expect("at least one timestep"))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(f), &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(values: &[(f64, f64)], fail_last: bool) -> Trajectory<f64> {
        let agents = vec![AgentId::car(0), AgentId::ped(0)];
        let mut tr = Trajectory::new(
            0.1,
            agents,
            vec![AgentState::new(11.1, 0.0, -20.0, 0.0), AgentState::new(0.0, 0.5, 0.0, -3.0)],
            false,
        );
        for (i, &(a, b)) in values.iter().enumerate() {
            let last = i + 1 == values.len();
            tr.push_step(
                vec![EnvAction::accel(a, b)],
                vec![[a * 0.5, 0.0], [a, b]],
                vec![AgentState::new(a, 0.0, b, 0.0), AgentState::new(b, a, 0.1 * a, -b)],
                last && fail_last,
                -(a * a),
            );
        }
        tr
    }

    #[test]
    fn total_reward_tracks_steps() {
        let tr = sample(&[(1.0, 2.0), (3.0, 0.5)], true);
        assert_eq!(tr.total_reward(), tr.rewards().iter().sum::<f64>());
        assert_eq!(tr.total_reward(), -10.0);
        assert_eq!(tr.failure_step(), Some(2));
        assert_eq!(tr.n_steps(), 2);
    }

    #[test]
    fn rejects_wrong_header() {
        let text = "t,agent,vx\n";
        assert!(Trajectory::<f64>::read_csv(text.as_bytes(), "x").is_err());
    }

    proptest! {
        #[test]
        fn csv_roundtrip_preserves_kinematics(
            values in proptest::collection::vec((-20.0..20.0f64, -5.0..5.0f64), 0..20),
            fail in any::<bool>(),
        ) {
            let tr = sample(&values, fail);
            let text = tr.to_csv_string();
            let back = Trajectory::<f64>::read_csv(text.as_bytes(), "mem").unwrap();
            prop_assert_eq!(back.states(), tr.states());
            prop_assert_eq!(back.events(), tr.events());
            prop_assert_eq!(back.applied(), tr.applied());
            prop_assert_eq!(back.agents(), tr.agents());
            prop_assert_eq!(back.dt(), tr.dt());
            prop_assert_eq!(back.to_csv_string(), text);
        }
    }
}
