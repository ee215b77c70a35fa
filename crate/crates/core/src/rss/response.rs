//! Per-timestep danger and proper-response classification of the vehicle
//! under test against one other agent.
//!
//! Geometry is global: `x` is longitudinal, `y` lateral with `+y` on the left
//! of a car driving toward `+x`. Accelerations are recovered from recorded
//! velocities by forward differences, so the classifier only needs the
//! kinematic trace of a trajectory. Agents are points; gaps are measured
//! from the contact margin in [`RssParams::margin`].

use std::io::Write;

use super::distance::{safe_lat_distance, safe_lon_distance_opposite, safe_lon_distance_same_dir};
use super::params::RssParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scenario::AgentState;
use crate::trajectory::Trajectory;

/// Slack on rule comparisons (m/s² and m/s).
pub const RULE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DangerLabel {
    pub longitudinal: bool,
    pub lateral: bool,
}

impl DangerLabel {
    /// RSS only assigns blame once a situation is dangerous on both axes.
    pub fn both(&self) -> bool {
        self.longitudinal && self.lateral
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseLabel {
    NotApplicable,
    Proper,
    Improper,
}

impl ResponseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResponseLabel::NotApplicable => "not_applicable",
            ResponseLabel::Proper => "proper",
            ResponseLabel::Improper => "improper",
        }
    }
}

impl std::fmt::Display for ResponseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ResponseLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "not_applicable" => Ok(Self::NotApplicable),
            "proper" => Ok(Self::Proper),
            "improper" => Ok(Self::Improper),
            other => Err(format!("unknown response label `{other}`")),
        }
    }
}

/// Safe longitudinal distance for an ordered (rear, front) pair given their
/// `x` velocities.
fn safe_lon_for_pair<T: Scalar>(v_rear: T, v_front: T, p: &RssParams<T>) -> T {
    let zero = T::zero();
    let d = if v_rear >= zero && v_front >= zero {
        safe_lon_distance_same_dir(v_rear, v_front, p)
    } else if v_rear >= zero {
        safe_lon_distance_opposite(v_rear, v_front, p)
    } else if v_front < zero {
        // both heading toward -x: the front agent is the follower in the mirrored frame
        safe_lon_distance_same_dir(-v_front, -v_rear, p)
    } else {
        // separating
        safe_lon_distance_same_dir(zero, zero, p)
    };
    d.expect("speeds routed to the matching formula")
}

/// Danger flags of the pair `(car, other)` at one instant.
pub fn classify_danger<T: Scalar>(car: &AgentState<T>, other: &AgentState<T>, p: &RssParams<T>) -> DangerLabel {
    let (rear, front) = if car.x <= other.x { (car, other) } else { (other, car) };
    let d_lon = safe_lon_for_pair(rear.vx, front.vx, p);
    let gap_lon = front.x - rear.x - p.margin;

    // left agent has the larger y; lateral speeds measured positive to the right
    let (left, right) = if car.y >= other.y { (car, other) } else { (other, car) };
    let d_lat = safe_lat_distance(-left.vy, -right.vy, p);
    let gap_lat = left.y - right.y - p.margin;

    DangerLabel {
        longitudinal: gap_lon < d_lon,
        lateral: gap_lat < d_lat,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Governing {
    Longitudinal,
    Lateral,
}

#[derive(Debug, Clone, Copy)]
struct DangerEpisode {
    t_d: usize,
    governing: Governing,
    /// Cleared at the first step the pair is no longer dangerous on both axes.
    obligation: bool,
}

/// Danger flags and response label for one step of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepClassification {
    pub danger: DangerLabel,
    pub label: ResponseLabel,
}

fn check_indices<T: Scalar>(traj: &Trajectory<T>, car: usize, other: usize) -> Result<()> {
    let n = traj.agents().len();
    if car >= n || other >= n || car == other {
        return Err(Error::Interface(format!(
            "agent indices ({car}, {other}) invalid for a trajectory with {n} agents"
        )));
    }
    Ok(())
}

/// Labels every step `t` (the transition from state `t` to `t + 1`) with the
/// danger flags of state `t` and whether the car's acceleration over that
/// step is a proper response.
///
/// Before the first step that is dangerous on both axes the label is
/// `NotApplicable`. At that step `t_d` the rule set is chosen by whichever
/// axis became dangerous last (ties go to longitudinal). During
/// `[t_d, t_d + ρ]` the car may accelerate toward the other agent by at most
/// the maximum acceleration; afterwards it must brake at least at the minimum
/// braking (or be stopped on that axis) until the pair is no longer dangerous
/// on both axes, after which only non-positive acceleration toward the other
/// agent is proper. A later re-entry into danger opens a new episode.
pub fn classify_pair<T: Scalar>(
    traj: &Trajectory<T>,
    car: usize,
    other: usize,
    p: &RssParams<T>,
) -> Result<Vec<StepClassification>> {
    check_indices(traj, car, other)?;
    let slack = T::lit(RULE_SLACK);
    let dt = traj.dt();
    let mut out = Vec::with_capacity(traj.n_steps());
    let mut lon_onset: Option<usize> = None;
    let mut lat_onset: Option<usize> = None;
    let mut episode: Option<DangerEpisode> = None;

    for t in 0..traj.n_steps() {
        let c = traj.state(t, car);
        let o = traj.state(t, other);
        let danger = classify_danger(c, o, p);
        lon_onset = if danger.longitudinal { lon_onset.or(Some(t)) } else { None };
        lat_onset = if danger.lateral { lat_onset.or(Some(t)) } else { None };

        match episode.as_mut() {
            Some(ep) if ep.obligation => {
                if !danger.both() {
                    ep.obligation = false;
                }
            }
            _ => {
                if danger.both() {
                    let (lon, lat) = (lon_onset.unwrap_or(t), lat_onset.unwrap_or(t));
                    episode = Some(DangerEpisode {
                        t_d: t,
                        governing: if lon >= lat {
                            Governing::Longitudinal
                        } else {
                            Governing::Lateral
                        },
                        obligation: true,
                    });
                }
            }
        }

        let label = match episode {
            None => ResponseLabel::NotApplicable,
            Some(ep) => {
                let next = traj.state(t + 1, car);
                let in_pre = T::lit((t - ep.t_d) as f64) * dt <= p.rho + slack * dt;
                let proper = match ep.governing {
                    Governing::Longitudinal => {
                        if c.x > o.x {
                            // car in front: the obligations fall on the follower
                            true
                        } else {
                            let acc = (next.vx - c.vx) / dt;
                            axis_rule(
                                acc,
                                c.vx,
                                next.vx,
                                ep.obligation,
                                in_pre,
                                p.lon_a_max_acc,
                                p.lon_a_min_brk,
                                slack,
                            )
                        }
                    }
                    Governing::Lateral => {
                        let dir = if o.y >= c.y { T::one() } else { -T::one() };
                        let acc = (next.vy - c.vy) / dt * dir;
                        axis_rule(
                            acc,
                            c.vy * dir,
                            next.vy * dir,
                            ep.obligation,
                            in_pre,
                            p.lat_a_max_acc,
                            p.lat_a_min_brk,
                            slack,
                        )
                    }
                };
                if proper {
                    ResponseLabel::Proper
                } else {
                    ResponseLabel::Improper
                }
            }
        };
        out.push(StepClassification { danger, label });
    }
    Ok(out)
}

/// One-axis proper-response test. `acc`, `v_now` and `v_next` are measured
/// toward the other agent.
#[allow(clippy::too_many_arguments)]
fn axis_rule<T: Scalar>(
    acc: T,
    v_now: T,
    v_next: T,
    obligation: bool,
    in_pre: bool,
    a_max_acc: T,
    a_min_brk: T,
    slack: T,
) -> bool {
    if !obligation {
        return acc <= slack;
    }
    if in_pre {
        return acc <= a_max_acc + slack;
    }
    if v_now <= slack {
        // not closing on this axis: hold or move away
        return acc <= slack;
    }
    acc <= -a_min_brk + slack || v_next <= slack
}

pub fn classify_response<T: Scalar>(
    traj: &Trajectory<T>,
    car: usize,
    other: usize,
    p: &RssParams<T>,
) -> Result<Vec<ResponseLabel>> {
    Ok(classify_pair(traj, car, other, p)?
        .into_iter()
        .map(|s| s.label)
        .collect())
}

/// Labels of the car against every other agent, merged per step: improper if
/// improper toward anyone, proper if any rule applied, else not applicable.
pub fn classify_sut<T: Scalar>(traj: &Trajectory<T>, car: usize, p: &RssParams<T>) -> Result<Vec<ResponseLabel>> {
    let mut merged = vec![ResponseLabel::NotApplicable; traj.n_steps()];
    for other in (0..traj.agents().len()).filter(|o| *o != car) {
        for (m, l) in merged.iter_mut().zip(classify_response(traj, car, other, p)?) {
            *m = match (*m, l) {
                (ResponseLabel::Improper, _) | (_, ResponseLabel::Improper) => ResponseLabel::Improper,
                (ResponseLabel::Proper, _) | (_, ResponseLabel::Proper) => ResponseLabel::Proper,
                _ => ResponseLabel::NotApplicable,
            };
        }
    }
    Ok(merged)
}

/// Fraction of steps labelled improper; zero for an empty list.
pub fn improper_fraction<T: Scalar>(labels: &[ResponseLabel]) -> T {
    if labels.is_empty() {
        return T::zero();
    }
    let bad = labels.iter().filter(|l| **l == ResponseLabel::Improper).count();
    T::lit(bad as f64) / T::lit(labels.len() as f64)
}

/// Rule for the front agent of a longitudinal pair: with positive velocity it
/// must not brake harder than the maximum braking, with negative velocity it
/// must brake at least at the minimum braking. Exposed for analysis; the
/// vehicle under test is only ever scored as the follower.
pub fn front_agent_response_ok<T: Scalar>(v: T, acc: T, p: &RssParams<T>) -> bool {
    let slack = T::lit(RULE_SLACK);
    if v > T::zero() {
        acc >= -p.lon_a_max_brk - slack
    } else if v < T::zero() {
        acc >= p.lon_a_min_brk - slack
    } else {
        acc >= -slack
    }
}

pub const CLASSIFICATION_HEADER: &str = "t,other_id,danger_long,danger_lat,response_label";

/// Writes one row per (step, other agent) for the car at index `car`.
pub fn write_classification_csv<T: Scalar, W: Write>(
    traj: &Trajectory<T>,
    car: usize,
    p: &RssParams<T>,
    mut w: W,
) -> Result<()> {
    let per_other: Vec<(usize, Vec<StepClassification>)> = (0..traj.agents().len())
        .filter(|o| *o != car)
        .map(|o| classify_pair(traj, car, o, p).map(|c| (o, c)))
        .collect::<Result<_>>()?;
    let io = |e| Error::io("<classification>", e);
    writeln!(w, "{CLASSIFICATION_HEADER}").map_err(io)?;
    for t in 0..traj.n_steps() {
        for (o, cls) in &per_other {
            let c = cls[t];
            writeln!(
                w,
                "{t},{},{},{},{}",
                traj.agents()[*o],
                u8::from(c.danger.longitudinal),
                u8::from(c.danger.lateral),
                c.label
            )
            .map_err(io)?;
        }
    }
    Ok(())
}
