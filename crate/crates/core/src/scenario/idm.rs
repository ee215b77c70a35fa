//! Intelligent Driver Model longitudinal controller.

use super::types::AgentState;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdmParams<T> {
    /// Desired speed (m/s).
    pub v0: T,
    /// Maximum acceleration (m/s²).
    pub a: T,
    /// Comfortable deceleration (m/s²).
    pub b: T,
    /// Hard braking limit the output is clamped to (m/s²).
    pub b_max: T,
    /// Jam distance (m).
    pub s0: T,
    /// Time headway (s).
    pub time_headway: T,
    pub delta: T,
}

impl<T: Scalar> Default for IdmParams<T> {
    fn default() -> Self {
        Self {
            v0: T::lit(11.1),
            a: T::lit(1.4),
            b: T::lit(2.0),
            b_max: T::lit(0.7 * crate::scalar::GRAVITY),
            s0: T::lit(2.0),
            time_headway: T::lit(1.5),
            delta: T::lit(4.0),
        }
    }
}

/// Longitudinal acceleration of `ego` given the observed state of the
/// nearest obstacle ahead in its lane (if any), clamped to `[-b_max, a]`.
pub fn idm_acceleration<T: Scalar>(
    ego: &AgentState<T>,
    lead_obs: Option<&AgentState<T>>,
    p: &IdmParams<T>,
) -> T {
    let v = ego.vx;
    let free = T::one() - (v / p.v0).powf(p.delta);
    let interaction = match lead_obs {
        None => T::zero(),
        Some(lead) => {
            let gap = lead.x - ego.x;
            if gap <= T::zero() {
                return -p.b_max;
            }
            let dv = v - lead.vx;
            let s_star =
                p.s0 + v * p.time_headway + v * dv / (T::two() * (p.a * p.b).sqrt());
            // fast-receding lead: s* floored at zero
            let ratio = s_star.max(T::zero()) / gap;
            ratio * ratio
        }
    };
    (p.a * (free - interaction)).max(-p.b_max).min(p.a)
}
