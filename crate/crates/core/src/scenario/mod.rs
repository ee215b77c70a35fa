//! Deterministic crosswalk scenario: the system under test is an IDM car
//! (optionally followed by a second IDM car), the disturbances are
//! pedestrian accelerations and perception noise.

mod config;
mod idm;
mod sim;
mod types;

pub use config::{FailureThresholds, ScenarioConfig};
pub use idm::{idm_acceleration, IdmParams};
pub use sim::{
    critical_contact, contact_among, in_critical_set, initialize, is_terminal, observe, step, step_detailed,
    Contact, SimState, Simulator, StepRecord,
};
pub use types::{flatten_actions, AgentId, AgentKind, AgentState, EnvAction};
