use crate::scalar::Scalar;
use crate::scenario::{contact_among, Contact, ScenarioConfig};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FailureType {
    VehPedVehicleInduced,
    VehPedPedestrianInduced,
    VehVeh,
    None,
}

impl FailureType {
    /// The three types a failure can take, in report order.
    pub const FAILURES: [FailureType; 3] = [
        FailureType::VehPedVehicleInduced,
        FailureType::VehPedPedestrianInduced,
        FailureType::VehVeh,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::VehPedVehicleInduced => "veh_ped_vehicle_induced",
            Self::VehPedPedestrianInduced => "veh_ped_pedestrian_induced",
            Self::VehVeh => "veh_veh",
            Self::None => "none",
        }
    }
}

impl std::fmt::Display for FailureType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FailureType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Self::VehPedVehicleInduced, Self::VehPedPedestrianInduced, Self::VehVeh, Self::None]
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown failure type `{s}`"))
    }
}

/// Labels the failure at the first failure step. A moving lead car inside
/// the crosswalk is blamed; anything else is put on the pedestrian.
pub fn classify_failure<T: Scalar>(traj: &Trajectory<T>, config: &ScenarioConfig<T>, min_speed: T) -> FailureType {
    let Some(t) = traj.failure_step() else {
        return FailureType::None;
    };
    let agents = &traj.states()[t];
    match contact_among(agents, traj.n_cars(), config) {
        Some(Contact::CarCar { .. }) => FailureType::VehVeh,
        _ => {
            let lead = &agents[0];
            let in_crosswalk = (lead.x - config.crosswalk_x).abs() <= config.crosswalk_halfwidth;
            if lead.vx.abs() >= min_speed && in_crosswalk {
                FailureType::VehPedVehicleInduced
            } else {
                FailureType::VehPedPedestrianInduced
            }
        }
    }
}
