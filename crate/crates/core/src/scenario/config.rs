use super::idm::IdmParams;
use super::types::AgentState;
use crate::config::KvFile;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureThresholds<T> {
    /// Lead car / pedestrian: both |Δx| and |Δy| below this (m).
    pub car_ped: T,
    /// Car / car: |Δx| below this (m).
    pub car_car: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<T> {
    pub dt: T,
    pub horizon: usize,
    pub car_inits: Vec<AgentState<T>>,
    pub ped_inits: Vec<AgentState<T>>,
    pub idm: IdmParams<T>,
    pub crosswalk_x: T,
    pub crosswalk_halfwidth: T,
    pub thresholds: FailureThresholds<T>,
    /// Per-axis bound on pedestrian speed (m/s).
    pub ped_speed_max: T,
    /// Obstacles within this lateral offset of a car are considered in its lane.
    pub lane_halfwidth: T,
}

impl<T: Scalar> ScenarioConfig<T> {
    fn with_agents(car_inits: Vec<AgentState<T>>, ped_inits: Vec<AgentState<T>>) -> Self {
        Self {
            dt: T::lit(0.1),
            horizon: 50,
            car_inits,
            ped_inits,
            idm: IdmParams::default(),
            crosswalk_x: T::zero(),
            crosswalk_halfwidth: T::lit(2.0),
            thresholds: FailureThresholds {
                car_ped: T::lit(0.5),
                car_car: T::lit(0.5),
            },
            ped_speed_max: T::lit(2.0),
            lane_halfwidth: T::lit(1.5),
        }
    }

    /// Two cars approaching a crosswalk with one pedestrian waiting on each side.
    pub fn two_car_two_ped() -> Self {
        let s = |vx: f64, vy: f64, x: f64, y: f64| {
            AgentState::new(T::lit(vx), T::lit(vy), T::lit(x), T::lit(y))
        };
        Self::with_agents(
            vec![s(11.1, 0.0, -20.0, 0.0), s(12.5, 0.0, -37.0, 0.0)],
            vec![s(0.0, 0.5, 0.0, -3.0), s(0.0, -0.5, 0.0, 3.0)],
        )
    }

    /// The lead car and the first pedestrian of [`Self::two_car_two_ped`].
    pub fn one_car_one_ped() -> Self {
        let mut cfg = Self::two_car_two_ped();
        cfg.car_inits.truncate(1);
        cfg.ped_inits.truncate(1);
        cfg
    }

    pub fn n_agents(&self) -> usize {
        self.car_inits.len() + self.ped_inits.len()
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: T, field: &str| {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be finite and > 0, got {v}")))
            }
        };
        pos(self.dt, "dt")?;
        if self.horizon < 1 {
            return Err(Error::config("horizon", "must be >= 1"));
        }
        if self.car_inits.is_empty() {
            return Err(Error::config("car", "at least one car is required"));
        }
        if self.ped_inits.is_empty() {
            return Err(Error::config("ped", "at least one pedestrian is required"));
        }
        for (i, c) in self.car_inits.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::config(format!("car[{i}]"), "non-finite state"));
            }
        }
        for (i, p) in self.ped_inits.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::config(format!("ped[{i}]"), "non-finite state"));
            }
        }
        pos(self.idm.v0, "idm.v0")?;
        pos(self.idm.a, "idm.a")?;
        pos(self.idm.b, "idm.b")?;
        pos(self.idm.b_max, "idm.b_max")?;
        pos(self.idm.delta, "idm.delta")?;
        if !(self.idm.s0 >= T::zero()) {
            return Err(Error::config("idm.s0", "must be >= 0"));
        }
        if !(self.idm.time_headway >= T::zero()) {
            return Err(Error::config("idm.time_headway", "must be >= 0"));
        }
        pos(self.thresholds.car_ped, "thresholds.car_ped")?;
        pos(self.thresholds.car_car, "thresholds.car_car")?;
        pos(self.ped_speed_max, "ped_speed_max")?;
        pos(self.lane_halfwidth, "lane_halfwidth")?;
        if !(self.crosswalk_halfwidth >= T::zero()) || !self.crosswalk_x.is_finite() {
            return Err(Error::config("crosswalk", "halfwidth must be >= 0"));
        }
        Ok(())
    }

    /// Reads a scenario from configuration keys. Agents must be listed
    /// explicitly; every other key falls back to the defaults above.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let read_agents = |prefix: &str| -> Result<Vec<AgentState<T>>> {
            let idx = kv.indices(prefix)?;
            for (expected, &i) in idx.iter().enumerate() {
                if expected != i {
                    return Err(Error::config(
                        format!("{prefix}[{expected}]"),
                        "agent indices must be contiguous from 0",
                    ));
                }
            }
            idx.iter()
                .map(|i| {
                    let f = |name: &str| -> Result<T> {
                        Ok(T::lit(kv.get_or(&format!("{prefix}[{i}].{name}"), 0.0)?))
                    };
                    Ok(AgentState::new(f("vx")?, f("vy")?, f("x")?, f("y")?))
                })
                .collect()
        };
        let mut cfg = Self::with_agents(read_agents("car")?, read_agents("ped")?);
        let num = |key: &str, slot: &mut T| -> Result<()> {
            if let Some(v) = kv.get::<f64>(key)? {
                *slot = T::lit(v);
            }
            Ok(())
        };
        num("dt", &mut cfg.dt)?;
        if let Some(h) = kv.get::<usize>("horizon")? {
            cfg.horizon = h;
        }
        num("idm.v0", &mut cfg.idm.v0)?;
        num("idm.a", &mut cfg.idm.a)?;
        num("idm.b", &mut cfg.idm.b)?;
        num("idm.b_max", &mut cfg.idm.b_max)?;
        num("idm.s0", &mut cfg.idm.s0)?;
        num("idm.time_headway", &mut cfg.idm.time_headway)?;
        num("idm.delta", &mut cfg.idm.delta)?;
        num("thresholds.car_ped", &mut cfg.thresholds.car_ped)?;
        num("thresholds.car_car", &mut cfg.thresholds.car_car)?;
        num("crosswalk.x", &mut cfg.crosswalk_x)?;
        num("crosswalk.halfwidth", &mut cfg.crosswalk_halfwidth)?;
        num("ped_speed_max", &mut cfg.ped_speed_max)?;
        num("lane_halfwidth", &mut cfg.lane_halfwidth)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_agents_and_overrides() {
        let kv = KvFile::parse(
            "dt = 0.05\nhorizon = 80\ncar[0].vx = 10\ncar[0].x = -15\nped[0].y = -2\nped[0].vy = 0.4\nidm.s0 = 3\n",
            "s.cfg",
        )
        .unwrap();
        let cfg = ScenarioConfig::<f64>::from_kv(&kv).unwrap();
        kv.ensure_all_used().unwrap();
        assert_eq!(cfg.dt, 0.05);
        assert_eq!(cfg.horizon, 80);
        assert_eq!(cfg.car_inits, vec![AgentState::new(10.0, 0.0, -15.0, 0.0)]);
        assert_eq!(cfg.ped_inits, vec![AgentState::new(0.0, 0.4, 0.0, -2.0)]);
        assert_eq!(cfg.idm.s0, 3.0);
    }

    #[test]
    fn missing_pedestrians_names_field() {
        let kv = KvFile::parse("car[0].vx = 10\n", "s.cfg").unwrap();
        match ScenarioConfig::<f64>::from_kv(&kv) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "ped"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_positive_dt_rejected() {
        let mut cfg = ScenarioConfig::<f64>::two_car_two_ped();
        cfg.dt = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::Config { field, .. }) if field == "dt"));
    }

    #[test]
    fn gaps_in_indices_rejected() {
        let kv = KvFile::parse("car[0].vx = 1\nped[1].y = 2\n", "s.cfg").unwrap();
        assert!(ScenarioConfig::<f64>::from_kv(&kv).is_err());
    }
}
