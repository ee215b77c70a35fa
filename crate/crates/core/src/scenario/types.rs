use crate::scalar::Scalar;

/// Kinematic state of one agent. `x` runs along the road, `y` across it
/// (positive to the left of the direction of travel).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgentState<T> {
    pub vx: T,
    pub vy: T,
    pub x: T,
    pub y: T,
}

impl<T: Scalar> AgentState<T> {
    pub fn new(vx: T, vy: T, x: T, y: T) -> Self {
        Self { vx, vy, x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.vx.is_finite() && self.vy.is_finite() && self.x.is_finite() && self.y.is_finite()
    }

    pub fn position(&self) -> [T; 2] {
        [self.x, self.y]
    }

    pub fn distance_to(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Disturbance applied to one pedestrian for one step: its acceleration and
/// the additive noise on how the vehicles perceive it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnvAction<T> {
    pub ax: T,
    pub ay: T,
    pub nvx: T,
    pub nvy: T,
    pub nx: T,
    pub ny: T,
}

impl<T: Scalar> EnvAction<T> {
    pub const DIM: usize = 6;

    pub fn accel(ax: T, ay: T) -> Self {
        Self {
            ax,
            ay,
            ..Self::zero()
        }
    }

    pub fn zero() -> Self {
        Self {
            ax: T::zero(),
            ay: T::zero(),
            nvx: T::zero(),
            nvy: T::zero(),
            nx: T::zero(),
            ny: T::zero(),
        }
    }

    pub fn to_array(&self) -> [T; 6] {
        [self.ax, self.ay, self.nvx, self.nvy, self.nx, self.ny]
    }

    pub fn from_slice(v: &[T]) -> Option<Self> {
        match *v {
            [ax, ay, nvx, nvy, nx, ny] => Some(Self {
                ax,
                ay,
                nvx,
                nvy,
                nx,
                ny,
            }),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Flattens one action per pedestrian into a single vector.
pub fn flatten_actions<T: Scalar>(actions: &[EnvAction<T>]) -> Vec<T> {
    actions.iter().flat_map(|a| a.to_array()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentKind {
    Car,
    Pedestrian,
}

/// Stable agent label used in exports: `car0`, `car1`, `ped0`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AgentId {
    pub kind: AgentKind,
    pub index: usize,
}

impl AgentId {
    pub fn car(index: usize) -> Self {
        Self {
            kind: AgentKind::Car,
            index,
        }
    }

    pub fn ped(index: usize) -> Self {
        Self {
            kind: AgentKind::Pedestrian,
            index,
        }
    }
}

impl std::fmt::Display for AgentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            AgentKind::Car => write!(f, "car{}", self.index),
            AgentKind::Pedestrian => write!(f, "ped{}", self.index),
        }
    }
}

impl std::str::FromStr for AgentId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = if let Some(r) = s.strip_prefix("car") {
            (AgentKind::Car, r)
        } else if let Some(r) = s.strip_prefix("ped") {
            (AgentKind::Pedestrian, r)
        } else {
            return Err(format!("unknown agent id `{s}`"));
        };
        let index = rest
            .parse()
            .map_err(|_| format!("unknown agent id `{s}`"))?;
        Ok(Self { kind, index })
    }
}
