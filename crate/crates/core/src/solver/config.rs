use crate::config::KvFile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Mcts,
    Random,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mcts" => Ok(Self::Mcts),
            "random" => Ok(Self::Random),
            other => Err(format!("unknown search algorithm `{other}`")),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Mcts => "mcts",
            Self::Random => "random",
        })
    }
}

/// Uniform sampling box for one pedestrian's action tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionBounds {
    pub accel: (f64, f64),
    pub noise: (f64, f64),
}

impl Default for ActionBounds {
    fn default() -> Self {
        Self {
            accel: (-1.0, 1.0),
            noise: (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub algo: Algorithm,
    /// Episodes simulated.
    pub budget: usize,
    /// Deepest tree/rollout step; `None` means the scenario horizon.
    pub max_depth: Option<usize>,
    pub c_ucb: f64,
    pub c_pw: f64,
    pub alpha_pw: f64,
    pub bounds: ActionBounds,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            algo: Algorithm::Mcts,
            budget: 1000,
            max_depth: None,
            c_ucb: 1.41,
            c_pw: 1.0,
            alpha_pw: 0.5,
            bounds: ActionBounds::default(),
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::config("search.budget", "must be >= 1"));
        }
        if !(self.alpha_pw > 0.0 && self.alpha_pw < 1.0) {
            return Err(Error::config("search.alpha_pw", "must lie in (0, 1)"));
        }
        if !(self.c_pw > 0.0) || !self.c_pw.is_finite() {
            return Err(Error::config("search.c_pw", "must be > 0"));
        }
        if !(self.c_ucb >= 0.0) || !self.c_ucb.is_finite() {
            return Err(Error::config("search.c_ucb", "must be >= 0"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::config("search.max_depth", "must be >= 1"));
        }
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !ok(self.bounds.accel) || !ok(self.bounds.noise) {
            return Err(Error::config("search.bounds", "empty sampling interval"));
        }
        Ok(())
    }

    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let mut c = Self::default();
        if let Some(a) = kv.get_str("search.algo") {
            c.algo = a.parse().map_err(|e: String| Error::config("search.algo", e))?;
        }
        c.budget = kv.get_or("search.budget", c.budget)?;
        c.max_depth = kv.get("search.max_depth")?;
        c.c_ucb = kv.get_or("search.c_ucb", c.c_ucb)?;
        c.c_pw = kv.get_or("search.c_pw", c.c_pw)?;
        c.alpha_pw = kv.get_or("search.alpha_pw", c.alpha_pw)?;
        c.seed = kv.get_or("search.seed", c.seed)?;
        c.bounds.accel.0 = kv.get_or("search.accel_min", c.bounds.accel.0)?;
        c.bounds.accel.1 = kv.get_or("search.accel_max", c.bounds.accel.1)?;
        c.bounds.noise.0 = kv.get_or("search.noise_min", c.bounds.noise.0)?;
        c.bounds.noise.1 = kv.get_or("search.noise_max", c.bounds.noise.1)?;
        c.validate()?;
        Ok(c)
    }
}
