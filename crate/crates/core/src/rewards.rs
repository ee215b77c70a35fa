//! Reward functions: the generic likelihood/miss-distance reward, the
//! RSS-augmented variant and the trajectory-dissimilarity variant.

use crate::config::KvFile;
use crate::dissim::{DissimSource, FailureArchive, RepresentativeSeq};
use crate::error::{Error, Result};
use crate::rss::{improper_fraction, ResponseLabel};
use crate::scalar::Scalar;
use crate::scenario::EnvAction;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RewardMode {
    Generic,
    Rss,
    Td,
}

impl RewardMode {
    pub const ALL: [RewardMode; 3] = [RewardMode::Generic, RewardMode::Rss, RewardMode::Td];

    pub fn as_str(&self) -> &'static str {
        match self {
            RewardMode::Generic => "generic",
            RewardMode::Rss => "rss",
            RewardMode::Td => "td",
        }
    }
}

impl std::fmt::Display for RewardMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RewardMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "generic" => Ok(Self::Generic),
            "rss" => Ok(Self::Rss),
            "td" => Ok(Self::Td),
            other => Err(format!("unknown reward mode `{other}`")),
        }
    }
}

/// Diagonal Gaussian over the flattened action vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionModel<T> {
    mean: Vec<T>,
    std: Vec<T>,
}

impl<T: Scalar> ActionModel<T> {
    pub fn new(mean: Vec<T>, std: Vec<T>) -> Result<Self> {
        if mean.len() != std.len() {
            return Err(Error::Interface(format!(
                "mean has {} dims, std has {}",
                mean.len(),
                std.len()
            )));
        }
        if let Some(s) = std.iter().find(|s| !(**s > T::zero()) || !s.is_finite()) {
            return Err(Error::config("reward.sigma", format!("standard deviations must be > 0, got {s}")));
        }
        Ok(Self { mean, std })
    }

    /// Zero-mean model for `n_peds` pedestrian action tuples.
    pub fn per_pedestrian(n_peds: usize, sigma_accel: T, sigma_noise: T) -> Result<Self> {
        let block = [sigma_accel, sigma_accel, sigma_noise, sigma_noise, sigma_noise, sigma_noise];
        let std = (0..n_peds).flat_map(|_| block).collect::<Vec<_>>();
        Self::new(vec![T::zero(); std.len()], std)
    }

    pub fn dims(&self) -> usize {
        self.mean.len()
    }
}

pub fn mahalanobis<T: Scalar>(action: &[T], model: &ActionModel<T>) -> Result<T> {
    if action.len() != model.dims() {
        return Err(Error::Interface(format!(
            "action has {} dims, likelihood model has {}",
            action.len(),
            model.dims()
        )));
    }
    let sq = action
        .iter()
        .zip(model.mean.iter().zip(&model.std))
        .fold(T::zero(), |acc, (a, (m, s))| {
            let z = (*a - *m) / *s;
            acc + z * z
        });
    Ok(sq.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardConfig<T> {
    /// Penalty for ending an episode without a failure.
    pub alpha: T,
    /// Weight of the miss distance (or improper fraction) in that penalty.
    pub beta: T,
    /// Weight of the diversity bonus.
    pub gamma: T,
    /// Improper-fraction threshold for RSS fault.
    pub f_crit: T,
    /// Number of top failures kept and compared against.
    pub k: usize,
    pub sigma_accel: T,
    pub sigma_noise: T,
    /// Segments used by the dissimilarity metric.
    pub n_segments: usize,
    pub dissim_source: DissimSource,
}

impl<T: Scalar> Default for RewardConfig<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(1e4),
            beta: T::lit(1e3),
            gamma: T::one(),
            f_crit: T::lit(0.1),
            k: 25,
            sigma_accel: T::half(),
            sigma_noise: T::lit(0.3),
            n_segments: 10,
            dissim_source: DissimSource::LeadCar,
        }
    }
}

impl<T: Scalar> RewardConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero()) {
            return Err(Error::config("reward.alpha", "must be >= 0"));
        }
        if !(self.beta >= T::zero()) {
            return Err(Error::config("reward.beta", "must be >= 0"));
        }
        if !(self.gamma >= T::zero()) || !self.gamma.is_finite() {
            return Err(Error::config("reward.gamma", "must be finite and >= 0"));
        }
        if !(self.f_crit >= T::zero() && self.f_crit < T::one()) {
            return Err(Error::config("reward.f_crit", "must lie in [0, 1)"));
        }
        if self.k < 1 {
            return Err(Error::config("reward.k", "must be >= 1"));
        }
        if !(self.sigma_accel > T::zero()) || !self.sigma_accel.is_finite() {
            return Err(Error::config("reward.sigma_accel", "must be > 0"));
        }
        if !(self.sigma_noise > T::zero()) || !self.sigma_noise.is_finite() {
            return Err(Error::config("reward.sigma_noise", "must be > 0"));
        }
        if self.n_segments < 1 {
            return Err(Error::config("reward.n_segments", "must be >= 1"));
        }
        Ok(())
    }

    pub fn action_model(&self, n_peds: usize) -> Result<ActionModel<T>> {
        ActionModel::per_pedestrian(n_peds, self.sigma_accel, self.sigma_noise)
    }

    /// Reads `reward.*` keys (other than `reward.mode`) on top of the defaults.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let mut c = Self::default();
        let num = |key: &str, slot: &mut T| -> Result<()> {
            if let Some(v) = kv.get::<f64>(key)? {
                *slot = T::lit(v);
            }
            Ok(())
        };
        num("reward.alpha", &mut c.alpha)?;
        num("reward.beta", &mut c.beta)?;
        num("reward.gamma", &mut c.gamma)?;
        num("reward.f_crit", &mut c.f_crit)?;
        num("reward.sigma_accel", &mut c.sigma_accel)?;
        num("reward.sigma_noise", &mut c.sigma_noise)?;
        c.k = kv.get_or("reward.k", c.k)?;
        c.n_segments = kv.get_or("reward.n_segments", c.n_segments)?;
        if let Some(src) = kv.get_str("reward.dissim_source") {
            c.dissim_source = src
                .parse()
                .map_err(|e: String| Error::config("reward.dissim_source", e))?;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Everything a reward function needs to know about the transition that just
/// happened.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a, T> {
    /// Whether the state reached is in the failure set.
    pub in_failure_set: bool,
    /// Time step of the state reached.
    pub t: usize,
    pub horizon: usize,
    /// Flattened actions of the transition.
    pub action: &'a [T],
    /// Closest lead-car / pedestrian distance of the episode so far (m).
    pub miss_distance: T,
}

impl<T: Scalar> StepContext<'_, T> {
    fn at_horizon(&self) -> bool {
        self.t >= self.horizon
    }
}

pub fn generic_reward<T: Scalar>(ctx: &StepContext<'_, T>, cfg: &RewardConfig<T>, model: &ActionModel<T>) -> Result<T> {
    if ctx.in_failure_set {
        Ok(T::zero())
    } else if ctx.at_horizon() {
        Ok(-cfg.alpha - cfg.beta * ctx.miss_distance)
    } else {
        Ok(-mahalanobis(ctx.action, model)?)
    }
}

/// At-fault failure test on an improper fraction.
pub fn at_fault<T: Scalar>(in_failure_set: bool, f_imp: T, cfg: &RewardConfig<T>) -> bool {
    in_failure_set && f_imp > cfg.f_crit
}

/// Whether a trajectory ended in a failure for which the vehicle is to blame.
#[allow(non_snake_case)]
pub fn in_E_RSS<T: Scalar>(traj: &Trajectory<T>, labels: &[ResponseLabel], cfg: &RewardConfig<T>) -> bool {
    at_fault(traj.is_failure(), improper_fraction::<T>(labels), cfg)
}

/// A failure without fault ends the episode like the horizon does.
pub fn rss_reward<T: Scalar>(
    ctx: &StepContext<'_, T>,
    labels: &[ResponseLabel],
    cfg: &RewardConfig<T>,
    model: &ActionModel<T>,
) -> Result<T> {
    let f_imp = improper_fraction::<T>(labels);
    if at_fault(ctx.in_failure_set, f_imp, cfg) {
        Ok(T::zero())
    } else if ctx.at_horizon() || ctx.in_failure_set {
        Ok(-cfg.alpha - cfg.beta * f_imp)
    } else {
        Ok(-mahalanobis(ctx.action, model)?)
    }
}

pub fn td_reward<T: Scalar>(
    ctx: &StepContext<'_, T>,
    signature: &RepresentativeSeq<T>,
    archive: &FailureArchive<T>,
    cfg: &RewardConfig<T>,
    model: &ActionModel<T>,
) -> Result<T> {
    if ctx.in_failure_set {
        Ok(cfg.gamma * archive.mean_dissimilarity(signature, cfg.k))
    } else {
        generic_reward(ctx, cfg, model)
    }
}

/// Flattened action vector of one step.
pub fn action_vector<T: Scalar>(actions: &[EnvAction<T>]) -> Vec<T> {
    crate::scenario::flatten_actions(actions)
}
