//! Experiment files: a scenario reference plus search, reward and RSS
//! settings, run for every (reward mode, seed) pair.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use super::failure::{classify_failure, FailureType};
use crate::config::KvFile;
use crate::dissim::FailureArchive;
use crate::error::{Error, Result};
use crate::rewards::{RewardConfig, RewardMode};
use crate::rss::{classify_sut, improper_fraction, ResponseLabel, RssParams};
use crate::scenario::ScenarioConfig;
use crate::solver::{run_search, Problem, SearchConfig, SearchStatus};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig<f64>,
    pub scenario_path: Option<PathBuf>,
    pub modes: Vec<RewardMode>,
    pub seeds: Vec<u64>,
    pub reward: RewardConfig<f64>,
    pub rss: RssParams<f64>,
    pub search: SearchConfig,
    /// Lead-car speed (m/s) at or above which a pedestrian failure counts
    /// as vehicle induced.
    pub min_speed: f64,
    pub histogram_bins: usize,
    /// Worker threads for trials; 0 lets the pool decide.
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn new(scenario: ScenarioConfig<f64>) -> Self {
        Self {
            scenario,
            scenario_path: None,
            modes: RewardMode::ALL.to_vec(),
            seeds: vec![0],
            reward: RewardConfig::default(),
            rss: RssParams::default(),
            search: SearchConfig::default(),
            min_speed: 0.5,
            histogram_bins: 10,
            threads: 0,
        }
    }

    /// Reads an experiment file. `scenario` is resolved relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::config("config", format!("{} is not a readable file", path.display())));
        }
        let kv = KvFile::load(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_kv(&kv, base)
    }

    pub fn from_kv(kv: &KvFile, base: &Path) -> Result<Self> {
        let (scenario, scenario_path) = match kv.get_str("scenario") {
            Some(rel) => {
                let p = base.join(rel);
                if !p.exists() {
                    return Err(Error::config("scenario", format!("file {} not found", p.display())));
                }
                let skv = KvFile::load(&p)?;
                let s = ScenarioConfig::from_kv(&skv)?;
                skv.ensure_all_used()?;
                (s, Some(p))
            }
            None => return Err(Error::config("scenario", "missing scenario file reference")),
        };
        let mut c = Self::new(scenario);
        c.scenario_path = scenario_path;
        if let Some(modes) = kv.get_list::<String>("experiment.modes")? {
            c.modes = modes
                .iter()
                .map(|m| m.parse().map_err(|e: String| Error::config("experiment.modes", e)))
                .collect::<Result<_>>()?;
        }
        if let Some(seeds) = kv.get_list::<u64>("experiment.seeds")? {
            c.seeds = seeds;
        }
        c.reward = RewardConfig::from_kv(kv)?;
        c.rss = RssParams::from_kv(kv)?;
        c.search = SearchConfig::from_kv(kv)?;
        c.min_speed = kv.get_or("classify.min_speed", c.min_speed)?;
        c.histogram_bins = kv.get_or("experiment.histogram_bins", c.histogram_bins)?;
        c.threads = kv.get_or("experiment.threads", c.threads)?;
        kv.ensure_all_used()?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.reward.validate()?;
        self.rss.validate()?;
        self.search.validate()?;
        if self.histogram_bins < 1 {
            return Err(Error::config("experiment.histogram_bins", "must be >= 1"));
        }
        if !(self.min_speed >= 0.0) {
            return Err(Error::config("classify.min_speed", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FailureRecord {
    pub trajectory: Trajectory<f64>,
    pub failure_type: FailureType,
    pub f_imp: f64,
    pub labels: Vec<ResponseLabel>,
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub mode: RewardMode,
    pub seed: u64,
    /// Archived failures, best first; empty when the trial errored.
    pub failures: Vec<FailureRecord>,
    pub failure_episodes: usize,
    pub episodes: usize,
    pub status: Option<SearchStatus>,
    pub error: Option<String>,
}

impl Trial {
    pub fn failure_types(&self) -> std::collections::BTreeSet<FailureType> {
        self.failures.iter().map(|f| f.failure_type).collect()
    }

    pub fn mean_f_imp(&self) -> Option<f64> {
        if self.failures.is_empty() {
            None
        } else {
            Some(self.failures.iter().map(|f| f.f_imp).sum::<f64>() / self.failures.len() as f64)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub modes: Vec<RewardMode>,
    pub trials: Vec<Trial>,
    /// Counts per (failure type, mode).
    pub summary: BTreeMap<(FailureType, RewardMode), usize>,
    /// Per mode, counts over uniform f_imp bins on [0, 1].
    pub histogram: BTreeMap<RewardMode, Vec<usize>>,
    pub histogram_bins: usize,
    pub rss: RssParams<f64>,
}

impl ExperimentReport {
    pub fn empty(histogram_bins: usize) -> Self {
        Self {
            modes: Vec::new(),
            trials: Vec::new(),
            summary: BTreeMap::new(),
            histogram: BTreeMap::new(),
            histogram_bins,
            rss: RssParams::default(),
        }
    }

    pub fn count(&self, ty: FailureType, mode: RewardMode) -> usize {
        self.summary.get(&(ty, mode)).copied().unwrap_or(0)
    }

    pub fn total_failures(&self) -> usize {
        self.trials.iter().map(|t| t.failures.len()).sum()
    }

    pub fn trial(&self, mode: RewardMode, seed: u64) -> Option<&Trial> {
        self.trials.iter().find(|t| t.mode == mode && t.seed == seed)
    }

    fn aggregate(&mut self) {
        self.summary.clear();
        self.histogram.clear();
        for m in &self.modes {
            self.histogram.insert(*m, vec![0; self.histogram_bins]);
        }
        for trial in &self.trials {
            for f in &trial.failures {
                *self.summary.entry((f.failure_type, trial.mode)).or_default() += 1;
                let bins = self
                    .histogram
                    .entry(trial.mode)
                    .or_insert_with(|| vec![0; self.histogram_bins]);
                bins[histogram_bin(f.f_imp, self.histogram_bins)] += 1;
            }
        }
    }
}

/// Bin index of `f` among `n` uniform bins on [0, 1]; 1.0 lands in the last.
pub fn histogram_bin(f: f64, n: usize) -> usize {
    ((f * n as f64).floor().max(0.0) as usize).min(n - 1)
}

/// Runs a single (mode, seed) trial.
pub fn run_trial(cfg: &ExperimentConfig, mode: RewardMode, seed: u64) -> Trial {
    let mut trial = Trial {
        mode,
        seed,
        failures: Vec::new(),
        failure_episodes: 0,
        episodes: 0,
        status: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        let problem = Problem::new(cfg.scenario.clone(), mode, cfg.reward.clone(), cfg.rss.clone())?;
        let search = SearchConfig {
            seed: cfg.search.seed.wrapping_add(seed),
            ..cfg.search.clone()
        };
        let outcome = run_search(&problem, &search, FailureArchive::new(cfg.reward.k))?;
        trial.failure_episodes = outcome.failure_episodes;
        trial.episodes = outcome.episodes;
        trial.status = Some(outcome.status);
        for trajectory in outcome.trajectories {
            let labels = classify_sut(&trajectory, 0, &cfg.rss)?;
            trial.failures.push(FailureRecord {
                failure_type: classify_failure(&trajectory, &cfg.scenario, cfg.min_speed),
                f_imp: improper_fraction::<f64>(&labels),
                labels,
                trajectory,
            });
        }
        Ok(())
    })();
    if let Err(e) = result {
        warn!("trial {mode}/seed {seed} failed: {e}");
        trial.failures.clear();
        trial.error = Some(e.to_string());
    } else {
        info!(
            "trial {mode}/seed {seed}: {} failure episodes, {} archived",
            trial.failure_episodes,
            trial.failures.len()
        );
    }
    trial
}

/// Runs every (mode, seed) pair; trials run in parallel and are reported in
/// mode-major, seed-minor order.
pub fn run_experiment_config(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ExperimentReport::empty(cfg.histogram_bins);
    report.rss = cfg.rss.clone();
    if cfg.seeds.is_empty() {
        warn!("experiment has no seeds; nothing to run");
        return Ok(report);
    }
    report.modes = cfg.modes.clone();
    let pairs: Vec<(RewardMode, u64)> = cfg
        .modes
        .iter()
        .flat_map(|m| cfg.seeds.iter().map(move |s| (*m, *s)))
        .collect();
    let run = || pairs.par_iter().map(|(m, s)| run_trial(cfg, *m, *s)).collect::<Vec<_>>();
    report.trials = if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::config("experiment.threads", e.to_string()))?
            .install(run)
    } else {
        run()
    };
    report.aggregate();
    Ok(report)
}

pub fn run_experiment(config_path: &Path) -> Result<ExperimentReport> {
    run_experiment_config(&ExperimentConfig::load(config_path)?)
}
